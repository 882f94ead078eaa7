import argparse
import logging
import sys

from ..core.chern import slope
from ..core.futaki import equal_slope_criterion, futaki_invariant
from ..core.stability import gieseker_compare, mumford_compare, ruled_scan
from ..utils.config import Config
from ..utils.constants import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION_FAILED, OutputFormat
from ..utils.errors import ConfigError, SlopeMismatchError
from ..utils.report import render
from .commands.family import (example_run_config, make_ruled_example, ruled_cases, sweep)
from .commands.verification import run_verification_suite
from .run_config import emit_config, load_config, parse_range

logger = logging.getLogger(__name__)


class _ArgumentParser(argparse.ArgumentParser):
    """使い方の誤りは終了コード 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML run configuration")
    common.add_argument("--window", type=int, help=f"scan window (default {Config.DEFAULT_WINDOW})")
    common.add_argument("--format", choices=[f.value for f in OutputFormat],
                        help=f"report format (default {Config.DEFAULT_FORMAT})")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for debug output")
    return common


def build_parser():
    common = _common_options()
    parser = _ArgumentParser(
        prog="stability-calc",
        description="Exact Futaki invariant and slope/Gieseker stability checks on surfaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", aliases=["verify-paper"], parents=[common],
                   help="run the built-in numerical checks")
    sub.add_parser("futaki", parents=[common], help="Futaki invariant of a test configuration")
    sub.add_parser("gieseker", parents=[common], help="slope and Gieseker comparison of F in E")
    sub.add_parser("scan", parents=[common], help="scan line subbundles of a ruled surface")

    example = sub.add_parser("example", parents=[common], help="ruled surface example")
    example.add_argument("--g", type=int, default=Config.DEFAULT_GENUS)
    example.add_argument("--m", type=int, default=Config.DEFAULT_M)
    example.add_argument("--deg-v", type=int, default=Config.DEFAULT_DEG_V)
    example.add_argument("--emit-config", action="store_true",
                         help="print the example as a YAML configuration")

    sweep_parser = sub.add_parser("sweep", parents=[common], help="sweep the ruled family")
    sweep_parser.add_argument("--g", metavar="A..B", help="genus range")
    sweep_parser.add_argument("--m", metavar="C..D", help="m range")
    sweep_parser.add_argument("--workers", type=int, help="worker processes")
    return parser


def _setup_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(format=Config.LOG_FORMAT, level=level)
    logging.getLogger("src").setLevel(level)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _default_example():
    return make_ruled_example(Config.DEFAULT_GENUS, Config.DEFAULT_M)


def _test_config(config):
    if config is None:
        return _default_example().test_config
    return config.build_test_config()


def _window(args, config):
    if args.window is not None:
        return args.window
    return config.options.window if config else Config.DEFAULT_WINDOW


def _criterion(tc, report):
    try:
        return equal_slope_criterion(tc, report)
    except SlopeMismatchError as e:
        logger.info("%s", e)
        return None


def _verify(args, config):
    suite = run_verification_suite()
    code = EXIT_OK if suite.passed else EXIT_VERIFICATION_FAILED
    return suite, "Verification", code


def _futaki(args, config):
    tc = _test_config(config)
    report = futaki_invariant(tc)
    return {"futaki": report, "criterion": _criterion(tc, report)}, "Futaki invariant", EXIT_OK


def _gieseker(args, config):
    tc = _test_config(config)
    result = {
        "slope_F": slope(tc.F, tc.geom, tc.omega),
        "slope_E": slope(tc.E, tc.geom, tc.omega),
        "mumford": mumford_compare(tc.F, tc.E, tc.geom, tc.omega),
        "gieseker": gieseker_compare(tc.F, tc.E, tc.geom, tc.omega),
    }
    return result, "Gieseker comparison", EXIT_OK


def _scan(args, config):
    if config is None:
        example = _default_example()
        sheaf, geom, omega = example.E, example.geom, example.omega
        cases = ruled_cases(example.g, example.m)
    else:
        tc = config.build_test_config()
        sheaf, geom, omega = tc.E, tc.geom, tc.omega
        cases = list(config.options.cases)
        if not cases:
            raise ConfigError("No scan cases given", field="options.cases")
    report = ruled_scan(sheaf, cases, geom, omega, _window(args, config))
    return report, "Line subbundle scan", EXIT_OK


def _example(args, config):
    example = make_ruled_example(args.g, args.m, args.deg_v)
    if args.emit_config:
        return emit_config(example_run_config(example)), None, EXIT_OK

    geom, omega = example.geom, example.omega
    report = futaki_invariant(example.test_config)
    result = {
        "g": example.g,
        "m": example.m,
        "omega": omega,
        "c1": {"F1": example.F1.c1, "F2": example.F2.c1, "E": example.E.c1},
        "slope_F2": slope(example.F2, geom, omega),
        "slope_E": slope(example.E, geom, omega),
        "gieseker_margin": gieseker_compare(example.F2, example.E, geom, omega).margin,
        "futaki": report,
        "criterion": _criterion(example.test_config, report),
        "scan": ruled_scan(example.E, ruled_cases(example.g, example.m), geom, omega,
                           _window(args, config)),
    }
    return result, f"Ruled example g={example.g} m={example.m}", EXIT_OK


def _sweep(args, config):
    options = config.options if config else None
    g_range = options.g_range if options else Config.DEFAULT_G_RANGE
    m_range = options.m_range if options else Config.DEFAULT_M_RANGE
    workers = options.workers if options else Config.DEFAULT_WORKERS

    g_values = parse_range(args.g) if args.g else range(g_range[0], g_range[1] + 1)
    m_values = parse_range(args.m) if args.m else range(m_range[0], m_range[1] + 1)
    if args.workers is not None:
        workers = args.workers
    rows = sweep(g_values, m_values, workers)
    return rows, "Sweep", EXIT_OK


COMMANDS = {
    "verify": _verify,
    "verify-paper": _verify,
    "futaki": _futaki,
    "gieseker": _gieseker,
    "scan": _scan,
    "example": _example,
    "sweep": _sweep,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)

    try:
        config = load_config(args.config) if args.config else None
        result, title, code = COMMANDS[args.command](args, config)
    except ConfigError as e:
        logger.error("Configuration error (%s): %s", e.kind, e)
        return EXIT_USAGE
    except (OSError, ValueError) as e:
        logger.error("%s", e)
        return EXIT_USAGE

    if isinstance(result, str):
        print(result, end="")
        return code

    output_format = args.format
    if output_format is None:
        output_format = config.options.output_format if config else Config.DEFAULT_FORMAT
    print(render(result, output_format, title))
    return code

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import yaml

from ..core.chern import NSClass, SheafData, SurfaceGeometry
from ..core.exactcore import format_rat, parse_rat
from ..core.futaki import TestConfig
from ..core.stability import ScanCase
from ..utils.config import Config
from ..utils.constants import Nonproduct, OutputFormat
from ..utils.errors import (ConfigDimensionError, ConfigError, ConfigSyntaxError,
                            DuplicateKeyError, MalformedRationalError, MissingKeyError,
                            NonSymmetricMatrixError, RangeError, UnknownKeyError,
                            UnresolvedNameError)

logger = logging.getLogger(__name__)

_RANGE_PATTERN = re.compile(r"^\s*(-?[0-9]+)\s*\.\.\s*(-?[0-9]+)\s*$")

TOP_LEVEL_KEYS = ("geometry", "sheaves", "polarization", "testconfig", "options")
GEOMETRY_KEYS = ("ns_rank", "basis", "intersection", "c1B", "todd2", "c2B")
SHEAF_KEYS = ("rank", "c1", "ch2", "line")
TESTCONFIG_KEYS = ("E", "F", "nonproduct")
OPTION_KEYS = ("window", "format", "g_range", "m_range", "workers", "cases")
CASE_KEYS = ("x", "y", "exclude_corner")


def parse_range(text):
    """"A..B" を両端を含む range に変換"""
    match = _RANGE_PATTERN.match(str(text))
    if not match:
        raise RangeError(f"Malformed range {text!r}, expected A..B")
    low, high = (int(v) for v in match.groups())
    if low > high:
        raise RangeError(f"Empty range {text!r}")
    return range(low, high + 1)


@dataclass(frozen=True)
class TestConfigSpec:
    __test__ = False

    E: str
    F: str
    nonproduct: Nonproduct = Nonproduct.UNKNOWN


@dataclass(frozen=True)
class RunOptions:
    window: int = Config.DEFAULT_WINDOW
    output_format: OutputFormat = OutputFormat(Config.DEFAULT_FORMAT)
    g_range: Tuple[int, int] = Config.DEFAULT_G_RANGE
    m_range: Tuple[int, int] = Config.DEFAULT_M_RANGE
    workers: int = Config.DEFAULT_WORKERS
    cases: Tuple[ScanCase, ...] = ()


@dataclass
class RunConfig:
    geometry: SurfaceGeometry
    sheaves: Dict[str, SheafData] = field(default_factory=dict)
    polarization: Optional[NSClass] = None
    testconfig: Optional[TestConfigSpec] = None
    options: RunOptions = field(default_factory=RunOptions)

    def build_test_config(self):
        if self.testconfig is None:
            raise ConfigError("No testconfig section", field="testconfig")
        if self.polarization is None:
            raise ConfigError("No polarization given", field="polarization")
        spec = self.testconfig
        return TestConfig(self.sheaves[spec.E], self.sheaves[spec.F], self.geometry,
                          self.polarization, spec.nonproduct)


# ---------------------------------------------------------------------------
# Node helpers (composed YAML keeps line marks)
# ---------------------------------------------------------------------------

def _line(node):
    return node.start_mark.line + 1


def _mapping(node, where, allowed, required=()):
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("Expected a mapping", _line(node), where)
    items = {}
    for key_node, value_node in node.value:
        key = str(key_node.value)
        if key not in allowed:
            raise UnknownKeyError(f"Unknown key {key!r}", _line(key_node), f"{where}.{key}")
        if key in items:
            raise DuplicateKeyError(f"Duplicate key {key!r}", _line(key_node), f"{where}.{key}")
        items[key] = value_node
    for key in required:
        if key not in items:
            raise MissingKeyError(f"Missing key {key!r}", _line(node), f"{where}.{key}")
    return items


def _named_mapping(node, where):
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("Expected a mapping", _line(node), where)
    entries, seen = [], set()
    for key_node, value_node in node.value:
        name = str(key_node.value)
        if name in seen:
            raise DuplicateKeyError(f"Duplicate name {name!r}", _line(key_node), f"{where}.{name}")
        seen.add(name)
        entries.append((name, value_node, _line(key_node)))
    return entries


def _sequence(node, where):
    if not isinstance(node, yaml.SequenceNode):
        raise ConfigError("Expected a list", _line(node), where)
    return list(node.value)


def _scalar(node, where):
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError("Expected a scalar", _line(node), where)
    return str(node.value)


def _rational(node, where):
    text = _scalar(node, where)
    try:
        return parse_rat(text)
    except ValueError as exc:
        raise MalformedRationalError(str(exc), _line(node), where) from None


def _integer(node, where):
    text = _scalar(node, where)
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"Expected an integer, got {text!r}", _line(node), where) from None


def _boolean(node, where):
    text = _scalar(node, where).lower()
    if text in ("true", "yes", "on"):
        return True
    if text in ("false", "no", "off"):
        return False
    raise ConfigError(f"Expected a boolean, got {text!r}", _line(node), where)


def _ns_class(node, where, rank):
    coords = [_rational(item, f"{where}[{j}]")
              for j, item in enumerate(_sequence(node, where))]
    if len(coords) != rank:
        raise ConfigDimensionError(f"Expected {rank} coordinates, got {len(coords)}",
                                   _line(node), where)
    return NSClass(tuple(coords))


def _range(node, where):
    try:
        values = parse_range(_scalar(node, where))
    except RangeError as exc:
        raise ConfigError(str(exc), _line(node), where) from None
    return values[0], values[-1]


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------

def _parse_geometry(node):
    items = _mapping(node, "geometry", GEOMETRY_KEYS,
                     required=("ns_rank", "basis", "intersection", "c1B", "todd2"))
    rank = _integer(items["ns_rank"], "geometry.ns_rank")
    if rank < 1:
        raise ConfigDimensionError("ns_rank must be positive", _line(items["ns_rank"]),
                                   "geometry.ns_rank")

    basis = [_scalar(item, "geometry.basis") for item in _sequence(items["basis"], "geometry.basis")]
    if len(basis) != rank:
        raise ConfigDimensionError(f"Expected {rank} basis labels, got {len(basis)}",
                                   _line(items["basis"]), "geometry.basis")

    row_nodes = _sequence(items["intersection"], "geometry.intersection")
    if len(row_nodes) != rank:
        raise ConfigDimensionError(f"Expected {rank} intersection rows, got {len(row_nodes)}",
                                   _line(items["intersection"]), "geometry.intersection")
    rows = [tuple(_ns_class(row, f"geometry.intersection[{j}]", rank).coords)
            for j, row in enumerate(row_nodes)]
    for a in range(rank):
        for b in range(a + 1, rank):
            if rows[a][b] != rows[b][a]:
                raise NonSymmetricMatrixError(
                    f"Entries ({a},{b}) and ({b},{a}) differ: {rows[a][b]} vs {rows[b][a]}",
                    _line(row_nodes[a]), "geometry.intersection")

    c2B = None
    if "c2B" in items:
        c2B = _rational(items["c2B"], "geometry.c2B")
    geometry = SurfaceGeometry(
        ns_rank=rank,
        basis_labels=tuple(basis),
        intersection=tuple(rows),
        c1B=_ns_class(items["c1B"], "geometry.c1B", rank),
        todd2=_rational(items["todd2"], "geometry.todd2"),
        c2B=c2B,
    )
    if geometry.noether_consistent() is False:
        logger.warning("todd2 does not satisfy Noether's formula with the given c2B")
    return geometry


def _parse_sheaves(node, geometry):
    sheaves = {}
    for name, value, line in _named_mapping(node, "sheaves"):
        where = f"sheaves.{name}"
        items = _mapping(value, where, SHEAF_KEYS)
        if "line" in items:
            if len(items) > 1:
                raise ConfigError("'line' cannot be combined with rank/c1/ch2", line, where)
            sheaves[name] = SheafData.line(_ns_class(items["line"], f"{where}.line",
                                                     geometry.ns_rank), geometry)
            continue
        for key in ("rank", "c1", "ch2"):
            if key not in items:
                raise MissingKeyError(f"Missing key {key!r}", line, f"{where}.{key}")
        rank = _integer(items["rank"], f"{where}.rank")
        if rank < 1:
            raise ConfigError("rank must be positive", _line(items["rank"]), f"{where}.rank")
        sheaves[name] = SheafData(rank, _ns_class(items["c1"], f"{where}.c1", geometry.ns_rank),
                                  _rational(items["ch2"], f"{where}.ch2"))
    return sheaves


def _parse_testconfig(node, sheaves):
    items = _mapping(node, "testconfig", TESTCONFIG_KEYS, required=("E", "F"))
    names = {}
    for key in ("E", "F"):
        name = _scalar(items[key], f"testconfig.{key}")
        if name not in sheaves:
            raise UnresolvedNameError(f"Unknown sheaf {name!r}", _line(items[key]),
                                      f"testconfig.{key}")
        names[key] = name
    nonproduct = Nonproduct.UNKNOWN
    if "nonproduct" in items:
        text = _scalar(items["nonproduct"], "testconfig.nonproduct").lower()
        text = {"true": "yes", "false": "no"}.get(text, text)
        try:
            nonproduct = Nonproduct(text)
        except ValueError:
            raise ConfigError(f"nonproduct must be yes/no/unknown, got {text!r}",
                              _line(items["nonproduct"]), "testconfig.nonproduct") from None
    return TestConfigSpec(names["E"], names["F"], nonproduct)


def _parse_options(node):
    items = _mapping(node, "options", OPTION_KEYS)
    kwargs = {}
    if "window" in items:
        kwargs["window"] = _integer(items["window"], "options.window")
        if kwargs["window"] < 0:
            raise ConfigError("window must be nonnegative", _line(items["window"]),
                              "options.window")
    if "format" in items:
        text = _scalar(items["format"], "options.format")
        try:
            kwargs["output_format"] = OutputFormat(text)
        except ValueError:
            raise ConfigError(f"Unknown output format {text!r}", _line(items["format"]),
                              "options.format") from None
    if "g_range" in items:
        kwargs["g_range"] = _range(items["g_range"], "options.g_range")
    if "m_range" in items:
        kwargs["m_range"] = _range(items["m_range"], "options.m_range")
    if "workers" in items:
        kwargs["workers"] = _integer(items["workers"], "options.workers")
    if "cases" in items:
        cases = []
        for j, case_node in enumerate(_sequence(items["cases"], "options.cases")):
            where = f"options.cases[{j}]"
            case = _mapping(case_node, where, CASE_KEYS, required=("x", "y"))
            exclude = _boolean(case["exclude_corner"], f"{where}.exclude_corner") \
                if "exclude_corner" in case else False
            cases.append(ScanCase(_integer(case["x"], f"{where}.x"),
                                  _integer(case["y"], f"{where}.y"), exclude))
        kwargs["cases"] = tuple(cases)
    return RunOptions(**kwargs)


def parse_config(text):
    """YAML テキストを RunConfig に変換（エラーは行番号とフィールド付き）"""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigSyntaxError(str(exc), mark.line + 1 if mark else None) from None
    if root is None:
        raise MissingKeyError("Empty configuration", None, "geometry")

    sections = _mapping(root, "config", TOP_LEVEL_KEYS, required=("geometry",))
    geometry = _parse_geometry(sections["geometry"])
    sheaves = _parse_sheaves(sections["sheaves"], geometry) if "sheaves" in sections else {}

    polarization = None
    if "polarization" in sections:
        polarization = _ns_class(sections["polarization"], "polarization", geometry.ns_rank)

    testconfig = None
    if "testconfig" in sections:
        if polarization is None:
            raise MissingKeyError("testconfig needs a polarization", _line(sections["testconfig"]),
                                  "polarization")
        testconfig = _parse_testconfig(sections["testconfig"], sheaves)

    options = _parse_options(sections["options"]) if "options" in sections else RunOptions()
    config = RunConfig(geometry, sheaves, polarization, testconfig, options)

    if testconfig is not None:
        try:
            config.build_test_config()
        except ValueError as exc:
            raise ConfigError(str(exc), _line(sections["testconfig"]), "testconfig") from None
    return config


def load_config(file_path):
    """設定ファイルの読み込み"""
    if not str(file_path).endswith(Config.CONFIG_SUFFIXES):
        logger.warning("%s does not look like a YAML file", file_path)
    with open(file_path, "r", encoding="utf-8") as f:
        text = f.read()
    logger.info("Loaded configuration %s", file_path)
    return parse_config(text)


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def _class_list(ns_class):
    return [format_rat(c) for c in ns_class.coords]


def config_to_dict(config):
    geometry = config.geometry
    data = {
        "geometry": {
            "ns_rank": geometry.ns_rank,
            "basis": list(geometry.basis_labels),
            "intersection": [[format_rat(x) for x in row] for row in geometry.intersection],
            "c1B": _class_list(geometry.c1B),
            "todd2": format_rat(geometry.todd2),
        },
        "sheaves": {
            name: {"rank": sheaf.rank, "c1": _class_list(sheaf.c1), "ch2": format_rat(sheaf.ch2)}
            for name, sheaf in config.sheaves.items()
        },
    }
    if geometry.c2B is not None:
        data["geometry"]["c2B"] = format_rat(geometry.c2B)
    if config.polarization is not None:
        data["polarization"] = _class_list(config.polarization)
    if config.testconfig is not None:
        data["testconfig"] = {
            "E": config.testconfig.E,
            "F": config.testconfig.F,
            "nonproduct": config.testconfig.nonproduct.value,
        }
    options = config.options
    data["options"] = {
        "window": options.window,
        "format": options.output_format.value,
        "g_range": f"{options.g_range[0]}..{options.g_range[1]}",
        "m_range": f"{options.m_range[0]}..{options.m_range[1]}",
        "workers": options.workers,
        "cases": [{"x": c.bound_x, "y": c.bound_y, "exclude_corner": c.exclude_corner}
                  for c in options.cases],
    }
    return data


def emit_config(config):
    """正規化した YAML を出力（有理数は常に文字列）"""
    return yaml.safe_dump(config_to_dict(config), sort_keys=False, allow_unicode=True)

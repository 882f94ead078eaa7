import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Tuple

from ...core.chern import NSClass, SheafData, SurfaceGeometry, extension_sum, tensor_line
from ...core.exactcore import Rat
from ...core.futaki import TestConfig, equal_slope_criterion, futaki_invariant
from ...core.stability import ScanCase, gieseker_compare
from ...utils.config import Config
from ...utils.constants import Nonproduct, Verdict
from ...utils.errors import RangeError
from ..run_config import RunConfig, RunOptions, TestConfigSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RuledExample:
    """線織面上の拡大 0 -> F2 -> E -> F1⊗F2 -> 0 とその偏極"""
    g: int
    m: int
    geom: SurfaceGeometry
    omega: NSClass
    E: SheafData
    F1: SheafData
    F2: SheafData
    test_config: TestConfig


def make_ruled_example(g, m, deg_v=Config.DEFAULT_DEG_V):
    """種数 g の曲線上の線織面と L = b + (m+1) f での例を組み立てる"""
    if g < 2:
        raise RangeError(f"Genus must be at least 2, got {g}")
    if m < 0:
        raise RangeError(f"m must be nonnegative, got {m}")

    geom = SurfaceGeometry.ruled(g, deg_v)
    omega = NSClass((1, m + 1))
    F1 = SheafData.line(NSClass((-1, m + 1)), geom)
    F2 = SheafData.line(NSClass((-1, g - 3 - m)), geom)
    E = extension_sum(F2, tensor_line(F1, F2.c1, geom))
    # the extension class is nonzero
    tc = TestConfig(E, F2, geom, omega, Nonproduct.YES)
    return RuledExample(g, m, geom, omega, E, F1, F2, tc)


def ruled_cases(g, m):
    """直線部分束 O(x b + y f) の二つの場合分け

    1つ目は x <= -1, y <= g-3-m。2つ目は x <= -2, y <= g-2 で
    角 (-2, g-2) は商そのものの類なので除外する。
    """
    return [ScanCase(-1, g - 3 - m), ScanCase(-2, g - 2, exclude_corner=True)]


def make_abelian_like_example():
    """c1(B) = 0, todd2 = 0 の曲面上で F と G の χ が一致する例"""
    geom = SurfaceGeometry(
        ns_rank=2,
        basis_labels=("b", "f"),
        intersection=((0, 1), (1, 0)),
        c1B=NSClass((0, 0)),
        todd2=0,
    )
    omega = NSClass((1, 1))
    F = SheafData.line(NSClass((1, -1)), geom)
    G = SheafData.line(NSClass((-1, 1)), geom)
    return TestConfig(extension_sum(F, G), F, geom, omega, Nonproduct.YES)


def make_split_example():
    """同じ曲面上の O ⊕ O(b+f)（部分束は O）"""
    tc = make_abelian_like_example()
    F = SheafData.structure_sheaf(tc.geom)
    G = SheafData.line(NSClass((1, 1)), tc.geom)
    return TestConfig(extension_sum(F, G), F, tc.geom, tc.omega, Nonproduct.NO)


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    g: int
    m: int
    Q: Rat
    C: Tuple[Rat, Rat, Rat, Rat]
    verdict: Verdict
    futaki_verdict: Verdict
    gieseker_margin: Rat
    flagged: bool


def sweep_row(params):
    """(g, m) 一組分の計算（プロセスプールから呼ばれる）"""
    g, m = params
    example = make_ruled_example(g, m)
    report = futaki_invariant(example.test_config)
    criterion = equal_slope_criterion(example.test_config, report)
    margin = gieseker_compare(example.F2, example.E, example.geom, example.omega).margin
    logger.debug("g=%d m=%d Q=%s", g, m, criterion.Q)
    return SweepRow(
        g=g,
        m=m,
        Q=criterion.Q,
        C=report.C,
        verdict=criterion.verdict,
        futaki_verdict=report.verdict,
        gieseker_margin=margin,
        flagged=bool(criterion.Q < 0),
    )


def _values(values, name):
    values = sorted(set(int(v) for v in values))
    if not values:
        raise RangeError(f"{name} range is empty")
    return values


def sweep(g_values, m_values, workers=Config.DEFAULT_WORKERS):
    """(g, m) の格子を走査し、(g, m) 順の行を返す"""
    gs = _values(g_values, "g")
    ms = _values(m_values, "m")
    if gs[0] < 2:
        raise RangeError(f"g must be at least 2, got {gs[0]}")
    if ms[0] < 0:
        raise RangeError(f"m must be nonnegative, got {ms[0]}")
    if workers < 1:
        raise RangeError(f"workers must be positive, got {workers}")

    params = [(g, m) for g in gs for m in ms]
    logger.info("Sweeping %d parameter pairs with %d worker(s)", len(params), workers)
    if workers == 1:
        return [sweep_row(p) for p in params]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(sweep_row, params))


def example_run_config(example):
    """例を設定ファイルとして書き出せる RunConfig に変換"""
    return RunConfig(
        geometry=example.geom,
        sheaves={"E": example.E, "F1": example.F1, "F2": example.F2},
        polarization=example.omega,
        testconfig=TestConfigSpec("E", "F2", Nonproduct.YES),
        options=RunOptions(cases=tuple(ruled_cases(example.g, example.m))),
    )

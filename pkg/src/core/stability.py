import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

from ..utils.config import Config
from ..utils.constants import Level, Relation
from ..utils.errors import GeometryError
from .chern import NSClass, SheafData, euler_char, intersect, slope
from .exactcore import K, Rat, coefficient, constant_term

logger = logging.getLogger(__name__)

# k^2, k^1, k^0 in comparison order
_LEVELS = ((2, Level.LEADING_K2), (1, Level.LINEAR_K), (0, Level.CONSTANT_TERM))


def _relation_from_difference(difference):
    """difference = (E側) - (部分層側)"""
    if difference > 0:
        return Relation.SUB_STRICTLY_SMALLER
    if difference < 0:
        return Relation.SUB_STRICTLY_LARGER
    return Relation.EQUAL


@dataclass(frozen=True)
class CompareVerdict:
    relation: Relation
    margin: Rat
    level: Level


def mumford_compare(sub, sheaf, geom, omega):
    """μ(F) と μ(E) の比較"""
    return _relation_from_difference(slope(sheaf, geom, omega) - slope(sub, geom, omega))


def normalized_hilbert(sheaf, geom, omega):
    """χ(E ⊗ L^k) / rk(E)"""
    return euler_char(sheaf, geom, omega, K) * Rat(1, sheaf.rank)


def gieseker_compare(sub, sheaf, geom, omega):
    """正規化ヒルベルト多項式を k^2 の係数から辞書式に比較"""
    difference = normalized_hilbert(sheaf, geom, omega) - normalized_hilbert(sub, geom, omega)
    for power, level in _LEVELS:
        margin = constant_term(coefficient(difference, "k", power))
        if margin != 0:
            return CompareVerdict(_relation_from_difference(margin), margin, level)
    return CompareVerdict(Relation.EQUAL, Rat(0), Level.IDENTICAL)


# ---------------------------------------------------------------------------
# Line subbundle scan on a ruled surface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanCase:
    """x_D <= bound_x かつ y_D <= bound_y の領域（exclude_corner なら角を除く）"""
    bound_x: int
    bound_y: int
    exclude_corner: bool = False

    def admissible(self, x, y):
        if x > self.bound_x or y > self.bound_y:
            return False
        return not (self.exclude_corner and (x, y) == (self.bound_x, self.bound_y))

    def maximal_points(self):
        """スロープ最大となり得る許容点"""
        if not self.exclude_corner:
            return [(self.bound_x, self.bound_y)]
        return [(self.bound_x - 1, self.bound_y), (self.bound_x, self.bound_y - 1)]


@dataclass(frozen=True)
class CornerCheck:
    point: Tuple[int, int]
    slope: Rat
    verdict: CompareVerdict


@dataclass
class CaseReport:
    case: ScanCase
    slope_E: Rat
    corner_dominant: bool
    corners: List[CornerCheck] = field(default_factory=list)
    checked: int = 0
    destabilizers: List[Tuple[int, int]] = field(default_factory=list)

    report_properties = ("corner_slope", "passed")

    @property
    def corner_slope(self):
        return max(corner.slope for corner in self.corners)

    @property
    def corner_margins(self):
        return [corner.verdict.margin for corner in self.corners]

    @property
    def passed(self):
        return (self.corner_dominant
                and all(c.verdict.relation == Relation.SUB_STRICTLY_SMALLER for c in self.corners)
                and not self.destabilizers)


@dataclass
class ScanReport:
    window: int
    cases: List[CaseReport]

    report_properties = ("passed",)

    @property
    def passed(self):
        return all(case.passed for case in self.cases)


def _line_class(x, y):
    return NSClass((x, y))


def ruled_scan(sheaf, cases, geom, omega, window=Config.DEFAULT_WINDOW):
    """直線部分束の候補を走査して不安定化するものがないか調べる

    有効性は nef 錐の必要条件（b, f との交点が非負）で与えた成分ごとの
    上界だけを使う。イデアル層による補正は不等式を強めるだけなので
    直線束の類だけを調べれば十分。
    """
    if not geom.is_ruled():
        raise GeometryError("ruled_scan needs a ruled geometry (rank 2, f^2 = 0, b.f = 1)")
    if not cases:
        raise ValueError("ruled_scan needs at least one case")
    if window < 0:
        raise ValueError(f"Window must be nonnegative, got {window}")

    b, f = NSClass.unit(2, 0), NSClass.unit(2, 1)
    # μ(O(x b + y f)) is increasing in x and y when both pairings are positive
    dominant = intersect(omega, b, geom) > 0 and intersect(omega, f, geom) > 0
    slope_E = slope(sheaf, geom, omega)

    reports = []
    for case in cases:
        report = CaseReport(case=case, slope_E=slope_E, corner_dominant=bool(dominant))
        for x, y in case.maximal_points():
            line = SheafData.line(_line_class(x, y), geom)
            report.corners.append(CornerCheck(
                point=(x, y),
                slope=slope(line, geom, omega),
                verdict=gieseker_compare(line, sheaf, geom, omega),
            ))

        xs = range(case.bound_x - window, case.bound_x + 1)
        ys = range(case.bound_y - window, case.bound_y + 1)
        for x, y in itertools.product(xs, ys):
            if not case.admissible(x, y):
                continue
            report.checked += 1
            line = SheafData.line(_line_class(x, y), geom)
            verdict = gieseker_compare(line, sheaf, geom, omega)
            if verdict.relation != Relation.SUB_STRICTLY_SMALLER:
                logger.info("class (%d, %d) destabilises: %s", x, y, verdict)
                report.destabilizers.append((x, y))
        reports.append(report)

    return ScanReport(window=window, cases=reports)

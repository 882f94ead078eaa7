import logging
from dataclasses import dataclass, field, fields
from math import factorial
from typing import Dict, List, Optional, Tuple

import sympy as sp

from ..utils.constants import Nonproduct, Sign, Verdict
from ..utils.errors import ProfileError, RankError, SheafError, SlopeMismatchError
from .chern import (HALF, ChernCharacter, NSClass, PolyClass, SheafData, SurfaceGeometry,
                    euler_char, intersect, slope, sym_power_rank2)
from .exactcore import (I, K, R, Rat, asymptotic_sign, coefficient, constant_term,
                        degree, poly, rat, sign_of, sum_over_i)

logger = logging.getLogger(__name__)

COEFFICIENT_NAMES = ("C1", "C2", "C3", "C4")


@dataclass(frozen=True)
class TestConfig:
    """部分束 F ⊂ E から作るテスト配置（F の重み 1, G = E/F の重み 0）"""
    __test__ = False

    E: SheafData
    F: SheafData
    geom: SurfaceGeometry
    omega: NSClass
    nonproduct: Nonproduct = Nonproduct.UNKNOWN

    def __post_init__(self):
        if self.E.rank != 2:
            raise RankError(f"E must have rank 2, got {self.E.rank}")
        if self.F.rank != 1:
            raise RankError(f"F must have rank 1, got {self.F.rank}")
        if not self.F.is_line_bundle(self.geom):
            raise SheafError("Subsheaf F is not a line bundle (ch2 != c1^2/2)")
        if not self.G.is_line_bundle(self.geom):
            raise SheafError("Quotient E/F is not a line bundle (ch2 != c1^2/2)")

    @property
    def G(self):
        """チャーン指標の加法性から得る商"""
        return SheafData(self.E.rank - self.F.rank, self.E.c1 - self.F.c1,
                         self.E.ch2 - self.F.ch2)


@dataclass(frozen=True)
class Discrepancy:
    name: str
    expansion: Rat
    closed_form: Rat


@dataclass
class TestConfigReport:
    __test__ = False

    p_poly: sp.Poly
    w_poly: sp.Poly
    a0: sp.Poly
    a1: sp.Poly
    b0: sp.Poly
    b1: sp.Poly
    F1: sp.Poly
    C: Tuple[Rat, Rat, Rat, Rat]
    closed_forms: Dict[str, Rat]
    sign: Sign
    verdict: Verdict
    k_threshold: Rat
    discrepancies: List[Discrepancy] = field(default_factory=list)


def hilbert_poly(tc):
    """p(r) = χ(S^r E ⊗ L^{kr})"""
    sym = sym_power_rank2(tc.E, tc.geom)
    return euler_char(sym, tc.geom, tc.omega, K * R)


def weight_poly(tc):
    """w(r) = sum_i i * χ(F^i ⊗ G^{r-i} ⊗ L^{kr})"""
    c1_i = PolyClass.of(tc.F.c1, I) + PolyClass.of(tc.G.c1, R - I)
    summand = ChernCharacter(poly(1), c1_i, c1_i.square(tc.geom) * HALF)
    chi_i = euler_char(summand, tc.geom, tc.omega, K * R)
    return sum_over_i(poly(I) * chi_i)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntersectionProfile:
    """一般次元 b での C1, C2 に必要な交点数"""
    b: int
    omega_b: Rat        # ω^b
    c1E_omega: Rat      # c1(E).ω^{b-1}
    c1F_omega: Rat      # c1(F).ω^{b-1}
    c1B_omega: Rat      # c1(B).ω^{b-1}
    mixed_c1B: Rat      # (c1(E)/2 - c1(F)).c1(B).ω^{b-2}
    ch2_diff: Rat       # (ch2(E)/2 - ch2(F)).ω^{b-2}

    @classmethod
    def from_mapping(cls, data):
        names = [f.name for f in fields(cls)]
        missing = [name for name in names if data.get(name) is None]
        if missing:
            raise ProfileError(f"Intersection profile is missing: {', '.join(missing)}")
        b = int(data["b"])
        if b < 2:
            raise ProfileError(f"Base dimension must be at least 2, got {b}")
        return cls(b, *(rat(data[name]) for name in names[1:]))

    @classmethod
    def from_test_config(cls, tc):
        geom, omega = tc.geom, tc.omega
        return cls(
            b=2,
            omega_b=intersect(omega, omega, geom),
            c1E_omega=intersect(tc.E.c1, omega, geom),
            c1F_omega=intersect(tc.F.c1, omega, geom),
            c1B_omega=intersect(geom.c1B, omega, geom),
            mixed_c1B=intersect(tc.E.c1 * HALF - tc.F.c1, geom.c1B, geom),
            ch2_diff=tc.E.ch2 * HALF - tc.F.ch2,
        )


def closed_form_c1_c2(source):
    """C1, C2 の閉じた式をそのまま評価する"""
    profile = source
    if isinstance(source, TestConfig):
        profile = IntersectionProfile.from_test_config(source)
    elif isinstance(source, dict):
        profile = IntersectionProfile.from_mapping(source)

    b = profile.b
    mu_gap = profile.c1E_omega * HALF - profile.c1F_omega
    b_fact, b1_fact, b2_fact = factorial(b), factorial(b - 1), factorial(b - 2)

    c1 = profile.omega_b * Rat(1, 6 * b_fact * b1_fact) * mu_gap
    c2 = (profile.omega_b * Rat(1, 12 * b_fact * b2_fact) * profile.mixed_c1B
          + profile.omega_b * Rat(1, 3 * b_fact * b2_fact) * profile.ch2_diff
          + Rat(1, 12 * b1_fact ** 2) * (2 * profile.c1E_omega - profile.c1B_omega) * mu_gap)
    return c1, c2


def closed_form_c3_c4(tc):
    """曲面の場合の 48*C3, 144*C4 の式を評価する"""
    geom, omega = tc.geom, tc.omega
    deg_E = intersect(tc.E.c1, omega, geom)
    deg_F = intersect(tc.F.c1, omega, geom)
    omega_c1B = intersect(omega, geom.c1B, geom)
    E_sq = intersect(tc.E.c1, tc.E.c1, geom)
    E_c1B = intersect(tc.E.c1, geom.c1B, geom)
    F_c1B = intersect(tc.F.c1, geom.c1B, geom)
    ch2_diff = tc.E.ch2 * HALF - tc.F.ch2

    c3_48 = ((8 * deg_E - 4 * omega_c1B) * ch2_diff
             + 2 * E_sq * (deg_E * HALF - deg_F)
             + 2 * deg_F * E_c1B
             - 2 * deg_E * F_c1B)
    c4_144 = (E_sq * ((E_c1B * HALF - F_c1B) + 6 * ch2_diff)
              - 4 * E_c1B * ch2_diff
              + 2 * (E_c1B * tc.F.ch2 - F_c1B * tc.E.ch2))
    return c3_48 / 48, c4_144 / 144


# ---------------------------------------------------------------------------
# Futaki invariant
# ---------------------------------------------------------------------------

def _verdict(sign, nonproduct):
    if sign == Sign.NEGATIVE:
        return Verdict.K_UNSTABLE
    if sign == Sign.ZERO and nonproduct == Nonproduct.YES:
        return Verdict.NOT_K_POLYSTABLE
    return Verdict.INCONCLUSIVE


def futaki_invariant(tc):
    """F1 = b0*a1 - b1*a0 を展開で求め、閉じた式と照合する"""
    p_poly = hilbert_poly(tc)
    w_poly = weight_poly(tc)
    a0, a1 = coefficient(p_poly, "r", 3), coefficient(p_poly, "r", 2)
    b0, b1 = coefficient(w_poly, "r", 4), coefficient(w_poly, "r", 3)
    F1 = b0 * a1 - b1 * a0

    C = tuple(constant_term(coefficient(F1, "k", n)) for n in (3, 2, 1, 0))
    discrepancies = []
    if degree(F1, "k") > 3:
        leading = constant_term(coefficient(F1, "k", degree(F1, "k")))
        discrepancies.append(Discrepancy(f"k^{degree(F1, 'k')}", leading, Rat(0)))
        logger.warning("F1 has degree %d in k", degree(F1, "k"))

    closed = closed_form_c1_c2(tc) + closed_form_c3_c4(tc)
    closed_forms = dict(zip(COEFFICIENT_NAMES, closed))
    for name, expansion, closed_value in zip(COEFFICIENT_NAMES, C, closed):
        if expansion != closed_value:
            logger.warning("%s: expansion %s, closed form %s", name, expansion, closed_value)
            discrepancies.append(Discrepancy(name, expansion, closed_value))

    asymptotic = asymptotic_sign(F1)
    return TestConfigReport(
        p_poly=p_poly, w_poly=w_poly, a0=a0, a1=a1, b0=b0, b1=b1, F1=F1, C=C,
        closed_forms=closed_forms,
        sign=asymptotic.sign,
        verdict=_verdict(asymptotic.sign, tc.nonproduct),
        k_threshold=asymptotic.bound,
        discrepancies=discrepancies,
    )


@dataclass(frozen=True)
class CriterionResult:
    Q: Rat
    verdict: Verdict
    c2_sign_agrees: Optional[bool]


def equal_slope_criterion(tc, report=None):
    """μ(F) = μ(E) のとき Q = 4(ch2(E)/2 - ch2(F)) + c1(B).(c1(E)/2 - c1(F)) の符号で判定"""
    geom, omega = tc.geom, tc.omega
    if slope(tc.F, geom, omega) != slope(tc.E, geom, omega):
        raise SlopeMismatchError("Criterion needs μ(F) = μ(E); C1 governs otherwise")

    Q = 4 * (tc.E.ch2 * HALF - tc.F.ch2) + intersect(geom.c1B, tc.E.c1 * HALF - tc.F.c1, geom)
    verdict = Verdict.K_UNSTABLE if Q < 0 else Verdict.INCONCLUSIVE

    if report is None:
        report = futaki_invariant(tc)
    c2 = report.C[1]
    agrees = None if c2 == 0 else sign_of(c2) == sign_of(Q)
    if agrees is False:
        logger.error("sign of Q=%s disagrees with expansion C2=%s", Q, c2)
    return CriterionResult(Q, verdict, agrees)

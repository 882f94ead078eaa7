import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import sympy as sp

from ..utils.errors import DimensionError, GeometryError, RankError
from .exactcore import I, R, Rat, poly, rat, substitute, constant_term, sum_over_i

logger = logging.getLogger(__name__)

HALF = Rat(1, 2)


@dataclass(frozen=True)
class NSClass:
    """ネロン・セヴェリ基底での座標"""
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(rat(c) for c in self.coords))

    @classmethod
    def zero(cls, rank):
        return cls((0,) * rank)

    @classmethod
    def unit(cls, rank, index):
        return cls(tuple(1 if j == index else 0 for j in range(rank)))

    def __len__(self):
        return len(self.coords)

    def _check(self, other):
        if len(self) != len(other):
            raise DimensionError(f"Class dimensions differ: {len(self)} vs {len(other)}")

    def __add__(self, other):
        self._check(other)
        return NSClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return NSClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return NSClass(tuple(-a for a in self.coords))

    def __mul__(self, scalar):
        scalar = rat(scalar)
        return NSClass(tuple(scalar * a for a in self.coords))

    __rmul__ = __mul__

    def as_array(self):
        return np.array(self.coords, dtype=object)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class SurfaceGeometry:
    """偏極曲面の次数2以下のコホモロジーデータ"""
    ns_rank: int
    basis_labels: tuple
    intersection: tuple
    c1B: NSClass
    todd2: Rat
    c2B: Optional[Rat] = None

    def __post_init__(self):
        rows = tuple(tuple(rat(x) for x in row) for row in self.intersection)
        object.__setattr__(self, "intersection", rows)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))
        object.__setattr__(self, "todd2", rat(self.todd2))
        if self.c2B is not None:
            object.__setattr__(self, "c2B", rat(self.c2B))
        if not isinstance(self.c1B, NSClass):
            object.__setattr__(self, "c1B", NSClass(self.c1B))

        if self.ns_rank < 1:
            raise GeometryError(f"Néron–Severi rank must be positive, got {self.ns_rank}")
        if len(self.basis_labels) != self.ns_rank:
            raise DimensionError("Number of basis labels differs from ns_rank")
        if len(rows) != self.ns_rank or any(len(row) != self.ns_rank for row in rows):
            raise DimensionError(f"Intersection matrix must be {self.ns_rank}x{self.ns_rank}")
        if not np.array_equal(self.matrix, self.matrix.T):
            raise GeometryError("Intersection matrix is not symmetric")
        if len(self.c1B) != self.ns_rank:
            raise DimensionError("c1(B) has the wrong number of coordinates")

    @property
    def matrix(self):
        return np.array(self.intersection, dtype=object)

    @classmethod
    def ruled(cls, genus, deg_v=0):
        """曲線上の階数2束の射影化 P(V)（基底 b, f）"""
        if genus < 0:
            raise GeometryError(f"Genus must be nonnegative, got {genus}")
        return cls(
            ns_rank=2,
            basis_labels=("b", "f"),
            intersection=((deg_v, 1), (1, 0)),
            # -K_B = 2b + (2(1-g) - deg V) f
            c1B=NSClass((2, 2 * (1 - genus) - deg_v)),
            todd2=1 - genus,
            c2B=4 * (1 - genus),
        )

    def is_ruled(self):
        m = self.intersection
        return self.ns_rank == 2 and m[1][1] == 0 and m[0][1] == 1

    def noether_consistent(self):
        """c2(B) があれば Noether の公式で todd2 を検証"""
        if self.c2B is None:
            return None
        return self.todd2 == (intersect(self.c1B, self.c1B, self) + self.c2B) / 12


def intersect(a, b, geom):
    """交点形式 a^T M b"""
    if len(a) != geom.ns_rank or len(b) != geom.ns_rank:
        raise DimensionError(
            f"Classes of length {len(a)} and {len(b)} on a rank {geom.ns_rank} lattice")
    return rat(a.as_array() @ geom.matrix @ b.as_array())


@dataclass(frozen=True)
class SheafData:
    """連接層の (rank, c1, ∫ch2)"""
    rank: int
    c1: NSClass
    ch2: Rat

    def __post_init__(self):
        if int(self.rank) != self.rank or self.rank < 1:
            raise RankError(f"Rank must be a positive integer, got {self.rank}")
        object.__setattr__(self, "rank", int(self.rank))
        object.__setattr__(self, "ch2", rat(self.ch2))
        if not isinstance(self.c1, NSClass):
            object.__setattr__(self, "c1", NSClass(self.c1))

    @classmethod
    def line(cls, c1, geom):
        if not isinstance(c1, NSClass):
            c1 = NSClass(c1)
        return cls(1, c1, intersect(c1, c1, geom) * HALF)

    @classmethod
    def structure_sheaf(cls, geom):
        return cls.line(NSClass.zero(geom.ns_rank), geom)

    def c2(self, geom):
        return intersect(self.c1, self.c1, geom) * HALF - self.ch2

    def is_line_bundle(self, geom):
        return self.rank == 1 and self.ch2 == intersect(self.c1, self.c1, geom) * HALF

    def chern_character(self):
        return ChernCharacter(poly(self.rank), PolyClass.of(self.c1), poly(self.ch2))


@dataclass(frozen=True)
class PolyClass:
    """多項式係数の NS 類の形式和 sum p_j * D_j"""
    parts: tuple

    @classmethod
    def of(cls, ns_class, scale=1):
        return cls(((poly(scale), ns_class),))

    def __add__(self, other):
        return PolyClass(self.parts + other.parts)

    def pair(self, other, geom):
        total = poly(0)
        for scale, ns_class in self.parts:
            total += scale * intersect(ns_class, other, geom)
        return total

    def square(self, geom):
        total = poly(0)
        for scale_a, class_a in self.parts:
            for scale_b, class_b in self.parts:
                total += scale_a * scale_b * intersect(class_a, class_b, geom)
        return total


@dataclass(frozen=True)
class ChernCharacter:
    """係数が (i, r, k) の多項式であるチャーン指標"""
    rank: sp.Poly
    c1: PolyClass
    ch2: sp.Poly


@dataclass(frozen=True)
class SymPowerChern:
    """S^r E のチャーンデータ（c1(S^r E) = c1_factor * c1(E)）"""
    rank_poly: sp.Poly
    c1_factor: sp.Poly
    ch2_poly: sp.Poly
    c1_base: NSClass

    def chern_character(self):
        return ChernCharacter(self.rank_poly, PolyClass.of(self.c1_base, self.c1_factor),
                              self.ch2_poly)

    def at(self, r0):
        """r = r0 を代入した SheafData"""
        rank = constant_term(substitute(self.rank_poly, r=r0))
        factor = constant_term(substitute(self.c1_factor, r=r0))
        ch2 = constant_term(substitute(self.ch2_poly, r=r0))
        return SheafData(int(rank), self.c1_base * factor, ch2)


def tensor_line(sheaf, divisor, geom):
    """E ⊗ O(D)"""
    return SheafData(
        sheaf.rank,
        sheaf.c1 + sheaf.rank * divisor,
        sheaf.ch2 + intersect(sheaf.c1, divisor, geom)
        + sheaf.rank * intersect(divisor, divisor, geom) * HALF,
    )


def dual(sheaf):
    return SheafData(sheaf.rank, -sheaf.c1, sheaf.ch2)


def extension_sum(sub, quotient):
    """0 -> F -> E -> G -> 0 の中間項のチャーンデータ"""
    return SheafData(sub.rank + quotient.rank, sub.c1 + quotient.c1, sub.ch2 + quotient.ch2)


def sym_power_rank2(sheaf, geom):
    """分裂原理による S^r E のチャーンデータ（根は i*a + (r-i)*b）"""
    if sheaf.rank != 2:
        raise RankError(f"Symmetric powers need a rank 2 sheaf, got rank {sheaf.rank}")

    rank_poly = sum_over_i(1)
    c1_factor = sum_over_i(I)
    s_aa = sum_over_i(I ** 2)
    s_ab = sum_over_i(I * (R - I))
    s_bb = sum_over_i((R - I) ** 2)

    power_sum = 2 * sheaf.ch2     # a^2 + b^2
    product = sheaf.c2(geom)      # a*b
    # s_aa == s_bb under i <-> r - i
    ch2_poly = ((s_aa + s_bb) * (power_sum * HALF) + s_ab * (2 * product)) * HALF
    return SymPowerChern(rank_poly, c1_factor, ch2_poly, sheaf.c1)


def _chern_character(data):
    if isinstance(data, ChernCharacter):
        return data
    return data.chern_character()


def euler_char(data, geom, omega=None, scale=0):
    """Riemann–Roch による χ(E ⊗ L^t), t = scale（多項式可）"""
    ch = _chern_character(data)
    if omega is None:
        omega = NSClass.zero(geom.ns_rank)
    t = poly(scale)

    omega_sq = intersect(omega, omega, geom)
    omega_c1B = intersect(omega, geom.c1B, geom)

    leading = ch.rank * t ** 2 * (omega_sq * HALF)
    linear = t * (ch.c1.pair(omega, geom) + ch.rank * (omega_c1B * HALF))
    constant = ch.ch2 + ch.c1.pair(geom.c1B, geom) * HALF + ch.rank * geom.todd2
    return leading + linear + constant


def euler_char_line_form(divisor, geom):
    """直線束の RR: χ(O_B) + D.(D - K_B)/2"""
    return geom.todd2 + intersect(divisor, divisor + geom.c1B, geom) * HALF


def slope(sheaf, geom, omega):
    return intersect(sheaf.c1, omega, geom) / sheaf.rank

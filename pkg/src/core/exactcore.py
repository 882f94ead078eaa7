import logging
import math
import re
from dataclasses import dataclass
from functools import lru_cache

import sympy as sp

from ..utils.constants import VARIABLES, Sign
from ..utils.errors import VariableError

logger = logging.getLogger(__name__)

I, R, K = sp.symbols(VARIABLES)
GENS = (I, R, K)

# Universal scalar type
Rat = sp.Rational

_RATIONAL_PATTERN = re.compile(r"^\s*(-?[0-9]+)(?:/([0-9]+))?\s*$")


def parse_rat(text):
    """"p/q" または "p" 形式の文字列を有理数に変換"""
    match = _RATIONAL_PATTERN.match(str(text))
    if not match:
        raise ValueError(f"Malformed rational literal: {text!r}")
    numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise ValueError(f"Zero denominator in rational literal: {text!r}")
    return Rat(int(numerator), int(denominator or 1))


def rat(value):
    """int / str / Fraction / sympy数を厳密な有理数に変換"""
    if isinstance(value, sp.Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        raise TypeError(f"floating point value {value!r} is not exact")
    if isinstance(value, str):
        return parse_rat(value)
    result = sp.sympify(value)
    if not isinstance(result, sp.Rational):
        raise TypeError(f"{value!r} is not a rational number")
    return result


def format_rat(value):
    return str(rat(value))


def sign_of(value):
    value = rat(value)
    if value > 0:
        return Sign.POSITIVE
    if value < 0:
        return Sign.NEGATIVE
    return Sign.ZERO


# ---------------------------------------------------------------------------
# Polynomials over QQ in the fixed generators (i, r, k)
# ---------------------------------------------------------------------------

def poly(expr=0):
    """式を (i, r, k) 上の正規形 Poly に変換"""
    if isinstance(expr, sp.Poly):
        if expr.gens == GENS and expr.domain == sp.QQ:
            return expr
        expr = expr.as_expr()
    return sp.Poly(expr, *GENS, domain=sp.QQ)


def from_terms(rep):
    """{指数ベクトル: 係数} から Poly を構築"""
    rep = {tuple(monom): rat(coeff) for monom, coeff in rep.items() if coeff != 0}
    if not rep:
        return poly(0)
    return sp.Poly.from_dict(rep, *GENS, domain=sp.QQ)


def monomial(coeff, i=0, r=0, k=0):
    return from_terms({(i, r, k): coeff})


def terms(p):
    """ゼロでない項の辞書"""
    return {monom: rat(coeff) for monom, coeff in poly(p).as_dict().items()}


def _index(var):
    try:
        return VARIABLES.index(var)
    except ValueError:
        raise VariableError(f"Unknown variable {var!r}") from None


def degree(p, var):
    """変数 var についての次数（ゼロ多項式は -1）"""
    idx = _index(var)
    return max((monom[idx] for monom in terms(p)), default=-1)


def coefficient(p, var, n):
    """var^n の係数（残りの変数の多項式）"""
    idx = _index(var)
    rep = {}
    for monom, coeff in terms(p).items():
        if monom[idx] == n:
            reduced = list(monom)
            reduced[idx] = 0
            rep[tuple(reduced)] = coeff
    return from_terms(rep)


def substitute(p, **values):
    """指定した変数に有理数を代入（生成元は保持）"""
    indices = {_index(var): rat(value) for var, value in values.items()}
    rep = {}
    for monom, coeff in terms(p).items():
        reduced = list(monom)
        for idx, value in indices.items():
            coeff = coeff * value ** monom[idx]
            reduced[idx] = 0
        key = tuple(reduced)
        rep[key] = rep.get(key, Rat(0)) + coeff
    return from_terms(rep)


def constant_term(p):
    return terms(p).get((0, 0, 0), Rat(0))


def value_at(p, **values):
    """全変数に代入した値"""
    remaining = substitute(p, **values)
    if any(monom != (0, 0, 0) for monom in terms(remaining)):
        raise VariableError("value_at needs a value for every variable present")
    return constant_term(remaining)


def coefficient_list(p, var="k"):
    """1変数多項式の係数を高次から並べる"""
    top = degree(p, var)
    return [constant_term(coefficient(p, var, n)) for n in range(top, -1, -1)]


def format_poly(p):
    """降冪順の正規テキスト表現"""
    items = sorted(terms(p).items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)
    if not items:
        return "0"
    text = ""
    for position, (monom, coeff) in enumerate(items):
        factors = [name if e == 1 else f"{name}^{e}"
                   for name, e in zip(VARIABLES, monom) if e]
        magnitude = abs(coeff)
        if not factors:
            body = str(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = f"{magnitude}*" + "*".join(factors)
        if position == 0:
            text = f"-{body}" if coeff < 0 else body
        else:
            text += f" {'-' if coeff < 0 else '+'} {body}"
    return text


# ---------------------------------------------------------------------------
# Power sums over the weight index
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def faulhaber(p):
    """sum_{i=0}^{r} i^p を r の多項式として返す

    (r+1)^{p+1} = sum_j C(p+1, j) F_j(r) の漸化式で下から順に求める。
    """
    if p < 0:
        raise ValueError(f"Exponent must be nonnegative, got {p}")
    total = poly(R + 1) ** (p + 1)
    for j in range(p):
        total -= math.comb(p + 1, j) * faulhaber(j)
    return total * Rat(1, p + 1)


def sum_over_i(q):
    """q(i, r, k) を i = 0..r で和をとった閉じた形"""
    result = poly(0)
    for (a, b, c), coeff in terms(q).items():
        result += faulhaber(a) * monomial(coeff, r=b, k=c)
    return result


# ---------------------------------------------------------------------------
# Large-k sign analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticSign:
    sign: Sign
    bound: Rat


def asymptotic_sign(f):
    """k が十分大きいときの符号と、その符号が保証される Cauchy 上界"""
    if degree(f, "i") > 0 or degree(f, "r") > 0:
        raise VariableError(f"Expected a polynomial in k only, got {format_poly(f)}")
    coeffs = coefficient_list(f, "k")
    if not coeffs:
        return AsymptoticSign(Sign.ZERO, Rat(0))

    lead, top = coeffs[0], len(coeffs) - 1
    ratio = max((abs(value / lead) for value in coeffs[1:]), default=Rat(0))
    bound = 1 + ratio
    logger.debug("leading coefficient %s at k^%d, Cauchy bound %s", lead, top, bound)
    return AsymptoticSign(sign_of(lead), bound)

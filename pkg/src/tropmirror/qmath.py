"""Exact rational helpers: Fraction parsing/printing and +/-infinity sentinels.

All valuations in the library are Fractions or INF.  float infinities compare
correctly against Fractions, so INF/NEG_INF are plain float sentinels; the
helpers below keep arithmetic from ever producing a float by accident.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, inf

from .errors import ParseError

INF = inf
NEG_INF = -inf

Q = Fraction


def is_inf(x) -> bool:
    return x == INF


def q_add(a, b):
    """Sum of two extended rationals; INF absorbs (INF + NEG_INF is an error)."""
    if is_inf(a) or is_inf(b):
        if a == NEG_INF or b == NEG_INF:
            raise ValueError("INF + NEG_INF is undefined")
        return INF
    return a + b


def q_min(*xs):
    return min(xs)


def parse_q(text: str) -> Fraction:
    """Parse 'p/q' or 'p' (also decimal-free signed integers)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}: {exc}") from None


def fmt_q(x) -> str:
    """Inverse of parse_q; INF prints as 'inf'."""
    if is_inf(x):
        return "inf"
    return str(Fraction(x))


def vec_gcd(vec) -> int:
    """gcd of an integer vector, 0 for the zero vector."""
    g = 0
    for c in vec:
        g = gcd(g, abs(int(c)))
    return g


def primitive(vec):
    """Scale a nonzero integer vector to a primitive one (same direction)."""
    g = vec_gcd(vec)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(int(c) // g for c in vec)


def primitive_from_rational(vec):
    """Primitive integer vector positively proportional to a rational vector."""
    fracs = [Fraction(c) for c in vec]
    if all(f == 0 for f in fracs):
        raise ValueError("zero vector has no primitive representative")
    denom = 1
    for f in fracs:
        denom = denom * f.denominator // gcd(denom, f.denominator)
    ints = [int(f * denom) for f in fracs]
    return primitive(ints)

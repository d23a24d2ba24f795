"""Exact arithmetic in the Novikov ring and field over Q.

A scalar is a finite formal sum sum_i a_i T^{e_i} with exact rational
coefficients a_i and exponents e_i, plus a *truncation level*: every omitted
term is guaranteed to have exponent >= truncation.  truncation == INF means
the sum is exact.  This distinguishes the exact zero (no terms, truncation
INF) from "zero up to precision t" (no terms, truncation t), and that
distinction is propagated through all arithmetic so cancellation can never
silently promote a truncated zero to an exact one.

Exponents are rationals, not reals: every exponent arising in the
constructions implemented here is rational, and exactness of the test suite
depends on it.  The ground field is Q; no algebraic extension is ever needed
by the operations in scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import InsufficientPrecision, ParseError, ZeroInput
from .qmath import INF, Q, fmt_q, is_inf, parse_q


class Valuation(NamedTuple):
    """Valuation of a scalar: `value`, and whether it is exact.

    exact=False means only the lower bound ``val >= value`` is known (the
    term list is empty below a finite truncation).  The exact zero has
    value=INF, exact=True.
    """

    value: object  # Fraction or INF
    exact: bool

    def __str__(self):
        return fmt_q(self.value) if self.exact else f">= {fmt_q(self.value)}"


_TERM_RE = re.compile(
    r"^\s*(?P<coeff>-?\d+(?:/\d+)?)(?:\s*\*\s*T\^(?P<exp>\(?-?\d+(?:/\d+)?\)?))?\s*$"
)
_BARE_T_RE = re.compile(r"^\s*T\^(?P<exp>\(?-?\d+(?:/\d+)?\)?)\s*$")
_TRUNC_RE = re.compile(r"\[\s*trunc\s+(?P<level>-?\d+(?:/\d+)?)\s*\]\s*$")


@dataclass(frozen=True)
class NovikovScalar:
    """Element of the Novikov field Lambda over Q, with truncation tracking.

    terms: tuple of (exponent, coefficient), strictly increasing exponents,
    no zero coefficients, every exponent < truncation.
    """

    terms: tuple
    truncation: object = INF

    # -- construction ------------------------------------------------------

    @staticmethod
    def from_terms(pairs, truncation=INF) -> "NovikovScalar":
        acc = {}
        for exp, coeff in pairs:
            e, c = Q(exp), Q(coeff)
            acc[e] = acc.get(e, Q(0)) + c
        kept = tuple(
            (e, c) for e, c in sorted(acc.items()) if c != 0 and e < truncation
        )
        return NovikovScalar(kept, truncation)

    @staticmethod
    def zero() -> "NovikovScalar":
        return NovikovScalar((), INF)

    @staticmethod
    def one() -> "NovikovScalar":
        return NovikovScalar(((Q(0), Q(1)),), INF)

    @staticmethod
    def constant(c) -> "NovikovScalar":
        return NovikovScalar.from_terms([(Q(0), Q(c))])

    @staticmethod
    def monomial(exp, coeff=1, truncation=INF) -> "NovikovScalar":
        return NovikovScalar.from_terms([(Q(exp), Q(coeff))], truncation)

    def __post_init__(self):
        last = None
        for exp, coeff in self.terms:
            if coeff == 0:
                raise ValueError("zero coefficient stored")
            if last is not None and exp <= last:
                raise ValueError("exponents not strictly increasing")
            if exp >= self.truncation:
                raise ValueError("term at or above truncation")
            last = exp

    # -- structure ---------------------------------------------------------

    def is_exact_zero(self) -> bool:
        return not self.terms and is_inf(self.truncation)

    def is_zero_up_to_truncation(self) -> bool:
        return not self.terms

    def val(self) -> Valuation:
        """Smallest exponent; INF iff exact zero; lower-bound flag when the
        term list is empty at finite truncation."""
        if self.terms:
            return Valuation(self.terms[0][0], True)
        if is_inf(self.truncation):
            return Valuation(INF, True)
        return Valuation(self.truncation, False)

    def exact_val(self):
        """Valuation as a definite number; raises when only a bound is known."""
        v = self.val()
        if not v.exact:
            raise InsufficientPrecision(
                f"valuation only bounded below by {fmt_q(v.value)}"
            )
        return v.value

    def leading(self):
        """(exponent, coefficient) of the minimal term."""
        if not self.terms:
            raise ZeroInput("no leading term: zero up to truncation")
        return self.terms[0]

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "NovikovScalar") -> "NovikovScalar":
        trunc = min(self.truncation, other.truncation)
        return NovikovScalar.from_terms(self.terms + other.terms, trunc)

    def __neg__(self) -> "NovikovScalar":
        return NovikovScalar(tuple((e, -c) for e, c in self.terms), self.truncation)

    def __sub__(self, other: "NovikovScalar") -> "NovikovScalar":
        return self + (-other)

    def __mul__(self, other: "NovikovScalar") -> "NovikovScalar":
        if self.is_exact_zero() or other.is_exact_zero():
            return NovikovScalar.zero()
        # trunc(ab) = min(trunc(a) + val(b), trunc(b) + val(a)); INF-safe.
        cands = []
        for t, v in ((self.truncation, other.val().value), (other.truncation, self.val().value)):
            if not is_inf(t):
                cands.append(t + v if not is_inf(v) else INF)
        trunc = min(cands) if cands else INF
        prods = [
            (e1 + e2, c1 * c2) for e1, c1 in self.terms for e2, c2 in other.terms
        ]
        return NovikovScalar.from_terms(prods, trunc)

    def scale(self, c) -> "NovikovScalar":
        c = Q(c)
        if c == 0:
            return NovikovScalar((), self.truncation)
        return NovikovScalar(
            tuple((e, c * co) for e, co in self.terms), self.truncation
        )

    def shift(self, exp) -> "NovikovScalar":
        """Multiply by the exact monomial T^exp."""
        exp = Q(exp)
        trunc = INF if is_inf(self.truncation) else self.truncation + exp
        return NovikovScalar(tuple((e + exp, c) for e, c in self.terms), trunc)

    def truncate(self, level) -> "NovikovScalar":
        trunc = min(self.truncation, level)
        return NovikovScalar(tuple(t for t in self.terms if t[0] < trunc), trunc)

    def unit_inverse(self, cutoff) -> "NovikovScalar":
        """Multiplicative inverse up to T^cutoff via geometric expansion.

        Requires a definite leading term.  For an exact monomial the inverse
        is exact.  Raises InsufficientPrecision when the input's relative
        precision cannot support the requested cutoff.
        """
        if self.is_zero_up_to_truncation():
            raise ZeroInput("cannot invert zero (up to truncation)")
        cutoff = Q(cutoff)
        v, c = self.leading()
        if len(self.terms) == 1 and is_inf(self.truncation):
            return NovikovScalar.monomial(-v, Q(1) / c)
        if not is_inf(self.truncation) and self.truncation - 2 * v < cutoff:
            raise InsufficientPrecision(
                f"relative precision {fmt_q(self.truncation - v)} cannot reach "
                f"cutoff {fmt_q(cutoff)} for valuation {fmt_q(v)}"
            )
        # self = c T^v (1 + r) with val(r) > 0; invert the unit part.
        r = NovikovScalar(
            tuple((e - v, co / c) for e, co in self.terms[1:]),
            INF if is_inf(self.truncation) else self.truncation - v,
        )
        rel = cutoff + v  # relative precision needed on (1+r)^{-1}
        acc = NovikovScalar.one().truncate(rel)
        if not r.is_zero_up_to_truncation():
            step = r.val().value
            power = NovikovScalar.one()
            m = 1
            while m * step < rel:
                power = (power * (-r)).truncate(rel)
                acc = acc + power
                m += 1
        return acc.shift(-v).scale(Q(1) / c).truncate(cutoff)

    def power(self, n: int, cutoff=None) -> "NovikovScalar":
        """Integer power; negative powers require a cutoff."""
        if n < 0:
            if cutoff is None:
                raise ValueError("negative power needs a cutoff")
            # inverse to cutoff - (n+1)*val so the n-fold product lands on cutoff
            inv = self.unit_inverse(Q(cutoff) - (n + 1) * self.exact_val())
            out = NovikovScalar.one()
            for _ in range(-n):
                out = out * inv
            return out.truncate(cutoff)
        out = NovikovScalar.one()
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
                if cutoff is not None:
                    out = out.truncate(cutoff)
            base = base * base
            if cutoff is not None:
                base = base.truncate(cutoff)
            k >>= 1
        return out

    # -- comparison ----------------------------------------------------------

    def congruent(self, other: "NovikovScalar", level) -> bool:
        """Equality of all terms with exponent < level; both operands must be
        stored to at least that precision."""
        if min(self.truncation, other.truncation) < level:
            raise InsufficientPrecision(
                f"cannot compare at level {fmt_q(level)}"
            )
        mine = tuple(t for t in self.terms if t[0] < level)
        theirs = tuple(t for t in other.terms if t[0] < level)
        return mine == theirs

    # -- text form ------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for e, c in self.terms:
                if e == 0:
                    parts.append(str(c))
                else:
                    exp = str(e) if e.denominator == 1 and e >= 0 else f"({e})"
                    parts.append(f"{c}*T^{exp}")
            body = " + ".join(parts)
        if is_inf(self.truncation):
            return body
        return f"{body} [trunc {self.truncation}]"

    __repr__ = __str__

    @staticmethod
    def parse(text: str) -> "NovikovScalar":
        """Inverse of str(); accepts e.g. '3*T^(1/2) + -1*T^2 [trunc 7/2]'."""
        src = text.strip()
        trunc = INF
        m = _TRUNC_RE.search(src)
        if m:
            trunc = parse_q(m.group("level"))
            src = src[: m.start()].strip()
        if src == "0" or src == "":
            return NovikovScalar((), trunc)
        pairs = []
        for chunk in src.split(" + "):
            m = _TERM_RE.match(chunk)
            if m:
                coeff = parse_q(m.group("coeff"))
                exp = Q(0)
                if m.group("exp") is not None:
                    exp = parse_q(m.group("exp").strip("()"))
            else:
                m = _BARE_T_RE.match(chunk)
                if not m:
                    raise ParseError(f"bad scalar term {chunk!r}")
                coeff = Q(1)
                exp = parse_q(m.group("exp").strip("()"))
            pairs.append((exp, coeff))
        return NovikovScalar.from_terms(pairs, trunc)


ZERO = NovikovScalar.zero()
ONE = NovikovScalar.one()
T = NovikovScalar.monomial(1)


def nov_val(a: NovikovScalar) -> Valuation:
    return a.val()


def nov_mul(a: NovikovScalar, b: NovikovScalar) -> NovikovScalar:
    return a * b


def nov_unit_inverse(a: NovikovScalar, cutoff) -> NovikovScalar:
    return a.unit_inverse(cutoff)

"""Lattice Laurent series over the Novikov field with polytope valuations.

An element of the completed algebra over a reference polytope P is stored as
finitely many terms a_j x^j (j an integer covector, a_j a NovikovScalar)
together with a *tail bound*: every omitted term has val_P >= tail.  The
valuation of a term on P is val(a_j) + min_{m in P} j(m); the minimum is
attained at a vertex because j is linear.

Convention (fixed for the whole package): val(x^j at m) = val(coeff) + j(m).
The distinguished wall-crossing monomials are eta := x^(0,1) and
xi := x^(-1,0), so that on the (v,u) plane val(eta) = u and val(xi) = -v.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import (
    DivergentExpansion,
    InsufficientPrecision,
    NonUnit,
    ParseError,
    PolygonNotContained,
    ReferenceMismatch,
)
from .novikov import NovikovScalar, Valuation
from .polytopes import Halfspace, RationalPolygon, convex_hull
from .qmath import INF, Q, fmt_q, is_inf, parse_q


def min_pairing(j, polygon: RationalPolygon):
    """min over the polytope of the linear functional j (vertex minimum)."""
    return min(
        sum(Q(c) * v for c, v in zip(j, vert)) for vert in polygon.vertices
    )


@dataclass(frozen=True)
class LatticeSeries:
    """Finitely many lattice terms plus a tail certificate on a polygon."""

    terms: tuple  # tuple of (exponent tuple[int], NovikovScalar), sorted
    tail: object  # Fraction or INF
    reference: RationalPolygon

    @staticmethod
    def make(terms, reference: RationalPolygon, tail=INF) -> "LatticeSeries":
        acc = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for j, scalar in items:
            key = tuple(int(c) for c in j)
            acc[key] = acc[key] + scalar if key in acc else scalar
        kept = []
        for j, scalar in sorted(acc.items()):
            if scalar.is_exact_zero():
                continue
            v = scalar.val()
            if v.value + min_pairing(j, reference) >= tail:
                continue  # absorbed by the tail certificate
            kept.append((j, scalar))
        return LatticeSeries(tuple(kept), tail, reference)

    @staticmethod
    def zero(reference) -> "LatticeSeries":
        return LatticeSeries((), INF, reference)

    @staticmethod
    def constant(scalar, reference) -> "LatticeSeries":
        if isinstance(scalar, (int, Fraction)):
            scalar = NovikovScalar.constant(scalar)
        return LatticeSeries.make([((0,) * reference.dim, scalar)], reference)

    @staticmethod
    def monomial(j, reference, scalar=None) -> "LatticeSeries":
        scalar = scalar or NovikovScalar.one()
        return LatticeSeries.make([(tuple(j), scalar)], reference)

    @staticmethod
    def one(reference) -> "LatticeSeries":
        return LatticeSeries.constant(1, reference)

    # -- valuations ------------------------------------------------------------

    def term_val(self, j, scalar=None) -> Valuation:
        scalar = scalar if scalar is not None else dict(self.terms)[tuple(j)]
        v = scalar.val()
        if is_inf(v.value):
            return Valuation(INF, True)
        return Valuation(v.value + min_pairing(j, self.reference), v.exact)

    def val(self) -> Valuation:
        """val_P on the reference polygon.

        Exact when attained by a stored term with exact scalar valuation and
        below the tail; otherwise a lower bound (tail-governed).
        """
        best = Valuation(self.tail, is_inf(self.tail))
        for j, scalar in self.terms:
            tv = self.term_val(j, scalar)
            if tv.value < best.value:
                best = tv
            elif tv.value == best.value and tv.exact and not best.exact:
                # an attained minimum beats a mere lower bound at the same level
                best = tv
        return best

    def val_on(self, polygon: RationalPolygon) -> Valuation:
        return self.restrict(polygon).val()

    # -- restriction -------------------------------------------------------------

    def restrict(self, polygon: RationalPolygon) -> "LatticeSeries":
        """Same terms over a subpolygon; the tail certificate stays valid
        because per-term valuations only increase on subsets."""
        if polygon == self.reference:
            return self
        if not self.reference.contains_polygon(polygon):
            raise PolygonNotContained(
                f"{polygon} not inside reference {self.reference}"
            )
        return LatticeSeries.make(self.terms, polygon, self.tail)

    def with_reference(self, polygon: RationalPolygon) -> "LatticeSeries":
        """Reinterpret the *formal* term list over a new polygon.

        Only legitimate for exact series (finite tail certificates do not
        transfer between polygons); callers doing analytic continuation of
        exact sections use this.
        """
        if not is_inf(self.tail):
            raise InsufficientPrecision(
                "cannot move a truncated series to an unrelated polygon"
            )
        return LatticeSeries.make(self.terms, polygon, INF)

    # -- ring operations ------------------------------------------------------------

    def _check_ref(self, other: "LatticeSeries"):
        if self.reference != other.reference:
            raise ReferenceMismatch("series have different reference polygons")

    def __add__(self, other: "LatticeSeries") -> "LatticeSeries":
        self._check_ref(other)
        tail = min(self.tail, other.tail)
        merged = {}
        for j, s in self.terms + other.terms:
            merged[j] = merged[j] + s if j in merged else s
        return LatticeSeries.make(merged, self.reference, tail)

    def __neg__(self) -> "LatticeSeries":
        return LatticeSeries(
            tuple((j, -s) for j, s in self.terms), self.tail, self.reference
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "LatticeSeries") -> "LatticeSeries":
        self._check_ref(other)
        tails = []
        for mine, theirs in ((self, other), (other, self)):
            if not is_inf(theirs.tail):
                v = mine.val().value
                tails.append(INF if is_inf(v) else theirs.tail + v)
        tail = min(tails) if tails else INF
        acc = {}
        for j1, s1 in self.terms:
            for j2, s2 in other.terms:
                j = tuple(a + b for a, b in zip(j1, j2))
                prod = s1 * s2
                acc[j] = acc[j] + prod if j in acc else prod
        return LatticeSeries.make(acc, self.reference, tail)

    def scale(self, scalar: NovikovScalar) -> "LatticeSeries":
        return self * LatticeSeries.constant(scalar, self.reference)

    def truncate(self, level) -> "LatticeSeries":
        """Drop terms with val_P >= level; tail becomes min(tail, level)."""
        return LatticeSeries.make(self.terms, self.reference, min(self.tail, level))

    def shift_exponents(self, j) -> "LatticeSeries":
        delta = min_pairing(j, self.reference)
        tail = INF if is_inf(self.tail) else self.tail + delta
        return LatticeSeries.make(
            [
                (tuple(a + b for a, b in zip(exp, j)), s)
                for exp, s in self.terms
            ],
            self.reference,
            tail,
        )

    # -- inverse / powers -------------------------------------------------------------

    def leading_term(self):
        """(j, scalar) of the unique val_P-minimal term; NonUnit otherwise."""
        if not self.terms:
            raise NonUnit("zero series has no leading term")
        vals = [(self.term_val(j, s), j, s) for j, s in self.terms]
        for tv, _, _ in vals:
            if not tv.exact:
                raise InsufficientPrecision("leading-term valuation not exact")
        best = min(tv.value for tv, _, _ in vals)
        if not is_inf(self.tail) and best >= self.tail:
            raise NonUnit("tail dominates every stored term")
        winners = [(j, s) for tv, j, s in vals if tv.value == best]
        if len(winners) != 1:
            raise NonUnit("no strict minimal-valuation term")
        return winners[0]

    def _leading_for_expansion(self):
        """Leading term for geometric expansion; a tied minimum is the
        boundary case where no expansion converges on the polygon."""
        try:
            return self.leading_term()
        except NonUnit as exc:
            if self.terms:
                raise DivergentExpansion(str(exc)) from None
            raise

    def inverse(self, cutoff) -> "LatticeSeries":
        """Geometric-series inverse truncated at val_P cutoff.

        The perturbation (series/leading - 1) must have strictly positive
        val_P, else the expansion diverges on the reference polygon.
        """
        cutoff = Q(cutoff)
        j0, s0 = self._leading_for_expansion()
        lead_val = self.term_val(j0, s0).value
        neg_j0 = tuple(-c for c in j0)
        # scalar precision so the inverse monomial alone is resolved to cutoff
        scalar_cutoff = cutoff - min_pairing(neg_j0, self.reference)
        inv_mono = LatticeSeries.monomial(
            neg_j0, self.reference, s0.unit_inverse(scalar_cutoff)
        )
        rest = LatticeSeries.make(
            [t for t in self.terms if t[0] != j0], self.reference, self.tail
        )
        if rest.terms or not is_inf(rest.tail):
            r = rest * inv_mono
            rv = r.val()
            if rv.value <= 0:
                raise DivergentExpansion(
                    f"perturbation valuation {rv} not strictly positive on "
                    "the reference polygon"
                )
            step = rv.value
            rel = cutoff - (-lead_val)
            acc = LatticeSeries.one(self.reference).truncate(rel)
            power = LatticeSeries.one(self.reference)
            m = 1
            while m * step < rel:
                power = (power * (-r)).truncate(rel)
                acc = acc + power
                m += 1
        else:
            acc = LatticeSeries.one(self.reference)
        return (acc * inv_mono).truncate(cutoff)

    def power(self, n: int, cutoff=None) -> "LatticeSeries":
        if n < 0:
            if cutoff is None:
                raise ValueError("negative power needs a cutoff")
            lead = self.term_val(*self._leading_for_expansion()).value
            inv = self.inverse(Q(cutoff) - (n + 1) * lead)
            out = LatticeSeries.one(self.reference)
            for _ in range(-n):
                out = out * inv
            return out.truncate(cutoff)
        out = LatticeSeries.one(self.reference)
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

    # -- substitution / relabeling ------------------------------------------------------

    def substitute(self, images, cutoff) -> "LatticeSeries":
        """Monomial-times-unit substitution x^{e_i} -> x^{vec_i} * base_i^{pow_i}.

        images: per lattice basis index i, either None (identity) or a triple
        (vec, base, power): base a unit LatticeSeries on the same reference,
        power an integer multiplier.  A term x^j picks up base_i^{power_i * j_i};
        negative accumulated powers trigger geometric expansion, whose
        convergence on the reference polygon is checked by inverse().
        """
        cutoff = Q(cutoff)
        n = self.reference.dim
        out = LatticeSeries((), min(cutoff, self.tail) if not is_inf(self.tail) else INF, self.reference)
        for j, scalar in self.terms:
            vec = [0] * n
            powers = []
            for i, spec in enumerate(images):
                if spec is None:
                    vec = [a + j[i] * b for a, b in zip(vec, _unit_vec(i, n))]
                    continue
                tvec, base, pow_mult = spec
                vec = [a + j[i] * b for a, b in zip(vec, tvec)]
                if pow_mult * j[i] and base is not None:
                    powers.append((base, pow_mult * j[i]))
            mono = LatticeSeries.monomial(tuple(vec), self.reference, scalar)
            # the unit factor must be resolved to cutoff *relative to this
            # term's own valuation*
            needed = cutoff - mono.val().value
            unit = LatticeSeries.one(self.reference)
            for base, total in powers:
                # positive powers are exact finite products; only genuine
                # geometric expansions introduce a tail
                power = base.power(total, needed if total < 0 else None)
                unit = unit * power
                if not is_inf(unit.tail):
                    unit = unit.truncate(needed)
            term = mono * unit
            if not is_inf(term.tail):
                term = term.truncate(cutoff)
            out = out + term
        return out

    def relabel(self, matrix, new_reference=None) -> "LatticeSeries":
        """Lattice relabeling j -> j . matrix^{-1} with the polygon mapped by
        matrix, preserving valuations: j(m) = (j.M^{-1})(M m)."""
        inv = linalg.invert([[Q(c) for c in row] for row in matrix])
        if inv is None:
            raise ValueError("relabel matrix not invertible")
        ref = new_reference or self.reference.transform(matrix)
        terms = []
        for j, s in self.terms:
            img = linalg.vec_mat([Q(c) for c in j], inv)
            if any(c.denominator != 1 for c in img):
                raise ValueError("relabel matrix not lattice-preserving")
            terms.append((tuple(int(c) for c in img), s))
        return LatticeSeries.make(terms, ref, self.tail)

    # -- comparison -----------------------------------------------------------------------

    def congruent(self, other: "LatticeSeries", level=None) -> bool:
        """Term-list equality below the common tail (and optional level)."""
        self._check_ref(other)
        lvl = min(self.tail, other.tail)
        if level is not None:
            lvl = min(lvl, level)
        return self._terms_below(lvl) == other._terms_below(lvl)

    def first_difference(self, other: "LatticeSeries", level=None):
        """Smallest exponent (lex) where the two term lists differ, or None."""
        self._check_ref(other)
        lvl = min(self.tail, other.tail)
        if level is not None:
            lvl = min(lvl, level)
        mine = dict(self._terms_below(lvl))
        theirs = dict(other._terms_below(lvl))
        for j in sorted(set(mine) | set(theirs)):
            if mine.get(j) != theirs.get(j):
                return j
        return None

    def _terms_below(self, level):
        out = []
        for j, s in self.terms:
            capped = s.truncate(
                level - min_pairing(j, self.reference)
                if not is_inf(level)
                else INF
            )
            if not capped.is_zero_up_to_truncation():
                out.append((j, tuple(capped.terms)))
        return tuple(sorted(out))

    # -- text form ---------------------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for j, s in self.terms:
                coeff = str(s)
                if len(s.terms) > 1 or not is_inf(s.truncation):
                    coeff = f"({coeff})"
                parts.append(f"{coeff}*x^[{','.join(str(c) for c in j)}]")
            body = " + ".join(parts)
        tail = "" if is_inf(self.tail) else f" [tail {fmt_q(self.tail)}]"
        return f"{body}{tail} [ref {self.reference.digest()}]"

    def to_json(self) -> dict:
        return {
            "terms": [
                {"exponent": list(j), "coefficient": str(s)} for j, s in self.terms
            ],
            "tail": fmt_q(self.tail),
            "reference": self.reference.to_json(),
        }

    @staticmethod
    def from_json(data: dict) -> "LatticeSeries":
        ref = RationalPolygon.from_json(data["reference"])
        tail = INF if data.get("tail", "inf") == "inf" else parse_q(data["tail"])
        terms = [
            (tuple(t["exponent"]), NovikovScalar.parse(t["coefficient"]))
            for t in data.get("terms", [])
        ]
        return LatticeSeries.make(terms, ref, tail)

    @staticmethod
    def parse(text: str, reference: RationalPolygon) -> "LatticeSeries":
        """Parse the text form, e.g. 'T^(1/2)*x^[-1,2] + 1*x^[0,0] [tail 5]'."""
        src = text.strip()
        src = re.sub(r"\[ref [0-9a-f]+\]\s*$", "", src).strip()
        tail = INF
        m = re.search(r"\[\s*tail\s+(-?\d+(?:/\d+)?)\s*\]\s*$", src)
        if m:
            tail = parse_q(m.group(1))
            src = src[: m.start()].strip()
        if src == "0" or not src:
            return LatticeSeries((), tail, reference)
        terms = []
        for chunk in _split_top_level(src):
            m = re.match(r"^\s*(?P<coeff>.+?)\s*\*\s*x\^\[(?P<exp>[-\d,\s]+)\]\s*$", chunk)
            if not m:
                raise ParseError(f"bad series term {chunk!r}")
            coeff_text = m.group("coeff").strip()
            if coeff_text.startswith("(") and coeff_text.endswith(")"):
                coeff_text = coeff_text[1:-1]
            scalar = NovikovScalar.parse(coeff_text)
            j = tuple(int(c.strip()) for c in m.group("exp").split(","))
            terms.append((j, scalar))
        return LatticeSeries.make(terms, reference, tail)


def _unit_vec(i, n):
    return tuple(int(k == i) for k in range(n))


def _split_top_level(src):
    """Split on ' + ' outside parentheses/brackets (scalar coefficients may
    themselves contain sums)."""
    chunks, depth, start, i = [], 0, 0, 0
    while i < len(src):
        c = src[i]
        if c in "([":
            depth += 1
        elif c in ")]":
            depth -= 1
        elif depth == 0 and src.startswith(" + ", i):
            chunks.append(src[start:i])
            i += 3
            start = i
            continue
        i += 1
    chunks.append(src[start:])
    return chunks


# -- module-level operations matching the contract names ----------------------


def val_on_polygon(f: LatticeSeries, polygon: RationalPolygon) -> Valuation:
    return f.val_on(polygon)


def series_mul(f: LatticeSeries, g: LatticeSeries) -> LatticeSeries:
    return f * g


def hyperplane_monomial(h: Halfspace, polygon: RationalPolygon) -> LatticeSeries:
    """x^{l_H} for a co-oriented rational hyperplane.

    The halfspace's inward primitive normal *is* l_H: it annihilates the
    boundary directions and increases toward the co-oriented side.
    """
    return LatticeSeries.monomial(h.normal, polygon)


def substitute_unit(f: LatticeSeries, images, cutoff) -> LatticeSeries:
    return f.substitute(images, cutoff)


def hull_val(f: LatticeSeries, p: RationalPolygon, q: RationalPolygon) -> Valuation:
    """val on conv(P u Q) for an exact (finitely supported) series: the
    computational shadow of Hartogs convexity."""
    hull = convex_hull(list(p.vertices) + list(q.vertices))
    return f.with_reference(hull).val()


# distinguished 2d wall-crossing monomials (val(eta) = u, val(xi) = -v)
ETA_EXP = (0, 1)
XI_EXP = (-1, 0)


def eta(reference: RationalPolygon) -> LatticeSeries:
    return LatticeSeries.monomial(ETA_EXP, reference)


def xi(reference: RationalPolygon) -> LatticeSeries:
    return LatticeSeries.monomial(XI_EXP, reference)

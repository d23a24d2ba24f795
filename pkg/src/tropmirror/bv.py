"""Polyvector fields, differential forms, and the volume-form BV operator.

Bases: a polyvector component on the index set J = {j(1) < ... < j(k)} is a
lattice series times the wedge of logarithmic derivations y_j d/dy_j; a form
component sits on dy_J.  Contraction against the log volume form
Omega_0 = dy_1/y_1 ^ ... ^ dy_n/y_n maps x^g on J to
(-1)^{s(J)} x^{g - sum_{j' not in J} e_{j'}} on dy_{J^c}, with the sign
bookkeeping s(J) = sum_l (j(l) - l).  The BV operator is
div(w) = (-1)^{|w|} uncontract(d(contract(w))); on the torus group algebra
it realizes Delta(z^a (x) b) = z^a (x) iota_a b through z^a -> y^{-a}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .novikov import NovikovScalar
from .polytopes import RationalPolygon
from .series import LatticeSeries
from .qmath import Q, is_inf


def sign_s(index_set) -> int:
    """(-1)^{s(J)} with s(J) = sum (j(l) - l), 1-indexed on both sides."""
    s = sum(j - l for l, j in enumerate(sorted(index_set), start=1))
    return -1 if s % 2 else 1


def _complement(index_set, n):
    return tuple(i for i in range(1, n + 1) if i not in index_set)


def _insert_sign(i, index_set):
    """Sign of sorting dy_i into dy_{index_set} (i not in the set)."""
    before = sum(1 for j in index_set if j < i)
    return -1 if before % 2 else 1


@dataclass(frozen=True)
class PolyVector:
    """Graded polyvector field: components on increasing index tuples."""

    n: int
    components: tuple  # tuple of (index tuple, LatticeSeries), sorted
    reference: RationalPolygon

    @staticmethod
    def make(n, components, reference) -> "PolyVector":
        acc = {}
        items = components.items() if isinstance(components, dict) else components
        for idx, series in items:
            key = tuple(sorted(idx))
            if len(set(key)) != len(key):
                raise ValueError(f"repeated index in {idx}")
            if key and (key[0] < 1 or key[-1] > n):
                raise ValueError(f"index out of range in {idx}")
            acc[key] = acc[key] + series if key in acc else series
        kept = tuple(
            (idx, s) for idx, s in sorted(acc.items()) if s.terms or not is_inf(s.tail)
        )
        return PolyVector(n, kept, reference)

    @staticmethod
    def monomial(n, exponent, index_set, reference, scalar=None) -> "PolyVector":
        series = LatticeSeries.monomial(tuple(exponent), reference, scalar)
        return PolyVector.make(n, [(tuple(index_set), series)], reference)

    def is_zero(self) -> bool:
        return all(not s.terms for _, s in self.components)

    def __add__(self, other: "PolyVector") -> "PolyVector":
        return PolyVector.make(
            self.n, list(self.components) + list(other.components), self.reference
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVector):
            return NotImplemented
        mine = {i: s for i, s in self.components if s.terms}
        theirs = {i: s for i, s in other.components if s.terms}
        if set(mine) != set(theirs):
            return False
        return all(mine[i].congruent(theirs[i]) for i in mine)

    def homogeneous(self, degree: int) -> "PolyVector":
        return PolyVector.make(
            self.n,
            [(i, s) for i, s in self.components if len(i) == degree],
            self.reference,
        )

    def degrees(self):
        return sorted({len(i) for i, s in self.components if s.terms})


@dataclass(frozen=True)
class DiffForm:
    """Differential form: components on dy_J."""

    n: int
    components: tuple
    reference: RationalPolygon

    @staticmethod
    def make(n, components, reference) -> "DiffForm":
        acc = {}
        items = components.items() if isinstance(components, dict) else components
        for idx, series in items:
            key = tuple(sorted(idx))
            acc[key] = acc[key] + series if key in acc else series
        kept = tuple(
            (idx, s) for idx, s in sorted(acc.items()) if s.terms or not is_inf(s.tail)
        )
        return DiffForm(n, kept, reference)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffForm):
            return NotImplemented
        mine = {i: s for i, s in self.components if s.terms}
        theirs = {i: s for i, s in other.components if s.terms}
        if set(mine) != set(theirs):
            return False
        return all(mine[i].congruent(theirs[i]) for i in mine)


def contract_volume(w: PolyVector) -> DiffForm:
    """iota_{Omega_0}^{-1}: polyvectors to forms by contraction into the log
    volume form (degree k to degree n-k)."""
    comps = []
    for idx, series in w.components:
        comp = _complement(idx, w.n)
        shift = tuple(-1 if (i + 1) in comp else 0 for i in range(w.n))
        shifted = series.shift_exponents(shift)
        if sign_s(idx) < 0:
            shifted = -shifted
        comps.append((comp, shifted))
    return DiffForm.make(w.n, comps, w.reference)


def uncontract_volume(form: DiffForm) -> PolyVector:
    """Inverse of contract_volume."""
    comps = []
    for comp, series in form.components:
        idx = _complement(comp, form.n)
        shift = tuple(1 if (i + 1) in comp else 0 for i in range(form.n))
        shifted = series.shift_exponents(shift)
        if sign_s(idx) < 0:
            shifted = -shifted
        comps.append((idx, shifted))
    return PolyVector.make(form.n, comps, form.reference)


def exterior_d(form: DiffForm) -> DiffForm:
    """d(f dy_I) = sum_i (d f / d y_i) dy_i ^ dy_I, exact term calculus."""
    comps = []
    for idx, series in form.components:
        for i in range(1, form.n + 1):
            if i in idx:
                continue
            partial = _partial(series, i)
            if not partial.terms:
                continue
            if _insert_sign(i, idx) < 0:
                partial = -partial
            comps.append((tuple(sorted(idx + (i,))), partial))
    return DiffForm.make(form.n, comps, form.reference)


def _partial(series: LatticeSeries, i: int) -> LatticeSeries:
    """d/dy_i on lattice monomials: x^g -> g_i x^{g - e_i}."""
    out = []
    for j, scalar in series.terms:
        g = j[i - 1]
        if g == 0:
            continue
        out.append(
            (
                tuple(c - (1 if pos == i - 1 else 0) for pos, c in enumerate(j)),
                scalar.scale(Q(g)),
            )
        )
    # derivative shifts each term's valuation by at most -max_P m_i
    tail = series.tail
    if not is_inf(tail):
        tail = tail - series.reference.support(_unit_cov(i, series.reference.dim))
    return LatticeSeries.make(out, series.reference, tail)


def _unit_cov(i, n):
    return tuple(1 if k == i - 1 else 0 for k in range(n))


def bv_delta(w: PolyVector) -> PolyVector:
    """div_{Omega_0} w = (-1)^{|w|} iota o d o iota^{-1} w, degreewise."""
    out = PolyVector.make(w.n, [], w.reference)
    for deg in w.degrees():
        part = w.homogeneous(deg)
        step = uncontract_volume(exterior_d(contract_volume(part)))
        if deg % 2:
            step = PolyVector.make(
                w.n, [(i, -s) for i, s in step.components], w.reference
            )
        out = out + step
    return out


# -- the torus group-algebra model -------------------------------------------


def interior_product(alpha, index_set):
    """iota_alpha on a wedge basis element: list of (coefficient, index set).

    iota_alpha(e_{j1} ^ ... ^ e_{jk}) =
        sum_l (-1)^{l-1} alpha(e_{jl}) e_{j1} ^ ... omit l ... ^ e_{jk}.
    Independent combinatorial oracle for the BV identity.
    """
    out = []
    idx = tuple(sorted(index_set))
    for l, j in enumerate(idx, start=1):
        coeff = alpha[j - 1]
        if coeff == 0:
            continue
        sign = -1 if (l - 1) % 2 else 1
        out.append((sign * coeff, tuple(v for v in idx if v != j)))
    return out


def cluster_element(n, alpha, index_set, reference) -> PolyVector:
    """Realize z^alpha (x) e_J as the polyvector y^{-alpha} d_J."""
    return PolyVector.monomial(
        n, tuple(-a for a in alpha), tuple(index_set), reference
    )


def cluster_delta_oracle(n, alpha, index_set, reference) -> PolyVector:
    """z^alpha (x) iota_alpha e_J through the same realization."""
    out = PolyVector.make(n, [], reference)
    for coeff, idx in interior_product(alpha, index_set):
        series = LatticeSeries.monomial(
            tuple(-a for a in alpha), reference
        ).scale(NovikovScalar.constant(coeff))
        out = out + PolyVector.make(n, [(idx, series)], reference)
    return out

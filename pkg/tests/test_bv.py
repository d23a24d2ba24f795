"""BV calculus: contraction signs, Delta^2 = 0, the group-algebra identity."""

import itertools
import random
from fractions import Fraction as Q

from tropmirror.bv import (
    DiffForm,
    PolyVector,
    bv_delta,
    cluster_delta_oracle,
    cluster_element,
    contract_volume,
    exterior_d,
    interior_product,
    sign_s,
    uncontract_volume,
)
from tropmirror.novikov import NovikovScalar
from tropmirror.polytopes import RationalPolygon
from tropmirror.series import LatticeSeries

REF2 = RationalPolygon.box(0, 1, dim=2)
REF3 = RationalPolygon.box(0, 1, dim=3)


def ref(n):
    return REF2 if n == 2 else REF3


class TestContract:
    def test_unit_to_volume_form(self):
        one = PolyVector.monomial(2, (0, 0), (), REF2)
        form = contract_volume(one)
        assert form == DiffForm.make(
            2, [((1, 2), LatticeSeries.monomial((-1, -1), REF2))], REF2
        )

    def test_top_to_one(self):
        top = PolyVector.monomial(2, (0, 0), (1, 2), REF2)
        assert contract_volume(top) == DiffForm.make(
            2, [((), LatticeSeries.one(REF2))], REF2
        )

    def test_signed_single_derivation(self):
        # x^a d_1 -> x^{a - e_2} dy_2 with sign +
        w = PolyVector.monomial(2, (2, 3), (1,), REF2)
        assert contract_volume(w) == DiffForm.make(
            2, [((2,), LatticeSeries.monomial((2, 2), REF2))], REF2
        )
        # the paper's s(J) bookkeeping: d_2 picks up a sign
        w2 = PolyVector.monomial(2, (0, 0), (2,), REF2)
        assert contract_volume(w2) == DiffForm.make(
            2, [((1,), -LatticeSeries.monomial((-1, 0), REF2))], REF2
        )

    def test_uncontract_inverse(self):
        rng = random.Random(3)
        for n in (2, 3):
            for _ in range(40):
                idx = tuple(
                    sorted(rng.sample(range(1, n + 1), rng.randint(0, n)))
                )
                alpha = tuple(rng.randint(-3, 3) for _ in range(n))
                w = PolyVector.monomial(n, alpha, idx, ref(n))
                assert uncontract_volume(contract_volume(w)) == w


class TestDelta:
    def test_constant_closed(self):
        one = PolyVector.monomial(2, (0, 0), (), REF2)
        assert bv_delta(one).is_zero()

    def test_spec_example_e1(self):
        w = cluster_element(2, (1, 0), (1,), REF2)
        expect = cluster_element(2, (1, 0), (), REF2)
        assert bv_delta(w) == expect

    def test_group_algebra_identity(self):
        # Delta(z^a (x) b) = z^a (x) iota_a b for all a in [-3,3]^n and all b
        for n in (2, 3):
            rng_box = range(-3, 4)
            for alpha in itertools.product(rng_box, repeat=n):
                for size in range(n + 1):
                    for idx in itertools.combinations(range(1, n + 1), size):
                        w = cluster_element(n, alpha, idx, ref(n))
                        assert bv_delta(w) == cluster_delta_oracle(
                            n, alpha, idx, ref(n)
                        ), (alpha, idx)

    def test_delta_squared_zero(self):
        rng = random.Random(7)
        for _ in range(200):
            n = rng.choice((2, 3))
            idx = tuple(sorted(rng.sample(range(1, n + 1), rng.randint(0, n))))
            alpha = tuple(rng.randint(-4, 4) for _ in range(n))
            coeff = NovikovScalar.monomial(Q(rng.randint(0, 3), 2), rng.randint(1, 5))
            w = PolyVector.monomial(n, alpha, idx, ref(n), coeff)
            assert bv_delta(bv_delta(w)).is_zero()

    def test_delta_squared_zero_sums(self):
        rng = random.Random(11)
        for _ in range(40):
            n = rng.choice((2, 3))
            w = PolyVector.make(n, [], ref(n))
            for _ in range(3):
                idx = tuple(sorted(rng.sample(range(1, n + 1), rng.randint(0, n))))
                alpha = tuple(rng.randint(-3, 3) for _ in range(n))
                w = w + PolyVector.monomial(n, alpha, idx, ref(n))
            assert bv_delta(bv_delta(w)).is_zero()


class TestInteriorProduct:
    def test_pattern(self):
        got = interior_product((2, 5), (1, 2))
        assert got == [(2, (2,)), (-5, (1,))]

    def test_zero_alpha_entries_skipped(self):
        assert interior_product((0, 0, 1), (1, 2)) == []


def test_sign_s_values():
    assert sign_s(()) == 1
    assert sign_s((1,)) == 1
    assert sign_s((2,)) == -1
    assert sign_s((1, 2)) == 1
    assert sign_s((1, 3)) == -1
    assert sign_s((2, 3)) == 1

"""Novikov scalar arithmetic: spec examples, valuation laws, inverse oracle."""

import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from tropmirror.errors import InsufficientPrecision, ZeroInput
from tropmirror.novikov import NovikovScalar, nov_val
from tropmirror.qmath import INF


def S(text):
    return NovikovScalar.parse(text)


def rand_scalar(rng, nterms=4, allow_neg_exp=False):
    lo = -3 if allow_neg_exp else 0
    pairs = []
    for _ in range(rng.randint(1, nterms)):
        exp = Q(rng.randint(lo * 4, 12), rng.choice([1, 2, 4]))
        coeff = Q(rng.randint(-9, 9))
        if coeff:
            pairs.append((exp, coeff))
    if not pairs:
        pairs = [(Q(0), Q(1))]
    return NovikovScalar.from_terms(pairs)


class TestVal:
    def test_smallest_exponent(self):
        assert nov_val(S("1*T^(1/2) + 3*T^2")) == (Q(1, 2), True)

    def test_exact_zero(self):
        assert nov_val(NovikovScalar.zero()) == (INF, True)

    def test_truncated_zero_is_lower_bound(self):
        v = nov_val(NovikovScalar((), Q(5)))
        assert v.value == 5 and not v.exact


class TestMul:
    def test_polynomial_identity(self):
        one_plus = S("1 + 1*T^1")
        one_minus = S("1 + -1*T^1")
        assert one_plus * one_minus == S("1 + -1*T^2")

    def test_exponent_addition(self):
        a = NovikovScalar.monomial(Q(1, 3))
        b = NovikovScalar.monomial(Q(2, 3))
        assert a * b == NovikovScalar.monomial(1)

    def test_truncation_drops_terms(self):
        # oracle: untruncated product filtered by exponents < 2
        a = S("1 + 1*T^1 [trunc 2]")
        exact = S("1 + 1*T^1")
        oracle = (exact * exact).truncate(2)
        prod = a * a
        assert prod == oracle
        assert prod == S("1 + 2*T^1 [trunc 2]")

    def test_truncation_rule(self):
        a = NovikovScalar.from_terms([(Q(1), Q(1))], truncation=Q(4))
        b = NovikovScalar.from_terms([(Q(2), Q(1))], truncation=Q(3))
        # min(trunc_a + val_b, trunc_b + val_a) = min(4+2, 3+1) = 4
        assert (a * b).truncation == 4


class TestUnitInverse:
    def test_geometric(self):
        a = S("1 + 1*T^1")
        inv = a.unit_inverse(3)
        assert inv == S("1 + -1*T^1 + 1*T^2 [trunc 3]")
        assert (a * inv).congruent(NovikovScalar.one(), 3)

    def test_monomial_exact(self):
        a = NovikovScalar.monomial(2)
        assert a.unit_inverse(5) == NovikovScalar.monomial(-2)

    def test_constant(self):
        assert NovikovScalar.constant(2).unit_inverse(10).congruent(
            NovikovScalar.constant(Q(1, 2)), 10
        )

    def test_zero_rejected(self):
        with pytest.raises(ZeroInput):
            NovikovScalar.zero().unit_inverse(3)
        with pytest.raises(ZeroInput):
            NovikovScalar((), Q(4)).unit_inverse(3)

    def test_insufficient_precision(self):
        a = S("1 + 1*T^1 [trunc 2]")
        with pytest.raises(InsufficientPrecision):
            a.unit_inverse(3)

    def test_random_units(self):
        rng = random.Random(7)
        cutoff = Q(6)
        for _ in range(200):
            a = rand_scalar(rng)
            if a.is_zero_up_to_truncation() or a.val().value != 0:
                a = NovikovScalar.one() + a.shift(Q(1, 4))
            inv = a.unit_inverse(cutoff)
            assert (a * inv).congruent(NovikovScalar.one(), cutoff)


class TestPower:
    def test_negative_power(self):
        a = S("1 + 1*T^1")
        assert a.power(-2, 4).congruent(
            S("1 + -2*T^1 + 3*T^2 + -4*T^3"), 4
        )

    def test_monomial_negative(self):
        assert NovikovScalar.monomial(Q(1, 2)).power(-3, 10).congruent(
            NovikovScalar.monomial(Q(-3, 2)), 10
        )


@given(
    st.lists(
        st.tuples(
            st.fractions(min_value=-3, max_value=6, max_denominator=4),
            st.fractions(min_value=-5, max_value=5, max_denominator=3),
        ),
        max_size=5,
    ),
    st.lists(
        st.tuples(
            st.fractions(min_value=-3, max_value=6, max_denominator=4),
            st.fractions(min_value=-5, max_value=5, max_denominator=3),
        ),
        max_size=5,
    ),
)
def test_val_laws(pairs_a, pairs_b):
    a = NovikovScalar.from_terms(pairs_a)
    b = NovikovScalar.from_terms(pairs_b)
    va, vb = a.val().value, b.val().value
    # val is multiplicative over Q (leading terms cannot cancel)
    assert (a * b).val().value == (va + vb if a.terms and b.terms else INF)
    vs = (a + b).val().value
    assert vs >= min(va, vb)
    if va != vb:
        assert vs == min(va, vb)


def test_truncation_commutes_with_ops():
    rng = random.Random(3)
    for _ in range(50):
        a, b = rand_scalar(rng), rand_scalar(rng)
        level = Q(rng.randint(1, 8), 2)
        assert (a.truncate(level) * b.truncate(level)).truncate(level) == (
            (a * b).truncate(level)
        )
        assert (a.truncate(level) + b.truncate(level)) == (a + b).truncate(level)


def test_text_roundtrip():
    rng = random.Random(11)
    for _ in range(60):
        a = rand_scalar(rng, allow_neg_exp=True)
        if rng.random() < 0.4:
            a = a.truncate(Q(rng.randint(2, 20), 2))
        assert NovikovScalar.parse(str(a)) == a
    assert str(S("3*T^(1/2) + -1*T^2 [trunc 7/2]")) == "3*T^(1/2) + -1*T^2 [trunc 7/2]"

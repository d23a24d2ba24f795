"""Filtered complexes: diagonalization certificates, torsion, boundary depth."""

import random
from fractions import Fraction as Q

import pytest

from tropmirror.errors import ParseError
from tropmirror.filtered import (
    FilteredComplex,
    diagonalize_valuation,
    invariant_exponents,
    random_complex,
    replay,
)
from tropmirror.novikov import NovikovScalar
from tropmirror.qmath import NEG_INF


def S(text):
    return NovikovScalar.parse(text)


def M(rows):
    return [[S(e) for e in row] for row in rows]


class TestDiagonalize:
    def test_single_t(self):
        d = diagonalize_valuation(M([["1*T^1"]]))
        assert d.exponents == [1]

    def test_rank_one(self):
        # second row is T x first: rank 1, a = (1)
        d = diagonalize_valuation(M([["1*T^1", "1*T^2"], ["1*T^2", "1*T^3"]]))
        assert d.exponents == [1]
        assert invariant_exponents(M([["1*T^1", "1*T^2"], ["1*T^2", "1*T^3"]])) == [1]

    def test_diagonal_units(self):
        d = diagonalize_valuation(M([["1 + 1*T^1", "0"], ["0", "1*T^(1/2)"]]))
        assert d.exponents == [0, Q(1, 2)]

    def test_replay_reproduces_reduction(self):
        rng = random.Random(3)
        for _ in range(25):
            cx = random_complex(rng, max_rank=4)
            mat = cx.differential(0)
            d = diagonalize_valuation(mat)
            again = replay(d.ops, mat)
            assert again == d.reduced

    def test_matches_minor_oracle(self):
        rng = random.Random(5)
        for _ in range(40):
            cx = random_complex(rng, max_rank=4)
            mat = cx.differential(0)
            assert diagonalize_valuation(mat).exponents == invariant_exponents(mat)

    def test_base_change_invariance(self):
        # unit-triangular moves leave the exponents alone
        rng = random.Random(7)
        for _ in range(20):
            cx = random_complex(rng, max_rank=3)
            mat = cx.differential(0)
            if len(mat) < 2:
                continue
            c = NovikovScalar.from_terms([(Q(0), Q(rng.randint(1, 3)))])
            moved = [row[:] for row in mat]
            moved[0] = [a + c * b for a, b in zip(moved[0], moved[1])]
            assert invariant_exponents(moved) == invariant_exponents(mat)


class TestTorsion:
    def test_monomial_complex(self):
        cx = FilteredComplex.make({0: 1, 1: 1}, {0: M([["1*T^(3/2)"]])})
        assert cx.max_torsion(1) == Q(3, 2)
        # oracle: H^1 = Lambda_{>=0} / T^{3/2} by definition
        assert cx.boundary_depth(1) == Q(3, 2)

    def test_zero_differential_free(self):
        cx = FilteredComplex.make({0: 2, 1: 2}, {0: M([["0", "0"], ["0", "0"]])})
        assert cx.max_torsion(1) == NEG_INF
        assert cx.boundary_depth(1) == 0

    def test_identity_differential(self):
        cx = FilteredComplex.make({0: 1, 1: 1}, {0: M([["1"]])})
        assert cx.max_torsion(1) == NEG_INF
        assert cx.boundary_depth(1) == 0

    def test_torsion_equals_boundary_depth_random(self):
        rng = random.Random(11)
        for _ in range(60):
            cx = random_complex(rng, max_rank=4)
            t = cx.max_torsion(1)
            b = cx.boundary_depth(1)
            if t == NEG_INF:
                assert b == 0
            else:
                assert b == t

    def test_three_term_square_zero(self):
        # 0 -> L -> L^2 -> L -> 0 with d1 d0 = 0
        d0 = M([["1*T^1"], ["-1*T^2"]])
        d1 = M([["1*T^2", "1*T^1"]])
        cx = FilteredComplex.make({0: 1, 1: 2, 2: 1}, {0: d0, 1: d1})
        assert cx.max_torsion(1) == 1
        assert cx.max_torsion(2) == 1
        assert cx.boundary_depth(1) == 1

    def test_square_nonzero_rejected(self):
        d0 = M([["1"], ["0"]])
        d1 = M([["1", "0"]])
        with pytest.raises(ParseError):
            FilteredComplex.make({0: 1, 1: 2, 2: 1}, {0: d0, 1: d1})

    def test_shifts_change_depth(self):
        cx = FilteredComplex.make(
            {0: 1, 1: 1},
            {0: M([["1*T^2"]])},
            shifts={0: [Q(1)], 1: [Q(0)]},
        )
        # rho(y) = 1, rho(x) = rho(T^2 y-image) = 2: the loss drops to 1
        assert cx.boundary_depth(1) == 1

    def test_negative_valuation_rejected(self):
        with pytest.raises(ParseError):
            FilteredComplex.make({0: 1, 1: 1}, {0: M([["1*T^(-1)"]])})


def test_json_roundtrip():
    rng = random.Random(13)
    cx = random_complex(rng)
    assert FilteredComplex.from_json(cx.to_json()) == cx

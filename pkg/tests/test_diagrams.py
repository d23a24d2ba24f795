"""Eigenray diagrams: shears, validation, slides, branch moves."""

import json
from fractions import Fraction as Q

import pytest

from tropmirror.diagrams import (
    EigenrayDiagram,
    Node,
    Ray,
    det2,
    shear_apply,
    shear_matrix,
)
from tropmirror.errors import (
    BadOffsets,
    LineObstructed,
    NonPrimitive,
    NonPrimitiveDirection,
    OrderViolation,
    OverlappingRays,
    ParseError,
)


class TestShear:
    def test_matrix_form_e1(self):
        # A_{k,(1,0)} is (1 -k; 0 1)
        assert shear_apply(1, (1, 0), (0, 1)) == (-1, 1)
        assert shear_matrix(1, (1, 0)) == ((1, -1), (0, 1))

    def test_eigenvector_fixed(self):
        for k in range(1, 5):
            for e in [(1, 0), (0, 1), (2, 1), (-1, 3)]:
                assert shear_apply(k, e, e) == tuple(map(Q, e))

    def test_determinant_expansion(self):
        assert shear_apply(2, (0, 1), (1, 0)) == (1, 2)

    def test_volume_preserving(self):
        import random

        rng = random.Random(3)
        for _ in range(50):
            e = (rng.randint(-3, 3), rng.randint(-3, 3))
            if e == (0, 0):
                continue
            from math import gcd

            g = gcd(abs(e[0]), abs(e[1]))
            e = (e[0] // g, e[1] // g)
            k = rng.randint(1, 4)
            m = shear_matrix(k, e)
            assert det2((m[0][0], m[1][0]), (m[0][1], m[1][1])) == 1

    def test_nonprimitive_rejected(self):
        with pytest.raises(NonPrimitive):
            shear_apply(1, (2, 2), (1, 0))


class TestValidation:
    def test_b1_valid(self):
        d = EigenrayDiagram.parse(
            '{"rays":[{"base":["0","0"],"direction":[1,0],'
            '"nodes":[{"offset":"0","multiplicity":1}]}]}'
        )
        assert len(d.rays) == 1
        assert d.rays[0].total_multiplicity() == 1

    def test_overlapping_rays(self):
        with pytest.raises(OverlappingRays):
            EigenrayDiagram.make(
                [
                    Ray((0, 0), (1, 0), (Node(0, 1),)),
                    Ray((1, -1), (0, 1), (Node(0, 1),)),
                ]
            )

    def test_nonprimitive_direction(self):
        with pytest.raises(NonPrimitiveDirection):
            Ray((0, 0), (2, 2), (Node(0, 1),))

    def test_bad_offsets(self):
        with pytest.raises(BadOffsets):
            Ray((0, 0), (1, 0), (Node(1, 1),))
        with pytest.raises(BadOffsets):
            Ray((0, 0), (1, 0), (Node(0, 1), Node(0, 1)))

    def test_json_syntax_error_location(self):
        with pytest.raises(ParseError) as err:
            EigenrayDiagram.parse('{"rays": [}')
        assert err.value.line == 1

    def test_roundtrip(self):
        d = EigenrayDiagram.make(
            [
                Ray((0, 0), (1, 0), (Node(0, 2), Node(3, 1))),
                Ray((0, 5), (-1, 1), (Node(0, 1),)),
            ]
        )
        assert EigenrayDiagram.from_json(d.to_json()) == d


class TestSlide:
    def test_slide_start_node(self):
        d = EigenrayDiagram.standard(1)
        slid = d.nodal_slide(0, 0, 1)
        assert slid.rays[0].base == (1, 0)
        assert slid.rays[0].nodes[0] == Node(0, 1)

    def test_resolve_multiplicity(self):
        d = EigenrayDiagram.standard(3)
        r = d.resolve_node(0, 0, spacing=1)
        assert [n.offset for n in r.rays[0].nodes] == [0, 1, 2]
        assert all(n.multiplicity == 1 for n in r.rays[0].nodes)

    def test_slide_past_neighbor(self):
        d = EigenrayDiagram.make(
            [Ray((0, 0), (1, 0), (Node(0, 1), Node(2, 1)))]
        )
        with pytest.raises(OrderViolation):
            d.nodal_slide(0, 0, 2)
        with pytest.raises(OrderViolation):
            d.nodal_slide(0, 1, 0)


class TestBranchMove:
    def test_single_node_flip(self):
        d = EigenrayDiagram.standard(1)
        moved = d.branch_move(0)
        assert moved.rays[0].direction == (-1, 0)
        assert moved.rays[0].base == (0, 0)

    def test_involution(self):
        d = EigenrayDiagram.make(
            [
                Ray((0, 0), (1, 0), (Node(0, 2), Node(1, 1))),
                Ray((0, 3), (1, 1), (Node(0, 1),)),
            ]
        )
        twice = d.branch_move(0).branch_move(0)
        assert twice.normalized() == d.normalized()

    def test_involution_transports_other_side(self):
        d = EigenrayDiagram.make(
            [
                Ray((0, 0), (1, 0), (Node(0, 1),)),
                Ray((0, -3), (1, -1), (Node(0, 2),)),  # below the eigenline
            ]
        )
        once = d.branch_move(0)
        assert once.rays[1] != d.rays[1]  # transported by the shear
        assert once.rays[1].nodes == d.rays[1].nodes  # data preserved
        assert d.branch_move(0).branch_move(0).normalized() == d.normalized()

    def test_obstructed(self):
        d = EigenrayDiagram.make(
            [
                Ray((0, 0), (1, 0), (Node(0, 1),)),
                Ray((-2, 0), (-1, 0), (Node(0, 1),)),  # on the eigenline
            ]
        )
        with pytest.raises(LineObstructed):
            d.branch_move(0)

"""Nodal polygons: chart coordinates, P(a), decomposition, smallness."""

import random
from fractions import Fraction as Q

import pytest

from tropmirror.diagrams import EigenrayDiagram, Node, Ray
from tropmirror.errors import OnWall
from tropmirror.local_model import pa_contains_trop, polygon_Pa
from tropmirror.nodal import (
    NodalPolygon,
    NodeFrame,
    StripData,
    TaggedHalfspace,
    auto_strips,
    chart_transition,
    classify_small,
    decompose_admissible_intersection,
)
from tropmirror.polytopes import RationalPolygon

B1 = EigenrayDiagram.standard(1)
TWO_RAY = EigenrayDiagram.make(
    [
        Ray((0, 0), (1, 0), (Node(0, 1),)),
        Ray((0, 6), (-1, 0), (Node(0, 2),)),
    ]
)


def tagged_box(frame, lo_v, hi_v, lo_u, hi_u, tags=("-", "-", "-", "-")):
    return NodalPolygon.from_tagged(
        frame,
        (
            TaggedHalfspace(tags[0], (1, 0), Q(lo_v)),
            TaggedHalfspace(tags[1], (-1, 0), -Q(hi_v)),
            TaggedHalfspace(tags[2], (0, 1), Q(lo_u)),
            TaggedHalfspace(tags[3], (0, -1), -Q(hi_u)),
        ),
    )


class TestChartTransition:
    def test_upper_identity(self):
        assert chart_transition(2, "upper", (3, 2)) == (3, 2)

    def test_lower_shear(self):
        assert chart_transition(2, "lower", (0, -1)) == (-2, -1)

    def test_on_wall(self):
        with pytest.raises(OnWall):
            chart_transition(1, "upper", (1, 0))


class TestFrame:
    def test_standard_roundtrip(self):
        fr = NodeFrame.standard(1)
        assert fr.to_local((3, 4)) == (3, 4)
        assert fr.to_global((3, 4)) == (3, 4)

    def test_skew_frame_unimodular(self):
        d = EigenrayDiagram.make([Ray((1, 2), (2, 1), (Node(0, 1),))])
        fr = NodeFrame.at(d, 0, 0)
        rng = random.Random(1)
        for _ in range(20):
            p = (Q(rng.randint(-9, 9), 2), Q(rng.randint(-9, 9), 2))
            assert fr.to_global(fr.to_local(p)) == p

    def test_chart_coords_continuous_on_wall(self):
        fr = NodeFrame.standard(3)
        assert fr.chart_coords("-", (5, 0)) == (5, 0)
        assert fr.chart_coords("-", (5, -1)) == (5 + 3, -1)
        assert fr.chart_coords("+", (5, -1)) == (5, -1)


class TestPa:
    def test_node_interior_all_a(self):
        for k in (1, 2, 4):
            for a in (Q(1), Q(1, 2), Q(3)):
                pa = polygon_Pa(k, a)
                assert pa.node_interior()
                assert pa.contains((0, 0))

    def test_monotone(self):
        pa1 = polygon_Pa(2, 1)
        pa2 = polygon_Pa(2, 2)
        for _, _, glob in pa1.pieces():
            for v in glob.vertices:
                assert pa2.contains(v)

    def test_k1_pieces(self):
        pa = polygon_Pa(1, 1)
        halves = {h: glob for h, _, glob in pa.pieces()}
        assert halves["upper"].vertices == RationalPolygon.box((-1, 0), (1, 1)).vertices
        # lower piece: -1 <= v <= 1 + u for u in [-1, 0]
        assert halves["lower"].vertices == RationalPolygon.from_vertices(
            [(-1, -1), (0, -1), (1, 0), (-1, 0)]
        ).vertices

    def test_membership_matches_cube_sampling(self):
        rng = random.Random(6)
        for k in (1, 2, 3):
            pa = polygon_Pa(k, 1)
            fr = pa.frame
            for _ in range(250):
                v = Q(rng.randint(-40, 40), 8)
                u = Q(rng.randint(-40, 40), 8)
                if u == 0:
                    continue
                # sample in the chart whose cut the point avoids
                side = "-" if u > 0 or v < 0 else "-"
                side = "+" if u > 0 else "-"
                # local chart coords -> global base point
                if side == "+":
                    base_local = (v, u) if u >= 0 else (v + fr.k_left * u, u)
                else:
                    base_local = (v, u) if u >= 0 else (v + fr.k_right * u, u)
                p_global = fr.to_global(base_local)
                assert pa.contains(p_global) == pa_contains_trop(k, 1, side, v, u)


class TestDecompose:
    def test_same_node_single_piece(self):
        fr = NodeFrame.standard(1)
        p = polygon_Pa(1, 2)
        q = tagged_box(fr, -1, 3, -1, 1)  # contains node (bounds <= 0... )
        q = NodalPolygon.from_tagged(
            fr,
            (
                TaggedHalfspace("+", (1, 0), Q(-1)),
                TaggedHalfspace("-", (-1, 0), Q(-3)),
                TaggedHalfspace("-", (0, 1), Q(-1)),
                TaggedHalfspace("-", (0, -1), Q(-1)),
            ),
        )
        pieces = decompose_admissible_intersection(p, q, B1)
        assert len(pieces) == 1
        assert pieces[0].contains_node()

    def test_disjoint_empty(self):
        p = NodalPolygon.from_plain(RationalPolygon.box((5, 5), (6, 6)))
        q = NodalPolygon.from_plain(RationalPolygon.box((8, 8), (9, 9)))
        assert decompose_admissible_intersection(p, q, B1) == []

    def test_straddling_membership_sampling(self):
        # node-free polygons straddling the eigenray, pieces verified on a
        # 1/16 grid
        rng = random.Random(13)
        fr = NodeFrame.standard(1)
        for _ in range(30):
            # boxes to the right of the node, crossing the wall
            x0 = Q(rng.randint(8, 24), 4)
            y0 = Q(rng.randint(-12, -2), 4)
            p = NodalPolygon.from_tagged(
                fr,
                (
                    TaggedHalfspace("-", (1, 0), x0),
                    TaggedHalfspace("-", (-1, 0), -(x0 + Q(rng.randint(4, 10), 2))),
                    TaggedHalfspace("-", (0, 1), y0),
                    TaggedHalfspace("-", (0, -1), -(y0 + Q(rng.randint(4, 10), 2))),
                ),
            )
            x1 = x0 + Q(rng.randint(-4, 4), 4)
            y1 = y0 + Q(rng.randint(-4, 4), 4)
            q = NodalPolygon.from_tagged(
                fr,
                (
                    TaggedHalfspace("-", (1, 0), x1),
                    TaggedHalfspace("-", (-1, 0), -(x1 + 2)),
                    TaggedHalfspace("-", (0, 1), y1),
                    TaggedHalfspace("-", (0, -1), -(y1 + 2)),
                ),
            )
            pieces = decompose_admissible_intersection(p, q, B1)
            for _ in range(60):
                pt = (Q(rng.randint(-64, 64), 16), Q(rng.randint(-64, 64), 16))
                want = p.contains(pt) and q.contains(pt)
                got = any(piece.contains(pt) for piece in pieces)
                assert want == got


class TestClassifySmall:
    def setup_method(self):
        self.strips = auto_strips(TWO_RAY)

    def test_far_polygon_type_a(self):
        p = NodalPolygon.from_plain(RationalPolygon.box((10, 2), (11, 3)))
        assert classify_small(p, TWO_RAY, self.strips) == "A"

    def test_node_polygon_type_b(self):
        fr = NodeFrame.at(TWO_RAY, 0, 0)
        p = tagged_box(fr, Q(-1, 2), Q(1, 2), Q(-1, 2), Q(1, 2))
        assert classify_small(p, TWO_RAY, self.strips) == "B"

    def test_strip_no_sigma_type_c(self):
        fr = NodeFrame.at(TWO_RAY, 0, 0)
        p = tagged_box(fr, 2, 3, Q(-1, 4), Q(1, 4))
        assert classify_small(p, TWO_RAY, self.strips) == "C"

    def test_meets_two_rays_not_small(self):
        p = NodalPolygon.from_plain(
            RationalPolygon.from_vertices([(1, -1), (1, 7), (2, -1), (2, 7)])
        )
        assert classify_small(p, TWO_RAY, self.strips) == "not-small"

    def test_intersection_closed(self):
        fr = NodeFrame.at(TWO_RAY, 0, 0)
        a = tagged_box(fr, Q(-1, 2), Q(1, 2), Q(-1, 2), Q(1, 2))
        b = tagged_box(fr, Q(-1, 4), Q(3, 4), Q(-1, 4), Q(1, 4))
        for piece in decompose_admissible_intersection(a, b, TWO_RAY):
            assert classify_small(piece, TWO_RAY, self.strips) in ("A", "B", "C")


def test_validate_admissible():
    pa = polygon_Pa(1, 1)
    pa.validate_admissible(B1)
    bad = NodalPolygon.from_plain(RationalPolygon.box((-1, -1), (1, 1)))
    with pytest.raises(Exception):
        bad.validate_admissible(B1)  # node on interior without frame


def test_nodal_json_roundtrip():
    pa = polygon_Pa(2, Q(3, 2))
    assert NodalPolygon.from_json(pa.to_json()) == pa
    plain = NodalPolygon.from_plain(RationalPolygon.box(3, 4, dim=2))
    assert NodalPolygon.from_json(plain.to_json()) == plain

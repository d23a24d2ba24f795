"""Glued sections of the mirror sheaf over a nodal base.

A glued section assigns to each cover element (an admissible polygon with a
chart tag) a lattice series in that chart; on every pairwise overlap the
transported locals must agree up to the common certified depth.  Chart
changes across the wall are wall-crossing substitutions; everything is
per-node-frame.

Around-the-node loops are canonicalized as the 4-step sequence (upper wall
crossing, right-wall chart relabel, inverse lower wall crossing, left-wall
chart change = identity in the '+' chart).  The net effect on exact series
is exactly the lattice relabel j -> j . M_k^{-1}; the comparison happens on
the lower polygon, where the truncation produced by the descending
expansions is an honest tail.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .diagrams import EigenrayDiagram
from .errors import (
    DivergentExpansion,
    InsufficientPrecision,
    LoopInvalid,
    MonodromyObstruction,
    NotSmallCover,
    OverlapMismatch,
    PrecisionLoss,
    VertexMismatch,
)
from .local_model import WallCrossSpec, f_base, wall_cross_series
from .nodal import (
    NodalPolygon,
    NodeFrame,
    TaggedHalfspace,
    decompose_admissible_intersection,
)
from .novikov import NovikovScalar
from .polytopes import Halfspace, RationalPolygon, convex_hull
from .qmath import INF, Q, is_inf
from .series import ETA_EXP, XI_EXP, LatticeSeries, eta, xi


# -- chart-polygon plumbing ---------------------------------------------------


def shear_mat(k: int):
    return ((Q(1), Q(k)), (Q(0), Q(1)))


def shear_mat_inv(k: int):
    return ((Q(1), Q(-k)), (Q(0), Q(1)))


def to_chart_polygon(local_poly: RationalPolygon, frame: NodeFrame, tag: str, half: str) -> RationalPolygon:
    """A local-coordinates piece expressed in a chart's own coordinates."""
    if half == "upper":
        return local_poly
    return local_poly.transform(shear_mat_inv(frame.chart_shear(tag)))


def chart_reference(element: NodalPolygon, frame: NodeFrame, tag: str) -> RationalPolygon:
    """Hull of the element's pieces in the chart's coordinates: the reference
    polygon for its local series."""
    pts = []
    for half, loc, glob in element.pieces():
        if element.frame is None:
            loc = glob.transform(_frame_inv(frame), _frame_inv_shift(frame))
            half = None
        if half in (None, "upper"):
            for piece_half, piece in _split_local(loc):
                piece = to_chart_polygon(piece, frame, tag, piece_half)
                pts.extend(piece.vertices)
        else:
            piece = to_chart_polygon(loc, frame, tag, half)
            pts.extend(piece.vertices)
    return convex_hull(pts)


def _frame_inv(frame: NodeFrame):
    # inverse of the unimodular column matrix (e f)
    e, f = frame.e, frame.f
    return ((Q(f[1]), Q(-f[0])), (Q(-e[1]), Q(e[0])))


def _frame_inv_shift(frame: NodeFrame):
    m = _frame_inv(frame)
    o = frame.origin
    return (-(m[0][0] * o[0] + m[0][1] * o[1]), -(m[1][0] * o[0] + m[1][1] * o[1]))


def _split_local(local_poly: RationalPolygon):
    """Split a local-coordinates polygon at the wall u = 0."""
    out = []
    for half, h in (("upper", Halfspace((0, 1), Q(0))), ("lower", Halfspace((0, -1), Q(0)))):
        piece = local_poly.intersect_halfspace(h)
        if piece is not None:
            out.append((half, piece))
    return out


def _local_pieces(element: NodalPolygon, frame: NodeFrame):
    """(half, local polygon) pieces of an element relative to `frame`."""
    out = []
    for half, loc, glob in element.pieces():
        if element.frame is None:
            loc = glob.transform(_frame_inv(frame), _frame_inv_shift(frame))
            out.extend(_split_local(loc))
        else:
            out.append((half, loc))
    return out


# -- glued sections ------------------------------------------------------------


@dataclass(frozen=True)
class CoverElement:
    polygon: NodalPolygon
    tag: str  # '+' or '-'


@dataclass(frozen=True)
class OverlapCertificate:
    pair: tuple
    half: str
    depth: object  # valuation level up to which equality was verified (INF = exact)
    terms_checked: int


@dataclass(frozen=True)
class GluedSection:
    cover: tuple  # CoverElements
    locals: tuple  # LatticeSeries, one per cover element
    certificates: tuple

    def local_for(self, index: int) -> LatticeSeries:
        return self.locals[index]


def _compare_on_piece(fa, tag_a, fb, tag_b, frame, half, local_piece, cutoff):
    """Transport and compare two locals over one overlap piece.

    Returns (depth, terms_checked); raises OverlapMismatch on disagreement.
    """
    k = frame.k_node
    poly_a = to_chart_polygon(local_piece, frame, tag_a, half)
    poly_b = to_chart_polygon(local_piece, frame, tag_b, half)
    fa_r = fa.restrict(poly_a) if _contains(fa.reference, poly_a) else fa.with_reference(poly_a)
    fb_r = fb.restrict(poly_b) if _contains(fb.reference, poly_b) else fb.with_reference(poly_b)
    side = "upper" if half == "upper" else "lower"
    if tag_a == tag_b:
        lhs, rhs = fa_r, fb_r
    else:
        if tag_a == "-":
            fa_r, fb_r = fb_r, fa_r
            poly_a, poly_b = poly_b, poly_a
        # fa is now the '+' local; transport + -> - ; fall back to - -> +
        spec = WallCrossSpec(k, side, cutoff, poly_b)
        try:
            lhs, rhs = wall_cross_series(spec, fa_r), fb_r
        except DivergentExpansion:
            spec = WallCrossSpec(k, side, cutoff, poly_a)
            lhs, rhs = fa_r, wall_cross_series(spec, fb_r, inverse=True)
    level = min(lhs.tail, rhs.tail, cutoff)
    diff = lhs.first_difference(rhs, level)
    if diff is not None:
        raise OverlapMismatch(
            f"locals disagree at exponent {diff}", exponent=diff
        )
    return level, max(len(lhs.terms), len(rhs.terms))


def _contains(big: RationalPolygon, small: RationalPolygon) -> bool:
    return big.contains_polygon(small)


def glue_sections(frame: NodeFrame, cover, locals_, diagram: EigenrayDiagram, cutoff) -> GluedSection:
    """Certify a family of chart-local series as a glued section.

    cover: list of CoverElement; locals_: series per element, referenced to
    (a polygon containing) the element's chart reference.  Raises
    OverlapMismatch naming the first failing overlap and exponent, or
    NotSmallCover if an element fails the admissibility audit.
    """
    cover = tuple(cover)
    cutoff = Q(cutoff)
    for idx, el in enumerate(cover):
        try:
            el.polygon.validate_admissible(diagram)
        except Exception as exc:
            raise NotSmallCover(f"cover element {idx}: {exc}") from None
    certs = []
    for i in range(len(cover)):
        for j in range(i + 1, len(cover)):
            pieces = decompose_admissible_intersection(
                cover[i].polygon, cover[j].polygon, diagram
            )
            for piece in pieces:
                for half, loc in _local_pieces(piece, frame):
                    if loc.affine_dim() == 0 and half == "lower":
                        continue  # wall-degenerate duplicate of the upper check
                    try:
                        depth, nterms = _compare_on_piece(
                            locals_[i], cover[i].tag,
                            locals_[j], cover[j].tag,
                            frame, half, loc, cutoff,
                        )
                    except OverlapMismatch as exc:
                        raise OverlapMismatch(
                            f"overlap ({i},{j}) {half}: {exc}",
                            pair=(i, j),
                            exponent=exc.exponent,
                        ) from None
                    if not is_inf(depth) and depth <= 0:
                        raise OverlapMismatch(
                            f"overlap ({i},{j}) {half}: no positive verified depth",
                            pair=(i, j),
                        )
                    certs.append(
                        OverlapCertificate((i, j), half, depth, nterms)
                    )
    return GluedSection(cover, tuple(locals_), tuple(certs))


# -- canonical global sections ---------------------------------------------------


def section_u(reference: RationalPolygon):
    """The global function u: eta in both charts."""
    return eta(reference), eta(reference)

def section_x(reference: RationalPolygon, k: int):
    """The x-type global section: ('+': xi, '-': xi (1+eta)^k)."""
    one = LatticeSeries.one(reference)
    return xi(reference), xi(reference) * (one + eta(reference)).power(k)


def section_y(reference: RationalPolygon, k: int):
    """The y-type global section: ('+': xi^{-1} (1+eta)^k, '-': xi^{-1})."""
    one = LatticeSeries.one(reference)
    inv_xi = LatticeSeries.monomial((1, 0), reference)
    return inv_xi * (one + eta(reference)).power(k), inv_xi


# -- monodromy transport -----------------------------------------------------------


@dataclass(frozen=True)
class TransportResult:
    transported: LatticeSeries  # referenced to the lower '+' polygon
    relabeled: LatticeSeries  # sigma(f) on the same reference
    trivial: bool  # transported == f (trivial monodromy)
    closes: bool  # transported == sigma(f) (lattice-relabel closure)


def monodromy_transport(k: int, f: LatticeSeries, cutoff, upper_poly: RationalPolygon, lower_poly: RationalPolygon) -> TransportResult:
    """Carry an exact series around the node: upper wall crossing, right-wall
    chart relabel, inverse lower wall crossing.

    upper_poly / lower_poly: polygons strictly above/below the wall in '+'
    (base) coordinates; f must be exact (finite tail certificates do not
    continue across regions).
    """
    cutoff = Q(cutoff)
    if not is_inf(f.tail):
        raise LoopInvalid("loop transport requires an exact series")
    if min(v[1] for v in upper_poly.vertices) <= 0:
        raise LoopInvalid("upper polygon must lie strictly above the wall")
    if max(v[1] for v in lower_poly.vertices) >= 0:
        raise LoopInvalid("lower polygon must lie strictly below the wall")
    spec_up = WallCrossSpec(k, "upper", cutoff, upper_poly)
    g1 = wall_cross_series(spec_up, f.with_reference(upper_poly))
    if not is_inf(g1.tail):
        raise LoopInvalid(
            "upper crossing truncated the series; enlarge the cutoff or use "
            "finite-transport data"
        )
    # continue across the right wall in the '-' chart (formal list unchanged),
    # then re-express in the '+' frame: exponents pick up the shear relabel
    lower_minus = lower_poly.transform(shear_mat_inv(k))
    g2 = g1.with_reference(lower_minus).relabel(shear_mat(k), new_reference=lower_poly)
    spec_lo = WallCrossSpec(k, "lower", cutoff, lower_poly)
    g3 = wall_cross_series(spec_lo, g2, inverse=True)
    sigma_f = f.relabel(shear_mat(k), new_reference=lower_poly)
    level = min(g3.tail, cutoff)
    return TransportResult(
        transported=g3,
        relabeled=sigma_f,
        trivial=g3.first_difference(f.with_reference(lower_poly), level) is None,
        closes=g3.first_difference(sigma_f, level) is None,
    )


# -- Hartogs extension ---------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryEdge:
    segment: RationalPolygon  # degenerate polygon in local '+': (base) coords
    tag: str
    series: LatticeSeries  # referenced to the segment in its chart's coords


def hartogs_extend(edges, polygon: NodalPolygon, cutoff) -> GluedSection:
    """Extend boundary data over a node-containing polygon.

    The '+'-tagged edges must carry one common exact formal expression
    (unique continuation); each '-'-tagged edge is checked against it
    through the wall crossing on every wall side the edge touches; a failure
    is the around-the-node monodromy obstruction.  The unique extension is
    the pair ('+' expression, its upper wall-crossing image).
    """
    frame = polygon.frame
    if frame is None or not polygon.contains_node():
        raise LoopInvalid("hartogs extension needs a node-containing polygon")
    k = frame.k_node
    cutoff = Q(cutoff)
    plus_edges = [e for e in edges if e.tag == "+"]
    minus_edges = [e for e in edges if e.tag == "-"]
    if not plus_edges:
        raise VertexMismatch("no '+' edge to anchor the extension")
    f_plus = plus_edges[0].series
    if not is_inf(f_plus.tail):
        raise InsufficientPrecision("boundary data must be exact")
    for other in plus_edges[1:]:
        if sorted(f_plus.terms) != sorted(other.series.terms):
            raise VertexMismatch(
                "'+' edges carry different formal expressions"
            )
    for edge in minus_edges:
        for half, seg in _split_local(edge.segment):
            if seg.affine_dim() == 0 and len(_split_local(edge.segment)) > 1:
                continue
            side = "upper" if half == "upper" else "lower"
            target = to_chart_polygon(seg, frame, "-", half)
            spec = WallCrossSpec(k, side, cutoff, target)
            try:
                crossed = wall_cross_series(spec, f_plus.with_reference(target))
            except DivergentExpansion as exc:
                raise InsufficientPrecision(str(exc)) from None
            given = edge.series.with_reference(target)
            diff = crossed.first_difference(given, min(crossed.tail, cutoff))
            if diff is not None:
                raise MonodromyObstruction(
                    f"boundary data fails the wall-crossing closure at "
                    f"exponent {diff} ({side} side)"
                )
    plus_ref = chart_reference(polygon, frame, "+")
    minus_ref = chart_reference(polygon, frame, "-")
    plus_local = f_plus.with_reference(plus_ref)
    spec = WallCrossSpec(k, "upper", cutoff, minus_ref)
    try:
        minus_local = wall_cross_series(spec, f_plus.with_reference(minus_ref))
    except DivergentExpansion as exc:
        raise InsufficientPrecision(str(exc)) from None
    cover = (CoverElement(polygon, "+"), CoverElement(polygon, "-"))
    cert = OverlapCertificate((0, 1), "boundary", min(cutoff, minus_local.tail), len(plus_local.terms))
    return GluedSection(cover, (plus_local, minus_local), (cert,))


# -- point-level projection and cocycle sampling -----------------------------------


def project_point(frame: NodeFrame, tag: str, xi_val: NovikovScalar, eta_val: NovikovScalar):
    """Base point of a sampled chart point: tropicalize, then undo the
    chart's shear below the wall, then leave the local frame."""
    v, u = xi_val.exact_val(), eta_val.exact_val()
    if is_inf(v) or is_inf(u):
        raise PrecisionLoss("chart coordinates must be units")
    if u >= 0:
        local = (v, u)
    else:
        kshear = frame.chart_shear(tag)
        local = (v + kshear * u, u)
    return frame.to_global(local)


GENERIC_COEFFS = (Q(2), Q(3), Q(5), Q(7), Q(6), Q(10), Q(14), Q(15), Q(2, 3), Q(5, 7))


def sample_unit(rng: random.Random, val, extra_terms=1) -> NovikovScalar:
    """Generic-coefficient scalar of the given valuation: leading coefficient
    a product of {2,3,5,7}, so no valuation-raising cancellations occur."""
    pairs = [(Q(val), rng.choice(GENERIC_COEFFS))]
    for _ in range(rng.randint(0, extra_terms)):
        pairs.append((Q(val) + Q(rng.randint(1, 6), 2), rng.choice(GENERIC_COEFFS)))
    return NovikovScalar.from_terms(pairs)


def is_degenerate_sample(eta_val: NovikovScalar) -> bool:
    """Points with eta = -1 + higher order live over the node (the excluded
    set Z); the sampler rejects and counts them."""
    v = eta_val.val()
    return v.exact and v.value == 0 and eta_val.leading()[1] == -1


@dataclass
class CocycleReport:
    samples: int
    degenerate: int
    cocycle_violations: list
    independence_violations: list
    separation_failures: list

    @property
    def passed(self) -> bool:
        return not (
            self.cocycle_violations
            or self.independence_violations
            or self.separation_failures
        )

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "degenerate": self.degenerate,
            "cocycle_violations": [str(v) for v in self.cocycle_violations],
            "independence_violations": [
                str(v) for v in self.independence_violations
            ],
            "separation_failures": [str(v) for v in self.separation_failures],
            "passed": self.passed,
        }


def cocycle_check(
    q1: NodalPolygon,
    q2: NodalPolygon,
    parent: NodalPolygon,
    diagram: EigenrayDiagram,
    samples: int = 500,
    seed: int = 0,
    cover=None,
) -> CocycleReport:
    """Sampled strong-cocycle / independence / separation checks.

    Points are sampled chart-wise over the parent polygon; membership of the
    projected base point must satisfy b in Q1 and b in Q2 iff b lies in the
    decomposition of Q1 n Q2; cover (when given, a list of NodalPolygons
    whose union is the parent) is checked for independence; separation
    exhibits a separating admissible polygon for samples outside Q1.
    """
    frame = parent.frame or (q1.frame or q2.frame)
    if frame is None:
        frame = NodeFrame.standard(1)
    rng = random.Random(seed)
    bounds = _local_bounds(parent, frame)
    inter_pieces = decompose_admissible_intersection(q1, q2, diagram)
    report = CocycleReport(0, 0, [], [], [])
    attempts = 0
    while report.samples < samples and attempts < 50 * samples:
        attempts += 1
        tag = rng.choice(("+", "-"))
        v = Q(rng.randint(int(bounds[0] * 4), int(bounds[1] * 4)), 4)
        u = Q(rng.randint(int(bounds[2] * 4), int(bounds[3] * 4)), 4)
        if u == 0:
            continue
        xi_val = sample_unit(rng, v)
        eta_val = sample_unit(rng, u)
        if is_degenerate_sample(eta_val):
            report.degenerate += 1
            continue
        b = project_point(frame, tag, xi_val, eta_val)
        if not parent.contains(b):
            continue
        report.samples += 1
        in1, in2 = q1.contains(b), q2.contains(b)
        in_inter = any(piece.contains(b) for piece in inter_pieces)
        if (in1 and in2) != in_inter:
            report.cocycle_violations.append((b, in1, in2, in_inter))
        if cover is not None and not any(c.contains(b) for c in cover):
            report.independence_violations.append(b)
        if not in1:
            sep = separating_polygon(b, q1, frame)
            if sep is None or any(
                decompose_admissible_intersection(sep, q1, diagram)
            ):
                report.separation_failures.append(b)
    return report


def _local_bounds(polygon: NodalPolygon, frame: NodeFrame):
    vs, us = [], []
    for _, loc in _local_pieces(polygon, frame):
        for v in loc.vertices:
            vs.append(v[0])
            us.append(v[1])
    return min(vs), max(vs), min(us), max(us)


def separating_polygon(b_global, q: NodalPolygon, frame: NodeFrame, margin=Q(1, 8)) -> NodalPolygon | None:
    """A small admissible polygon containing b and disjoint from q: box
    around b capped by the bisector of a violated constraint of q."""
    if q.frame is not None:
        for h in q.halfspaces:
            c = q.frame.chart_coords(h.tag, b_global)
            val = sum(Q(n) * x for n, x in zip(h.normal, c))
            if val < h.bound:
                mid = (val + h.bound) / 2
                box = _box_around(b_global, margin, q.frame)
                cap = TaggedHalfspace(
                    h.tag, tuple(-n for n in h.normal), -mid
                )
                return NodalPolygon.from_tagged(
                    q.frame, box.halfspaces + (cap,)
                )
        return None
    for h in q.plain.halfspaces:
        if not h.contains(b_global):
            mid = (h.evaluate(b_global) + h.bound) / 2
            box = RationalPolygon.box(
                tuple(c - margin for c in b_global),
                tuple(c + margin for c in b_global),
            )
            capped = box.intersect_halfspace(
                Halfspace(tuple(-n for n in h.normal), -mid)
            )
            if capped is not None:
                return NodalPolygon.from_plain(capped)
    return None


def _box_around(b_global, margin, frame: NodeFrame) -> NodalPolygon:
    v, u = frame.to_local(b_global)
    return NodalPolygon.from_tagged(
        frame,
        (
            TaggedHalfspace("-", (1, 0), v - margin),
            TaggedHalfspace("-", (-1, 0), -(v + margin)),
            TaggedHalfspace("-", (0, 1), u - margin),
            TaggedHalfspace("-", (0, -1), -(u + margin)),
        ),
    )

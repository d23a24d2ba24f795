"""Chart-tagged polygon geometry in nodal integral affine planes.

Every node carries a local frame (origin at the node, first axis along the
ray direction e, second axis a unimodular complement f).  In local (v, u)
coordinates the wall is u = 0 and the two flat charts are

  '+' : cut along the ray itself (v >= 0 on the wall); coordinates are the
        local base coordinates above the wall and M_{k_left}^{-1} below,
  '-' : cut along the opposite side; identity above, M_{k_right}^{-1} below,

where M_k = (1 k; 0 1), k_left is the total multiplicity of nodes strictly
before this one on its ray and k_right = k_left + (this node's multiplicity).
The '-' to '+' transition then covers (v,u) -> (v + k u, u) on u < 0 with
k the node's own multiplicity, matching the local model.

An admissible polygon around a node is an intersection of *tagged*
halfspaces: each is linear in its chart's coordinates.  Its two pieces
(above/below the wall) are ordinary rational polygons, both in local and in
global base-diagram coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import linalg
from .errors import InvalidStrips, NotAdmissible, OnWall, ParseError
from .diagrams import EigenrayDiagram, Ray, det2
from .polytopes import Halfspace, RationalPolygon
from .qmath import Q, fmt_q, parse_q, primitive


def shear_power_matrix(k: int):
    """M_k = (1 k; 0 1) acting on local column vectors (v, u)."""
    return ((Q(1), Q(k)), (Q(0), Q(1)))


def chart_transition(k: int, side: str, point):
    """E_+ o E_-^{-1} on the local plane: identity above the wall, the shear
    (1 k; 0 1) below; OnWall when u = 0 makes the side ambiguous."""
    v, u = Q(point[0]), Q(point[1])
    if u == 0:
        raise OnWall("chart side ambiguous on the wall u = 0")
    if (side == "upper") != (u > 0):
        raise ValueError(f"point {point} is not on the {side} side")
    if side == "upper":
        return (v, u)
    return (v + k * u, u)


def _complement(e):
    """f with det(e, f) = 1, via the extended euclidean algorithm."""
    a, b = int(e[0]), int(e[1])
    # find x, y with a*y - b*x = 1
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    # old_s*a + old_t*b = old_r = +-gcd = +-1
    g = old_r
    x, y = -old_t * g, old_s * g
    assert a * y - b * x == 1
    return (x, y)


@dataclass(frozen=True)
class NodeFrame:
    """Local unimodular frame at a node: global = origin + v e + u f."""

    origin: tuple
    e: tuple
    f: tuple
    k_left: int
    k_node: int

    @staticmethod
    def at(diagram: EigenrayDiagram, ray_index: int, node_index: int) -> "NodeFrame":
        ray = diagram.rays[ray_index]
        origin = ray.node_position(node_index)
        e = ray.direction
        k_left = sum(n.multiplicity for n in ray.nodes[:node_index])
        return NodeFrame(
            tuple(Q(c) for c in origin),
            tuple(int(c) for c in e),
            _complement(e),
            k_left,
            ray.nodes[node_index].multiplicity,
        )

    @staticmethod
    def standard(k: int) -> "NodeFrame":
        return NodeFrame((Q(0), Q(0)), (1, 0), (0, 1), 0, k)

    @property
    def k_right(self) -> int:
        return self.k_left + self.k_node

    def matrix(self):
        """Columns e, f: local -> global displacement."""
        return (
            (Q(self.e[0]), Q(self.f[0])),
            (Q(self.e[1]), Q(self.f[1])),
        )

    def to_local(self, p):
        rel = (Q(p[0]) - self.origin[0], Q(p[1]) - self.origin[1])
        # inverse of the unimodular column matrix (e f)
        return (
            Q(self.f[1]) * rel[0] - Q(self.f[0]) * rel[1],
            -Q(self.e[1]) * rel[0] + Q(self.e[0]) * rel[1],
        )

    def to_global(self, q):
        v, u = Q(q[0]), Q(q[1])
        return (
            self.origin[0] + v * self.e[0] + u * self.f[0],
            self.origin[1] + v * self.e[1] + u * self.f[1],
        )

    def chart_shear(self, tag: str) -> int:
        """Shear exponent k with chart coords = M_k^{-1} . local below the wall."""
        if tag == "+":
            return self.k_left
        if tag == "-":
            return self.k_right
        raise ValueError(f"bad chart tag {tag!r}")

    def chart_coords(self, tag: str, p_global):
        """Total chart coordinate map (continuous across the wall because the
        shear fixes it pointwise)."""
        v, u = self.to_local(p_global)
        if u >= 0:
            return (v, u)
        k = self.chart_shear(tag)
        return (v - k * u, u)


@dataclass(frozen=True)
class TaggedHalfspace:
    """{p : normal(chart_coords(p)) >= bound} for the frame's chart `tag`."""

    tag: str
    normal: tuple
    bound: Fraction

    def __post_init__(self):
        object.__setattr__(self, "normal", primitive(self.normal))
        object.__setattr__(self, "bound", Q(self.bound))
        if self.tag not in ("+", "-"):
            raise ValueError(f"bad chart tag {self.tag!r}")

    def local_halfspace(self, frame: NodeFrame, half: str) -> Halfspace:
        """Linearization over one half of the wall, in local coordinates."""
        nu = self.normal
        if half == "lower":
            k = frame.chart_shear(self.tag)
            # chart = M_k^{-1} local below, so nu o M_k^{-1}
            nu = (nu[0], nu[1] - k * nu[0])
        return Halfspace(primitive(nu), self.bound)


@dataclass(frozen=True)
class NodalPolygon:
    """Admissible convex polygon in B_R.

    Either a plain polygon (frame None, `plain` a RationalPolygon in global
    coordinates) or a node-anchored one: a frame plus tagged halfspaces.
    """

    frame: object = None
    halfspaces: tuple = ()
    plain: object = None

    @staticmethod
    def from_plain(polygon: RationalPolygon) -> "NodalPolygon":
        return NodalPolygon(None, (), polygon)

    @staticmethod
    def from_tagged(frame: NodeFrame, halfspaces) -> "NodalPolygon":
        return NodalPolygon(frame, tuple(halfspaces), None)

    # -- pieces -------------------------------------------------------------

    def pieces(self):
        """List of (half, local_polygon, global_polygon); half None for plain.

        Pieces are ordinary convex polygons: tagged constraints are linear on
        each side of the wall.
        """
        return _pieces_cached(self)

    def chart_polygon(self, tag: str, half: str) -> RationalPolygon | None:
        """One piece expressed in the coordinates of the given chart (the
        reference polygon for series living in that chart)."""
        for h, loc, _ in self.pieces():
            if h == half or h is None:
                if h is None:
                    return loc
                if half == "upper":
                    return loc
                k = self.frame.chart_shear(tag)
                minv = ((Q(1), Q(-k)), (Q(0), Q(1)))
                return loc.transform(minv)
        return None

    # -- predicates ------------------------------------------------------------

    def contains(self, p_global) -> bool:
        if self.frame is None:
            return self.plain.contains(p_global)
        for h in self.halfspaces:
            c = self.frame.chart_coords(h.tag, p_global)
            if sum(Q(n) * x for n, x in zip(h.normal, c)) < h.bound:
                return False
        return True

    def contains_node(self) -> bool:
        return self.frame is not None and all(h.bound <= 0 for h in self.halfspaces)

    def node_interior(self) -> bool:
        return self.frame is not None and all(h.bound < 0 for h in self.halfspaces)

    def is_empty(self) -> bool:
        return not self.pieces()

    def meets_segment(self, a, b) -> bool:
        """Exact test against a global segment [a, b]."""
        for _, _, glob in self.pieces():
            if _segment_meets_polygon(a, b, glob):
                return True
        return False

    def meets_ray(self, ray: Ray) -> bool:
        for _, _, glob in self.pieces():
            if _ray_meets_polygon(ray, glob):
                return True
        return False

    def validate_admissible(self, diagram: EigenrayDiagram):
        """Audit: meets at most one ray; contains at most its own node, and
        then as an interior point."""
        met = [
            ri for ri, ray in enumerate(diagram.rays) if self.meets_ray(ray)
        ]
        if len(met) > 1:
            raise NotAdmissible(f"polygon meets rays {met}")
        for ri, ni, pos in diagram.node_positions():
            if self.contains(pos):
                if self.frame is None or self.frame.origin != tuple(pos):
                    raise NotAdmissible(
                        f"polygon contains foreign node at {pos}"
                    )
                if not self.node_interior():
                    raise NotAdmissible("node on the polygon boundary")

    # -- encoding -----------------------------------------------------------------

    def to_json(self) -> dict:
        if self.frame is None:
            return {"plain": self.plain.to_json()}
        return {
            "frame": {
                "origin": [fmt_q(c) for c in self.frame.origin],
                "e": list(self.frame.e),
                "f": list(self.frame.f),
                "k_left": self.frame.k_left,
                "k_node": self.frame.k_node,
            },
            "halfspaces": [
                {"tag": h.tag, "normal": list(h.normal), "bound": fmt_q(h.bound)}
                for h in self.halfspaces
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "NodalPolygon":
        if "plain" in data:
            return NodalPolygon.from_plain(RationalPolygon.from_json(data["plain"]))
        if "frame" not in data or "halfspaces" not in data:
            raise ParseError("nodal polygon JSON needs 'plain' or 'frame'+'halfspaces'")
        fr = data["frame"]
        frame = NodeFrame(
            tuple(parse_q(str(c)) for c in fr["origin"]),
            tuple(int(c) for c in fr["e"]),
            tuple(int(c) for c in fr["f"]),
            int(fr["k_left"]),
            int(fr["k_node"]),
        )
        hss = tuple(
            TaggedHalfspace(h["tag"], tuple(h["normal"]), parse_q(str(h["bound"])))
            for h in data["halfspaces"]
        )
        return NodalPolygon.from_tagged(frame, hss)


@lru_cache(maxsize=4096)
def _pieces_cached(polygon: NodalPolygon):
    if polygon.frame is None:
        return [(None, polygon.plain, polygon.plain)]
    out = []
    for half, wall in (("upper", Halfspace((0, 1), Q(0))), ("lower", Halfspace((0, -1), Q(0)))):
        cons = [wall] + [
            h.local_halfspace(polygon.frame, half) for h in polygon.halfspaces
        ]
        loc = RationalPolygon.from_halfspaces(cons, 2)
        if loc is None:
            continue
        glob = loc.transform(polygon.frame.matrix(), polygon.frame.origin)
        out.append((half, loc, glob))
    return out


# -- segment / ray vs polygon tests (exact interval arithmetic) ---------------


def _segment_meets_polygon(a, b, poly: RationalPolygon) -> bool:
    lo, hi = Q(0), Q(1)
    a = tuple(Q(c) for c in a)
    d = tuple(Q(y) - Q(x) for x, y in zip(a, b))
    return _param_feasible(a, d, lo, hi, poly)


def _ray_meets_polygon(ray: Ray, poly: RationalPolygon) -> bool:
    base = tuple(Q(c) for c in ray.base)
    d = tuple(Q(c) for c in ray.direction)
    # polygon is bounded: cap the parameter by a crude exact bound
    return _param_feasible(base, d, Q(0), None, poly)


def _param_feasible(a, d, lo, hi, poly: RationalPolygon) -> bool:
    """Is {a + t d : lo <= t <= hi} n poly nonempty? (hi None = +inf)"""
    for h in poly.halfspaces:
        na = h.evaluate(a)
        nd = sum(Q(n) * x for n, x in zip(h.normal, d))
        if nd == 0:
            if na < h.bound:
                return False
            continue
        t_star = (h.bound - na) / nd
        if nd > 0:
            lo = max(lo, t_star)
        else:
            hi = t_star if hi is None else min(hi, t_star)
        if hi is not None and lo > hi:
            return False
    return True


# -- strips, slits and the small-polygon classification ------------------------


@dataclass(frozen=True)
class Strip:
    """Half-infinite strip around one ray: H-rep region (no V-rep needed)."""

    halfspaces: tuple  # global-coordinate halfspaces
    line_point: tuple  # a point of the full eigenline
    line_dir: tuple  # primitive direction of the line
    sigmas: tuple  # per node: global segment (a, b) disconnecting the strip

    def contains(self, p) -> bool:
        return all(h.contains(p) for h in self.halfspaces)

    def contains_polygon(self, poly: RationalPolygon) -> bool:
        return all(self.contains(v) for v in poly.vertices)


@dataclass(frozen=True)
class StripData:
    strips: tuple  # one Strip per ray, ray order matching the diagram

    def validate(self, diagram: EigenrayDiagram):
        from .polytopes import _region_feasible

        if len(self.strips) != len(diagram.rays):
            raise InvalidStrips("one strip per ray required")
        for i, s in enumerate(self.strips):
            if len(s.sigmas) != len(diagram.rays[i].nodes):
                raise InvalidStrips(f"strip {i}: one sigma per node required")
            for (a, b) in s.sigmas:
                if not (s.contains(a) and s.contains(b)):
                    raise InvalidStrips(f"strip {i}: sigma endpoints escape the strip")
        for i in range(len(self.strips)):
            for j in range(i + 1, len(self.strips)):
                combined = list(self.strips[i].halfspaces) + list(
                    self.strips[j].halfspaces
                )
                if _region_feasible(combined, 2):
                    raise InvalidStrips(f"strips {i} and {j} are not disjoint")


def auto_strips(diagram: EigenrayDiagram, width=None) -> StripData:
    """Rectangular strips of width half the minimal perpendicular clearance
    to the other rays (fallback 1), sigma = perpendicular segments through
    the nodes spanning the strip."""
    strips = []
    for ri, ray in enumerate(diagram.rays):
        e = ray.direction
        perp = (-e[1], e[0])
        n2 = Q(e[0] * e[0] + e[1] * e[1])
        # just under half the clearance: closed strips at exactly half touch
        w = Q(width) if width is not None else _clearance(diagram, ri) * Q(7, 16)
        hs = (
            _offset_halfspace(perp, ray.base, -w),
            _offset_halfspace(tuple(-c for c in perp), ray.base, -w),
            _offset_halfspace(e, ray.base, -w),
        )
        sigmas = []
        for ni in range(len(ray.nodes)):
            pos = ray.node_position(ni)
            t = w / n2
            sigmas.append(
                (
                    tuple(p - t * c for p, c in zip(pos, perp)),
                    tuple(p + t * c for p, c in zip(pos, perp)),
                )
            )
        strips.append(Strip(hs, ray.base, e, tuple(sigmas)))
    data = StripData(tuple(strips))
    data.validate(diagram)
    return data


def _offset_halfspace(covector, base, bound_shift) -> Halfspace:
    nu = primitive(covector)
    b = sum(Q(n) * Q(c) for n, c in zip(nu, base))
    return Halfspace(nu, b + Q(bound_shift))


def _clearance(diagram: EigenrayDiagram, ray_index: int):
    """Minimal |perp(. - base)| over the other rays; fallback 1."""
    ray = diagram.rays[ray_index]
    e = ray.direction
    perp = (-e[1], e[0])
    best = None
    for j, other in enumerate(diagram.rays):
        if j == ray_index:
            continue
        c0 = sum(Q(p) * (Q(b) - Q(a)) for p, b, a in zip(perp, other.base, ray.base))
        slope = sum(Q(p) * Q(d) for p, d in zip(perp, other.direction))
        if slope == 0:
            cand = abs(c0)
        elif (c0 > 0) == (slope > 0) and c0 != 0:
            cand = abs(c0)  # moves away; closest at the start
        else:
            cand = Q(0)  # crosses the level of the line eventually
        if cand == 0:
            continue  # other ray crosses our eigenline level: no help
        best = cand if best is None else min(best, cand)
    return best if best is not None else Q(2)


def classify_small(p: NodalPolygon, diagram: EigenrayDiagram, strips: StripData):
    """'A' / 'B' / 'C' / 'not-small' per the strip conditions."""
    strips.validate(diagram)
    met_lines = []
    for i, s in enumerate(strips.strips):
        if _polygon_meets_clipped_line(p, s):
            met_lines.append(i)
    if not met_lines:
        return "A"
    if len(met_lines) > 1:
        return "not-small"
    i = met_lines[0]
    s = strips.strips[i]
    if not all(s.contains_polygon(glob) for _, _, glob in p.pieces()):
        return "not-small"
    node_hits = [
        ni
        for ni in range(len(diagram.rays[i].nodes))
        if p.contains(diagram.rays[i].node_position(ni))
    ]
    if len(node_hits) > 1:
        return "not-small"
    if node_hits:
        ni = node_hits[0]
        if not p.node_interior() or p.frame is None:
            return "not-small"
        others = [
            s.sigmas[nj] for nj in range(len(s.sigmas)) if nj != ni
        ]
        if any(p.meets_segment(a, b) for a, b in others):
            return "not-small"
        return "B"
    if any(p.meets_segment(a, b) for a, b in s.sigmas):
        return "not-small"
    return "C"


def _polygon_meets_clipped_line(p: NodalPolygon, s: Strip) -> bool:
    """Does the polygon meet the full eigenline (clipped to the strip)?"""
    for _, _, glob in p.pieces():
        hs = list(glob.halfspaces) + list(s.halfspaces)
        # add the line as an equality pair
        from .polytopes import _region_feasible

        nu = primitive((-s.line_dir[1], s.line_dir[0]))
        b = sum(Q(n) * Q(c) for n, c in zip(nu, s.line_point))
        line_pair = [Halfspace(nu, b), Halfspace(tuple(-c for c in nu), -b)]
        if _region_feasible(hs + line_pair, 2):
            return True
    return False


# -- intersection decomposition ---------------------------------------------------


def decompose_admissible_intersection(p: NodalPolygon, q: NodalPolygon, diagram: EigenrayDiagram):
    """P n Q as a finite (possibly empty) list of admissible convex pieces.

    When both polygons contain the same node the intersection is a single
    admissible convex polygon (merge the tagged halfspaces); otherwise the
    intersection avoids all nodes and splits along the wall into at most one
    convex piece per side.
    """
    if (
        p.frame is not None
        and q.frame is not None
        and p.frame == q.frame
        and p.contains_node()
        and q.contains_node()
    ):
        merged = NodalPolygon.from_tagged(p.frame, p.halfspaces + q.halfspaces)
        return [] if merged.is_empty() else [merged]
    out = []
    for _, _, gp in p.pieces():
        for _, _, gq in q.pieces():
            inter = gp.intersect(gq)
            if inter is None:
                continue
            if any(inter.vertices == done.plain.vertices for done in out):
                continue
            out.append(NodalPolygon.from_plain(inter))
    # drop pieces contained in another piece (wall-degenerate duplicates)
    kept = []
    for i, piece in enumerate(out):
        redundant = any(
            j != i and other.plain.contains_polygon(piece.plain)
            and not piece.plain.contains_polygon(other.plain)
            for j, other in enumerate(out)
        )
        if not redundant:
            kept.append(piece)
    return kept

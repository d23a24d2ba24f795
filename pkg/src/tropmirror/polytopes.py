"""Exact convex rational polytope arithmetic over Fraction.

n = 2 is the primary case; generic small n is supported for the torus model.
Everything is brute-force but exact: vertex enumeration solves all d-subsets
of active constraints, hull facets come from all affinely-spanning point
subsets, and membership-in-hull uses Caratheodory (some subset of <= d+1
points expresses the query point as a convex combination).  Degenerate
(lower-dimensional) polytopes are first class; their affine hull is encoded
as pairs of opposite halfspaces.  Unbounded intersections are rejected.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .errors import (
    DimensionMismatch,
    EmptyInput,
    ParseError,
    UnboundedRegion,
)
from .qmath import Q, fmt_q, parse_q, primitive_from_rational


@dataclass(frozen=True)
class Halfspace:
    """{x : normal . x >= bound} with a primitive integer inward normal."""

    normal: tuple
    bound: Fraction

    def __post_init__(self):
        if all(c == 0 for c in self.normal):
            raise ValueError("zero normal")
        prim = primitive_from_rational(self.normal)
        if tuple(int(c) for c in self.normal) != prim:
            raise ValueError(f"normal {self.normal} not primitive")
        object.__setattr__(self, "normal", tuple(int(c) for c in self.normal))
        object.__setattr__(self, "bound", Q(self.bound))

    @staticmethod
    def make(normal, bound) -> "Halfspace":
        """Halfspace from a rational (not necessarily primitive) normal."""
        prim = primitive_from_rational(normal)
        scale = None
        for p, n in zip(prim, normal):
            if p != 0:
                scale = Q(n) / p
                break
        return Halfspace(prim, Q(bound) / scale)

    def contains(self, point) -> bool:
        return self.evaluate(point) >= self.bound

    def evaluate(self, point):
        return sum(Q(n) * Q(x) for n, x in zip(self.normal, point))

    def flipped(self) -> "Halfspace":
        return Halfspace(tuple(-n for n in self.normal), -self.bound)


def _dedupe(points):
    seen = []
    for p in points:
        if p not in seen:
            seen.append(p)
    return seen


def _affine_basis(points):
    """(origin, direction basis) of the affine hull of the points."""
    origin = points[0]
    dirs = [tuple(Q(a) - Q(b) for a, b in zip(p, origin)) for p in points[1:]]
    rows, pivots = linalg.rref(dirs)
    return origin, [tuple(r) for r in rows]


def in_convex_hull(point, points, dim) -> bool:
    """Exact Caratheodory test: point in conv(points)?"""
    point = tuple(Q(x) for x in point)
    points = [tuple(Q(x) for x in p) for p in points]
    if point in points:
        return True
    for size in range(2, dim + 2):
        for subset in itertools.combinations(points, size):
            # solve sum l_i p_i = point, sum l_i = 1, l_i >= 0
            rows = [
                tuple(p[c] for p in subset) for c in range(dim)
            ] + [tuple(Q(1) for _ in subset)]
            sol = linalg.solve(rows, tuple(point) + (Q(1),))
            if sol is not None and all(l >= 0 for l in sol):
                # solve() zeroes free variables, which keeps l sums exact but
                # may miss nonneg solutions when the system is degenerate;
                # small subsets make the affinely independent case exhaustive.
                if linalg.rank(rows) == len(subset):
                    return True
    return False


@dataclass(frozen=True)
class RationalPolygon:
    """Bounded convex rational polytope with dual H-rep / V-rep.

    vertices: canonical (lexicographically sorted) tuple of Fraction points.
    halfspaces: canonical irredundant inequalities, including opposite pairs
    spanning the affine hull when the polytope is degenerate.
    """

    vertices: tuple
    halfspaces: tuple
    dim: int

    # -- constructors --------------------------------------------------------

    @staticmethod
    def from_vertices(points) -> "RationalPolygon":
        pts = [tuple(Q(x) for x in p) for p in points]
        if not pts:
            raise EmptyInput("no points")
        dim = len(pts[0])
        if any(len(p) != dim for p in pts):
            raise DimensionMismatch("points of mixed dimension")
        pts = _dedupe(pts)
        verts = [
            p
            for p in pts
            if not in_convex_hull(p, [q for q in pts if q != p], dim)
        ]
        verts = sorted(verts)
        hs = _hull_halfspaces(verts, dim)
        return RationalPolygon(tuple(verts), tuple(hs), dim)

    @staticmethod
    def from_halfspaces(halfspaces, dim) -> "RationalPolygon | None":
        """Polytope cut out by the halfspaces; None when empty.

        Raises UnboundedRegion when the intersection is nonempty but
        unbounded.
        """
        hs = list(halfspaces)
        for h in hs:
            if len(h.normal) != dim:
                raise DimensionMismatch("halfspace dimension mismatch")
        verts = _enumerate_vertices(hs, dim)
        if not verts:
            if _region_feasible(hs, dim):
                raise UnboundedRegion("feasible region has no vertex")
            return None
        if _recession_nontrivial(hs, dim):
            raise UnboundedRegion("feasible region is unbounded")
        return RationalPolygon.from_vertices(verts)

    @staticmethod
    def box(lo, hi, dim=None) -> "RationalPolygon":
        """Axis box [lo_1,hi_1] x ... (scalars broadcast to every axis)."""
        if dim is not None:
            lo = [lo] * dim
            hi = [hi] * dim
        corners = itertools.product(*[(Q(a), Q(b)) for a, b in zip(lo, hi)])
        return RationalPolygon.from_vertices(list(corners))

    @staticmethod
    def point(p) -> "RationalPolygon":
        return RationalPolygon.from_vertices([p])

    def __post_init__(self):
        if not self.vertices:
            raise EmptyInput("empty polytope cannot be represented")

    # -- predicates ------------------------------------------------------------

    def contains(self, point) -> bool:
        return all(h.contains(point) for h in self.halfspaces)

    def contains_polygon(self, other: "RationalPolygon") -> bool:
        return all(self.contains(v) for v in other.vertices)

    def is_degenerate(self) -> bool:
        return len(_affine_basis(list(self.vertices))[1]) < self.dim

    def affine_dim(self) -> int:
        return len(_affine_basis(list(self.vertices))[1])

    # -- operations --------------------------------------------------------------

    def intersect_halfspace(self, h: Halfspace) -> "RationalPolygon | None":
        if len(h.normal) != self.dim:
            raise DimensionMismatch("halfspace dimension mismatch")
        if all(h.contains(v) for v in self.vertices):
            return self
        return RationalPolygon.from_halfspaces(
            list(self.halfspaces) + [h], self.dim
        )

    def intersect(self, other: "RationalPolygon") -> "RationalPolygon | None":
        if self.dim != other.dim:
            raise DimensionMismatch("polytope dimension mismatch")
        return RationalPolygon.from_halfspaces(
            list(self.halfspaces) + list(other.halfspaces), self.dim
        )

    def face_maximizer(self, covector):
        """(face, value): the face where covector attains its max over self."""
        vals = [
            sum(Q(c) * v for c, v in zip(covector, vert)) for vert in self.vertices
        ]
        best = max(vals)
        face_verts = [v for v, val in zip(self.vertices, vals) if val == best]
        return RationalPolygon.from_vertices(face_verts), best

    def support(self, covector):
        """max of covector over the polytope."""
        return self.face_maximizer(covector)[1]

    def transform(self, matrix, shift=None) -> "RationalPolygon":
        """Image under x -> matrix . x + shift (matrix invertible)."""
        shift = shift or tuple(Q(0) for _ in range(self.dim))
        return RationalPolygon.from_vertices(
            [
                tuple(a + b for a, b in zip(linalg.mat_vec(matrix, v), shift))
                for v in self.vertices
            ]
        )

    def translate(self, shift) -> "RationalPolygon":
        return RationalPolygon.from_vertices(
            [tuple(Q(a) + Q(b) for a, b in zip(v, shift)) for v in self.vertices]
        )

    # -- encoding --------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "vertices": [[fmt_q(c) for c in v] for v in self.vertices],
            "halfspaces": [
                {"normal": list(h.normal), "bound": fmt_q(h.bound)}
                for h in self.halfspaces
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "RationalPolygon":
        if "vertices" in data and data["vertices"]:
            return RationalPolygon.from_vertices(
                [[parse_q(c) for c in v] for v in data["vertices"]]
            )
        if "halfspaces" in data:
            dim = data.get("dim")
            hss = [
                Halfspace(tuple(h["normal"]), parse_q(str(h["bound"])))
                for h in data["halfspaces"]
            ]
            if dim is None:
                dim = len(hss[0].normal)
            poly = RationalPolygon.from_halfspaces(hss, dim)
            if poly is None:
                raise ParseError("halfspace data describes the empty set")
            return poly
        raise ParseError("polygon JSON needs 'vertices' or 'halfspaces'")

    def digest(self) -> str:
        """Stable short id used by series text form '[ref <id>]'."""
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    def __str__(self):
        verts = ", ".join("(" + ",".join(fmt_q(c) for c in v) + ")" for v in self.vertices)
        return f"Polygon[{verts}]"


# -- internal geometry helpers ---------------------------------------------


def _enumerate_vertices(hs, dim):
    """All points where dim constraints are active with full rank and all
    other constraints hold."""
    verts = []
    if not hs:
        return verts
    for subset in itertools.combinations(range(len(hs)), dim):
        rows = [tuple(Q(c) for c in hs[i].normal) for i in subset]
        rhs = tuple(hs[i].bound for i in subset)
        if linalg.rank(rows) < dim:
            continue
        x = linalg.solve(rows, rhs)
        if x is None:
            continue
        if all(h.contains(x) for h in hs):
            if x not in verts:
                verts.append(x)
    return verts


def _region_feasible(hs, dim):
    """Feasibility of an H-rep region via Fourier-Motzkin elimination."""
    # constraints as rows (a_1..a_dim, b) meaning a.x >= b
    rows = [tuple(Q(c) for c in h.normal) + (h.bound,) for h in hs]
    for var in range(dim):
        pos = [r for r in rows if r[var] > 0]
        neg = [r for r in rows if r[var] < 0]
        none = [r for r in rows if r[var] == 0]
        new = list(none)
        for p in pos:
            for q in neg:
                # scale to cancel var: p/p_var gives x_var >= .., q/|q_var| gives x_var <= ..
                lam = -q[var] / p[var]
                comb = tuple(lam * a + b for a, b in zip(p, q))
                new.append(comb)
        rows = new
    return all(r[-1] <= 0 for r in rows)


def _recession_nontrivial(hs, dim):
    """Does {v != 0 : normal_i . v >= 0 for all i} have a solution?"""
    normals = [tuple(Q(c) for c in h.normal) for h in hs]
    if linalg.kernel_basis(normals):
        return True  # lineality space
    # pointed cone: check candidate extreme rays from (dim-1)-subsets
    for subset in itertools.combinations(range(len(normals)), dim - 1):
        rows = [normals[i] for i in subset]
        for v in linalg.kernel_basis(rows) or []:
            for cand in (v, tuple(-c for c in v)):
                if all(
                    sum(n * c for n, c in zip(nor, cand)) >= 0 for nor in normals
                ):
                    return True
    if dim == 1:
        for cand in ((Q(1),), (Q(-1),)):
            if all(n[0] * cand[0] >= 0 for n in normals):
                return True
    return False


def _hull_halfspaces(verts, dim):
    """Canonical H-rep of conv(verts): hull-equality pairs plus facet cuts."""
    origin, basis = _affine_basis(verts)
    adim = len(basis)
    hs = []
    # affine-hull equalities: integer annihilator of the direction space
    if adim < dim:
        ann = linalg.kernel_basis(basis) if basis else [
            tuple(Q(int(i == j)) for j in range(dim)) for i in range(dim)
        ]
        for covec in ann:
            prim = primitive_from_rational(covec)
            b = sum(Q(c) * Q(o) for c, o in zip(prim, origin))
            hs.append(Halfspace(prim, b))
            hs.append(Halfspace(tuple(-c for c in prim), -b))
    if adim == 0:
        return sorted(hs, key=lambda h: (h.normal, h.bound))
    # facets: hyperplanes through adim affinely independent vertices with all
    # vertices on one side, expressed in hull coordinates then lifted
    coord_rows = _hull_coordinate_map(origin, basis, dim)
    local = [
        tuple(
            sum(coord_rows[i][j] * (v[j] - origin[j]) for j in range(dim))
            for i in range(adim)
        )
        for v in verts
    ]
    facets = set()
    for subset in itertools.combinations(range(len(local)), adim):
        pts = [local[i] for i in subset]
        dirs = [tuple(a - b for a, b in zip(p, pts[0])) for p in pts[1:]]
        if adim > 1 and linalg.rank(dirs) < adim - 1:
            continue
        kern = (
            linalg.kernel_basis(dirs)
            if dirs
            else [tuple(Q(int(i == 0)) for i in range(adim))]
        )
        if len(kern) != 1:
            continue
        mu = kern[0]
        c0 = sum(m * p for m, p in zip(mu, pts[0]))
        vals = [sum(m * q for m, q in zip(mu, loc)) for loc in local]
        if all(v >= c0 for v in vals):
            facets.add(_lift_covector(mu, c0, coord_rows, origin, dim))
        elif all(v <= c0 for v in vals):
            facets.add(
                _lift_covector(tuple(-m for m in mu), -c0, coord_rows, origin, dim)
            )
    hs.extend(Halfspace(n, b) for n, b in facets)
    # canonical order, drop duplicates
    uniq = sorted({(h.normal, h.bound) for h in hs})
    return [Halfspace(n, b) for n, b in uniq]


def _hull_coordinate_map(origin, basis, dim):
    """Rows l_i in R^dim with l_i . basis_k = delta_ik (hull coordinates)."""
    adim = len(basis)
    rows = []
    for i in range(adim):
        target = tuple(Q(int(i == k)) for k in range(adim))
        sol = linalg.solve([tuple(b) for b in basis], target)
        rows.append(sol)
    return rows


def _lift_covector(mu, c0, coord_rows, origin, dim):
    """Ambient primitive halfspace from hull-coordinate covector mu . y >= c0."""
    amb = tuple(
        sum(mu[i] * coord_rows[i][j] for i in range(len(mu))) for j in range(dim)
    )
    prim = primitive_from_rational(amb)
    scale = None
    for p, a in zip(prim, amb):
        if p != 0:
            scale = a / p
            break
    bound = (c0 + sum(a * Q(o) for a, o in zip(amb, origin))) / scale
    return prim, bound


def convex_hull(points) -> RationalPolygon:
    return RationalPolygon.from_vertices(points)


def intersect_halfspace(p: RationalPolygon, h: Halfspace):
    return p.intersect_halfspace(h)


def polygon_intersect(p: RationalPolygon, q: RationalPolygon):
    return p.intersect(q)


def face_maximizer(q: RationalPolygon, covector):
    return q.face_maximizer(covector)

"""Eigenray diagrams: the combinatorial seeds of nodal integral affine planes.

A diagram is a finite set of pairwise disjoint rational rays, each decorated
with nodes (strictly increasing offsets along the ray, the first at the
starting point) carrying positive integer multiplicities.  The monodromy
around a node of multiplicity k with eigen-direction e is the shear
A_{k,e}: v -> v - k det(e,v) e.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BadOffsets,
    LineObstructed,
    NonPrimitive,
    NonPrimitiveDirection,
    OrderViolation,
    OverlappingRays,
    ParseError,
)
from .qmath import Q, fmt_q, parse_q, primitive, vec_gcd


def det2(a, b):
    return Q(a[0]) * Q(b[1]) - Q(a[1]) * Q(b[0])


def shear_apply(k: int, e, v):
    """A_{k,e}(v) = v - k det(e,v) e; e must be primitive."""
    if vec_gcd(e) != 1:
        raise NonPrimitive(f"eigenvector {e} not primitive")
    d = det2(e, v)
    return tuple(Q(x) - k * d * ei for x, ei in zip(v, e))


def shear_matrix(k: int, e):
    """Matrix of A_{k,e} (rows act on column points)."""
    cols = [shear_apply(k, e, (1, 0)), shear_apply(k, e, (0, 1))]
    return ((cols[0][0], cols[1][0]), (cols[0][1], cols[1][1]))


@dataclass(frozen=True)
class Node:
    offset: Fraction
    multiplicity: int

    def __post_init__(self):
        object.__setattr__(self, "offset", Q(self.offset))
        if self.offset < 0:
            raise BadOffsets(f"negative offset {self.offset}")
        if self.multiplicity < 1:
            raise ParseError(f"multiplicity {self.multiplicity} < 1")


@dataclass(frozen=True)
class Ray:
    base: tuple
    direction: tuple
    nodes: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(Q(c) for c in self.base))
        object.__setattr__(self, "direction", tuple(int(c) for c in self.direction))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if vec_gcd(self.direction) != 1:
            raise NonPrimitiveDirection(f"direction {self.direction} not primitive")
        if not self.nodes:
            raise BadOffsets("ray with no nodes")
        if self.nodes[0].offset != 0:
            raise BadOffsets("first node must sit at the starting point (offset 0)")
        offs = [n.offset for n in self.nodes]
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise BadOffsets(f"offsets not strictly increasing: {offs}")

    def node_position(self, i: int):
        t = self.nodes[i].offset
        return tuple(b + t * d for b, d in zip(self.base, self.direction))

    def point_at(self, t):
        return tuple(b + Q(t) * d for b, d in zip(self.base, self.direction))

    def total_multiplicity(self) -> int:
        return sum(n.multiplicity for n in self.nodes)


def _ray_ray_disjoint(r1: Ray, r2: Ray) -> bool:
    """Exact emptiness of {r1.base + t d1} n {r2.base + s d2}, t,s >= 0."""
    d1, d2 = r1.direction, r2.direction
    rhs = tuple(Q(b2) - Q(b1) for b1, b2 in zip(r1.base, r2.base))
    den = det2(d1, d2)
    if den != 0:
        # unique line intersection at base1 + t d1 = base2 + s d2 (Cramer)
        t = det2(rhs, d2) / den
        s = -det2(d1, rhs) / den
        return not (t >= 0 and s >= 0)
    # parallel: need collinear bases for any intersection
    if det2(d1, rhs) != 0:
        return True
    # same line; compare parameter ranges of the two rays on it
    axis = 0 if d1[0] != 0 else 1
    t2 = rhs[axis] / d1[axis]  # r2.base at parameter t2 of r1
    same_dir = d1 == d2
    if same_dir:
        return False  # two forward rays on one line always overlap
    # opposite directions: overlap iff r2.base lies at parameter >= 0
    return t2 < 0


@dataclass(frozen=True)
class EigenrayDiagram:
    rays: tuple

    @staticmethod
    def make(rays) -> "EigenrayDiagram":
        rays = tuple(rays)
        for i in range(len(rays)):
            for j in range(i + 1, len(rays)):
                if not _ray_ray_disjoint(rays[i], rays[j]):
                    raise OverlappingRays(f"rays {i} and {j} intersect")
        return EigenrayDiagram(rays)

    @staticmethod
    def standard(k: int) -> "EigenrayDiagram":
        """B_k: one ray from the origin along e_1 with a multiplicity-k node."""
        return EigenrayDiagram.make(
            [Ray((0, 0), (1, 0), (Node(0, k),))]
        )

    def node_positions(self):
        return [
            (ri, ni, ray.node_position(ni))
            for ri, ray in enumerate(self.rays)
            for ni in range(len(ray.nodes))
        ]

    def normalized(self) -> "EigenrayDiagram":
        """Canonical ray order for structural comparison."""
        return EigenrayDiagram(
            tuple(sorted(self.rays, key=lambda r: (r.base, r.direction)))
        )

    # -- moves -----------------------------------------------------------------

    def nodal_slide(self, ray_index: int, node_index: int, new_offset) -> "EigenrayDiagram":
        """Move one node along its ray, multiplicity unchanged."""
        ray = self.rays[ray_index]
        new_offset = Q(new_offset)
        offs = [n.offset for n in ray.nodes]
        offs[node_index] = new_offset
        if node_index == 0 and new_offset != 0:
            # sliding the starting node stretches the ray backwards: rebase
            if any(o <= new_offset for o in offs[1:]):
                raise OrderViolation("slide passes a neighboring node")
            nodes = [Node(0, ray.nodes[0].multiplicity)] + [
                Node(o - new_offset, n.multiplicity)
                for o, n in zip(offs[1:], ray.nodes[1:])
            ]
            base = ray.point_at(new_offset)
            new_ray = Ray(base, ray.direction, tuple(nodes))
        else:
            if any(b <= a for a, b in zip(offs, offs[1:])):
                raise OrderViolation("slide breaks the node ordering")
            nodes = [
                Node(o, n.multiplicity) for o, n in zip(offs, ray.nodes)
            ]
            new_ray = Ray(ray.base, ray.direction, tuple(nodes))
        rays = list(self.rays)
        rays[ray_index] = new_ray
        return EigenrayDiagram.make(rays)

    def resolve_node(self, ray_index: int, node_index: int, spacing=1) -> "EigenrayDiagram":
        """Replace a multiplicity-k node by k simple nodes strung along the
        ray at the given spacing (used by the wall-crossing factorization
        tests)."""
        ray = self.rays[ray_index]
        node = ray.nodes[node_index]
        spacing = Q(spacing)
        k = node.multiplicity
        new_offsets = [node.offset + i * spacing for i in range(k)]
        if node_index + 1 < len(ray.nodes):
            nxt = ray.nodes[node_index + 1].offset
            if new_offsets[-1] >= nxt:
                raise OrderViolation("resolution overruns the next node")
        nodes = (
            list(ray.nodes[:node_index])
            + [Node(o, 1) for o in new_offsets]
            + list(ray.nodes[node_index + 1 :])
        )
        rays = list(self.rays)
        rays[ray_index] = Ray(ray.base, ray.direction, tuple(nodes))
        return EigenrayDiagram.make(rays)

    def branch_move(self, ray_index: int) -> "EigenrayDiagram":
        """Replace a ray by the complementary ray of its eigenline.

        Precondition: the full eigenline meets no other ray.  The new ray
        starts at the farthest node with the direction negated and the node
        offsets reversed.  All other rays (forced to one side of the line)
        are transported by A_{K,e}^{s}, K the total line multiplicity, when
        they lie in {det(e_hat, x - base) < 0}; e_hat is the lexicographically
        positive direction of the line and s = +1 iff the replaced ray's
        direction equals e_hat.  The sign convention makes the move an exact
        involution.
        """
        ray = self.rays[ray_index]
        e = ray.direction
        base = ray.base
        for j, other in enumerate(self.rays):
            if j == ray_index:
                continue
            if _line_meets_ray(base, e, other):
                raise LineObstructed(f"eigenline of ray {ray_index} meets ray {j}")
        t_max = ray.nodes[-1].offset
        new_base = ray.point_at(t_max)
        new_dir = tuple(-c for c in e)
        new_nodes = tuple(
            Node(t_max - n.offset, n.multiplicity) for n in reversed(ray.nodes)
        )
        k_total = ray.total_multiplicity()
        e_hat = e if (e[0], e[1]) > (0, 0) else new_dir
        sign = 1 if tuple(e) == tuple(e_hat) else -1
        rays = []
        for j, other in enumerate(self.rays):
            if j == ray_index:
                rays.append(Ray(new_base, new_dir, new_nodes))
                continue
            side = det2(e_hat, tuple(Q(b) - Q(o) for b, o in zip(other.base, base)))
            if side < 0:
                rays.append(_transport_ray(other, base, e_hat, k_total, sign))
            else:
                rays.append(other)
        return EigenrayDiagram.make(rays)

    # -- encoding ----------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rays": [
                {
                    "base": [fmt_q(c) for c in ray.base],
                    "direction": list(ray.direction),
                    "nodes": [
                        {"offset": fmt_q(n.offset), "multiplicity": n.multiplicity}
                        for n in ray.nodes
                    ],
                }
                for ray in self.rays
            ]
        }

    @staticmethod
    def from_json(data: dict) -> "EigenrayDiagram":
        if not isinstance(data, dict) or "rays" not in data:
            raise ParseError("diagram JSON must be an object with a 'rays' list")
        rays = []
        for i, rd in enumerate(data["rays"]):
            for key in ("base", "direction", "nodes"):
                if key not in rd:
                    raise ParseError(f"ray {i}: missing field {key!r}")
            if any(not isinstance(c, int) for c in rd["direction"]):
                raise ParseError(f"ray {i}: direction must be integer")
            nodes = tuple(
                Node(parse_q(str(nd["offset"])), int(nd["multiplicity"]))
                for nd in rd["nodes"]
            )
            rays.append(
                Ray(tuple(parse_q(str(c)) for c in rd["base"]), tuple(rd["direction"]), nodes)
            )
        return EigenrayDiagram.make(rays)

    @staticmethod
    def parse(text: str) -> "EigenrayDiagram":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
        return EigenrayDiagram.from_json(data)


def _line_meets_ray(base, e, other: Ray) -> bool:
    """Does the full line {base + t e} meet the other ray?"""
    d = other.direction
    rhs = tuple(Q(b) - Q(a) for a, b in zip(base, other.base))
    den = det2(e, d)
    if den != 0:
        s = -det2(e, rhs) / den
        return s >= 0
    return det2(e, rhs) == 0  # parallel: meets iff collinear


def _transport_ray(other: Ray, base, e_hat, k_total: int, sign: int) -> Ray:
    """phi(x) = base + A_{K, e_hat}^{sign}(x - base) applied to a whole ray."""
    def phi(p):
        rel = tuple(Q(a) - Q(b) for a, b in zip(p, base))
        img = shear_apply(k_total, e_hat, rel)
        if sign < 0:
            # A^{-1} = A_{k,-e}... A_{k,e} is an involution conjugate; invert
            # directly: A^{-1}(v) = v + k det(e,v) e
            d = det2(e_hat, rel)
            img = tuple(Q(a) + k_total * d * ei for a, ei in zip(rel, e_hat))
        return tuple(Q(b) + c for b, c in zip(base, img))

    new_base = phi(other.base)
    tip = phi(tuple(b + d for b, d in zip(other.base, other.direction)))
    new_dir = primitive(tuple(int(a - b) for a, b in zip(tip, new_base)))
    return Ray(new_base, new_dir, other.nodes)


def diagram_parse_validate(text: str) -> EigenrayDiagram:
    return EigenrayDiagram.parse(text)

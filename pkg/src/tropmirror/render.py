"""Deterministic SVG rendering of eigenray diagrams.

Rationals are converted to decimals (6 digits) only here, never in
computation.  Output is a plain string, stable for golden-file comparison.
"""

from __future__ import annotations

from fractions import Fraction

from .diagrams import EigenrayDiagram
from .nodal import NodalPolygon, StripData
from .qmath import Q

VIEW = 480  # px, square viewport
MARGIN = 40


def _fmt(x: float) -> str:
    return f"{x:.6f}".rstrip("0").rstrip(".")


class _Mapper:
    """Affine map from diagram coordinates to the fixed viewport."""

    def __init__(self, bbox):
        (x0, y0), (x1, y1) = bbox
        w = max(float(x1 - x0), 1e-9)
        h = max(float(y1 - y0), 1e-9)
        self.scale = (VIEW - 2 * MARGIN) / max(w, h)
        self.x0, self.y1 = float(x0), float(y1)

    def pt(self, p):
        x = MARGIN + (float(p[0]) - self.x0) * self.scale
        y = MARGIN + (self.y1 - float(p[1])) * self.scale
        return _fmt(x), _fmt(y)


def _diagram_bbox(diagram: EigenrayDiagram, overlays):
    xs, ys = [], []
    for ray in diagram.rays:
        for t in (0, max((n.offset for n in ray.nodes), default=0) + 2):
            p = ray.point_at(t)
            xs.append(p[0])
            ys.append(p[1])
    for poly in overlays:
        for _, _, glob in poly.pieces():
            for v in glob.vertices:
                xs.append(v[0])
                ys.append(v[1])
    if not xs:
        xs, ys = [Q(-1), Q(1)], [Q(-1), Q(1)]
    pad = max((max(xs) - min(xs)), (max(ys) - min(ys)), Q(2)) / 8
    return (min(xs) - pad, min(ys) - pad), (max(xs) + pad, max(ys) + pad)


def render_diagram(diagram: EigenrayDiagram, overlays=(), strips: StripData | None = None) -> str:
    """SVG with rays (dashed beyond the last node), node markers with
    multiplicity labels, optional strip slits and polygon overlays."""
    overlays = list(overlays)
    bbox = _diagram_bbox(diagram, overlays)
    m = _Mapper(bbox)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{VIEW}" height="{VIEW}" '
        f'viewBox="0 0 {VIEW} {VIEW}">',
        f'<rect width="{VIEW}" height="{VIEW}" fill="white"/>',
    ]
    if strips is not None:
        for strip in strips.strips:
            for a, b in strip.sigmas:
                xa, ya = m.pt(a)
                xb, yb = m.pt(b)
                parts.append(
                    f'<line x1="{xa}" y1="{ya}" x2="{xb}" y2="{yb}" '
                    f'stroke="#999999" stroke-width="1"/>'
                )
    for poly in overlays:
        for _, _, glob in poly.pieces():
            pts = " ".join(",".join(m.pt(v)) for v in _ordered_boundary(glob))
            parts.append(
                f'<polygon points="{pts}" fill="#cfe8ff" fill-opacity="0.5" '
                f'stroke="#3377bb" stroke-width="1.5"/>'
            )
    for ray in diagram.rays:
        t_last = max(n.offset for n in ray.nodes)
        far = t_last + 2
        xa, ya = m.pt(ray.base)
        xm, ym = m.pt(ray.point_at(t_last))
        xb, yb = m.pt(ray.point_at(far))
        parts.append(
            f'<line x1="{xa}" y1="{ya}" x2="{xm}" y2="{ym}" '
            f'stroke="black" stroke-width="2"/>'
        )
        parts.append(
            f'<line x1="{xm}" y1="{ym}" x2="{xb}" y2="{yb}" '
            f'stroke="black" stroke-width="2" stroke-dasharray="6,4"/>'
        )
        for i, node in enumerate(ray.nodes):
            x, y = m.pt(ray.node_position(i))
            parts.append(
                f'<circle cx="{x}" cy="{y}" r="4" fill="black"/>'
            )
            parts.append(
                f'<text x="{x}" y="{y}" dx="8" dy="-6" font-size="14" '
                f'font-family="monospace">{node.multiplicity}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _ordered_boundary(poly):
    """Vertices in counterclockwise order around the centroid (2d only)."""
    verts = list(poly.vertices)
    if len(verts) <= 2:
        return verts
    cx = sum(v[0] for v in verts) / len(verts)
    cy = sum(v[1] for v in verts) / len(verts)
    import math

    return sorted(
        verts, key=lambda v: math.atan2(float(v[1] - cy), float(v[0] - cx))
    )

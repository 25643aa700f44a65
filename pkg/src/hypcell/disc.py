"""Poincare-disc rendering of planar process realizations.

Geodesics of H^2 appear in the Poincare disc as circular arcs meeting the
unit circle at right angles: the hyperplane at distance p in direction u
maps to the circle centered at coth(p) u with radius 1/sinh(p) (a diameter
perpendicular to u in the limit p -> 0).  The zero cell is constructed
exactly in the Klein disc, where hyperplanes are straight chords
{k : <k, u> = tanh p} and half-plane clipping is linear; the clipped
polygon's edges are then subdivided and mapped to the Poincare disc, where
they trace the true arcs.

Model radius dictionary: a hyperbolic radius r has Klein radius tanh(r) and
Poincare radius tanh(r/2).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .mcsim import ProcessSample

_EDGE_SUBDIV = 24
_BOUNDARY_POINTS = 256


def klein_to_poincare(k: np.ndarray) -> np.ndarray:
    """Map Klein-disc points (m, 2) to Poincare-disc points."""
    k = np.asarray(k, dtype=float)
    sq = np.sum(k * k, axis=-1, keepdims=True)
    return k / (1.0 + np.sqrt(np.maximum(1.0 - sq, 0.0)))


def poincare_to_hyperboloid(w: np.ndarray) -> np.ndarray:
    """Map Poincare-disc points (m, 2) to hyperboloid points (m, 3)."""
    w = np.asarray(w, dtype=float)
    sq = np.sum(w * w, axis=-1)
    denom = 1.0 - sq
    return np.column_stack([2.0 * w / denom[:, None], (1.0 + sq) / denom])


def _clip_halfplane(poly: np.ndarray, u: np.ndarray, c: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a polygon to {k : <k, u> <= c}."""
    if poly.shape[0] == 0:
        return poly
    side = poly @ u - c
    out = []
    m = poly.shape[0]
    for i in range(m):
        j = (i + 1) % m
        cur_in, nxt_in = side[i] <= 0.0, side[j] <= 0.0
        if cur_in:
            out.append(poly[i])
        if cur_in != nxt_in:
            t = side[i] / (side[i] - side[j])
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return np.array(out) if out else np.empty((0, 2))


def cell_polygon_klein(sample: ProcessSample) -> np.ndarray:
    """Exact zero-cell polygon (within the sampled ball) in Klein coords."""
    if sample.params.d != 2:
        raise DomainError("cell rendering is implemented for d = 2 only")
    ang = 2.0 * math.pi * np.arange(_BOUNDARY_POINTS) / _BOUNDARY_POINTS
    poly = math.tanh(sample.R) * np.column_stack([np.cos(ang), np.sin(ang)])
    p, u = sample.arrays()
    for pi, ui in zip(p, u):
        poly = _clip_halfplane(poly, ui, math.tanh(pi))
        if poly.shape[0] == 0:
            break
    return poly


def _subdivide_closed(poly: np.ndarray, per_edge: int) -> np.ndarray:
    m = poly.shape[0]
    ts = np.arange(per_edge) / per_edge
    pts = []
    for i in range(m):
        j = (i + 1) % m
        pts.append(poly[i] + ts[:, None] * (poly[j] - poly[i]))
    return np.vstack(pts)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def svg_document(sample: ProcessSample) -> str:
    """Standalone SVG 1.1 picture of the realization in the Poincare disc."""
    poly_k = cell_polygon_klein(sample)
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'viewBox="-1.05 -1.05 2.1 2.1" width="640" height="640">',
        '<defs><clipPath id="disc"><circle cx="0" cy="0" r="1"/>'
        '</clipPath></defs>',
        '<rect x="-1.05" y="-1.05" width="2.1" height="2.1" fill="white"/>',
        '<g clip-path="url(#disc)">',
    ]
    if poly_k.shape[0] >= 3:
        pts = klein_to_poincare(_subdivide_closed(poly_k, _EDGE_SUBDIV))
        path = "M " + " L ".join(
            f"{_fmt(x)} {_fmt(y)}" for x, y in pts) + " Z"
        parts.append(f'<path d="{path}" fill="#2b6cb0" fill-opacity="0.4" '
                     'stroke="none"/>')
    # the sampled ball, for reference
    parts.append(f'<circle cx="0" cy="0" r="{_fmt(math.tanh(0.5 * sample.R))}"'
                 ' fill="none" stroke="#999999" stroke-width="0.004" '
                 'stroke-dasharray="0.02 0.02"/>')
    p, u = sample.arrays()
    for pi, ui in zip(p, u):
        if pi < 1e-9:
            # diameter perpendicular to u through the origin
            vx, vy = -ui[1], ui[0]
            parts.append(f'<line x1="{_fmt(-vx)}" y1="{_fmt(-vy)}" '
                         f'x2="{_fmt(vx)}" y2="{_fmt(vy)}" stroke="#222222" '
                         'stroke-width="0.004"/>')
        else:
            cx, cy = (1.0 / math.tanh(pi)) * ui
            parts.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
                         f'r="{_fmt(1.0 / math.sinh(pi))}" fill="none" '
                         'stroke="#222222" stroke-width="0.004"/>')
    parts.append("</g>")
    parts.append('<circle cx="0" cy="0" r="1" fill="none" stroke="black" '
                 'stroke-width="0.004"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

"""Adaptive boundary sampling for rectilinear polygons.

Sample spacing at a boundary point ``x`` is ``kappa * rho(x)`` with

    rho(x) = min( min_v |x - v| + kappa * s_v ,  lfs(x) ,  |x - center| )

where ``v`` runs over the vertices, ``s_v`` is the shorter edge at ``v``,
``lfs(x)`` is the distance from ``x`` to the nearest edge not incident to
the edge carrying ``x``, and ``center`` is the point the map is normalized
at.  Spacing is geometric toward every corner and toward the part of the
boundary nearest the center, which resolves all length scales of comb
domains with a logarithmic number of points, and never exceeds the local
width, which keeps long narrow channels resolved.  ``kappa`` is tuned so
that the total count matches the requested resolution.
"""

from __future__ import annotations

import numpy as np

from .errors import ResolutionTooLow
from .staircase import StaircasePolygon

MIN_SAMPLES_PER_EDGE = 4


def minimum_resolution(poly: StaircasePolygon) -> int:
    return MIN_SAMPLES_PER_EDGE * len(poly.vertices)


def _pieces(poly: StaircasePolygon):
    """Boundary pieces in order, starting at the real-axis exit point."""
    verts = poly.vertices
    n = len(verts)
    exit_pt = poly.exit_point
    start = None
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if a.real == b.real == exit_pt.real and a.imag < 0 < b.imag:
            start = i
            break
    if start is None:
        # exit edge runs downward: the polygon would be clockwise on the right
        raise ResolutionTooLow("no upward exit edge found")
    a, b = verts[start], verts[(start + 1) % n]
    pieces = [(exit_pt, b)]
    for k in range(1, n):
        i = (start + k) % n
        pieces.append((verts[i], verts[(i + 1) % n]))
    pieces.append((a, exit_pt))
    return pieces


def _vertex_scales(poly: StaircasePolygon) -> np.ndarray:
    lens = poly.edge_lengths()
    return np.minimum(lens, np.roll(lens, 1))


def _segment_distance(pts, a, b):
    """Distance from each point to each segment ``a[j] b[j]``."""
    d = b - a
    s = np.clip(((pts[:, None] - a[None, :]) * np.conj(d)[None, :]).real / np.abs(d)[None, :] ** 2, 0.0, 1.0)
    return np.abs(pts[:, None] - (a[None, :] + s * d[None, :]))


def _far_edges(verts, A, B):
    """Edges of the polygon not touching the segment ``A B`` (which lies on one edge)."""
    n = len(verts)
    starts = np.asarray(verts)
    ends = np.roll(starts, -1)
    mid = 0.5 * (A + B)
    host = int(np.argmin(_segment_distance(np.array([mid]), starts, ends)[0]))
    keep = [j for j in range(n) if j not in (host, (host - 1) % n, (host + 1) % n)]
    return starts[keep], ends[keep]


def _piece_density(A, B, verts, scales, center, kappa):
    L = abs(B - A)
    d = (B - A) / L
    eps = max(L * 1e-12, kappa * kappa * scales.min() * 1e-2)
    geo = np.geomspace(eps, L, 256)
    anchors = [0.0, L]
    for p in list(verts) + [center]:
        x = ((p - A) * np.conj(d)).real
        if 0.0 < x < L:
            anchors.append(x)
    xs = [np.array([0.0, L])]
    for x0 in anchors:
        xs.append(np.clip(x0 + geo, 0.0, L))
        xs.append(np.clip(x0 - geo, 0.0, L))
    x = np.unique(np.concatenate(xs))
    pts = A + d * x
    dist_v = np.abs(pts[:, None] - np.asarray(verts)[None, :]) + kappa * scales[None, :]
    rho = np.minimum(dist_v.min(axis=1), np.abs(pts - center))
    far_a, far_b = _far_edges(verts, A, B)
    if len(far_a):
        rho = np.minimum(rho, _segment_distance(pts, far_a, far_b).min(axis=1))
    dens = 1.0 / (kappa * rho)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(x))])
    return x, cum, d


def sample_boundary(poly: StaircasePolygon, center: complex, kappa: float) -> np.ndarray:
    """Boundary samples for a given spacing factor, exit point first."""
    verts = np.array(poly.vertices)
    scales = _vertex_scales(poly)
    pieces = _pieces(poly)
    out = []
    for k, (A, B) in enumerate(pieces):
        x, cum, d = _piece_density(A, B, verts, scales, center, kappa)
        split = k == 0 or k == len(pieces) - 1
        n_min = MIN_SAMPLES_PER_EDGE // 2 if split else MIN_SAMPLES_PER_EDGE
        n = max(n_min, int(np.ceil(cum[-1])))
        levels = cum[-1] * np.arange(n) / n
        out.append(A + d * np.interp(levels, cum, x))
    return np.concatenate(out)


def _count(poly, center, kappa) -> int:
    verts = np.array(poly.vertices)
    scales = _vertex_scales(poly)
    total = 0
    pieces = _pieces(poly)
    for k, (A, B) in enumerate(pieces):
        _, cum, _ = _piece_density(A, B, verts, scales, center, kappa)
        split = k == 0 or k == len(pieces) - 1
        n_min = MIN_SAMPLES_PER_EDGE // 2 if split else MIN_SAMPLES_PER_EDGE
        total += max(n_min, int(np.ceil(cum[-1])))
    return total


def samples_for_resolution(
    poly: StaircasePolygon, center: complex, resolution: int, max_iterations: int = 100
) -> np.ndarray:
    """Samples whose count is as close to ``resolution`` as possible without exceeding it."""
    if resolution < minimum_resolution(poly):
        raise ResolutionTooLow(
            f"resolution {resolution} below minimum {minimum_resolution(poly)} "
            f"({MIN_SAMPLES_PER_EDGE} per edge)"
        )
    lo, hi = np.log(1e-7), np.log(4.0)  # log kappa; count decreases with kappa
    if _count(poly, center, np.exp(hi)) > resolution:
        raise ResolutionTooLow(f"resolution {resolution} too low for this polygon")
    for _ in range(max_iterations):
        mid = 0.5 * (lo + hi)
        if _count(poly, center, np.exp(mid)) > resolution:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-4:
            break
    return sample_boundary(poly, center, float(np.exp(hi)))

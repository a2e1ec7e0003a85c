"""Normalized conformal maps of the unit disk onto rectilinear polygons.

The map ``g`` satisfies ``g(0) = center`` (the origin for staircases) and
sends the boundary point 1 to the point where the real axis leaves the
polygon, the finite stand-in for ``g^{-1}(t) -> 1`` as ``t -> +inf``.

Internally the polygon is first mapped onto the upper half-plane by the
geodesic zipper with the exit point sent to infinity.  The zipper reports
``W`` relative to a real reference value (see :mod:`slopelab.zipper`); the
real shift cancels below.  With ``a`` the image of the center, the disk
coordinate is ``(W - a) / (W - conj(a))``, so

    1 - g^{-1}(zeta) = 2i Im(a) / (W - conj(a))

is available without cancellation even when ``g^{-1}(zeta)`` is
exponentially close to 1.  Slopes are computed from this quantity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, OutsideDisk, OutsideDomain, OutsideQuadrant, TooCloseToBoundary
from .sampling import samples_for_resolution
from .staircase import StaircasePolygon, box, contains
from .zipper import GeodesicZipper, build_zipper

DERIVATIVE_MARGIN = 1e-10
ROUND_TRIP_RTOL = 1e-7


@dataclass(frozen=True)
class ConformalMap:
    """Numerical Riemann map ``g`` of the disk onto ``domain_polygon``.

    ``b`` is the unimodular constant with ``g(z) = h(b z)``, where ``h`` is
    the map with positive derivative at 0.  ``accuracy`` is the
    resolution-doubling estimate (``nan`` when not computed).
    """

    domain_polygon: StaircasePolygon
    resolution: int
    b: complex
    accuracy: float
    center: complex
    engine: GeodesicZipper = field(repr=False, compare=False)
    anchor: np.clongdouble = field(repr=False)  # relative half-plane image of the center

    @property
    def sample_count(self) -> int:
        return self.engine.size

    def _halfplane(self, zeta, derivative=False):
        return self.engine.to_halfplane(zeta, derivative=derivative)

    def _check_domain(self, zeta):
        if not np.all(contains(self.domain_polygon, zeta)):
            raise OutsideDomain("point(s) outside the polygon interior")

    def _round_trip(self, zeta, W):
        back = self.engine.from_halfplane(W)
        scale = np.maximum(1.0, np.abs(zeta))
        if np.any(np.abs(back - zeta) > ROUND_TRIP_RTOL * scale):
            raise NoConvergence(
                "evaluation left the numerically mapped domain (too close to the boundary "
                "for this resolution)"
            )

    def gap(self, zeta, check: bool = True):
        """``1 - g^{-1}(zeta)``, accurate to full relative precision."""
        zeta = np.asarray(zeta, dtype=complex)
        if check:
            self._check_domain(zeta)
        W = self._halfplane(zeta)
        if check:
            self._round_trip(zeta, W)
        a = self.anchor
        return (2j * a.imag / (W - np.conj(a))).astype(complex)

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "sample_count": self.sample_count,
            "accuracy": self.accuracy,
            "b": [self.b.real, self.b.imag],
            "center": [self.center.real, self.center.imag],
            "polygon": self.domain_polygon.to_dict(),
        }


def _assemble(poly: StaircasePolygon, resolution: int, center: complex, max_iterations: int):
    samples = samples_for_resolution(poly, center, resolution, max_iterations)
    engine = build_zipper(samples, center)
    anchor, dW = engine.to_halfplane(np.array([center]), derivative=True)
    anchor, dW = anchor[0], complex(dW[0])
    if not anchor.imag > 0:
        raise NoConvergence("center did not map into the upper half-plane")
    slope0 = dW / (2j * float(anchor.imag))
    b = abs(slope0) / slope0
    return ConformalMap(poly, resolution, complex(b), float("nan"), complex(center), engine, anchor)


def probe_points(poly: StaircasePolygon, center: complex = 0j) -> np.ndarray:
    """Fixed probe set for accuracy estimates.

    Real-axis points from the left end of the exit interval up to the
    trusted limit (log-spaced, so every scale of a comb is represented),
    plus a small ring around the center.
    """
    x_in, _ = real_axis_interval(poly)
    top = poly.trusted_limit
    span = top - x_in
    real = x_in + np.geomspace(min(0.5, 0.25 * span), span, 40)
    d = float(poly.boundary_distance(center)[0])
    ring = center + 0.5 * d * np.exp(2j * np.pi * np.arange(8) / 8)
    pts = np.concatenate([real.astype(complex), ring])
    return pts[contains(poly, pts)]


def accuracy_estimate(
    poly: StaircasePolygon, resolution: int, center: complex = 0j, max_iterations: int = 100,
    _maps: tuple[ConformalMap, ConformalMap] | None = None,
) -> float:
    """Resolution-doubling estimate of the map error over the probe set.

    The estimate is ``sup |g_{2R}^{-1} - g_R^{-1}|``, raised to the largest
    discrepancy of ``Arg(1 - g^{-1})`` on the real-axis probes.  Deep in the
    tail ``g^{-1}`` is exponentially close to 1, so absolute differences
    vanish there while the slope, the quantity consumed downstream, still
    carries the full discretization error.
    """
    if _maps is None:
        coarse = _assemble(poly, resolution, center, max_iterations)
        fine = _assemble(poly, 2 * resolution, center, max_iterations)
    else:
        coarse, fine = _maps
    probes = probe_points(poly, center)
    g_fine = fine.gap(probes, check=False)
    g_coarse = coarse.gap(probes, check=False)
    diff = np.abs(g_fine - g_coarse)
    real = probes.imag == 0
    angle = np.abs(np.angle(g_fine[real] / g_coarse[real]))
    return float(max(diff.max(), angle.max(initial=0.0)))


def build_map_pair(
    poly: StaircasePolygon,
    resolution: int,
    center: complex = 0j,
    max_iterations: int = 100,
) -> tuple[ConformalMap, ConformalMap]:
    """Maps at ``resolution`` and ``2 * resolution``; the first carries the accuracy estimate.

    Callers that recheck results at doubled resolution use the second map.
    """
    center = complex(center)
    if not contains(poly, center):
        raise OutsideDomain(f"center {center} is not inside the polygon")
    coarse = _assemble(poly, resolution, center, max_iterations)
    fine = _assemble(poly, 2 * resolution, center, max_iterations)
    acc = accuracy_estimate(poly, resolution, center, _maps=(coarse, fine))
    coarse = ConformalMap(poly, resolution, coarse.b, acc, coarse.center, coarse.engine, coarse.anchor)
    return coarse, fine


def build_map(
    poly: StaircasePolygon,
    resolution: int,
    center: complex = 0j,
    estimate_accuracy: bool = True,
    max_iterations: int = 100,
) -> ConformalMap:
    """Build the normalized map of the disk onto ``poly``.

    ``resolution`` is the boundary-sample count.  With ``estimate_accuracy``
    a second map at twice the resolution is built to fill ``accuracy``.

    Raises
    ------
    OutsideDomain
        If ``center`` is not interior.
    ResolutionTooLow
        Below 4 samples per edge, or when the zipper detects undersampling.
    """
    if estimate_accuracy:
        return build_map_pair(poly, resolution, center, max_iterations)[0]
    center = complex(center)
    if not contains(poly, center):
        raise OutsideDomain(f"center {center} is not inside the polygon")
    return _assemble(poly, resolution, center, max_iterations)


def forward(cmap: ConformalMap, z):
    """``g(z)`` for ``|z| < 1``."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise OutsideDisk("forward needs |z| < 1")
    a = cmap.anchor
    W = (a - z * np.conj(a)) / (1 - z)
    return cmap.engine.from_halfplane(W).astype(complex)


def forward_from_gap(cmap: ConformalMap, gap):
    """``g(1 - gap)``; stable when the disk point is close to 1."""
    gap = np.asarray(gap, dtype=complex)
    a = cmap.anchor
    W = np.conj(a) + 2j * a.imag / gap
    return cmap.engine.from_halfplane(W).astype(complex)


def inverse(cmap: ConformalMap, zeta):
    """``g^{-1}(zeta)`` for interior points (explicit, no iteration).

    Raises
    ------
    OutsideDomain
        ``zeta`` is not strictly inside the polygon.
    NoConvergence
        ``zeta`` lies inside the polygon but outside the numerically mapped
        domain, i.e. closer to the boundary than the resolution supports.
    """
    zeta = np.asarray(zeta, dtype=complex)
    cmap._check_domain(zeta)
    W = cmap._halfplane(zeta)
    cmap._round_trip(zeta, W)
    a = cmap.anchor
    return ((W - a) / (W - np.conj(a))).astype(complex)


def real_axis_interval(poly: StaircasePolygon) -> tuple[float, float]:
    """Open real interval ending at the exit point that lies inside the polygon."""
    x_exit = poly.exit_x
    crossings = [
        a.real for a, b in zip(poly.vertices, poly.vertices[1:] + poly.vertices[:1])
        if a.real == b.real and min(a.imag, b.imag) < 0 < max(a.imag, b.imag) and a.real < x_exit
    ]
    return (max(crossings) if crossings else -np.inf), x_exit


def inverse_real_axis(cmap: ConformalMap, t):
    """``g^{-1}(t)`` for real ``t`` strictly inside the real-axis segment.

    Agrees with :func:`inverse`; kept separate because the real axis is the
    orbit of 0 and the main path of every slope computation.
    """
    t = np.asarray(t, dtype=float)
    lo, hi = real_axis_interval(cmap.domain_polygon)
    if np.any(t <= lo) or np.any(t >= hi):
        raise OutsideDomain(f"t must lie in ({lo}, {hi})")
    return inverse(cmap, t.astype(complex))


def derivative(cmap: ConformalMap, z):
    """``g'(z)`` by the chain rule through the zipper factors."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1 - DERIVATIVE_MARGIN):
        raise TooCloseToBoundary(f"derivative needs |z| < 1 - {DERIVATIVE_MARGIN}")
    return derivative_at(cmap, forward(cmap, z))


def derivative_at(cmap: ConformalMap, zeta):
    """``g'`` at the preimage of the domain point ``zeta``.

    Avoids recomputing ``zeta`` from a disk point that may be very close to 1.
    """
    zeta = np.asarray(zeta, dtype=complex)
    W, dW = cmap._halfplane(zeta, derivative=True)
    a = cmap.anchor
    dq = dW * (a - np.conj(a)) / (W - np.conj(a)) ** 2
    return (1.0 / dq).astype(complex)


# closed-form oracles -------------------------------------------------------

OMEGA = (1 + 1j) / np.sqrt(2)


@dataclass(frozen=True)
class QuadrantMapParams:
    """Corner ``u - i w`` of the quadrant ``{Re > u, Im > -w}``."""

    u: float
    w: float

    def __post_init__(self):
        if not (self.u > 0 and self.w >= 1):
            raise OutsideQuadrant("quadrant needs u > 0 and w >= 1")


def explicit_quadrant_map(p: QuadrantMapParams, z):
    """``f(z) = omega * sqrt((1+z)/(1-z)) + u - i w`` (principal root)."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise OutsideDisk("explicit_quadrant_map needs |z| < 1")
    return OMEGA * np.sqrt((1 + z) / (1 - z)) + p.u - 1j * p.w


def explicit_quadrant_inverse(p: QuadrantMapParams, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(zeta.real <= p.u) or np.any(zeta.imag <= -p.w):
        raise OutsideQuadrant("point outside the open quadrant")
    s = (zeta - p.u + 1j * p.w) * np.conj(OMEGA)
    s2 = s * s
    return (s2 - 1) / (s2 + 1)


def explicit_quadrant_gap(p: QuadrantMapParams, zeta):
    """``1 - f^{-1}(zeta) = 2 / (s^2 + 1)``."""
    zeta = np.asarray(zeta, dtype=complex)
    s = (zeta - p.u + 1j * p.w) * np.conj(OMEGA)
    return 2.0 / (s * s + 1)


def halfplane_map(z):
    """``2z / (1 - z)``: disk onto ``{Re > -1}``, fixing 0, with ``1`` at infinity."""
    z = np.asarray(z, dtype=complex)
    return 2 * z / (1 - z)


def quadrant_polygon(p: QuadrantMapParams, tail_length: float, height: float | None = None) -> StaircasePolygon:
    """Truncation of ``{Re > u, Im > -w}`` to a box of width ``tail_length``."""
    height = tail_length if height is None else height
    return box(p.u, p.u + tail_length, -p.w, -p.w + height, tail_length)


def quadrant_center(p: QuadrantMapParams) -> complex:
    return complex(p.u - 1j * p.w + OMEGA)


def halfplane_polygon(size: float) -> StaircasePolygon:
    """Box approximating ``{Re > -1}``: width ``size``, height ``2 * size``."""
    return box(-1.0, -1.0 + size, -size, size, size)

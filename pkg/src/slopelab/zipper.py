"""Geodesic zipper: conformal map of a Jordan domain onto the upper half-plane.

Given boundary samples ``z[0], z[1], ..., z[n]`` in order, the map is the
composition

1. ``w = i sqrt((z - z[1]) / (z - z[0]))``, sending ``z[0]`` to infinity
   and ``z[1]`` to 0 (the chord ``z[0] z[1]`` must be a straight boundary
   piece, so this step is exact);
2. one basic map per remaining sample, each sending the current image of the
   sample to 0 by opening the hyperbolic geodesic from 0 to it;
3. a final map that opens the last geodesic and returns ``z[0]`` to infinity.

The result is an exact conformal map onto the upper half-plane of a domain
whose boundary interpolates the samples.  Both directions are explicit, so
no iterative inversion is involved.

Precision
---------
Once the zipper has passed the part of the boundary nearest the point the
map is normalized at, the rest of the boundary pushes that neighbourhood
into a tiny patch far from the origin, and absolute coordinates lose the
patch's internal geometry.  Points are therefore carried relative to a
*reference*: the image of the boundary sample nearest the normalization
point.  After that sample is zipped its image is real, every step is
applied in difference form ``f(X + d) - f(X)`` with cancellation-free
formulas, and the public coordinate is ``D = W - W_ref`` with ``W_ref``
real.  All arithmetic uses ``numpy.clongdouble``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResolutionTooLow

CTYPE = np.clongdouble
RTYPE = np.longdouble
_I = CTYPE(1j)


def _sqrt_upper(w):
    """Square root with nonnegative imaginary part."""
    return _I * np.sqrt(-w)


def _geodesic_constants(a) -> tuple:
    r2 = a.real * a.real + a.imag * a.imag
    b = r2 / a.real if a.real != 0.0 else RTYPE(np.inf)
    return b, r2 / a.imag


def _real_step(x, b, c):
    """Image of a zipped (real) boundary point under one basic map.

    The previous tip sits at 0; it belongs to the zipped side and goes to ``-c``.
    """
    t = x / (1 - x / b) if np.isfinite(b) else x
    side = np.sign(t) if t != 0 else -1
    return t, side * np.sqrt(t * t + c * c)


def _diff(numerator, direct, plus, minus):
    """``numerator / plus`` unless ``plus`` suffers cancellation, else ``direct``.

    ``plus = F1 + F0`` and ``minus = F1 - F0``; when ``|plus| <= |minus|`` the
    direct difference has no cancellation.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = numerator / plus
    return np.where(np.abs(plus) > np.abs(minus), quotient, direct)


@dataclass(frozen=True)
class GeodesicZipper:
    z0: np.clongdouble
    z1: np.clongdouble
    a: np.ndarray  # images of the samples at the moment they are zipped
    b: np.ndarray
    c: np.ndarray
    p: np.longdouble  # image of z0 before the final map
    sign: float  # orientation of the final squaring
    ref_index: int  # step after which points are carried relative to the reference
    refs: np.ndarray  # reference image after steps ref_index, ref_index + 1, ...

    @property
    def size(self) -> int:
        return len(self.a) + 2

    @property
    def w_ref(self) -> np.longdouble:
        """Real half-plane image of the reference; ``W = w_ref + D``."""
        x = self.refs[-1]
        t0 = x / (1 - x / self.p)
        return self.sign * t0 * t0

    def to_halfplane(self, z, derivative: bool = False):
        """``D = W(z) - w_ref`` for domain points, optionally with ``dW/dz``."""
        z = np.asarray(z, dtype=CTYPE)
        m = (z - self.z1) / (z - self.z0)
        root = np.sqrt(m)
        w = _I * root
        dw = _I * (self.z1 - self.z0) / (z - self.z0) ** 2 / (2 * root) if derivative else None
        kr = self.ref_index
        for k in range(kr + 1):
            b, c = self.b[k], self.c[k]
            q = 1 - w / b if np.isfinite(b) else 1
            t = w / q
            w_new = _sqrt_upper(t * t + c * c)
            if derivative:
                dw = dw * t / (q * q * w_new)
            w = w_new
        d = w  # the reference sits at 0 right after its own step
        for k in range(kr + 1, len(self.b)):
            b, c = self.b[k], self.c[k]
            x = self.refs[k - kr - 1]
            t0, f0 = _real_step(x, b, c)
            if np.isfinite(b):
                q0 = 1 - x / b
                q1 = q0 - d / b
                dt = d / (q0 * q1)
            else:
                q1 = 1
                dt = d
            t1 = t0 + dt
            ds = dt * (t0 + t1)
            f1 = _sqrt_upper(t0 * t0 + c * c + ds)
            if derivative:
                dw = dw * t1 / (q1 * q1 * f1)
            d = _diff(ds, f1 - f0, f1 + f0, f1 - f0)
        x = self.refs[-1]
        q0 = 1 - x / self.p
        q1 = q0 - d / self.p
        t0 = x / q0
        dt = d / (q0 * q1)
        D = self.sign * dt * (2 * t0 + dt)
        if derivative:
            return D, dw * 2 * self.sign * (t0 + dt) / (q1 * q1)
        return D

    def from_halfplane(self, D):
        """Inverse of :meth:`to_halfplane`: domain point with ``W = w_ref + D``."""
        D = np.asarray(D, dtype=CTYPE)
        kr = self.ref_index
        x = self.refs[-1]
        t0 = x / (1 - x / self.p)
        t = _sqrt_upper((self.w_ref + D) / self.sign)
        dt = _diff(self.sign * D, t - t0, t + t0, t - t0)
        d = dt / ((1 + t0 / self.p) * (1 + t / self.p))
        for k in range(len(self.b) - 1, kr, -1):
            b, c = self.b[k], self.c[k]
            t0, f0 = _real_step(self.refs[k - kr - 1], b, c)
            f1 = f0 + d
            t = _sqrt_upper(f1 * f1 - c * c)
            dt = _diff(d * (f0 + f1), t - t0, t + t0, t - t0)
            d = dt / ((1 + t0 / b) * (1 + t / b)) if np.isfinite(b) else dt
        w = d
        for k in range(kr, -1, -1):
            b, c = self.b[k], self.c[k]
            t = _sqrt_upper(w * w - c * c)
            w = t / (1 + t / b) if np.isfinite(b) else t
        m = -w * w
        return (self.z1 - m * self.z0) / (1 - m)


def build_zipper(samples: np.ndarray, interior: complex) -> GeodesicZipper:
    """Run the zipper over ``samples`` (first sample goes to infinity).

    ``interior`` is the point the map will be normalized at.  It fixes the
    orientation of the final map, and the sample nearest to it becomes the
    reference for relative coordinates.

    Raises
    ------
    ResolutionTooLow
        If a sample's image leaves the upper half-plane, which happens only
        when the boundary is sampled too coarsely.
    """
    samples = np.asarray(samples, dtype=CTYPE)
    z0, z1 = samples[0], samples[1]
    rest = samples[2:]
    n = len(rest)
    if n < 1:
        raise ResolutionTooLow("need at least three boundary samples")
    kr = int(np.argmin(np.abs(rest - CTYPE(interior))))
    w = _I * np.sqrt((rest - z1) / (rest - z0))
    a = np.empty(n, dtype=CTYPE)
    bs = np.empty(n, dtype=RTYPE)
    cs = np.empty(n, dtype=RTYPE)
    refs = [RTYPE(0)]
    p = RTYPE(np.inf)
    for k in range(n):
        ak = w[k]
        if not ak.imag > 0:
            raise ResolutionTooLow(
                f"boundary sample {k + 2} left the upper half-plane (image {ak}); refine the sampling"
            )
        b, c = _geodesic_constants(ak)
        a[k], bs[k], cs[k] = ak, b, c
        tail = w[k + 1:]
        t = tail / (1 - tail / b) if np.isfinite(b) else tail
        w[k + 1:] = _sqrt_upper(t * t + c * c)
        if k > kr:
            refs.append(_real_step(refs[-1], b, c)[1])
        # track the image of z0 along the real axis
        tp = -b if np.isinf(p) else (p / (1 - p / b) if np.isfinite(b) else p)
        p = np.sign(tp) * np.sqrt(tp * tp + c * c) if np.isfinite(tp) else tp
    if not np.isfinite(p) or p == 0:
        raise ResolutionTooLow("degenerate final map; refine the sampling")
    refs = np.array(refs, dtype=RTYPE)
    engine = GeodesicZipper(z0, z1, a, bs, cs, p, 1.0, kr, refs)
    probe = engine.to_halfplane(np.array([interior]))[0]
    if not np.isfinite(probe) or probe.imag == 0:
        raise ResolutionTooLow("interior point did not separate from the boundary; refine the sampling")
    if probe.imag < 0:
        engine = GeodesicZipper(z0, z1, a, bs, cs, p, -1.0, kr, refs)
    return engine

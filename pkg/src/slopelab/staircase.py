"""Staircase (comb) domains built from axis-parallel rectangles.

A staircase domain is the union of a base rectangle ``R(-1, u[0], 1, 1)``
and stage rectangles ``R(u[j], u[j+1], v[j], w[j])``, where

    R(u1, u2, v, w) = {z : u1 < Re z <= u2, -w < Im z < v}.

The infinite domain is truncated by a closing rectangle of length
``tail_length`` that keeps the last heights (or raised ones, for extension
searches).  The result is a rectilinear Jordan polygon.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateGeometry,
    GeometryNotJordan,
    HeightBelowOne,
    LengthMismatch,
    NonMonotoneHeights,
    NonMonotoneU,
    ValidationError,
)


@dataclass(frozen=True)
class Rect:
    """The half-open rectangle ``{u1 < Re z <= u2, -w < Im z < v}``."""

    u1: float
    u2: float
    v: float
    w: float

    def __post_init__(self):
        if not (self.u1 < self.u2 and self.v > 0 and self.w > 0):
            raise DegenerateGeometry(f"invalid rectangle {self}")

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return (
            (self.u1 < z.real) & (z.real <= self.u2) & (-self.w < z.imag) & (z.imag < self.v)
        )


@dataclass(frozen=True)
class StaircaseParams:
    """Finite prefix ``(u, v, w)`` of the sequences defining a staircase.

    ``u`` holds the n+1 abscissas bounding n stage rectangles; ``v`` and
    ``w`` hold their upper heights and lower depths.  Use
    :func:`build_params` to construct validated instances.
    """

    u: tuple[float, ...]
    v: tuple[float, ...]
    w: tuple[float, ...]

    @property
    def stage_count(self) -> int:
        return len(self.v)

    @property
    def last_heights(self) -> tuple[float, float]:
        """Heights of the last stage, or of the base rectangle for an empty prefix."""
        if self.v:
            return self.v[-1], self.w[-1]
        return 1.0, 1.0

    def rects(self) -> list[Rect]:
        out = [Rect(-1.0, self.u[0], 1.0, 1.0)]
        for j in range(len(self.v)):
            out.append(Rect(self.u[j], self.u[j + 1], self.v[j], self.w[j]))
        return out

    def extended(self, length: float, v_next: float, w_next: float) -> "StaircaseParams":
        return build_params(
            list(self.u) + [self.u[-1] + length],
            list(self.v) + [v_next],
            list(self.w) + [w_next],
        )

    def conjugate(self) -> "StaircaseParams":
        """Mirror image under complex conjugation (swaps heights and depths)."""
        return StaircaseParams(self.u, self.w, self.v)

    def to_dict(self) -> dict:
        return {"u": list(self.u), "v": list(self.v), "w": list(self.w)}

    @classmethod
    def from_dict(cls, data: dict) -> "StaircaseParams":
        return build_params(data["u"], data["v"], data["w"])


def build_params(u: Sequence[float], v: Sequence[float], w: Sequence[float]) -> StaircaseParams:
    """Validate the three lists and return :class:`StaircaseParams`.

    Raises
    ------
    LengthMismatch, NonMonotoneU, HeightBelowOne, NonMonotoneHeights
        One per violated constraint; nothing is silently repaired.
    """
    u = tuple(float(x) for x in u)
    v = tuple(float(x) for x in v)
    w = tuple(float(x) for x in w)
    if len(u) == 0 or len(u) != len(v) + 1 or len(v) != len(w):
        raise LengthMismatch(
            f"need |u| = |v| + 1 = |w| + 1, got |u|={len(u)}, |v|={len(v)}, |w|={len(w)}"
        )
    if not all(np.isfinite(u + v + w)):
        raise ValidationError("non-finite entry in staircase parameters")
    if u[0] <= 0 or any(b <= a for a, b in zip(u, u[1:])):
        raise NonMonotoneU(f"u must be positive and strictly increasing: {list(u)}")
    for name, seq in (("v", v), ("w", w)):
        if any(x < 1 for x in seq):
            raise HeightBelowOne(f"{name} entries must be >= 1: {list(seq)}")
    for name, seq in (("v", v), ("w", w)):
        if any(b < a for a, b in zip(seq, seq[1:])):
            raise NonMonotoneHeights(f"{name} must be nondecreasing: {list(seq)}")
    return StaircaseParams(u, v, w)


def _canonical_loop(points: list[complex]) -> list[complex]:
    pts = []
    for p in points:
        if not pts or p != pts[-1]:
            pts.append(p)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            if (a.real == b.real == c.real) or (a.imag == b.imag == c.imag):
                del pts[i]
                changed = True
                break
    return pts


def _segments_cross(p1, p2, q1, q2) -> bool:
    """Closed intersection test for two axis-parallel segments."""
    ax0, ax1 = sorted((p1.real, p2.real))
    ay0, ay1 = sorted((p1.imag, p2.imag))
    bx0, bx1 = sorted((q1.real, q2.real))
    by0, by1 = sorted((q1.imag, q2.imag))
    return ax0 <= bx1 and bx0 <= ax1 and ay0 <= by1 and by0 <= ay1


@dataclass(frozen=True)
class StaircasePolygon:
    """A rectilinear Jordan polygon with positive orientation.

    Staircase truncations are produced by :func:`realize`; other rectilinear
    test domains (boxes) use the same type with ``stage_count = 0``.  The
    real axis must cross the polygon and leave it through a vertical edge on
    the right; that exit point plays the role of the point at infinity of the
    untruncated domain.
    """

    vertices: tuple[complex, ...]
    tail_length: float
    stage_count: int = 0
    _edges: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        verts = tuple(complex(z) for z in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 4:
            raise DegenerateGeometry("a rectilinear polygon needs at least 4 vertices")
        if len(set(verts)) != n:
            raise DegenerateGeometry("duplicate vertices")
        if not self.tail_length > 0:
            raise ValidationError("tail_length must be positive")
        for i in range(n):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
            if (a.real != b.real) == (a.imag != b.imag):
                raise GeometryNotJordan(f"edge {a} -> {b} is not axis-parallel")
            if (a.real == b.real == c.real) or (a.imag == b.imag == c.imag):
                raise GeometryNotJordan(f"collinear vertices around {b}")
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                if _segments_cross(verts[i], verts[(i + 1) % n], verts[j], verts[(j + 1) % n]):
                    raise GeometryNotJordan(f"edges {i} and {j} intersect")
        if self.signed_area <= 0:
            raise GeometryNotJordan("vertices must be positively oriented")
        edges = np.array([(verts[i], verts[(i + 1) % n]) for i in range(n)], dtype=complex)
        object.__setattr__(self, "_edges", edges)
        if not np.isfinite(self.exit_x):
            raise GeometryNotJordan("the real axis does not leave the polygon through a vertical edge")

    @property
    def vertex_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=complex)

    @property
    def signed_area(self) -> float:
        z = np.array(self.vertices)
        return 0.5 * float(np.sum(z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag))

    @property
    def exit_x(self) -> float:
        """Abscissa where the real axis leaves the polygon for good."""
        best = -np.inf
        for a, b in self._edges:
            if a.real == b.real and min(a.imag, b.imag) < 0 < max(a.imag, b.imag):
                best = max(best, a.real)
        return float(best)

    @property
    def exit_point(self) -> complex:
        return complex(self.exit_x, 0.0)

    @property
    def trusted_limit(self) -> float:
        """Largest abscissa where the truncation is trusted (half the tail from the exit)."""
        return self.exit_x - 0.5 * self.tail_length

    def edge_lengths(self) -> np.ndarray:
        return np.abs(self._edges[:, 1] - self._edges[:, 0])

    def boundary_distance(self, z) -> np.ndarray:
        """Euclidean distance from each point to the polygon boundary."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))[:, None]
        a = self._edges[None, :, 0]
        b = self._edges[None, :, 1]
        d = b - a
        s = np.clip(((z - a) * np.conj(d)).real / np.abs(d) ** 2, 0.0, 1.0)
        return np.min(np.abs(z - (a + s * d)), axis=1)

    def to_dict(self) -> dict:
        flat = []
        for z in self.vertices:
            flat.extend([z.real, z.imag])
        return {"vertices": flat, "tail_length": self.tail_length, "stage_count": self.stage_count}

    @classmethod
    def from_dict(cls, data: dict) -> "StaircasePolygon":
        flat = data["vertices"]
        if len(flat) % 2:
            raise ValidationError("vertex array must hold (re, im) pairs")
        verts = [complex(flat[i], flat[i + 1]) for i in range(0, len(flat), 2)]
        return cls(tuple(verts), float(data["tail_length"]), int(data.get("stage_count", 0)))


def realize(
    params: StaircaseParams,
    tail_length: float,
    tail_v: float | None = None,
    tail_w: float | None = None,
) -> StaircasePolygon:
    """Truncate the staircase to a Jordan polygon.

    The closing rectangle is ``R(u_last, u_last + tail_length, tail_v,
    tail_w)``; heights default to the last stage's.  Raised tail heights let
    an extension rectangle act as the truncation tail.  Vertices start at
    ``(-1, -1)`` and run counterclockwise with collinear points removed.
    """
    if not tail_length > 0:
        raise ValidationError("tail_length must be positive")
    v_last, w_last = params.last_heights
    tail_v = v_last if tail_v is None else float(tail_v)
    tail_w = w_last if tail_w is None else float(tail_w)
    if tail_v < v_last or tail_w < w_last:
        raise NonMonotoneHeights("tail heights must not be below the last stage heights")
    pieces = [(-1.0, params.u[0], 1.0, 1.0)]
    for j in range(params.stage_count):
        pieces.append((params.u[j], params.u[j + 1], params.v[j], params.w[j]))
    x_end = params.u[-1] + tail_length
    pieces.append((params.u[-1], x_end, tail_v, tail_w))

    loop = []
    for x0, x1, _, w in pieces:
        loop += [complex(x0, -w), complex(x1, -w)]
    for x0, x1, v, _ in reversed(pieces):
        loop += [complex(x1, v), complex(x0, v)]
    verts = _canonical_loop(loop)
    if len(verts) < 4:
        raise DegenerateGeometry("staircase collapsed to fewer than 4 corners")
    return StaircasePolygon(tuple(verts), float(tail_length), params.stage_count)


def box(x0: float, x1: float, y0: float, y1: float, tail_length: float | None = None) -> StaircasePolygon:
    """Rectangle ``[x0, x1] x [y0, y1]`` as a polygon; the real axis must cross it."""
    if not (x0 < x1 and y0 < 0 < y1):
        raise DegenerateGeometry("box must straddle the real axis")
    tail = (x1 - x0) if tail_length is None else tail_length
    verts = (complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1))
    return StaircasePolygon(verts, float(tail), 0)


def contains(poly: StaircasePolygon, z):
    """Strict interior test (even-odd rule); boundary points are outside.

    Accepts a scalar or an array and returns a bool or a boolean array.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    x, y = z.real[:, None], z.imag[:, None]
    a = poly._edges[None, :, 0]
    b = poly._edges[None, :, 1]
    xa, ya, xb, yb = a.real, a.imag, b.real, b.imag
    on_edge = (
        (np.minimum(xa, xb) <= x) & (x <= np.maximum(xa, xb))
        & (np.minimum(ya, yb) <= y) & (y <= np.maximum(ya, yb))
    ).any(axis=1)
    vertical = xa == xb
    lo, hi = np.minimum(ya, yb), np.maximum(ya, yb)
    crossings = (vertical & (xa > x) & (lo <= y) & (y < hi)).sum(axis=1)
    inside = (crossings % 2 == 1) & ~on_edge
    return bool(inside[0]) if scalar else inside


class DynamicsType(enum.Enum):
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


def classify(params: StaircaseParams, v_unbounded: bool, w_unbounded: bool) -> DynamicsType:
    """Classify the semigroup of the (infinite) staircase.

    A finite prefix cannot tell whether heights diverge, so the caller
    declares it.  Unbounded heights on either side give a parabolic
    semigroup; bounded ones keep the domain in a horizontal strip, which
    makes it hyperbolic.
    """
    if v_unbounded or w_unbounded:
        return DynamicsType.PARABOLIC
    return DynamicsType.HYPERBOLIC

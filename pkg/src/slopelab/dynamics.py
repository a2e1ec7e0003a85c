"""Semigroup orbits, slope curves and the Denjoy-Wolff check.

The semigroup generated by a normalized Koenigs map ``g`` is

    phi_t(z) = g^{-1}(g(z) + t),

its Denjoy-Wolff point is 1, and the slope of an orbit is
``theta(t) = Arg(1 - phi_t(z))``.  Orbit points approach 1 exponentially
fast in comb domains, so trajectories carry ``1 - phi_t(z)`` alongside the
points and every slope is computed from that gap.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import TimeGridConfig
from .conformal import ConformalMap, derivative, derivative_at, forward
from .errors import LeavesTrustedRegion, OutsideDisk, TooFewSamples, ValidationError

CSV_HEADER = "t, re_w, im_w, theta"
MIN_WINDOW_SAMPLES = 10


@dataclass(frozen=True)
class Trajectory:
    """Sampled orbit ``t -> phi_t(z0)``; ``gaps[k] = 1 - points[k]``."""

    z0: complex
    t_grid: np.ndarray
    points: np.ndarray
    gaps: np.ndarray
    start: complex  # g(z0)

    def __len__(self) -> int:
        return len(self.t_grid)


@dataclass(frozen=True)
class SlopeCurve:
    t_grid: np.ndarray
    theta: np.ndarray
    tau: complex = 1.0


@dataclass(frozen=True)
class SlopeInterval:
    lo: float
    hi: float
    tail_start: float

    def contains(self, lo: float, hi: float) -> bool:
        return self.lo <= lo and hi <= self.hi

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "tail_start": self.tail_start}


def time_grid(cfg: TimeGridConfig, t_max: float) -> np.ndarray:
    """``0`` followed by a geometric grid from ``cfg.t0`` to ``t_max``, or a linear grid."""
    if not t_max > 0:
        raise ValidationError("t_max must be positive")
    if cfg.points < 2:
        raise ValidationError("a time grid needs at least 2 points")
    if cfg.kind == "linear":
        return np.linspace(0.0, t_max, cfg.points)
    if not 0 < cfg.t0 < t_max:
        raise ValidationError("geometric grid needs 0 < t0 < t_max")
    return np.concatenate([[0.0], np.geomspace(cfg.t0, t_max, cfg.points - 1)])


def max_time(cmap: ConformalMap, z0: complex = 0j) -> float:
    """Largest ``t`` keeping ``g(z0) + t`` inside the trusted region."""
    start = cmap.center if z0 == 0 else complex(forward(cmap, z0))
    return cmap.domain_polygon.trusted_limit - start.real


def trajectory(cmap: ConformalMap, z0: complex, t_grid) -> Trajectory:
    """Orbit of ``z0`` sampled on ``t_grid``.

    Raises
    ------
    LeavesTrustedRegion
        If ``g(z0) + t`` passes the trusted limit of the truncated domain.
    NoConvergence
        If an orbit point is closer to the boundary than the map resolves.
    """
    z0 = complex(z0)
    if abs(z0) >= 1:
        raise OutsideDisk("trajectory needs |z0| < 1")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) == 0 or np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise ValidationError("t_grid must be a nonempty increasing list of times >= 0")
    start = cmap.center if z0 == 0 else complex(forward(cmap, z0))
    limit = cmap.domain_polygon.trusted_limit
    if start.real + t[-1] > limit:
        raise LeavesTrustedRegion(
            f"g(z0) + t reaches Re = {start.real + t[-1]:.6g} beyond the trusted limit {limit:.6g}; "
            "enlarge tail_length"
        )
    gaps = cmap.gap(start + t)
    if z0 == 0:
        gaps[t == 0] = 1.0
    return Trajectory(z0, t, 1.0 - gaps, gaps, start)


def slope_curve(traj: Trajectory) -> SlopeCurve:
    """``theta(t) = Arg(1 - phi_t(z0))``, principal branch."""
    return SlopeCurve(traj.t_grid, np.angle(traj.gaps))


def slope_interval(
    curve: SlopeCurve, tail_fraction: float = 0.5, t_start: float | None = None
) -> SlopeInterval:
    """Extremes of ``theta`` over the tail window.

    The window is ``t >= (1 - tail_fraction) * t_max`` unless ``t_start`` is
    given explicitly.

    Raises
    ------
    TooFewSamples
        Fewer than 10 samples fall in the window.
    """
    if not 0 < tail_fraction < 1:
        raise ValidationError("tail_fraction must lie in (0, 1)")
    t = curve.t_grid
    start = (1 - tail_fraction) * t[-1] if t_start is None else float(t_start)
    sel = t >= start
    if sel.sum() < MIN_WINDOW_SAMPLES:
        raise TooFewSamples(f"{int(sel.sum())} samples in the tail window, need {MIN_WINDOW_SAMPLES}")
    th = curve.theta[sel]
    return SlopeInterval(float(th.min()), float(th.max()), start)


def generator(cmap: ConformalMap, z):
    """Infinitesimal generator ``G = 1 / g'``."""
    return 1.0 / derivative(cmap, z)


def generator_deviation(cmap: ConformalMap, traj: Trajectory) -> float:
    """``max |g'(phi) * dphi/dt - 1|`` over interior grid points.

    ``dphi/dt`` is the central difference on the (possibly nonuniform) grid,
    taken from the gaps so that points near 1 keep their precision.
    """
    t, gaps = traj.t_grid, traj.gaps
    if len(t) < 3:
        raise TooFewSamples("need at least 3 grid points")
    dphi = -(gaps[2:] - gaps[:-2]) / (t[2:] - t[:-2])
    dg = derivative_at(cmap, traj.start + t[1:-1])
    return float(np.max(np.abs(dg * dphi - 1)))


def dw_check(traj: Trajectory, tol: float) -> bool:
    """Orbit ends within ``tol`` of 1 and is eventually decreasing in ``|1 - phi_t|``.

    "Eventually decreasing" means that over the last quarter of the grid the
    final distance is the smallest and below the one at the start of the
    quarter; single non-monotone steps are allowed.
    """
    dist = np.abs(traj.gaps)
    if len(dist) < 2 or not dist[-1] < tol:
        return False
    quarter = dist[-max(2, len(dist) // 4):]
    return bool(quarter[-1] <= quarter.min() and quarter[-1] < quarter[0])


def to_csv(traj: Trajectory, path: str | Path | None = None) -> str:
    """Delimited export ``t, re_w, im_w, theta``; returns the text and writes ``path`` if given."""
    theta = np.angle(traj.gaps)
    rows = np.column_stack([traj.t_grid, traj.points.real, traj.points.imag, theta])
    buf = io.StringIO()
    np.savetxt(buf, rows, fmt="%.17e", delimiter=", ", header=CSV_HEADER, comments="")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text

"""Static SVG figures: domain outline with an orbit, and slope versus log time.

Figures carry no timestamps and use a fixed hash salt, so identical inputs
produce identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .dynamics import SlopeCurve, Trajectory  # noqa: E402
from .staircase import StaircasePolygon  # noqa: E402

SVG_META = {"Date": None}
plt.rcParams["svg.hashsalt"] = "slopelab"


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=SVG_META)
    plt.close(fig)
    return path


def plot_domain(
    poly: StaircasePolygon,
    traj: Trajectory,
    path: str | Path,
    witnesses=(),
) -> Path:
    """Domain outline with the orbit ``g(z0) + t`` overlaid, and the orbit in the disk."""
    fig, (ax_dom, ax_disk) = plt.subplots(1, 2, figsize=(11, 5))
    v = np.array(poly.vertices + (poly.vertices[0],))
    ax_dom.plot(v.real, v.imag, color="black", lw=1.0, label="boundary")
    orbit = traj.start + traj.t_grid
    ax_dom.plot(orbit.real, orbit.imag, color="tab:blue", lw=1.5, label="orbit in the Koenigs domain")
    ax_dom.axvline(poly.trusted_limit, color="gray", ls=":", lw=0.8, label="trusted limit")
    if len(witnesses):
        xi = np.asarray(witnesses, dtype=float)
        ax_dom.plot(xi, np.zeros_like(xi), "o", color="tab:red", ms=4, label="witnesses")
    ax_dom.set_xlabel("Re")
    ax_dom.set_ylabel("Im")
    ax_dom.set_title("Domain")
    ax_dom.legend(loc="upper left", fontsize=8)

    circle = np.exp(2j * np.pi * np.linspace(0, 1, 361))
    ax_disk.plot(circle.real, circle.imag, color="black", lw=1.0)
    ax_disk.plot(traj.points.real, traj.points.imag, ".-", color="tab:blue", ms=2, lw=0.8)
    ax_disk.plot([1], [0], "*", color="tab:red", ms=9, label="Denjoy-Wolff point")
    ax_disk.set_aspect("equal")
    ax_disk.set_title("Orbit in the disk")
    ax_disk.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_slope(curve: SlopeCurve, path: str | Path, thresholds=()) -> Path:
    """``theta(t)`` against ``log t`` with optional threshold lines."""
    fig, ax = plt.subplots(figsize=(7, 4))
    sel = curve.t_grid > 0
    ax.semilogx(curve.t_grid[sel], curve.theta[sel], color="tab:blue", lw=1.2)
    for y in (-np.pi / 2, np.pi / 2):
        ax.axhline(y, color="black", lw=0.6)
    for y in thresholds:
        ax.axhline(y, color="tab:red", ls="--", lw=0.7)
    ax.set_ylim(-1.7, 1.7)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\theta(t) = \mathrm{Arg}(1 - \varphi_t(z_0))$")
    ax.set_title("Slope of the orbit")
    fig.tight_layout()
    return _save(fig, path)

"""Extension search and the recursive counterexample construction.

Stage ``n`` appends one room ``R(u_n, u_n + M, v, w)`` to the staircase.
An Up room raises the upper height by ``M`` and pushes the slope of the
orbit of 0 toward ``+pi/2``; a Down room deepens the lower side and pushes
it toward ``-pi/2``.  The search grows ``M`` geometrically until the room
contains a witness ``xi`` with ``|Arg(1 - g^{-1}(xi))| >= (pi/2)(1 - eps)``
on the correct side.  During the search the new room itself closes the
domain, so the searched domain is bounded on the right by ``u_n + M``.

Stages are numbered from 2: the fixed prefix ``u = (1, 2)`` already holds
the first room, and stage ``n`` realizes the slope condition on ``xi_n``
with the default ``eps_n = 1 / (2 floor(n / 2))``.  Even stages go Down,
odd stages go Up.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import SearchConfig
from .conformal import ConformalMap, build_map_pair
from .dynamics import SlopeInterval, slope_curve, slope_interval, trajectory
from .errors import CapExceeded, NumericalError, StageFailed, ValidationError
from .staircase import StaircaseParams, StaircasePolygon, build_params, realize

BASE_PREFIX = ((1.0, 2.0), (1.0,), (1.0,))
FIRST_STAGE = 2


class Direction(enum.Enum):
    UP = "Up"
    DOWN = "Down"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.UP else -1

    @property
    def opposite(self) -> "Direction":
        return Direction.DOWN if self is Direction.UP else Direction.UP

    @classmethod
    def for_stage(cls, n: int) -> "Direction":
        return cls.DOWN if n % 2 == 0 else cls.UP


def default_epsilon(n: int) -> float:
    return 1.0 / (2 * (n // 2))


def threshold(epsilon: float) -> float:
    return 0.5 * math.pi * (1 - epsilon)


def base_prefix() -> StaircaseParams:
    return build_params(*BASE_PREFIX)


@dataclass(frozen=True)
class ExtensionQuery:
    prefix: StaircaseParams
    direction: Direction
    epsilon: float
    search: SearchConfig = field(default_factory=SearchConfig)
    max_iterations: int = 100

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValidationError("epsilon must lie in (0, 1)")
        if self.search.m0 is not None and not self.search.m0 > 0:
            raise ValidationError("m0 must be positive")
        if not self.search.growth > 1:
            raise ValidationError("growth factor must exceed 1")

    def room_heights(self, length: float) -> tuple[float, float]:
        v, w = self.prefix.last_heights
        return (v + length, w) if self.direction is Direction.UP else (v, w + length)


@dataclass(frozen=True)
class ExtensionResult:
    M: float
    xi: float
    theta: float  # recomputed at doubled resolution
    map_accuracy: float


def search_polygon(q: ExtensionQuery, length: float) -> StaircasePolygon:
    """Prefix plus the candidate room, which also closes the domain."""
    tv, tw = q.room_heights(length)
    tail = length if q.search.tail_policy == "extension" else 2 * length
    return realize(q.prefix, tail, tv, tw)


def xi_grid(u: float, length: float, points: int) -> np.ndarray:
    """Log-spaced abscissas strictly inside ``(u, u + length)``, increasing."""
    offsets = np.geomspace(1e-3 * length, (1 - 1e-3) * length, points)
    return u + offsets


def slope_on_axis(cmap: ConformalMap, x) -> np.ndarray:
    """``theta(x) = Arg(1 - g^{-1}(x))`` for real ``x`` (the orbit of 0 at time ``x``)."""
    return np.angle(cmap.gap(np.atleast_1d(np.asarray(x, dtype=float)).astype(complex)))


def find_extension(q: ExtensionQuery) -> ExtensionResult:
    """Smallest room length (on the geometric ladder) with a slope witness.

    A grid point is a candidate when its slope clears the threshold by
    ``search.witness_margin``; the smallest candidate whose slope, recomputed
    at doubled resolution, still clears the threshold by at least twice the
    map accuracy is returned.

    Raises
    ------
    CapExceeded
        No witness up to ``cap_factor * m0``.  This says the search was too
        short or under-resolved, never that no extension exists.
    """
    s = q.search
    m0 = max(q.prefix.last_heights) if s.m0 is None else float(s.m0)
    cap = s.cap_factor * m0
    thr = threshold(q.epsilon)
    sign = q.direction.sign
    u = q.prefix.u[-1]
    length = m0
    best = -np.inf
    while length <= cap * (1 + 1e-12):
        poly = search_polygon(q, length)
        coarse, fine = build_map_pair(poly, s.resolution, 0j, q.max_iterations)
        xi = xi_grid(u, length, s.xi_points)
        theta = sign * slope_on_axis(coarse, xi)
        best = max(best, float(theta.max()))
        for k in np.flatnonzero(theta >= thr + s.witness_margin):
            recheck = float(slope_on_axis(fine, xi[k])[0])
            if sign * recheck - thr >= 2 * coarse.accuracy:
                return ExtensionResult(float(length), float(xi[k]), recheck, float(coarse.accuracy))
        length *= s.growth
    raise CapExceeded(
        f"no {q.direction.value} witness for eps={q.epsilon:g} up to M={cap:g} "
        f"(best signed slope {best:.4f}, threshold {thr:.4f})"
    )


@dataclass(frozen=True)
class StageRecord:
    n: int
    direction: Direction
    epsilon_n: float
    u_n: float
    v_n: float
    w_n: float
    M_n: float
    xi_n: float
    theta_n: float
    map_accuracy: float

    @property
    def threshold(self) -> float:
        return threshold(self.epsilon_n)

    @property
    def margin(self) -> float:
        """How far the certified slope lies beyond the threshold."""
        return self.direction.sign * self.theta_n - self.threshold

    def clears(self, theta: float) -> bool:
        return bool(self.direction.sign * theta >= self.threshold)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "direction": self.direction.value,
            "epsilon_n": self.epsilon_n,
            "u_n": self.u_n,
            "v_n": self.v_n,
            "w_n": self.w_n,
            "M_n": self.M_n,
            "xi_n": self.xi_n,
            "theta_n": self.theta_n,
            "map_accuracy": self.map_accuracy,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StageRecord":
        try:
            return cls(
                int(d["n"]), Direction(d["direction"]), float(d["epsilon_n"]), float(d["u_n"]),
                float(d["v_n"]), float(d["w_n"]), float(d["M_n"]), float(d["xi_n"]),
                float(d["theta_n"]), float(d["map_accuracy"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"malformed stage record: {exc}") from exc


@dataclass(frozen=True)
class ConstructionCertificate:
    stages: tuple[StageRecord, ...]
    final_params: StaircaseParams

    def to_dict(self) -> dict:
        return {
            "stages": [s.to_dict() for s in self.stages],
            "final_params": self.final_params.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConstructionCertificate":
        if not isinstance(data, dict) or "stages" not in data or "final_params" not in data:
            raise ValidationError("certificate needs 'stages' and 'final_params'")
        stages = tuple(StageRecord.from_dict(s) for s in data["stages"])
        return cls(stages, StaircaseParams.from_dict(data["final_params"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ConstructionCertificate":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read certificate {path}: {exc}") from exc
        return cls.from_dict(data)

    def conjugate(self) -> "ConstructionCertificate":
        """Mirror image: heights and depths swapped, directions and slopes negated."""
        stages = tuple(
            StageRecord(s.n, s.direction.opposite, s.epsilon_n, s.u_n, s.w_n, s.v_n, s.M_n,
                        s.xi_n, -s.theta_n, s.map_accuracy)
            for s in self.stages
        )
        return ConstructionCertificate(stages, self.final_params.conjugate())


def build_counterexample(
    stage_count: int,
    eps_schedule: list[float] | None = None,
    search: SearchConfig | None = None,
    max_iterations: int = 100,
    prefix: StaircaseParams | None = None,
    progress=None,
) -> ConstructionCertificate:
    """Run ``stage_count`` extension searches with alternating directions.

    ``eps_schedule[k]`` is the epsilon of the ``k``-th stage (stage number
    ``k + 2``); it defaults to ``1 / (2 floor(n / 2))``.  ``progress``, if
    given, is called with each finished :class:`StageRecord`.

    Raises
    ------
    StageFailed
        Wrapping the numerical error of the stage that could not be completed.
    """
    if stage_count < 2:
        raise ValidationError("stage_count must be at least 2")
    if eps_schedule is not None and len(eps_schedule) < stage_count:
        raise ValidationError("eps_schedule needs one value per stage")
    search = SearchConfig() if search is None else search
    params = base_prefix() if prefix is None else prefix
    records = []
    for k in range(stage_count):
        n = FIRST_STAGE + k
        eps = default_epsilon(n) if eps_schedule is None else float(eps_schedule[k])
        query = ExtensionQuery(params, Direction.for_stage(n), eps, search, max_iterations)
        try:
            res = find_extension(query)
        except NumericalError as exc:
            raise StageFailed(n, exc) from exc
        v_n, w_n = query.room_heights(res.M)
        rec = StageRecord(n, query.direction, eps, params.u[-1], v_n, w_n, res.M, res.xi,
                          res.theta, res.map_accuracy)
        records.append(rec)
        params = params.extended(res.M, v_n, w_n)
        if progress is not None:
            progress(rec)
    return ConstructionCertificate(tuple(records), params)


def certificate_domain(cert: ConstructionCertificate, strictness: float = 2.0) -> StaircasePolygon:
    """Final domain with the last room stretched to ``strictness * M_last``.

    The searched domains end with the room that was just found; lengthening
    that room is the tail-doubling check, and every earlier witness now sees
    all later rooms attached.
    """
    if not strictness > 1:
        raise ValidationError("strictness must exceed 1")
    m_last = cert.stages[-1].M_n if cert.stages else 1.0
    return realize(cert.final_params, (strictness - 1) * m_last)


@dataclass(frozen=True)
class StageCheck:
    n: int
    threshold: float
    theta_certified: float
    theta_verified: float
    delta: float
    margin: float
    interlaced: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n, "threshold": self.threshold, "theta_certified": self.theta_certified,
            "theta_verified": self.theta_verified, "delta": self.delta, "margin": self.margin,
            "interlaced": self.interlaced, "passed": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    strictness: float
    resolution: int
    map_accuracy: float
    checks: tuple[StageCheck, ...]
    problems: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.problems and all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed, "strictness": self.strictness, "resolution": self.resolution,
            "map_accuracy": self.map_accuracy, "stages": [c.to_dict() for c in self.checks],
            "problems": list(self.problems),
        }


def _structural_problems(cert: ConstructionCertificate) -> list[str]:
    problems = []
    p = cert.final_params
    if len(cert.stages) == 0:
        problems.append("certificate has no stages")
    if p.stage_count < len(cert.stages):
        problems.append("final_params has fewer rooms than the certificate has stages")
        return problems
    offset = p.stage_count - len(cert.stages)
    for k, s in enumerate(cert.stages):
        j = offset + k
        if (s.u_n, s.u_n + s.M_n, s.v_n, s.w_n) != (p.u[j], p.u[j + 1], p.v[j], p.w[j]):
            problems.append(f"stage {s.n} does not match room {j} of final_params")
        if k and s.n != cert.stages[k - 1].n + 1:
            problems.append(f"stage numbers are not consecutive at {s.n}")
        if s.direction is not Direction.for_stage(s.n):
            problems.append(f"stage {s.n} has direction {s.direction.value}")
    return problems


def verify_certificate(
    cert: ConstructionCertificate,
    strictness: float = 2.0,
    resolution: int = 1200,
    max_iterations: int = 100,
) -> VerificationReport:
    """Recompute every witness slope on the final domain at higher fidelity.

    The domain is :func:`certificate_domain` and the map resolution is
    ``strictness * resolution``.  A stage passes when its witness lies
    strictly inside its room, the recomputed slope clears the threshold, and
    the recomputation moved the slope by no more than its certified margin
    (a larger move means the certified numbers are not reproducible, even
    when the move happens to be favourable).
    """
    problems = _structural_problems(cert)
    res = int(round(strictness * resolution))
    poly = certificate_domain(cert, strictness)
    cmap, _ = build_map_pair(poly, res, 0j, max_iterations)
    xi = np.array([s.xi_n for s in cert.stages])
    limit = poly.exit_x
    inside = (xi > 0) & (xi < limit)
    theta = np.full(len(xi), np.nan)
    if inside.any():
        theta[inside] = slope_on_axis(cmap, xi[inside])
    checks = []
    for s, th in zip(cert.stages, theta):
        interlaced = bool(s.u_n < s.xi_n < s.u_n + s.M_n)
        delta = float(abs(th - s.theta_n))
        passed = interlaced and bool(np.isfinite(th)) and s.clears(th) and delta <= s.margin
        checks.append(StageCheck(s.n, s.direction.sign * s.threshold, s.theta_n, float(th),
                                 delta, float(s.margin), interlaced, passed))
    return VerificationReport(float(strictness), res, float(cmap.accuracy), tuple(checks), tuple(problems))


def orbit_slope_interval(
    cert: ConstructionCertificate,
    strictness: float = 2.0,
    resolution: int = 1200,
    points: int = 400,
    max_iterations: int = 100,
) -> tuple[SlopeInterval, float]:
    """Slope interval of the orbit of 0 over the window ``[xi_first, xi_last]``.

    The time grid is log-spaced over the window and contains every witness.
    Returns the interval and the accuracy of the map used.
    """
    poly = certificate_domain(cert, strictness)
    cmap, _ = build_map_pair(poly, int(round(strictness * resolution)), 0j, max_iterations)
    xi = np.array([s.xi_n for s in cert.stages])
    t = np.union1d(np.geomspace(xi.min(), xi.max(), points), xi)
    curve = slope_curve(trajectory(cmap, 0j, t))
    return slope_interval(curve, t_start=float(xi.min())), float(cmap.accuracy)

"""Run configuration: every tolerance and numerical knob in one record.

The configuration is stored as JSON.  Missing keys take the defaults below,
unknown keys are rejected so that typos do not silently fall back.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace
from pathlib import Path
from typing import Any

from .errors import ValidationError

OUTPUT_FORMATS = ("table-text", "structured-text", "vector-plot")


@dataclass(frozen=True)
class Tolerances:
    tau1: float = 1e-3  # half-plane oracle agreement
    tau2: float = 1e-3  # quadrant oracle agreement
    max_iterations: int = 100  # bisection budget of the sampler


@dataclass(frozen=True)
class SearchConfig:
    """Extension search settings (one stage of the construction)."""

    m0: float | None = None  # None: max of the last heights
    growth: float = 2.0
    cap_factor: float = 2.0**16
    xi_points: int = 96
    resolution: int = 1200
    tail_policy: str = "extension"
    witness_margin: float = 0.1  # radians beyond the threshold required during the scan


@dataclass(frozen=True)
class TimeGridConfig:
    kind: str = "geometric"
    t0: float = 1e-2
    points: int = 400


@dataclass(frozen=True)
class RunConfig:
    tolerances: Tolerances = field(default_factory=Tolerances)
    resolution: int = 2000
    search: SearchConfig = field(default_factory=SearchConfig)
    time_grid: TimeGridConfig = field(default_factory=TimeGridConfig)
    tail_length: float = 256.0
    strictness: float = 2.0
    output_dir: str = "out"
    output_formats: tuple[str, ...] = OUTPUT_FORMATS

    def __post_init__(self):
        tol = self.tolerances
        if not (tol.tau1 > 0 and tol.tau2 > 0 and tol.max_iterations > 0):
            raise ValidationError("tolerances must be positive")
        if self.resolution < 16 or self.search.resolution < 16:
            raise ValidationError("resolution below the minimum of 16 samples")
        if not self.search.growth > 1 or not (self.search.m0 is None or self.search.m0 > 0):
            raise ValidationError("search needs m0 > 0 and growth > 1")
        if self.search.tail_policy not in ("extension", "doubled"):
            raise ValidationError(f"unknown tail policy {self.search.tail_policy!r}")
        if self.time_grid.kind not in ("geometric", "linear"):
            raise ValidationError(f"unknown time grid {self.time_grid.kind!r}")
        bad = set(self.output_formats) - set(OUTPUT_FORMATS)
        if bad:
            raise ValidationError(f"unknown output formats {sorted(bad)}")
        if not self.tail_length > 0 or not self.strictness >= 1:
            raise ValidationError("tail_length must be positive and strictness >= 1")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["output_formats"] = list(self.output_formats)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return _build(cls, data)

    def with_overrides(self, overrides: dict[str, Any]) -> "RunConfig":
        """Override dotted keys, e.g. ``{"search.resolution": 800}``."""
        data = self.to_dict()
        for key, value in overrides.items():
            node = data
            *path, last = key.split(".")
            for part in path:
                if part not in node or not isinstance(node[part], dict):
                    raise ValidationError(f"unknown config key {key!r}")
                node = node[part]
            if last not in node:
                raise ValidationError(f"unknown config key {key!r}")
            node[last] = value
        return RunConfig.from_dict(data)


def _build(cls, data: dict):
    if not isinstance(data, dict):
        raise ValidationError(f"expected an object for {cls.__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ValidationError(f"unknown keys for {cls.__name__}: {sorted(unknown)}")
    kwargs = {}
    defaults = cls()
    for name, value in data.items():
        current = getattr(defaults, name)
        if is_dataclass(current):
            kwargs[name] = _build(type(current), value)
        elif isinstance(current, tuple):
            kwargs[name] = tuple(value)
        else:
            kwargs[name] = value
    return replace(defaults, **kwargs) if kwargs else defaults


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    return RunConfig.from_dict(data)

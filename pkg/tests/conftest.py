"""Shared maps and domains, built once per session."""

from __future__ import annotations

import numpy as np
import pytest

from slopelab.conformal import (
    QuadrantMapParams,
    build_map,
    halfplane_polygon,
    quadrant_center,
    quadrant_polygon,
)
from slopelab.construct import build_counterexample
from slopelab.staircase import box, build_params, realize

QUADRANT = QuadrantMapParams(2.0, 1.0)
QUADRANT_TAIL = 256.0
HALFPLANE_SIZE = 4096.0
RESOLUTION = 2000

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def quadrant_poly():
    return quadrant_polygon(QUADRANT, QUADRANT_TAIL)


@pytest.fixture(scope="session")
def quadrant_map(quadrant_poly):
    return build_map(quadrant_poly, RESOLUTION, quadrant_center(QUADRANT))


@pytest.fixture(scope="session")
def halfplane_map():
    return build_map(halfplane_polygon(HALFPLANE_SIZE), RESOLUTION)


@pytest.fixture(scope="session")
def square_poly():
    return box(-0.5, 0.5, -0.5, 0.5)


@pytest.fixture(scope="session")
def square_map(square_poly):
    return build_map(square_poly, 400)


@pytest.fixture(scope="session")
def symmetric_params():
    return build_params([1, 2, 3, 5], [1, 3, 3], [1, 3, 3])


@pytest.fixture(scope="session")
def symmetric_map(symmetric_params):
    return build_map(realize(symmetric_params, 64.0), RESOLUTION)


@pytest.fixture(scope="session")
def comb_params():
    return build_params([1, 2, 4, 10], [1, 1, 6], [1, 4, 4])


@pytest.fixture(scope="session")
def comb_map(comb_params):
    return build_map(realize(comb_params, 64.0), RESOLUTION)


@pytest.fixture(scope="session")
def certificate2():
    return build_counterexample(2)


@pytest.fixture(scope="session")
def disk_grid():
    """The standard grid ``{0.1 k exp(i pi m / 8) : k <= 9, m < 16}``."""
    k = np.arange(10)[:, None]
    m = np.arange(16)[None, :]
    return np.unique((0.1 * k * np.exp(1j * np.pi * m / 8)).ravel())

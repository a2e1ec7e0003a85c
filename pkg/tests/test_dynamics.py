import numpy as np
import pytest

from slopelab.config import TimeGridConfig
from conftest import QUADRANT
from slopelab.conformal import build_map, forward, inverse, quadrant_center, quadrant_polygon
from slopelab.dynamics import (
    CSV_HEADER,
    SlopeCurve,
    dw_check,
    generator,
    generator_deviation,
    max_time,
    slope_curve,
    slope_interval,
    time_grid,
    to_csv,
    trajectory,
)
from slopelab.errors import LeavesTrustedRegion, OutsideDisk, TooFewSamples, ValidationError
from slopelab.staircase import realize

THETA4 = 0.54041950027058416  # atan(3/5), see test_conformal
DIST_100 = 0.019607843137254902  # 1 - 100/102


def test_time_zero_is_identity(comb_map):
    z0 = 0.2 - 0.1j
    traj = trajectory(comb_map, z0, [0.0])
    assert abs(traj.points[0] - z0) <= 10 * comb_map.accuracy


def test_halfplane_orbit(halfplane_map):
    t = np.linspace(0, 200, 201)
    traj = trajectory(halfplane_map, 0j, t)
    assert traj.points[2] == pytest.approx(0.5, abs=1e-3)
    assert np.max(np.abs(traj.points - t / (t + 2))) <= 1e-3
    assert np.max(np.abs(slope_curve(traj).theta)) <= 1e-3


def test_symmetric_orbit_is_real(symmetric_map):
    t = time_grid(TimeGridConfig(), max_time(symmetric_map))
    traj = trajectory(symmetric_map, 0j, t)
    assert np.max(np.abs(traj.points.imag)) <= 10 * symmetric_map.accuracy


def test_quadrant_slope_value(quadrant_map):
    # g(1/3) = 3 on the quadrant, so phi_1(1/3) = g^{-1}(4)
    traj = trajectory(quadrant_map, 1 / 3, [0.0, 1.0])
    assert slope_curve(traj).theta[1] == pytest.approx(THETA4, abs=1e-3)


def test_quadrant_slope_increases(quadrant_map):
    t = np.geomspace(1, max_time(quadrant_map), 60)
    theta = slope_curve(trajectory(quadrant_map, 0j, t)).theta
    assert np.all(np.diff(theta) > 0)
    assert theta[-1] > np.pi / 2 - 0.2
    assert np.all(np.abs(theta) < np.pi / 2)


def test_slope_interval_constant():
    curve = SlopeCurve(np.arange(20.0), np.zeros(20))
    iv = slope_interval(curve)
    assert (iv.lo, iv.hi, iv.tail_start) == (0.0, 0.0, 9.5)


def test_slope_interval_quadrant_tail(quadrant_map):
    t = time_grid(TimeGridConfig(), max_time(quadrant_map))
    iv = slope_interval(slope_curve(trajectory(quadrant_map, 0j, t)))
    assert iv.hi >= np.pi / 2 - 0.2
    assert -np.pi / 2 <= iv.lo <= iv.hi <= np.pi / 2


def test_slope_interval_errors():
    with pytest.raises(TooFewSamples):
        slope_interval(SlopeCurve(np.arange(12.0), np.zeros(12)))
    with pytest.raises(ValidationError):
        slope_interval(SlopeCurve(np.arange(40.0), np.zeros(40)), tail_fraction=1.0)


def test_generator_halfplane(halfplane_map):
    # g = 2z/(1-z) gives G = (1-z)^2 / 2
    assert generator(halfplane_map, 0) == pytest.approx(0.5, abs=1e-3)
    z = np.array([0.3, -0.2 + 0.4j])
    assert np.max(np.abs(generator(halfplane_map, z) - (1 - z) ** 2 / 2)) <= 1e-3


def test_generator_nonzero(comb_map):
    assert abs(generator(comb_map, 0)) > 0


def test_generator_finite_difference(comb_map):
    z0 = 0.1 + 0.2j
    h = 1e-4
    traj = trajectory(comb_map, z0, [0.0, 1.0, 1.0 + h])
    fd = (traj.points[2] - traj.points[1]) / h
    G = generator(comb_map, traj.points[1])
    assert abs(fd - G) <= 10 * h * abs(G) + 10 * comb_map.accuracy


def test_generator_deviation_small_step(comb_map):
    t = np.arange(0, 20, 1e-2)
    assert generator_deviation(comb_map, trajectory(comb_map, 0j, t)) <= 1e-2


def test_dw_check(halfplane_map, symmetric_map):
    long = trajectory(halfplane_map, 0j, np.linspace(0, 100, 101))
    assert abs(1 - long.points[-1]) == pytest.approx(DIST_100, abs=1e-3)
    assert dw_check(long, 0.05)
    short = trajectory(halfplane_map, 0j, np.linspace(0, 1, 11))
    assert not dw_check(short, 1e-6)
    comb = trajectory(symmetric_map, 0j, np.linspace(0, max_time(symmetric_map), 100))
    assert dw_check(comb, 0.1)


def test_dw_check_stable_under_tail_doubling(symmetric_params):
    t = np.linspace(0, 30, 60)
    ma = build_map(realize(symmetric_params, 64.0), 1000)
    mb = build_map(realize(symmetric_params, 128.0), 1000)
    a, b = trajectory(ma, 0j, t), trajectory(mb, 0j, t)
    assert dw_check(a, 0.1) and dw_check(b, 0.1)
    assert np.max(np.abs(a.points - b.points)) <= 10 * max(ma.accuracy, mb.accuracy)


def test_leaves_trusted_region(comb_map):
    t_max = max_time(comb_map)
    trajectory(comb_map, 0j, [0.0, t_max])
    with pytest.raises(LeavesTrustedRegion):
        trajectory(comb_map, 0j, [0.0, t_max + 1])


def test_trajectory_input_errors(comb_map):
    with pytest.raises(OutsideDisk):
        trajectory(comb_map, 1.0, [0.0])
    with pytest.raises(ValidationError):
        trajectory(comb_map, 0j, [1.0, 0.5])
    with pytest.raises(ValidationError):
        trajectory(comb_map, 0j, [-1.0, 0.5])


def test_semigroup_property(comb_map):
    t = np.linspace(0, 20, 9)
    traj = trajectory(comb_map, 0.1 - 0.2j, t)
    for j in range(0, len(t) - 1, 2):
        for k in range(j + 1, len(t)):
            again = inverse(comb_map, forward(comb_map, traj.points[j]) + (t[k] - t[j]))
            assert abs(again - traj.points[k]) <= 10 * comb_map.accuracy


def test_start_point_robustness():
    # the endpoints of the two intervals may differ by at most 2 / tail
    spread = []
    for tail in (64.0, 128.0):
        m = build_map(quadrant_polygon(QUADRANT, tail), 1000, quadrant_center(QUADRANT))
        t = np.linspace(0, min(max_time(m), max_time(m, 0.3j)), 400)
        a = slope_interval(slope_curve(trajectory(m, 0j, t)))
        b = slope_interval(slope_curve(trajectory(m, 0.3j, t)))
        assert a.lo <= b.hi and b.lo <= a.hi
        spread.append(max(abs(a.lo - b.lo), abs(a.hi - b.hi)))
        assert spread[-1] <= 2 / tail
    assert spread[1] < spread[0]


def test_same_orbit_same_tail(comb_map):
    # a later point of the same orbit sees the same tail
    t = np.linspace(0, max_time(comb_map) - 10, 300)
    a = slope_interval(slope_curve(trajectory(comb_map, 0j, t)), t_start=20.0)
    z1 = trajectory(comb_map, 0j, [0.0, 5.0]).points[1]
    b = slope_interval(slope_curve(trajectory(comb_map, z1, t)), t_start=15.0)
    tol = 10 * comb_map.accuracy
    assert a.lo <= b.hi + tol and b.lo <= a.hi + tol


def test_time_grid():
    g = time_grid(TimeGridConfig(), 100.0)
    assert g[0] == 0 and g[1] == pytest.approx(1e-2) and g[-1] == pytest.approx(100.0)
    assert len(g) == 400 and np.all(np.diff(g) > 0)
    lin = time_grid(TimeGridConfig(kind="linear", points=11), 10.0)
    assert np.allclose(lin, np.arange(11.0))
    with pytest.raises(ValidationError):
        time_grid(TimeGridConfig(t0=5.0), 1.0)


def test_csv_export(halfplane_map, tmp_path):
    traj = trajectory(halfplane_map, 0j, [0.0, 1.0, 2.0])
    path = tmp_path / "orbit.csv"
    text = to_csv(traj, path)
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER == "t, re_w, im_w, theta"
    assert len(lines) == 4
    row = [float(x) for x in lines[3].split(", ")]
    assert row[0] == 2.0 and row[1] == pytest.approx(0.5, abs=1e-3)
    assert "e+00" in lines[1] and text == path.read_text()

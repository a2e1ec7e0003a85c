"""Property-based checks of the invariants that do not need a conformal map."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from slopelab.config import RunConfig
from slopelab.construct import ConstructionCertificate, Direction, StageRecord
from slopelab.dynamics import SlopeCurve, slope_interval
from slopelab.errors import NonMonotoneHeights, NonMonotoneU
from slopelab.staircase import Rect, StaircaseParams, build_params, contains, realize

step = st.integers(1, 6).map(float)


@st.composite
def staircases(draw, max_stages=4):
    k = draw(st.integers(0, max_stages))
    u = np.cumsum([draw(step) for _ in range(k + 1)]).tolist()
    v = np.cumsum([1.0] + [draw(st.integers(0, 4)) for _ in range(k - 1)]).tolist()[:k]
    w = np.cumsum([1.0] + [draw(st.integers(0, 4)) for _ in range(k - 1)]).tolist()[:k]
    return build_params(u, v, w)


tails = st.sampled_from([0.5, 1.0, 3.0, 8.0])
points = st.lists(
    st.complex_numbers(min_magnitude=0, max_magnitude=30, allow_nan=False, allow_infinity=False),
    min_size=1, max_size=40,
)

# boundary lines sit on the half-integer lattice, these points never do
off_lattice = st.lists(
    st.tuples(st.integers(-12, 140), st.integers(-80, 80)).map(lambda p: complex(p[0] / 4 + 1 / 8, p[1] / 4 + 1 / 8)),
    min_size=1, max_size=40,
)


def _rect_union(params: StaircaseParams, tail: float, z):
    rects = params.rects()
    v, w = params.last_heights
    rects.append(Rect(params.u[-1], params.u[-1] + tail, v, w))
    out = np.zeros(len(z), dtype=bool)
    for r in rects:
        out |= r.contains(z)
    return out


@settings(max_examples=60, deadline=None)
@given(staircases(), tails, off_lattice)
def test_contains_is_rectangle_union(params, tail, zs):
    poly = realize(params, tail)
    z = np.array(zs, dtype=complex)
    assert np.array_equal(contains(poly, z), _rect_union(params, tail, z))


@settings(max_examples=60, deadline=None)
@given(staircases(), tails)
def test_realized_polygon_is_simple_and_positive(params, tail):
    poly = realize(params, tail)
    assert poly.signed_area > 0
    assert poly.vertices[0] == -1 - 1j
    e = np.diff(np.append(poly.vertex_array, poly.vertex_array[0]))
    assert np.all((e.real == 0) ^ (e.imag == 0))  # axis-parallel, no zero edges
    assert poly.exit_x == params.u[-1] + tail


@settings(max_examples=60, deadline=None)
@given(staircases(), tails, points, st.floats(0, 20))
def test_translation_stays_inside(params, tail, zs, t):
    poly = realize(params, tail)
    z = np.array(zs, dtype=complex)
    z = z[contains(poly, z) & (z.real + t < poly.exit_x)]
    assert np.all(contains(poly, z + t))


@settings(max_examples=40, deadline=None)
@given(staircases(), tails, points)
def test_conjugation_mirrors_membership(params, tail, zs):
    z = np.array(zs, dtype=complex)
    a = contains(realize(params, tail), z)
    b = contains(realize(params.conjugate(), tail), np.conj(z))
    assert np.array_equal(a, b)


@settings(max_examples=40, deadline=None)
@given(staircases(max_stages=3))
def test_params_round_trip(params):
    assert StaircaseParams.from_dict(params.to_dict()) == params


@settings(max_examples=40, deadline=None)
@given(staircases(max_stages=4).filter(lambda p: p.stage_count >= 1), st.data())
def test_shuffled_u_rejected(params, data):
    u = list(params.u)
    i = data.draw(st.integers(0, len(u) - 2))
    u[i], u[i + 1] = u[i + 1], u[i]
    with pytest.raises(NonMonotoneU):
        build_params(u, params.v, params.w)


@settings(max_examples=40, deadline=None)
@given(staircases(max_stages=4).filter(lambda p: p.stage_count >= 2 and p.v[-1] > p.v[0]))
def test_decreasing_heights_rejected(params):
    with pytest.raises(NonMonotoneHeights):
        build_params(params.u, params.v[::-1], params.w)


finite = st.floats(-1e6, 1e6, allow_nan=False)


@st.composite
def certificates(draw):
    params = draw(staircases(max_stages=4).filter(lambda p: p.stage_count >= 1))
    stages = []
    for j in range(params.stage_count):
        n = 2 + j
        stages.append(StageRecord(
            n, Direction.for_stage(n), draw(st.floats(0.01, 0.99)), params.u[j],
            params.v[j], params.w[j], params.u[j + 1] - params.u[j], draw(finite),
            draw(st.floats(-1.5, 1.5)), draw(st.floats(0, 1)),
        ))
    return ConstructionCertificate(tuple(stages), params)


@settings(max_examples=40, deadline=None)
@given(certificates())
def test_certificate_serialization_round_trip(cert):
    assert ConstructionCertificate.from_dict(cert.to_dict()) == cert
    assert cert.conjugate().conjugate() == cert


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1.5, 1.5), min_size=10, max_size=80), st.floats(0.05, 0.95))
def test_slope_interval_is_tail_range(theta, frac):
    t = np.arange(len(theta), dtype=float)
    curve = SlopeCurve(t, np.array(theta))
    start = (1 - frac) * t[-1]
    assume(np.count_nonzero(t >= start) >= 10)
    iv = slope_interval(curve, tail_fraction=frac)
    tail = np.array(theta)[t >= iv.tail_start]
    assert iv.lo == tail.min() and iv.hi == tail.max()
    assert iv.contains(iv.lo, iv.hi)
    assert not iv.contains(iv.lo - 0.1, iv.hi)


@settings(max_examples=40, deadline=None)
@given(st.integers(16, 5000), st.floats(1.01, 10), st.sampled_from(["extension", "doubled"]))
def test_config_overrides_round_trip(res, growth, policy):
    cfg = RunConfig().with_overrides({"resolution": res, "search.growth": growth, "search.tail_policy": policy})
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    assert (cfg.resolution, cfg.search.growth, cfg.search.tail_policy) == (res, growth, policy)

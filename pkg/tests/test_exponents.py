import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dmtlab.exponents import (
    ChannelProfile,
    ExponentPoint,
    GridSpec,
    ddf_in_outage,
    dqmf_parallel_in_outage,
    grid_axis,
    objective_parallel,
    objective_s,
    rate_fd,
    rate_hd,
    rate_hd_global,
    rate_parallel,
    rate_parallel_global,
)

unit = st.floats(0, 1, allow_nan=False)
expo = st.floats(0, 3, allow_nan=False)


def test_profile_validation():
    with pytest.raises(ValueError):
        ChannelProfile(-0.1, 1, 1)
    with pytest.raises(ValueError):
        ChannelProfile(1, math.inf, 1)
    assert ChannelProfile.symmetric(1, 0.2).as_tuple() == (1.0, 1.0, 0.2)


@pytest.mark.parametrize(
    "profile, pt, want",
    [
        ((1, 1, 0.2), (1, 1, 0.2), 0.0),
        ((1, 1, 0.2), (0, 0, 0), 2.2),
        ((1.5, 2, 0.5), (1.5, 0.5, 0.5), 1.5),
    ],
)
def test_objective_examples(profile, pt, want):
    assert objective_s(ChannelProfile(*profile), ExponentPoint(*pt)) == pytest.approx(want, abs=1e-15)


def test_objective_rejects_parallel_point():
    with pytest.raises(ValueError):
        objective_s(ChannelProfile(1, 1, 1), ExponentPoint(1, 1, 1, 1))
    with pytest.raises(ValueError):
        objective_parallel(ExponentPoint(1, 1, 1))


def test_rate_hd_examples():
    assert rate_hd(0.5, ExponentPoint(1, 1, 0.2)) == pytest.approx(0.6)
    assert rate_hd(0.5, ExponentPoint(0.3, 0.3, 0.3)) == pytest.approx(0.3)
    assert rate_hd(0.0, ExponentPoint(1, 0.6, 0)) == 0.0
    with pytest.raises(ValueError):
        rate_hd(1.5, ExponentPoint(1, 1, 1))


def test_rate_parallel_examples():
    assert rate_parallel(0.5, 0.5, ExponentPoint(1, 1, 1, 1)) == pytest.approx(1.0)
    assert rate_parallel(0.5, 0.5, ExponentPoint(1, 0.4, 1, 0.4)) == pytest.approx(0.4)
    # the critical point (1, r/(1-r), 1, 0) under t = 1 - x(1-r)
    r = 1 / 3
    t = 1 - 1 * (1 - r)
    assert rate_parallel(t, t, ExponentPoint(1, r / (1 - r), 1, 0)) == pytest.approx(r)
    with pytest.raises(ValueError):
        rate_parallel(0.5, 0.5, ExponentPoint(1, 1, 1))


@given(expo, expo, expo)
def test_objective_is_affine(a, b, c):
    p = ChannelProfile(a, b, c)
    pt = ExponentPoint(a / 2, b / 3, c)
    assert objective_s(p, pt) + pt.alpha + pt.beta + pt.gamma == pytest.approx(a + b + c, abs=1e-12)


@given(unit, expo, expo, expo, st.floats(0, 1))
def test_rate_hd_monotone_and_bounded(t, al, be, ga, bump):
    base = rate_hd(t, ExponentPoint(al, be, ga))
    assert base <= max(al, be, ga) + 1e-12
    for pt in (ExponentPoint(al + bump, be, ga), ExponentPoint(al, be + bump, ga), ExponentPoint(al, be, ga + bump)):
        assert rate_hd(t, pt) >= base - 1e-12


@given(unit, expo)
def test_rate_hd_equal_exponents(t, g):
    assert rate_hd(t, ExponentPoint(g, g, g)) == pytest.approx(g, abs=1e-12)


@given(unit, unit, unit, unit, unit, unit)
def test_rate_parallel_cut_bounds(t1, t2, al, be, ga, de):
    pt = ExponentPoint(al, be, ga, de)
    v = rate_parallel(t1, t2, pt)
    assert v <= t1 * al + t2 * ga + 1e-12
    assert v <= (1 - t1) * be + (1 - t2) * de + 1e-12


@given(expo, expo, expo)
def test_global_rate_is_max_over_schedules(al, be, ga):
    pt = ExponentPoint(al, be, ga)
    best = max(rate_hd(t, pt) for t in np.linspace(0, 1, 2001))
    got = rate_hd_global(pt)
    assert got >= best - 1e-12
    assert got <= best + 2e-3 * max(al, be, ga, 1)
    assert got <= rate_fd(pt) + 1e-12


@given(unit, unit, unit, unit)
def test_parallel_global_is_max_over_schedules(al, be, ga, de):
    pt = ExponentPoint(al, be, ga, de)
    ts = np.linspace(0, 1, 401)
    best = max(rate_parallel(t, 0.5, ExponentPoint(al, be, 0, 0)) for t in ts) + max(
        rate_parallel(0.5, t, ExponentPoint(0, 0, ga, de)) for t in ts
    )
    assert rate_parallel_global(pt) >= best - 1e-12
    assert rate_parallel_global(pt) <= best + 1e-2


def test_ddf_outage_events():
    r = 0.3
    # relay never decodes, weak direct link
    assert ddf_in_outage(r, ExponentPoint(0.0, 1, 0.1))
    assert ddf_in_outage(r, ExponentPoint(0.2, 1, 0.3))
    # never decodes but direct link carries the rate
    assert not ddf_in_outage(r, ExponentPoint(0.2, 1, 0.5))
    # decodes at t = 0.3; second hop 0.3*0 + 0.7*beta <= 0.3 iff beta <= 3/7
    assert ddf_in_outage(r, ExponentPoint(1, 0.4, 0))
    assert not ddf_in_outage(r, ExponentPoint(1, 0.45, 0))


def test_dqmf_isolated_corner_excluded():
    r = 0.25
    assert not dqmf_parallel_in_outage(r, ExponentPoint(1, 1, 1, 0))
    assert dqmf_parallel_in_outage(r, ExponentPoint(1, 0.33, 1, 0))
    assert dqmf_parallel_in_outage(0.0, ExponentPoint(0, 1, 1, 0))
    assert not dqmf_parallel_in_outage(0.0, ExponentPoint(1, 1, 1, 1))


def test_grid_axis_inclusive():
    ax = grid_axis(1.0, 0.3)
    assert ax[0] == 0 and ax[-1] == 1.0 and len(ax) == 5
    ax = grid_axis(1.0, 0.005)
    assert len(ax) == 201 and ax[-1] == 1.0
    assert list(grid_axis(0.0, 0.1)) == [0.0]
    with pytest.raises(ValueError):
        GridSpec(step=0.2)
    with pytest.raises(ValueError):
        GridSpec(step=0)

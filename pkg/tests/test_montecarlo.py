import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dmtlab import montecarlo as mc
from dmtlab.exponents import ChannelProfile as P
from dmtlab.montecarlo import FadingSample, McScheme, ParallelFadingSample, SnrPoint
from dmtlab.solvers import ScheduleRule

scipy_stats = pytest.importorskip("scipy.stats")


def unit(**kw):
    base = dict(g_sr=1.0, g_rd=1.0, g_sd=1.0)
    base.update(kw)
    return FadingSample(**base)


# --- sampler --------------------------------------------------------------------


def test_sample_mean_is_one():
    b = mc.sample_fading(10**6, seed=1)
    for name in mc.SINGLE_GAINS:
        assert 0.99 <= getattr(b, name).mean() <= 1.01
    assert np.all(b.g_sr >= 0)


def test_samples_are_deterministic_and_split_invariant():
    whole = mc.sample_fading(200_000, seed=3)
    again = mc.sample_fading(200_000, seed=3)
    assert np.array_equal(whole.g_sd, again.g_sd)
    # index 123456 read through an offset window crossing a block boundary
    part = mc.sample_fading(10, seed=3, start=123_450)
    assert np.array_equal(part.g_rd, whole.g_rd[123_450:123_460])
    assert part.sample(6) == whole.sample(123_456)


def test_seeds_give_same_law():
    a = mc.sample_fading(10**5, seed=1).g_sr
    b = mc.sample_fading(10**5, seed=2).g_sr
    assert not np.array_equal(a, b)
    stat = scipy_stats.ks_2samp(a, b).statistic
    # two-sample 1% critical value
    crit = 1.628 * math.sqrt(2 / len(a))
    assert stat < crit


def test_gains_are_unit_exponential():
    g = mc.sample_fading(10**5, seed=5, parallel=True).g_r2d
    assert scipy_stats.kstest(g, "expon").pvalue > 0.001


def test_parallel_sample_records():
    b = mc.sample_fading(4, seed=1, parallel=True)
    assert isinstance(b.sample(0), ParallelFadingSample)
    assert len(b) == 4
    with pytest.raises(ValueError):
        mc.sample_fading(0, seed=1)
    with pytest.raises(ValueError):
        mc.sample_fading(5, seed=-1)


def test_snr_point():
    s = SnrPoint(30)
    assert s.rho == pytest.approx(1000)
    assert s.log2_rho == pytest.approx(math.log2(1000))
    with pytest.raises(ValueError):
        SnrPoint(float("nan"))


# --- rate expressions --------------------------------------------------------


def test_fd_rate_examples():
    assert mc.rate_fd_cutset(P(1, 1, 1), unit(), 100) == pytest.approx(math.log2(201))
    assert mc.rate_fd_cutset(P(1, 1, 1), unit(g_sr=0, g_rd=0, g_sd=0), 100) == 0
    lo = mc.rate_fd_cutset(P(1, 1, 1), unit(g_sd=1), 100)
    hi = mc.rate_fd_cutset(P(1, 1, 1), unit(g_sd=1e6), 100)
    assert hi > lo


def test_hd_rate_examples():
    # c=0: first cut is log2(102)/2 + 1/2, second is 1/2 + log2(1 + 11**2)/2
    got = mc.rate_hd_cutset(P(1, 1, 0), unit(), 100, 0.5)
    assert got == pytest.approx(min(0.5 * math.log2(102) + 0.5, 0.5 + 0.5 * math.log2(122)), abs=1e-12)
    assert got == pytest.approx(3.8362, abs=1e-4)
    assert 0.5 + 0.5 * math.log2(122) == pytest.approx(3.9657, abs=1e-3)
    s = unit(g_sr=5.0, g_rd=3.0, g_sd=0.7)
    assert mc.rate_hd_cutset(P(1, 1, 0.4), s, 1e3, 1.0) <= math.log2(1 + 0.7 * 1e3**0.4) + 1e-12
    with pytest.raises(ValueError):
        mc.rate_hd_cutset(P(1, 1, 0), unit(), 100, 1.5)


def test_parallel_rate_examples():
    u = ParallelFadingSample(1.0, 1.0, 1.0, 1.0)
    assert mc.rate_parallel_cutset(u, 100, 0.5, 0.5) == pytest.approx(math.log2(101))
    dead = ParallelFadingSample(0.0, 1.0, 1.0, 0.0)
    assert mc.rate_parallel_cutset(dead, 100, 0.5, 0.5) == 0
    assert mc.rate_parallel_cutset(u, 100, 0.0, 0.5) == pytest.approx(0.5 * math.log2(101))


@given(st.floats(0, 1))
def test_half_duplex_never_beats_full_duplex(t):
    b = mc.sample_fading(2000, seed=9)
    p = P(1.2, 0.7, 0.4)
    assert np.all(mc.rate_hd_cutset(p, b, 1e4, t) <= mc.rate_fd_cutset(p, b, 1e4) + 1e-9)


def test_empirical_exponent_clamps():
    x = mc.empirical_exponent(np.array([0.0, 1e-9, 1.0, 1e9]), 1e4)
    assert x[0] == 0 and x[1] == 0 and x[2] == pytest.approx(1.0) and x[3] == 1.0


# --- outage estimates -----------------------------------------------------------


def test_p2p_matches_exact_cdf():
    snr = SnrPoint(40)
    est = mc.estimate_outage(McScheme("p2p"), P(1, 0, 0), 0.5, snr, 10**6, seed=1)
    exact = mc.p2p_outage_exact(1, 0.5, snr.rho)
    assert abs(est.p_out - exact) <= 3 * est.ci95_halfwidth
    assert est.ci95_halfwidth == pytest.approx(1.96 * math.sqrt(est.p_out * (1 - est.p_out) / 10**6))
    assert est.rate_bits == pytest.approx(0.5 * snr.log2_rho)


@pytest.mark.parametrize("scheme", [McScheme("fd-cutset"), McScheme("hd-static"), McScheme("ddf"), McScheme("parallel-static")])
def test_zero_rate_rarely_in_outage(scheme):
    est = mc.estimate_outage(scheme, P(1, 1, 0.2), 0.0, SnrPoint(40), 10**6, seed=1)
    assert 0 <= est.p_out < 1e-2


def test_outage_falls_with_snr_and_ladder_matches_single_points():
    scheme = McScheme("hd-rule", rule=ScheduleRule.ddf())
    ladder = mc.estimate_ladder(scheme, P(1, 1, 0.2), 0.3, [10, 20, 30], 50_000, seed=4)
    p = [e.p_out for e in ladder]
    assert p[0] >= p[1] >= p[2]
    single = mc.estimate_outage(scheme, P(1, 1, 0.2), 0.3, SnrPoint(20), 50_000, seed=4)
    assert single == ladder[1]


def test_estimates_are_reproducible():
    args = (McScheme("dqmf-parallel"), None, 0.25, SnrPoint(20), 20_000)
    assert mc.estimate_outage(*args, seed=2) == mc.estimate_outage(*args, seed=2)


def test_estimate_argument_checks():
    with pytest.raises(ValueError):
        mc.estimate_outage(McScheme("p2p"), P(1, 0, 0), 0.5, SnrPoint(20), 100, seed=1)
    with pytest.raises(ValueError):
        mc.estimate_outage(McScheme("p2p"), P(1, 0, 0), -0.1, SnrPoint(20), 10**4, seed=1)
    with pytest.raises(ValueError):
        mc.estimate_outage(McScheme("dqmf-parallel"), None, 1.0, SnrPoint(20), 10**4, seed=1)
    with pytest.raises(ValueError):
        McScheme("hd-rule")
    with pytest.raises(ValueError):
        McScheme("hd-static", t=1.2)


# --- slope fits -------------------------------------------------------------------


def _synthetic(d, dbs, n=10**9):
    out = []
    for db in dbs:
        s = SnrPoint(db)
        p = s.rho**-d
        out.append(mc.OutageEstimate(s, 0.0, p, n, 0.0, round(p * n)))
    return out


def test_fit_recovers_exact_power_law():
    fit = mc.fit_diversity(_synthetic(1.2, [10, 20, 30, 40]))
    assert fit.diversity_estimate == pytest.approx(1.2, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.points_used == 4


def test_fit_drops_sparse_points():
    pts = _synthetic(1.0, [10, 20, 30, 40, 50], n=10**7)
    # 50 dB has n*p = 100 exactly and stays; 60 dB would fall below
    fit = mc.fit_diversity(pts + _synthetic(1.0, [60], n=10**7))
    assert fit.points_used == 5
    with pytest.raises(mc.FitError):
        mc.fit_diversity(_synthetic(1.0, [10, 20]))
    flat = _synthetic(1.0, [10, 10, 10])
    with pytest.raises(mc.FitError):
        mc.fit_diversity(flat)


@pytest.mark.slow
def test_p2p_slope():
    ladder = mc.estimate_ladder(McScheme("p2p"), P(1, 0, 0), 0.5, [20, 30, 40, 50], 10**7, seed=1)
    assert mc.fit_diversity(ladder).diversity_estimate == pytest.approx(0.5, abs=0.1)


@pytest.mark.slow
def test_static_qmf_slope_at_weak_direct_link():
    ladder = mc.estimate_ladder(McScheme("hd-static"), P(1, 1, 0.2), 0.4, [30, 40, 50, 60], 10**7, seed=1)
    assert mc.fit_diversity(ladder).diversity_estimate == pytest.approx(0.4, abs=0.15)

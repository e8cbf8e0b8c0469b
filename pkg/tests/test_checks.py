import numpy as np
import pytest

from dmtlab import checks
from dmtlab.exponents import GridSpec


def test_tables_suite():
    rep = checks.check_tables(n_draws=200, seed=3)
    assert rep.passed and rep.cases == 200
    assert rep.worst["table vs closed form"] <= 1e-9


def test_monotonicity_suite():
    rep = checks.check_monotonicity(n_profiles=5, seed=2, r_step=0.01)
    assert rep.passed, rep.failures[:3]


def test_ordering_suite_quick():
    rep = checks.check_ordering(n_profiles=3, seed=4, grid=GridSpec(0.02, 0.02), r_step=0.1)
    assert rep.passed, rep.failures[:3]
    assert set(rep.worst) >= {"fd>=global", "global>=local", "local>=max(static,ddf)"}


def test_oracle_suite_quick():
    rep = checks.check_oracle(n_cases=20, seed=5, grid=GridSpec(0.01))
    assert rep.passed, rep.failures[:3]


def test_report_records_failures():
    rep = checks.SuiteReport("x")
    rep.record(True)
    rep.record(False, why="demo")
    rep.track("gap", 0.2)
    rep.track("gap", 0.1)
    d = rep.as_dict()
    assert not d["passed"] and d["cases"] == 2 and d["failures"] == [{"why": "demo"}]
    assert d["worst"]["gap"] == 0.2


def test_profile_draws():
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = checks.ordered_ddf_profile(rng)
        assert p.c < p.a < p.b
    p = checks.random_profile(rng)
    assert all(0.1 <= x <= 1.5 for x in p.as_tuple())
    r = checks.r_grid_for(p, 0.05)
    assert r[0] == 0 and r[-1] > max(min(p.a, p.b), p.c)


def test_unknown_suite():
    with pytest.raises(KeyError):
        checks.run_suite("nope")

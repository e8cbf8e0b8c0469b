"""Invariant suites behind ``dmtlab check``.

Each suite returns a :class:`SuiteReport`; ``passed`` is false if any case
fails. Random draws come from ``numpy.random.default_rng(seed)`` so a report
is reproducible.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import closed_form as cf
from . import solvers as sv
from .exponents import ChannelProfile, GridSpec

SUITES = ("ordering", "oracle", "monotonicity", "tables")


@dataclass
class SuiteReport:
    suite: str
    passed: bool = True
    cases: int = 0
    failures: list = field(default_factory=list)
    worst: dict = field(default_factory=dict)
    seconds: float = 0.0

    def record(self, ok: bool, **info) -> None:
        self.cases += 1
        if not ok:
            self.passed = False
            if len(self.failures) < 50:
                self.failures.append(info)

    def track(self, name: str, gap: float) -> None:
        """Keep the largest observed deviation per named comparison."""
        self.worst[name] = max(self.worst.get(name, float("-inf")), float(gap))

    def as_dict(self) -> dict:
        return asdict(self)


def random_profile(rng: np.random.Generator, lo: float = 0.1, hi: float = 1.5) -> ChannelProfile:
    return ChannelProfile(*np.round(rng.uniform(lo, hi, 3), 3))


def ordered_ddf_profile(rng: np.random.Generator) -> ChannelProfile:
    """A draw with ``c < a < b``."""
    while True:
        a, b, c = np.sort(rng.uniform(0.05, 2.0, 3))[[1, 2, 0]]
        if c < a < b:
            return ChannelProfile(a, b, c)


def r_grid_for(profile: ChannelProfile, step: float = 0.05) -> np.ndarray:
    """Rates from 0 past the full-duplex maximum multiplexing gain."""
    top = max(min(profile.a, profile.b), profile.c) + step
    return np.round(np.arange(0.0, top + 1e-9, step), 10)


def check_ordering(
    n_profiles: int = 50, seed: int = 1, grid: GridSpec = GridSpec(), r_step: float = 0.05, slack: float = 0.06
) -> SuiteReport:
    """full duplex >= global CSI >= local CSI >= max(best static, DDF), pointwise up to ``slack``.

    Also compares the local-CSI solver at (1,1,0.2) with DDF's
    ``1 - 0.8r/(1-r)`` on r in {0.25..0.45} (within 0.03).
    """
    t0 = time.perf_counter()
    rep = SuiteReport("ordering")
    rng = np.random.default_rng(seed)
    for _ in range(n_profiles):
        p = random_profile(rng)
        for r in r_grid_for(p, r_step):
            fd = sv.solve_full_duplex(p, r, grid).value
            gl = sv.solve_global_csi(p, r, grid).value
            lo = sv.solve_local_csi(p, r, grid).value
            st = sv.best_static_qmf(p, r, grid).value
            dd = sv.solve_ddf(p, r, grid).value
            gaps = {"fd>=global": gl - fd, "global>=local": lo - gl, "local>=max(static,ddf)": max(st, dd) - lo}
            for name, g in gaps.items():
                rep.track(name, g)
            ok = all(g <= slack for g in gaps.values())
            rep.record(ok, profile=p.as_tuple(), r=float(r), fd=fd, global_csi=gl, local_csi=lo, best_static=st, ddf=dd)
    p = ChannelProfile(1, 1, 0.2)
    for r in (0.25, 0.3, 0.35, 0.4, 0.45):
        lo = sv.solve_local_csi(p, r, grid).value
        ref = 1 - 0.8 * r / (1 - r)
        rep.track("local-csi vs ddf at (1,1,0.2)", abs(lo - ref))
        rep.record(abs(lo - ref) <= 0.03, profile=p.as_tuple(), r=r, local_csi=lo, ddf=ref)
    rep.seconds = time.perf_counter() - t0
    return rep


def check_oracle(
    n_cases: int = 200, seed: int = 1, grid: GridSpec = GridSpec(), slack: float = 0.045
) -> SuiteReport:
    """Grid solvers against closed forms, on random single-relay draws and a fixed parallel grid."""
    t0 = time.perf_counter()
    rep = SuiteReport("oracle")
    rng = np.random.default_rng(seed)
    for _ in range(n_cases):
        p = random_profile(rng, 0.05, 2.0)
        r = float(np.round(rng.uniform(0, 1.1 * max(p.as_tuple())), 4))
        pairs = [
            ("fd", sv.solve_full_duplex(p, r, grid).value, cf.dmt_full_duplex(p, r)),
            ("static-qmf", sv.solve_static_qmf(p, r, 0.5, grid).value, cf.dmt_static_qmf(p, r)),
        ]
        if p.c < min(p.a, p.b):
            pairs.append(("ddf", sv.solve_ddf(p, r, grid).value, cf.dmt_ddf(p, r)))
        for name, got, want in pairs:
            rep.track(name, abs(got - want))
            rep.record(abs(got - want) <= slack, check=name, profile=p.as_tuple(), r=r, grid=got, closed=want)
    for r in np.round(np.arange(0.05, 0.451, 0.05), 10):
        got = sv.solve_parallel_dqmf(r, grid).value
        want = 2 - r / (1 - r)
        rep.track("parallel-dqmf", abs(got - want))
        rep.record(abs(got - want) <= slack, check="parallel-dqmf", r=float(r), grid=got, closed=want)
        got = sv.solve_parallel_static(r, 0.5, 0.5, grid).value
        want = cf.dmt_parallel_static_qmf(r)
        rep.track("parallel-static", abs(got - want))
        rep.record(abs(got - want) <= slack, check="parallel-static", r=float(r), grid=got, closed=want)
    rep.seconds = time.perf_counter() - t0
    return rep


def check_monotonicity(n_profiles: int = 50, seed: int = 1, r_step: float = 0.001) -> SuiteReport:
    """Closed-form curves are nonincreasing, and the optimum stitches and dominates as expected."""
    t0 = time.perf_counter()
    rep = SuiteReport("monotonicity")
    rng = np.random.default_rng(seed)
    fixed = [ChannelProfile(1, 1, 0.2), ChannelProfile(1, 1, 1), ChannelProfile(1, 1, 0), ChannelProfile(1.5, 2, 0.5)]
    profiles = fixed + [random_profile(rng, 0.0, 2.0) for _ in range(n_profiles)]
    for p in profiles:
        r = np.arange(0.0, max(p.as_tuple()) + 0.5, r_step)
        schemes = [cf.Scheme.FULL_DUPLEX, cf.Scheme.STATIC_QMF_HALF]
        if p.c < min(p.a, p.b):
            schemes.append(cf.Scheme.DDF)
        for s in schemes:
            curve = cf.closed_form_curve(s, r, p)
            worst = float(np.diff(curve.d).max()) if len(r) > 1 else 0.0
            rep.track(f"{s.value} increase", worst)
            rep.record(curve.is_nonincreasing(), scheme=s.value, profile=p.as_tuple(), worst_increase=worst)
        # four-regime optimum on (pp, pp, c)
        pp, c = p.a, p.c
        d = np.array([cf.dmt_theorem1(pp, c, x) for x in r])
        rep.record(bool(np.all(np.diff(d) <= 1e-12)), scheme="four-regime optimum", p=pp, c=c)
        fd = np.array([cf.dmt_full_duplex(ChannelProfile(pp, pp, c), x) for x in r])
        rep.record(bool(np.all(d <= fd + 1e-12)), check="optimum<=fd", p=pp, c=c)
        if c < pp:
            sym = ChannelProfile(pp, pp, c)
            for x in r:
                if x <= c or pp / 2 <= x <= (pp + c) / 2:
                    want = cf.dmt_static_qmf(sym, x)
                elif x < pp / 2:
                    want = cf.dmt_ddf(sym, x)
                else:
                    continue
                got = cf.dmt_theorem1(pp, c, x)
                rep.track("optimum stitching", abs(got - want))
                if abs(got - want) > 1e-12:
                    rep.record(False, check="optimum stitching", p=pp, c=c, r=float(x), got=got, want=want)
            rep.record(True, check="optimum stitching", p=pp, c=c)
    for s in (cf.Scheme.PARALLEL_OPTIMAL, cf.Scheme.PARALLEL_STATIC_QMF, cf.Scheme.PARALLEL_DDF_UPPER, cf.Scheme.PARALLEL_DDF_SPLIT):
        curve = cf.closed_form_curve(s, np.arange(0.0, 1.2, r_step))
        rep.record(curve.is_nonincreasing(), scheme=s.value)
    for x in np.arange(0.01, 0.5, 0.01):
        opt = cf.dmt_parallel_optimal(x)
        up, split = cf.dmt_parallel_ddf_bounds(x)
        ok = opt > cf.dmt_parallel_static_qmf(x) and opt > up and opt > split
        rep.record(ok, check="parallel strict gap", r=float(x))
    rep.seconds = time.perf_counter() - t0
    return rep


def check_tables(n_draws: int = 1000, seed: int = 1, tol: float = 1e-9) -> SuiteReport:
    """Minimum over the DDF table rows equals the DDF closed form."""
    t0 = time.perf_counter()
    rep = SuiteReport("tables")
    rng = np.random.default_rng(seed)
    for _ in range(n_draws):
        p = ordered_ddf_profile(rng)
        r = float(rng.uniform(0, 1.2 * p.b))
        rows = cf.ddf_case_table(p, r)
        got = min(row.s_value for row in rows)
        want = cf.dmt_ddf(p, r)
        rep.track("table vs closed form", abs(got - want))
        rep.record(abs(got - want) <= tol, profile=p.as_tuple(), r=r, table=got, closed=want)
    rep.seconds = time.perf_counter() - t0
    return rep


def run_suite(name: str, **kw) -> SuiteReport:
    fn = {
        "ordering": check_ordering,
        "oracle": check_oracle,
        "monotonicity": check_monotonicity,
        "tables": check_tables,
    }[name]
    return fn(**kw)

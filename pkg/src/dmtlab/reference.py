"""Plain enumeration of every grid problem through the scalar kernels.

Slow (pure Python loops) but free of the reductions in :mod:`dmtlab.solvers`,
so the two can be compared point for point on coarse grids. Tie-breaking
follows the same rule: lexicographically smallest grid point among values
within ``TIE_TOL`` of the optimum, outer problems first.
"""

from __future__ import annotations

import itertools
import math

from .exponents import (
    FEAS_EPS,
    ExponentPoint,
    GridSpec,
    as_profile,
    ddf_in_outage,
    dqmf_parallel_in_outage,
    objective_parallel,
    objective_s,
    rate_fd,
    rate_hd,
    rate_hd_global,
    rate_parallel,
    rate_parallel_global,
)
from .solvers import TIE_TOL, SolverResult


def _pick_min(cands):
    """cands: list of (value, key, payload). Smallest key among near-minimal values."""
    if not cands:
        return None
    vmin = min(c[0] for c in cands)
    return min((c for c in cands if c[0] <= vmin + TIE_TOL), key=lambda c: c[1])


def _pick_max(cands):
    vmax = max(c[0] for c in cands)
    return min((c for c in cands if c[0] >= vmax - TIE_TOL), key=lambda c: c[1])


def _single_points(profile, grid):
    p = as_profile(profile)
    for al, be, ga in itertools.product(grid.axis(p.a), grid.axis(p.b), grid.axis(p.c)):
        yield ExponentPoint(float(al), float(be), float(ga))


def _enumerate(profile, grid, in_outage) -> SolverResult:
    p = as_profile(profile)
    cands = [(objective_s(p, pt), pt.as_tuple(), pt) for pt in _single_points(p, grid) if in_outage(pt)]
    best = _pick_min(cands)
    if best is None:
        return SolverResult(math.inf, None, None, False, grid=grid)
    return SolverResult(best[0], best[2], None, True, grid=grid)


def full_duplex(profile, r, grid: GridSpec) -> SolverResult:
    return _enumerate(profile, grid, lambda pt: rate_fd(pt) <= r + FEAS_EPS)


def static_qmf(profile, r, t, grid: GridSpec) -> SolverResult:
    res = _enumerate(profile, grid, lambda pt: rate_hd(t, pt) <= r + FEAS_EPS)
    res.arg_t = t
    return res


def ddf(profile, r, grid: GridSpec) -> SolverResult:
    return _enumerate(profile, grid, lambda pt: ddf_in_outage(r, pt))


def global_csi(profile, r, grid: GridSpec) -> SolverResult:
    return _enumerate(profile, grid, lambda pt: rate_hd_global(pt) <= r + FEAS_EPS)


def best_static_qmf(profile, r, grid: GridSpec) -> SolverResult:
    inner = [(static_qmf(profile, r, float(t), grid), float(t)) for t in grid.t_axis()]
    best = _pick_max([(res.value, t, res) for res, t in inner])
    return best[2]


def local_csi(profile, r, grid: GridSpec) -> SolverResult:
    p = as_profile(profile)
    outer = []
    for al in grid.axis(p.a):
        middle = []
        for t in grid.t_axis():
            cands = []
            for be, ga in itertools.product(grid.axis(p.b), grid.axis(p.c)):
                pt = ExponentPoint(float(al), float(be), float(ga))
                if rate_hd(float(t), pt) <= r + FEAS_EPS:
                    cands.append((objective_s(p, pt), (pt.beta, pt.gamma), pt))
            best = _pick_min(cands)
            middle.append((math.inf, float(t), None) if best is None else (best[0], float(t), best[2]))
        v, t, pt = _pick_max(middle)
        outer.append((v, float(al), (t, pt)))
    v, _, (t, pt) = _pick_min(outer)
    if math.isinf(v):
        return SolverResult(math.inf, None, None, False, grid=grid)
    return SolverResult(v, pt, t, True, grid=grid)


def _parallel_enumerate(grid, in_outage) -> SolverResult:
    ax = [float(x) for x in grid.axis(1.0)]
    cands = []
    for q in itertools.product(ax, ax, ax, ax):
        pt = ExponentPoint(*q)
        if in_outage(pt):
            cands.append((objective_parallel(pt), q, pt))
    best = _pick_min(cands)
    if best is None:
        return SolverResult(math.inf, None, None, False, grid=grid)
    return SolverResult(best[0], best[2], None, True, grid=grid)


def parallel_global(r, grid: GridSpec) -> SolverResult:
    return _parallel_enumerate(grid, lambda pt: rate_parallel_global(pt) <= r + FEAS_EPS)


def parallel_dqmf(r, grid: GridSpec) -> SolverResult:
    return _parallel_enumerate(grid, lambda pt: dqmf_parallel_in_outage(r, pt))


def parallel_static(r, t1, t2, grid: GridSpec) -> SolverResult:
    res = _parallel_enumerate(grid, lambda pt: rate_parallel(t1, t2, pt) <= r + FEAS_EPS)
    res.arg_t = (t1, t2)
    return res


def parallel_local_csi(r, grid: GridSpec) -> SolverResult:
    ax = [float(x) for x in grid.axis(1.0)]
    ts = [float(x) for x in grid.t_axis()]
    outer = []
    for al, ga in itertools.product(ax, ax):
        middle = []
        for t1, t2 in itertools.product(ts, ts):
            cands = []
            for be, de in itertools.product(ax, ax):
                pt = ExponentPoint(al, be, ga, de)
                if rate_parallel(t1, t2, pt) <= r + FEAS_EPS:
                    cands.append((objective_parallel(pt), (be, de), pt))
            best = _pick_min(cands)
            middle.append((best[0], (t1, t2), best[2]))
        v, tt, pt = _pick_max(middle)
        outer.append((v, (al, ga), (tt, pt)))
    v, _, (tt, pt) = _pick_min(outer)
    return SolverResult(v, pt, tt, True, grid=grid)

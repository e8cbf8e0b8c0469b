"""Grid solvers for the outage-exponent problems.

Each solver minimises the outage exponent (``objective_s`` or
``objective_parallel``) over the grid points of the nonnegative exponent box
that lie in a scheme's outage region. Results are exact on the grid: the
reductions used here (per-column search along the axis in which the region is
downward closed, pair decomposition for the parallel network, bound-based
pruning of nested problems) return the same optimum as enumerating every grid
point. :mod:`dmtlab.reference` holds the plain enumeration used to check that.

Tie-breaking: among points whose objective is within ``TIE_TOL`` of the
optimum, the lexicographically smallest grid point is returned. Nested
problems break ties outermost first (exponent, then schedule, then the inner
exponents).
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .exponents import (
    DQMF_MARGIN,
    FEAS_EPS,
    ChannelProfile,
    ExponentPoint,
    GridSpec,
    as_profile,
    objective_parallel,
    objective_s,
)

# Objective values closer than this are treated as ties.
TIE_TOL = 1e-9


def worker_count() -> int:
    """Workers allowed by ``DMTLAB_THREADS`` (0 or unset: one per CPU)."""
    raw = os.environ.get("DMTLAB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"DMTLAB_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("DMTLAB_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _ordered_map(fn, items):
    """``list(map(fn, items))``, spread over threads when allowed. Output order is input order."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


class RuleKind(str, enum.Enum):
    CONSTANT = "constant"
    DDF = "ddf"
    DQMF_PARALLEL = "dqmf-parallel"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class ScheduleRule:
    """Listen fraction as a function of the observed S-R exponent ``alpha``.

    ``CONSTANT`` ignores ``alpha``; ``DDF`` listens ``r/alpha``;
    ``DQMF_PARALLEL`` listens ``1 - alpha(1-r)``; ``TABULATED`` looks up the
    nearest tabulated ``alpha`` (as produced by :func:`solve_local_csi`).
    Every output is clamped to ``[0, 1]``.
    """

    kind: RuleKind
    t: float = 0.5
    alphas: tuple = ()
    ts: tuple = ()

    @classmethod
    def constant(cls, t: float) -> "ScheduleRule":
        return cls(RuleKind.CONSTANT, t=float(t))

    @classmethod
    def ddf(cls) -> "ScheduleRule":
        return cls(RuleKind.DDF)

    @classmethod
    def dqmf_parallel(cls) -> "ScheduleRule":
        return cls(RuleKind.DQMF_PARALLEL)

    @classmethod
    def tabulated(cls, alphas: Sequence[float], ts: Sequence[float]) -> "ScheduleRule":
        if len(alphas) != len(ts) or not len(alphas):
            raise ValueError("tabulated rule needs matching, nonempty alpha and t tables")
        return cls(RuleKind.TABULATED, alphas=tuple(map(float, alphas)), ts=tuple(map(float, ts)))

    def __call__(self, r: float, alpha):
        """Evaluate the rule; ``alpha`` may be a scalar or an array."""
        alpha = np.asarray(alpha, dtype=float)
        if self.kind is RuleKind.CONSTANT:
            t = np.full(alpha.shape, self.t)
        elif self.kind is RuleKind.DDF:
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(alpha > 0, r / np.where(alpha > 0, alpha, 1.0), np.inf)
        elif self.kind is RuleKind.DQMF_PARALLEL:
            t = 1.0 - alpha * (1.0 - r)
        else:
            grid = np.asarray(self.alphas)
            idx = np.clip(np.searchsorted(grid, alpha), 1, len(grid) - 1) if len(grid) > 1 else np.zeros(alpha.shape, int)
            if len(grid) > 1:
                left = grid[idx - 1]
                idx = np.where(np.abs(alpha - left) <= np.abs(grid[idx] - alpha), idx - 1, idx)
            t = np.asarray(self.ts)[idx]
        t = np.clip(t, 0.0, 1.0)
        return float(t) if t.ndim == 0 else t


@dataclass
class SolverResult:
    """Optimum of one grid problem.

    ``value`` is ``+inf`` with ``feasible=False`` when the outage region has
    no grid point (only possible for ``r < 0``).
    """

    value: float
    argmin: Optional[ExponentPoint]
    arg_t: Optional[object] = None
    feasible: bool = True
    rule: Optional[ScheduleRule] = None
    grid: Optional[GridSpec] = None

    @property
    def diversity(self) -> float:
        return self.value


def _infeasible(grid: GridSpec) -> SolverResult:
    return SolverResult(math.inf, None, None, False, grid=grid)


def _grid(grid) -> GridSpec:
    if grid is None:
        return GridSpec()
    if isinstance(grid, GridSpec):
        return grid
    return GridSpec(step=float(grid))


# ---------------------------------------------------------------------------
# Vectorised outage predicates. Operation order mirrors the scalar kernels in
# ``dmtlab.exponents`` so both agree bit for bit.
# ---------------------------------------------------------------------------


def _pred_fd(r, al, be, ga):
    return np.minimum(np.maximum(al, ga), np.maximum(be, ga)) <= r + FEAS_EPS


def _pred_hd(t, r, al, be, ga):
    c1 = t * np.maximum(al, ga) + (1 - t) * ga
    c2 = t * ga + (1 - t) * np.maximum(be, ga)
    return np.minimum(c1, c2) <= r + FEAS_EPS


def _rate_global(al, be, ga):
    den = al + be - 2 * ga
    branch = ga < np.minimum(al, be)
    with np.errstate(divide="ignore", invalid="ignore"):
        eq = (al * be - ga * ga) / np.where(branch, den, 1.0)
    return np.where(branch, eq, np.minimum(np.maximum(al, ga), np.maximum(be, ga)))


def _pred_global(r, al, be, ga):
    return _rate_global(al, be, ga) <= r + FEAS_EPS


def _pred_ddf(r, al, be, ga):
    e1 = (al <= r + FEAS_EPS) & (ga <= r + FEAS_EPS)
    decodes = (al > 0) & ~(r > al + FEAS_EPS)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.minimum(r / np.where(al > 0, al, 1.0), 1.0)
    e2 = t * ga + (1 - t) * np.maximum(ga, be) <= r + FEAS_EPS
    return e1 | (decodes & e2)


def _max_feasible_index(pred: Callable[[np.ndarray], np.ndarray], axis: np.ndarray, shape) -> np.ndarray:
    """Largest index ``j`` with ``pred(axis[j])`` true, per column; -1 if none.

    ``pred`` must be monotone (true on a prefix of ``axis``) in every column.
    """
    n = len(axis)
    lo = np.full(shape, -1, dtype=np.int64)  # known feasible (or -1)
    hi = np.full(shape, n, dtype=np.int64)  # known infeasible (or n)
    while True:
        active = hi - lo > 1
        if not active.any():
            return lo
        mid = (lo + hi) // 2
        ok = pred(axis[np.where(active, mid, 0)])
        lo = np.where(active & ok, mid, lo)
        hi = np.where(active & ~ok, mid, hi)


def _refine_index(pred, axis: np.ndarray, guess: np.ndarray) -> np.ndarray:
    """Correct an analytic ceiling index that may be off by one through rounding."""
    n = len(axis)
    idx = np.clip(guess, -1, n - 1)
    # step down while the guess is infeasible
    for _ in range(2):
        bad = idx >= 0
        if bad.any():
            ok = pred(axis[np.maximum(idx, 0)])
            idx = np.where(bad & ~ok, idx - 1, idx)
    # step up while the next point is still feasible
    for _ in range(2):
        room = idx < n - 1
        if room.any():
            ok = pred(axis[np.minimum(idx + 1, n - 1)])
            idx = np.where(room & ok, idx + 1, idx)
    return idx


def _select_lex(values: np.ndarray, keys: Sequence[np.ndarray]) -> int:
    """Flat index of the lexicographically smallest key among near-minimal values."""
    vmin = values.min()
    cand = np.flatnonzero(values <= vmin + TIE_TOL)
    if len(cand) == 1:
        return int(cand[0])
    order = np.lexsort(tuple(k.ravel()[cand] for k in reversed(keys)))
    return int(cand[order[0]])


# ---------------------------------------------------------------------------
# Single relay, one-level problems
# ---------------------------------------------------------------------------


def _solve_columns(profile: ChannelProfile, r: float, grid: GridSpec, pred4) -> SolverResult:
    """min objective_s over points where ``pred4(r, al, be, ga)`` holds (downward closed in beta)."""
    p = as_profile(profile)
    A, B, C = grid.axis(p.a), grid.axis(p.b), grid.axis(p.c)
    al, ga = np.meshgrid(A, C, indexing="ij")
    j = _max_feasible_index(lambda be: pred4(r, al, be, ga), B, al.shape)
    feas = j >= 0
    if not feas.any():
        return _infeasible(grid)
    be = B[np.maximum(j, 0)]
    s = p.a + p.b + p.c - al - be - ga
    s = np.where(feas, s, np.inf)
    k = _select_lex(s, (al, np.where(feas, be, np.inf), ga))
    pt = ExponentPoint(float(al.flat[k]), float(be.flat[k]), float(ga.flat[k]))
    return SolverResult(objective_s(p, pt), pt, None, True, grid=grid)


def solve_full_duplex(profile: ChannelProfile, r: float, grid: GridSpec = None) -> SolverResult:
    """Full-duplex cutset problem: outage when ``min(max(alpha,gamma), max(beta,gamma)) <= r``."""
    return _solve_columns(profile, r, _grid(grid), _pred_fd)


def solve_static_qmf(profile: ChannelProfile, r: float, t: float = 0.5, grid: GridSpec = None) -> SolverResult:
    """Half-duplex problem with a fixed listen fraction ``t``."""
    if not 0 <= t <= 1:
        raise ValueError(f"schedule t={t!r} must lie in [0, 1]")
    res = _solve_columns(profile, r, _grid(grid), lambda r_, al, be, ga: _pred_hd(t, r_, al, be, ga))
    res.arg_t = float(t)
    return res


def solve_ddf(profile: ChannelProfile, r: float, grid: GridSpec = None) -> SolverResult:
    """Dynamic decode-and-forward: the relay listens ``r/alpha`` (never decodes at ``alpha = 0``)."""
    return _solve_columns(profile, r, _grid(grid), _pred_ddf)


def solve_global_csi(profile: ChannelProfile, r: float, grid: GridSpec = None) -> SolverResult:
    """Listen fraction chosen with every link known: outage when ``max_t rate_hd <= r``."""
    return _solve_columns(profile, r, _grid(grid), _pred_global)


# ---------------------------------------------------------------------------
# Single relay, schedule-optimised problems
# ---------------------------------------------------------------------------


def _hd_beta_ceiling(t, r, al, ga, B):
    """Index of the largest beta on ``B`` keeping ``rate_hd(t, .) <= r``; -1 if none.

    ``t``, ``al``, ``ga`` broadcast together.
    """
    t, al, ga = np.broadcast_arrays(np.asarray(t, float), al, ga)
    n = len(B)
    rr = r + FEAS_EPS
    cut1 = t * np.maximum(al, ga) + (1 - t) * ga
    with np.errstate(divide="ignore", invalid="ignore"):
        m = (rr - t * ga) / np.where(t < 1, 1 - t, 1.0)
    guess = np.searchsorted(B, m, side="right") - 1
    guess = np.where(t >= 1, np.where(ga <= rr, n - 1, -1), np.where(ga <= m, guess, -1))
    guess = np.where(cut1 <= rr, n - 1, guess)
    return _refine_index(lambda be: _pred_hd(t, r, al, be, ga), B, guess)


def _static_inner(p: ChannelProfile, r: float, t: float, A, B, C):
    al, ga = np.meshgrid(A, C, indexing="ij")
    j = _hd_beta_ceiling(t, r, al, ga, B)
    feas = j >= 0
    if not feas.any():
        return math.inf, None
    be = B[np.maximum(j, 0)]
    s = np.where(feas, p.a + p.b + p.c - al - be - ga, np.inf)
    k = _select_lex(s, (al, np.where(feas, be, np.inf), ga))
    pt = ExponentPoint(float(al.flat[k]), float(be.flat[k]), float(ga.flat[k]))
    return objective_s(p, pt), pt


def best_static_qmf(profile: ChannelProfile, r: float, grid: GridSpec = None) -> SolverResult:
    """Best fixed listen fraction: max over the schedule grid of the static problem's value."""
    grid = _grid(grid)
    p = as_profile(profile)
    A, B, C = grid.axis(p.a), grid.axis(p.b), grid.axis(p.c)
    T = grid.t_axis()
    if r < 0:
        return _infeasible(grid)
    # a min over a subset of alpha bounds each schedule's value from above
    sub = np.unique(np.append(A[:: max(1, len(A) // 16)], A[-1]))
    ub = _local_table(p, r, sub[None, :], T[:, None], B, C)[0].min(axis=(1, 2))
    done = _scan_by_bound(-ub, lambda k: -_static_inner(p, r, float(T[k]), A, B, C)[0])
    k = _pick_first_min(done)
    value, pt = _static_inner(p, r, float(T[k]), A, B, C)
    return SolverResult(value, pt, float(T[k]), True, grid=grid)


def _local_table(p: ChannelProfile, r: float, alpha, t, B, C):
    """Inner objective at the beta ceiling, over the trailing gamma axis.

    ``alpha`` and ``t`` broadcast against each other; the result has their
    shape plus a trailing axis of length ``len(C)``. Returns (s, beta index).
    """
    alpha = np.asarray(alpha, float)[..., None]
    t = np.asarray(t, float)[..., None]
    j = _hd_beta_ceiling(t, r, alpha, C, B)
    s = np.where(j >= 0, p.a + p.b + p.c - alpha - B[np.maximum(j, 0)] - C, np.inf)
    return s, j


def _nearest_index(T: np.ndarray, t) -> np.ndarray:
    return np.abs(np.asarray(t, float)[..., None] - T).argmin(axis=-1)


def _scan_by_bound(lb: np.ndarray, evaluate, batch: int = 8):
    """Exact values for every item whose lower bound is within ``TIE_TOL`` of the minimum.

    Items are evaluated in ascending-bound order until the next bound exceeds
    the best exact value found. Returns {item index: value}.
    """
    order = np.argsort(lb, kind="stable")
    done = {}
    best = math.inf
    pos = 0
    while pos < len(order) and lb[order[pos]] <= best + TIE_TOL:
        idx = [int(i) for i in order[pos : pos + batch] if lb[i] <= best + TIE_TOL]
        pos += batch
        for i, v in zip(idx, _ordered_map(evaluate, idx)):
            done[i] = v
            best = min(best, v)
    return done


def _pick_first_min(done: dict) -> int:
    vmin = min(done.values())
    return min(i for i, v in done.items() if v <= vmin + TIE_TOL)


def solve_local_csi(
    profile: ChannelProfile, r: float, grid: GridSpec = None, with_rule: bool = False
) -> SolverResult:
    """Dynamic QMF with receive CSI at the relay (min over alpha, max over t, min over beta/gamma).

    The evaluation order is fixed: nature picks ``alpha``, the relay picks
    ``t`` knowing only ``alpha``, then nature picks ``(beta, gamma)``.

    Args:
        with_rule: also tabulate the maximising ``t`` for every ``alpha``
            (evaluates every alpha, so slower). The rule is returned as a
            ``TABULATED`` :class:`ScheduleRule`.
    """
    grid = _grid(grid)
    p = as_profile(profile)
    A, B, C = grid.axis(p.a), grid.axis(p.b), grid.axis(p.c)
    T = grid.t_axis()
    if r < 0:
        return _infeasible(grid)

    def inner_over_t(ia):
        return _local_table(p, r, A[ia], T, B, C)[0].min(axis=-1)

    def value(ia):
        return float(inner_over_t(ia).max())

    # any fixed schedule bounds max_t from below
    with np.errstate(divide="ignore"):
        t_ddf = np.where(A > 0, r / np.where(A > 0, A, 1.0), 1.0)
    guesses = np.stack([_nearest_index(T, np.clip(t_ddf, 0, 1)), np.full(len(A), _nearest_index(T, 0.5))], axis=1)
    lb = _local_table(p, r, A[:, None], T[guesses], B, C)[0].min(axis=-1).max(axis=1)

    if with_rule:
        done = {ia: value(ia) for ia in range(len(A))}
    else:
        done = _scan_by_bound(lb, value)
    ia = _pick_first_min(done)
    inner = inner_over_t(ia)
    kt = int(np.flatnonzero(inner >= inner.max() - TIE_TOL)[0])
    s, j = _local_table(p, r, A[ia], T[kt], B, C)
    cand = np.flatnonzero(s <= s.min() + TIE_TOL)
    jg = int(cand[np.lexsort((C[cand], B[j[cand]]))[0]])
    pt = ExponentPoint(float(A[ia]), float(B[j[jg]]), float(C[jg]))
    rule = None
    if with_rule:
        ts = []
        for k in range(len(A)):
            row = inner_over_t(k)
            ts.append(float(T[int(np.flatnonzero(row >= row.max() - TIE_TOL)[0])]))
        rule = ScheduleRule.tabulated(A, ts)
    return SolverResult(objective_s(p, pt), pt, float(T[kt]), True, rule=rule, grid=grid)


# ---------------------------------------------------------------------------
# Parallel network (unit exponents, box [0,1]^4)
# ---------------------------------------------------------------------------


@dataclass
class _Pairs:
    x: np.ndarray  # first exponent of the hop pair (alpha or gamma)
    y: np.ndarray  # second exponent (beta or delta)
    u: np.ndarray  # multiplexing contribution of the path
    w: np.ndarray  # x + y


def _pairs(axis: np.ndarray, rate: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> _Pairs:
    x, y = np.meshgrid(axis, axis, indexing="ij")
    x, y = x.ravel(), y.ravel()  # lexicographic order
    return _Pairs(x, y, rate(x, y), x + y)


def _harmonic_vec(x, y):
    s = x + y
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(s > 0, x * y / np.where(s > 0, s, 1.0), 0.0)


def _budget_counts(u1: np.ndarray, us: np.ndarray, bound: float) -> np.ndarray:
    """For each ``u1``, how many leading entries of sorted ``us`` satisfy ``u1 + u <= bound``."""
    k = np.searchsorted(us, bound - u1, side="right")
    n = len(us)
    # the subtraction above can round across a boundary; fix up with the exact sum
    nxt = np.minimum(k, n - 1)
    up = (k < n) & (u1 + us[nxt] <= bound)
    k = np.where(up, np.searchsorted(us, us[nxt], side="right"), k)
    prv = np.maximum(k - 1, 0)
    down = (k > 0) & ~(u1 + us[prv] <= bound)
    k = np.where(down, np.searchsorted(us, us[prv], side="left"), k)
    return k


def _solve_pairs(P1: _Pairs, P2: _Pairs, bound: float, grid: GridSpec) -> SolverResult:
    """min ``4 - w1 - w2`` subject to ``u1 + u2 <= bound``, exact on the pair lists."""
    order = np.argsort(P2.u, kind="stable")
    us, ws = P2.u[order], P2.w[order]
    prefmax = np.maximum.accumulate(ws)
    k = _budget_counts(P1.u, us, bound)
    ok = k > 0
    if not ok.any():
        return _infeasible(grid)
    total = np.where(ok, P1.w + prefmax[np.maximum(k - 1, 0)], -np.inf)
    W = total.max()
    i = int(np.flatnonzero(total >= W - TIE_TOL)[0])
    feas2 = P1.u[i] + P2.u <= bound
    j = int(np.flatnonzero(feas2 & (P1.w[i] + P2.w >= W - TIE_TOL))[0])
    pt = ExponentPoint(float(P1.x[i]), float(P1.y[i]), float(P2.x[j]), float(P2.y[j]))
    return SolverResult(objective_parallel(pt), pt, None, True, grid=grid)


def solve_parallel_global(r: float, grid: GridSpec = None) -> SolverResult:
    """Listen fractions chosen with global CSI: outage when ``ab/(a+b) + gd/(g+d) <= r``."""
    grid = _grid(grid)
    P = _pairs(grid.axis(1.0), _harmonic_vec)
    return _solve_pairs(P, P, r + FEAS_EPS, grid)


def _dqmf_pair_rate(r: float):
    k = 1.0 / (1.0 - r)
    return lambda x, y: x * np.minimum(k - x, y)


def solve_parallel_dqmf(r: float, grid: GridSpec = None) -> SolverResult:
    """Both relays listen ``1 - x(1-r)`` where ``x`` is their S-R exponent."""
    if not 0 <= r < 1:
        raise ValueError("parallel DQMF needs 0 <= r < 1")
    grid = _grid(grid)
    P = _pairs(grid.axis(1.0), _dqmf_pair_rate(r))
    bound = r / (1.0 - r) - DQMF_MARGIN
    if bound < 0:
        # only the both-paths-dead face is in outage
        dead = (P.x == 0) | (P.y == 0)
        P = _Pairs(P.x[dead], P.y[dead], np.zeros(int(dead.sum())), P.w[dead])
        bound = 0.0
    return _solve_pairs(P, P, bound, grid)


def _static_pair_rate(t: float):
    return lambda x, y: np.minimum(t * x, (1 - t) * y)


def solve_parallel_static(r: float, t1: float = 0.5, t2: float = 0.5, grid: GridSpec = None) -> SolverResult:
    """Fixed listen fractions ``t1``, ``t2`` on the two relays."""
    for t in (t1, t2):
        if not 0 <= t <= 1:
            raise ValueError(f"schedule t={t!r} must lie in [0, 1]")
    grid = _grid(grid)
    ax = grid.axis(1.0)
    P1 = _pairs(ax, _static_pair_rate(t1))
    P2 = P1 if t1 == t2 else _pairs(ax, _static_pair_rate(t2))
    res = _solve_pairs(P1, P2, r + FEAS_EPS, grid)
    res.arg_t = (float(t1), float(t2))
    return res


def count_dqmf_case_iii(r: float, grid: GridSpec = None) -> int:
    """Grid points with both path sums above ``1/(1-r)`` and ``dqmf_parallel_rate <= r/(1-r)``.

    Exhaustive over the grid (via the pair decomposition). The inclusive test
    used here contains the solver's strict region, so a count of zero means
    no solver argmin can have that shape.
    """
    if not 0 <= r < 1:
        raise ValueError("parallel DQMF needs 0 <= r < 1")
    grid = _grid(grid)
    P = _pairs(grid.axis(1.0), _dqmf_pair_rate(r))
    big = P.w > 1.0 / (1.0 - r)
    u = P.u[big]
    if not len(u):
        return 0
    us = np.sort(u)
    return int(_budget_counts(u, us, r / (1 - r) + FEAS_EPS).sum())


def _parallel_inner(r: float, al, t1, ga, t2, D: np.ndarray):
    """max of ``beta + delta`` over the grid with ``rate_parallel <= r``.

    ``al, t1, ga, t2`` broadcast to a common shape S. Returns (best sum,
    beta index, delta index), each of shape S; the beta index is the smallest
    maximiser and the delta index its ceiling.
    """
    bound = r + FEAS_EPS
    al, t1, ga, t2 = (np.asarray(x, float)[..., None] for x in (al, t1, ga, t2))
    n = len(D)
    g1 = np.minimum(t1 * al, (1 - t1) * D)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = (bound - g1) / np.where(t2 < 1, 1 - t2, 1.0)
    guess = np.searchsorted(D, m, side="right") - 1
    every = g1 + np.minimum(t2 * ga, (1 - t2) * D[-1]) <= bound
    guess = np.where(every, n - 1, np.where(t2 >= 1, -1, guess))
    dj = _refine_index(lambda de: g1 + np.minimum(t2 * ga, (1 - t2) * de) <= bound, D, guess)
    tot = np.where(dj >= 0, D + D[np.maximum(dj, 0)], -np.inf)
    best = tot.max(axis=-1)
    jb = np.argmax(tot >= best[..., None] - TIE_TOL, axis=-1)
    return best, jb, np.take_along_axis(dj, jb[..., None], axis=-1)[..., 0]


def solve_parallel_local_csi(r: float, grid: GridSpec = None) -> SolverResult:
    """Receive-CSI dynamic QMF on the parallel network.

    min over (alpha, gamma), max over independent (t1, t2) on the schedule
    grid, min over (beta, delta). Each relay's schedule may depend only on its
    own S-R exponent, which the independent middle max models pointwise.
    """
    grid = _grid(grid)
    if r < 0:
        return _infeasible(grid)
    D = grid.axis(1.0)
    T = grid.t_axis()
    ia, ig = (x.ravel() for x in np.meshgrid(np.arange(len(D)), np.arange(len(D)), indexing="ij"))
    al, ga = D[ia], D[ig]

    # lower bounds from two fixed schedules: the rule 1 - x(1-r), and half/half
    half = T[_nearest_index(T, 0.5)]
    lb = np.full(len(ia), -np.inf)
    for t1, t2 in ((T[_nearest_index(T, np.clip(1 - al * (1 - r), 0, 1))], T[_nearest_index(T, np.clip(1 - ga * (1 - r), 0, 1))]), (half, half)):
        lb = np.maximum(lb, 4.0 - al - ga - _parallel_inner(r, al, t1, ga, t2, D)[0])

    def table(k):
        return 4.0 - al[k] - ga[k] - _parallel_inner(r, al[k], T[:, None], ga[k], T[None, :], D)[0]

    done = _scan_by_bound(lb, lambda k: float(table(k).max()))
    k = _pick_first_min(done)
    vals = table(k)
    flat = int(np.flatnonzero(vals.ravel() >= vals.max() - TIE_TOL)[0])
    k1, k2 = divmod(flat, len(T))
    _, jb, jd = _parallel_inner(r, al[k], T[k1], ga[k], T[k2], D)
    pt = ExponentPoint(float(al[k]), float(D[int(jb)]), float(ga[k]), float(D[int(jd)]))
    return SolverResult(objective_parallel(pt), pt, (float(T[k1]), float(T[k2])), True, grid=grid)

"""Exact evaluators for the closed-form DMT curves.

Every function maps a multiplexing gain ``r`` to a diversity ``d >= 0``.
Piecewise boundaries go to the closed side in the order the branches are
listed; adjacent branches agree at every boundary.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .exponents import ChannelProfile, ExponentPoint, as_profile, objective_s


class OutOfRegimeError(ValueError):
    """A closed form was asked for outside the regime it is valid in."""


class Scheme(str, enum.Enum):
    FULL_DUPLEX = "fd"
    STATIC_QMF_HALF = "static-qmf"
    DDF = "ddf"
    FOUR_REGIME_OPTIMAL = "theorem1"
    PARALLEL_OPTIMAL = "parallel-optimal"
    PARALLEL_STATIC_QMF = "parallel-static-qmf"
    PARALLEL_DDF_UPPER = "parallel-ddf-upper"
    PARALLEL_DDF_SPLIT = "parallel-ddf-split"
    # grid-solver curves
    GRID_FULL_DUPLEX = "grid-fd"
    GRID_STATIC_QMF = "grid-static-qmf"
    GRID_BEST_STATIC_QMF = "best-static-qmf"
    GRID_DDF = "grid-ddf"
    GRID_GLOBAL_CSI = "global-csi"
    GRID_LOCAL_CSI = "dqmf"
    GRID_PARALLEL_GLOBAL = "parallel-global"
    GRID_PARALLEL_DQMF = "parallel-dqmf"
    GRID_PARALLEL_STATIC = "parallel-static"
    GRID_PARALLEL_LOCAL_CSI = "parallel-local-csi"

    @property
    def is_parallel(self) -> bool:
        return self.value.startswith("parallel")


# Placeholder profile carried by parallel-network curves (all four links at unit exponent).
UNIT_PARALLEL_PROFILE = ChannelProfile(1.0, 1.0, 1.0)


@dataclass
class DmtCurve:
    """Sampled ``r -> d(r)`` for one scheme."""

    scheme: Scheme
    profile: ChannelProfile
    r: np.ndarray
    d: np.ndarray
    method: str = "closed"
    grid_step: Optional[float] = None
    note: str = ""

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.d = np.asarray(self.d, dtype=float)
        if self.r.shape != self.d.shape:
            raise ValueError("r and d sample arrays differ in length")
        if self.r.size > 1 and np.any(np.diff(self.r) <= 0):
            raise ValueError("curve samples must be strictly increasing in r")
        if np.any(self.d < 0):
            raise ValueError("diversity samples must be >= 0")

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.r.tolist(), self.d.tolist()))

    def is_nonincreasing(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.diff(self.d) <= tol))


def _pos(x: float) -> float:
    return x if x > 0 else 0.0


def _check_r(r: float) -> None:
    if not r >= 0:
        raise ValueError(f"multiplexing gain r={r!r} must be >= 0")


def dmt_full_duplex(profile: ChannelProfile, r: float) -> float:
    """Full-duplex tradeoff ``(min(a,b) - r)^+ + (c - r)^+``."""
    p = as_profile(profile)
    _check_r(r)
    return _pos(min(p.a, p.b) - r) + _pos(p.c - r)


def dmt_static_qmf(profile: ChannelProfile, r: float) -> float:
    """Static QMF with the relay listening half the time."""
    p = as_profile(profile)
    _check_r(r)
    m = min(p.a, p.b)
    if p.c >= m:
        return _pos(m - r) + _pos(p.c - r)
    return _pos(m + p.c - 2 * r)


def dmt_ddf(profile: ChannelProfile, r: float) -> float:
    """Dynamic decode-and-forward tradeoff, valid for ``c < min(a, b)``.

    For ``a > b`` the min/max form is evaluated as written; the per-regime
    tables only cover ``a < b``, so use :func:`dmtlab.solvers.solve_ddf`
    to cross-check those profiles.

    Raises:
        OutOfRegimeError: if ``c >= min(a, b)``.
    """
    p = as_profile(profile)
    _check_r(r)
    lo, hi = min(p.a, p.b), max(p.a, p.b)
    if p.c >= lo:
        raise OutOfRegimeError(
            f"DDF closed form needs c < min(a,b); got {p.as_tuple()}; use the grid solver"
        )
    if r <= min(p.c, hi / 2):
        d = lo + p.c - 2 * r
    elif r < hi / 2:
        d = lo - (hi - p.c) * r / (hi - r)
    elif r == 0:
        d = lo + p.c
    else:
        d = p.a * p.b / r - p.a - p.b + p.c
    return _pos(d)


def ddf_formula_unverified(profile: ChannelProfile) -> bool:
    """True when the DDF closed form is used outside the tabulated ``a < b`` side."""
    p = as_profile(profile)
    return p.a > p.b


def dmt_theorem1(p: float, c: float, r: float) -> float:
    """Optimal tradeoff of the ``(p, p, c)`` half-duplex relay channel."""
    if p < 0 or c < 0:
        raise ValueError("p and c must be >= 0")
    _check_r(r)
    if c >= p:
        return _pos(p - r) + _pos(c - r)
    if r <= c:
        return p + c - 2 * r
    if r < p / 2:
        return p - (p - c) * r / (p - r)
    return _pos(p + c - 2 * r)


def theorem1_regime(p: float, c: float, r: float) -> str:
    """Which of the four regimes ``(p, p, c)`` at rate ``r`` falls in, and the scheme that attains it."""
    if c >= p:
        return "strong-direct:static-qmf"
    if r <= c:
        return "low-rate:static-qmf"
    if r < p / 2:
        return "mid-rate:ddf"
    return "high-rate:static-qmf"


def dmt_parallel_optimal(r: float) -> float:
    """Optimal tradeoff of the unit parallel relay network under receive CSI."""
    _check_r(r)
    if r < 0.5:
        return 2 - r / (1 - r)
    if r <= 1:
        return 2 * (1 - r)
    return 0.0


def dmt_parallel_static_qmf(r: float) -> float:
    """Static QMF with both relays on a half/half schedule: ``2 - 2r``."""
    _check_r(r)
    return _pos(2 - 2 * r)


def dmt_parallel_ddf_bounds(r: float) -> tuple[float, float]:
    """Upper bounds on DDF in the parallel network.

    Returns ``(upper, split_stream)``: ``2 - 2r`` from the event that neither
    relay decodes, and ``(1 - r/2)^+`` when the stream is split in two halves
    of rate ``r/2`` each.
    """
    _check_r(r)
    return _pos(2 - 2 * r), _pos(1 - r / 2)


# ---------------------------------------------------------------------------
# Per-regime DDF optimum tables for c < a < b
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DdfCaseRow:
    """One row of the DDF per-regime table.

    ``t_range`` is the listen-fraction interval of the row after clipping to
    ``[r/a, 1]``; ``optimizer`` is the minimising exponent point at ``t_star``.
    """

    regime: str
    t_range: tuple[float, float]
    optimizer_form: str
    optimizer: ExponentPoint
    t_star: float
    s_form: str
    s_value: float


@dataclass(frozen=True)
class _RowTemplate:
    lo: str
    hi: str
    form: str
    t_star: str
    s_form: str


# Listen-fraction breakpoints, as functions of (a, b, c, r).
_BREAKS: dict[str, Callable[[float, float, float, float], float]] = {
    "r/a": lambda a, b, c, r: r / a,
    "1/2": lambda a, b, c, r: 0.5,
    "1-r/b": lambda a, b, c, r: 1 - r / b,
    "(b-r)/(b-c)": lambda a, b, c, r: (b - r) / (b - c),
    "1": lambda a, b, c, r: 1.0,
}


def _opt_point(form: str, a: float, b: float, c: float, r: float, t: float) -> ExponentPoint:
    # alpha = r/t with the relay listening exactly long enough to decode; t = r/a gives alpha = a
    alpha = a if t <= r / a else r / t
    if form == "(r/t,r,r)":
        return ExponentPoint(alpha, r, r)
    if form == "(r/t,r/(1-t),0)":
        return ExponentPoint(alpha, r / (1 - t) if t < 1 else b, 0.0)
    if form == "(r/t,b,b-(b-r)/t)":
        return ExponentPoint(alpha, b, b - (b - r) / t)
    if form == "(r/t,(r-tc)/(1-t),c)":
        return ExponentPoint(alpha, (r - t * c) / (1 - t), c)
    if form == "(r/t,b,c)":
        return ExponentPoint(alpha, b, c)
    raise KeyError(form)


_LOW = _RowTemplate("r/a", "1/2", "(r/t,r,r)", "r/a", "b+c-2r")
_MID0 = _RowTemplate("1/2", "1-r/b", "(r/t,r/(1-t),0)", "1-r/b", "a+c-br/(b-r)")
_MID0_FROM_START = _RowTemplate("r/a", "1-r/b", "(r/t,r/(1-t),0)", "1-r/b", "a+c-br/(b-r)")
_HIGH_TO_ONE = _RowTemplate("1-r/b", "1", "(r/t,b,b-(b-r)/t)", "1", "a+c-2r")
_FULL_TO_ONE = _RowTemplate("r/a", "1", "(r/t,b,b-(b-r)/t)", "1", "a+c-2r")
_LOW_C = _RowTemplate("r/a", "1/2", "(r/t,(r-tc)/(1-t),c)", "r/a", "b-(a-c)r/(a-r)")
_BEND = _RowTemplate("1-r/b", "(b-r)/(b-c)", "(r/t,b,b-(b-r)/t)", "(b-r)/(b-c)", "a-(b-c)r/(b-r)")
_BEND_FROM_START = _RowTemplate("r/a", "(b-r)/(b-c)", "(r/t,b,b-(b-r)/t)", "(b-r)/(b-c)", "a-(b-c)r/(b-r)")
_BEND_AT_START = _RowTemplate("r/a", "(b-r)/(b-c)", "(r/t,b,b-(b-r)/t)", "r/a", "ab/r-a-b+c")
_FULL_AT_START = _RowTemplate("r/a", "1", "(r/t,b,b-(b-r)/t)", "r/a", "ab/r-a-b+c")
_BC = _RowTemplate("(b-r)/(b-c)", "1", "(r/t,b,c)", "(b-r)/(b-c)", "a-(b-c)r/(b-r)")

_LOW_RATE = [_LOW, _MID0, _HIGH_TO_ONE]
_PAST_HALF_A = [_MID0_FROM_START, _HIGH_TO_ONE]
_MID_RATE = [_LOW_C, _MID0, _BEND, _BC]
_MID_RATE_PAST_HALF_A = [_MID0_FROM_START, _BEND, _BC]
_UPPER_MID = [_BEND_FROM_START, _BC]
_HIGH_RATE = [_BEND_AT_START, _BC]

# (c-regime test, [(r-regime label, r-regime test, rows)]) in table order.
_TABLE = [
    (
        "c<=a/2",
        lambda a, b, c: c <= a / 2,
        [
            ("r<c", lambda a, b, c, r: r <= c, _LOW_RATE),
            ("c<r<a/2", lambda a, b, c, r: r <= a / 2, _MID_RATE),
            ("a/2<r<ab/(a+b)", lambda a, b, c, r: r <= a * b / (a + b), _MID_RATE_PAST_HALF_A),
            ("ab/(a+b)<r<b/2", lambda a, b, c, r: r <= b / 2, _UPPER_MID),
            ("b/2<r", lambda a, b, c, r: True, _HIGH_RATE),
        ],
    ),
    (
        "a/2<c<=ab/(a+b)",
        lambda a, b, c: c <= a * b / (a + b),
        [
            ("r<a/2", lambda a, b, c, r: r <= a / 2, _LOW_RATE),
            ("a/2<r<c", lambda a, b, c, r: r <= c, _PAST_HALF_A),
            ("c<r<ab/(a+b)", lambda a, b, c, r: r <= a * b / (a + b), _MID_RATE_PAST_HALF_A),
            ("ab/(a+b)<r<b/2", lambda a, b, c, r: r <= b / 2, _UPPER_MID),
            ("b/2<r", lambda a, b, c, r: True, _HIGH_RATE),
        ],
    ),
    (
        "ab/(a+b)<c<=b/2",
        lambda a, b, c: c <= b / 2,
        [
            ("r<a/2", lambda a, b, c, r: r <= a / 2, _LOW_RATE),
            ("a/2<r<ab/(a+b)", lambda a, b, c, r: r <= a * b / (a + b), _PAST_HALF_A),
            ("ab/(a+b)<r<c", lambda a, b, c, r: r <= c, [_FULL_TO_ONE]),
            ("c<r<b/2", lambda a, b, c, r: r <= b / 2, _UPPER_MID),
            ("b/2<r", lambda a, b, c, r: True, _HIGH_RATE),
        ],
    ),
    (
        "b/2<c",
        lambda a, b, c: True,
        [
            ("r<a/2", lambda a, b, c, r: r <= a / 2, _LOW_RATE),
            ("a/2<r<ab/(a+b)", lambda a, b, c, r: r <= a * b / (a + b), _PAST_HALF_A),
            ("ab/(a+b)<r<b/2", lambda a, b, c, r: r <= b / 2, [_FULL_TO_ONE]),
            ("b/2<r<c", lambda a, b, c, r: r <= c, [_FULL_AT_START]),
            ("c<r", lambda a, b, c, r: True, _HIGH_RATE),
        ],
    ),
]


def ddf_case_table(profile: ChannelProfile, r: float) -> list[DdfCaseRow]:
    """Rows of the DDF optimum table matching ``(a, b, c, r)``, for ``c < a < b``.

    Each row covers an interval of the relay's listen fraction ``t``; the
    listed optimizer is evaluated at the row's optimal ``t`` and scored with
    :func:`objective_s` (clamped at zero). The minimum ``s_value`` over the
    returned rows is the DDF diversity. When ``r >= a`` the relay can never
    decode and a single row for that event is returned.

    Raises:
        OutOfRegimeError: unless ``c < a < b``.
    """
    p = as_profile(profile)
    _check_r(r)
    a, b, c = p.as_tuple()
    if not (c < a < b):
        raise OutOfRegimeError(f"DDF tables cover c < a < b only; got {p.as_tuple()}")

    if r >= a:
        # t = r/alpha > 1 for every alpha <= a: the relay never transmits
        pt = ExponentPoint(min(a, r), b, min(c, r))
        return [
            DdfCaseRow(
                regime="r>=a (relay never decodes)",
                t_range=(1.0, 1.0),
                optimizer_form="(min(a,r),b,min(c,r))",
                optimizer=pt,
                t_star=1.0,
                s_form="(a-r)^+ + (c-r)^+",
                s_value=max(objective_s(p, pt), 0.0),
            )
        ]

    for c_label, c_test, blocks in _TABLE:
        if not c_test(a, b, c):
            continue
        for r_label, r_test, templates in blocks:
            if r_test(a, b, c, r):
                return _rows(p, r, f"{c_label}, {r_label}", templates)
    raise AssertionError("unreachable: the last regime test always matches")


def _rows(p: ChannelProfile, r: float, regime: str, templates: Iterable[_RowTemplate]) -> list[DdfCaseRow]:
    a, b, c = p.as_tuple()
    start = r / a
    rows = []
    for tpl in templates:
        lo = max(_BREAKS[tpl.lo](a, b, c, r), start)
        hi = min(_BREAKS[tpl.hi](a, b, c, r), 1.0)
        if lo > hi + 1e-15:
            continue
        t_raw = _BREAKS[tpl.t_star](a, b, c, r)
        t_star = min(max(t_raw, lo), hi)
        pt = _opt_point(tpl.form, a, b, c, r, t_star)
        if tpl.form == "(r/t,r/(1-t),0)" and tpl.t_star == "1-r/b" and t_star == t_raw:
            # r/(1-t) at t = 1 - r/b is b; the division loses digits for small r
            pt = ExponentPoint(pt.alpha, b, 0.0)
        rows.append(
            DdfCaseRow(
                regime=f"{regime}, {tpl.lo}<t<{tpl.hi}",
                t_range=(lo, hi),
                optimizer_form=tpl.form,
                optimizer=pt,
                t_star=t_star,
                s_form=tpl.s_form,
                s_value=max(objective_s(p, pt), 0.0),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Curves
# ---------------------------------------------------------------------------


def closed_form_function(scheme: Scheme, profile: Optional[ChannelProfile] = None) -> Callable[[float], float]:
    """Bind a closed-form scheme to its profile, giving ``r -> d``."""
    scheme = Scheme(scheme)
    if scheme.is_parallel:
        table = {
            Scheme.PARALLEL_OPTIMAL: dmt_parallel_optimal,
            Scheme.PARALLEL_STATIC_QMF: dmt_parallel_static_qmf,
            Scheme.PARALLEL_DDF_UPPER: lambda r: dmt_parallel_ddf_bounds(r)[0],
            Scheme.PARALLEL_DDF_SPLIT: lambda r: dmt_parallel_ddf_bounds(r)[1],
        }
        if scheme not in table:
            raise KeyError(f"{scheme.value} has no closed form")
        return table[scheme]
    if profile is None:
        raise ValueError(f"{scheme.value} needs a channel profile")
    p = as_profile(profile)
    if scheme is Scheme.FULL_DUPLEX:
        return lambda r: dmt_full_duplex(p, r)
    if scheme is Scheme.STATIC_QMF_HALF:
        return lambda r: dmt_static_qmf(p, r)
    if scheme is Scheme.DDF:
        if p.c >= min(p.a, p.b):
            raise OutOfRegimeError("DDF closed form needs c < min(a,b)")
        return lambda r: dmt_ddf(p, r)
    if scheme is Scheme.FOUR_REGIME_OPTIMAL:
        if p.a != p.b:
            raise OutOfRegimeError("the four-regime optimum is only known for a == b")
        return lambda r: dmt_theorem1(p.a, p.c, r)
    raise KeyError(f"{scheme.value} has no closed form")


def closed_form_curve(scheme: Scheme, r_values, profile: Optional[ChannelProfile] = None) -> DmtCurve:
    scheme = Scheme(scheme)
    fn = closed_form_function(scheme, profile)
    r_values = np.asarray(r_values, dtype=float)
    d = np.array([fn(float(r)) for r in r_values])
    prof = UNIT_PARALLEL_PROFILE if scheme.is_parallel else as_profile(profile)
    note = ""
    if scheme is Scheme.DDF and ddf_formula_unverified(prof):
        note = "a > b: closed form evaluated as written, not covered by the per-regime tables"
    return DmtCurve(scheme, prof, r_values, d, method="closed", note=note)

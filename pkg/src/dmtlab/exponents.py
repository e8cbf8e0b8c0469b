"""Shared domain types and the scalar exponent kernels.

Every quantity here lives at the "exponential order" scale: an average or
instantaneous SNR ``rho**x`` is represented by its exponent ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

# Absolute slack applied to every ``<=`` feasibility test.
FEAS_EPS = 1e-12

# Margin for the parallel DQMF region, which is tested strictly (see dqmf_parallel_in_outage).
DQMF_MARGIN = 1e-9


@dataclass(frozen=True)
class ChannelProfile:
    """Average-SNR exponents of the single-relay channel.

    ``a`` is source-relay, ``b`` relay-destination, ``c`` source-destination.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"profile exponent {name}={v!r} must be finite and >= 0")
            object.__setattr__(self, name, v)

    @classmethod
    def symmetric(cls, p: float, c: float) -> "ChannelProfile":
        return cls(p, p, c)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    @property
    def total(self) -> float:
        return self.a + self.b + self.c


def as_profile(profile) -> ChannelProfile:
    if isinstance(profile, ChannelProfile):
        return profile
    a, b, c = profile
    return ChannelProfile(float(a), float(b), float(c))


@dataclass(frozen=True)
class ExponentPoint:
    """Instantaneous SNR exponents.

    Single relay: ``(alpha, beta, gamma)`` for the S-R, R-D and S-D links.
    Parallel network: ``(alpha, beta, gamma, delta)`` for S-R1, R1-D, S-R2, R2-D.
    """

    alpha: float
    beta: float
    gamma: float
    delta: Optional[float] = None

    @property
    def is_parallel(self) -> bool:
        return self.delta is not None

    def as_tuple(self) -> tuple:
        if self.delta is None:
            return (self.alpha, self.beta, self.gamma)
        return (self.alpha, self.beta, self.gamma, self.delta)

    def in_box(self, profile: Optional[ChannelProfile] = None, eps: float = FEAS_EPS) -> bool:
        """Check membership in the nonnegative search box.

        The parallel box is ``[0, 1]**4``; the single-relay box is
        ``[0,a] x [0,b] x [0,c]`` and needs ``profile``.
        """
        if self.is_parallel:
            uppers = (1.0, 1.0, 1.0, 1.0)
        else:
            if profile is None:
                raise ValueError("single-relay box needs a profile")
            uppers = profile.as_tuple()
        return all(-eps <= v <= u + eps for v, u in zip(self.as_tuple(), uppers))


# Plain aliases; r and d are carried as floats throughout.
MultiplexingGain = float
DiversityValue = float


@dataclass(frozen=True)
class GridSpec:
    """Pitch of the brute-force exponent grid and of the schedule grid.

    Box bounds come from the profile; both endpoints are always included.
    """

    step: float = 0.005
    t_step: float = 0.01

    def __post_init__(self):
        for name in ("step", "t_step"):
            v = getattr(self, name)
            if not (0 < v <= 0.1):
                raise ValueError(f"{name}={v!r} must lie in (0, 0.1]")

    def axis(self, upper: float) -> np.ndarray:
        return grid_axis(upper, self.step)

    def t_axis(self) -> np.ndarray:
        return grid_axis(1.0, self.t_step)


def grid_axis(upper: float, step: float) -> np.ndarray:
    """Points ``0, step, 2*step, ...`` up to ``upper``, with ``upper`` itself included."""
    if upper < 0:
        raise ValueError("axis upper bound must be >= 0")
    if upper == 0:
        return np.zeros(1)
    n = int(math.floor(upper / step + 1e-9))
    pts = step * np.arange(n + 1, dtype=float)
    pts = pts[pts <= upper]
    if upper - pts[-1] > 1e-9 * max(1.0, upper):
        pts = np.append(pts, upper)
    else:
        pts[-1] = upper
    return pts


def _check_schedule(t: float) -> None:
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"schedule t={t!r} must lie in [0, 1]")


def objective_s(profile: ChannelProfile, pt: ExponentPoint) -> float:
    """Outage exponent ``a + b + c - alpha - beta - gamma`` of a single-relay point."""
    if pt.is_parallel:
        raise ValueError("objective_s takes a single-relay point; got a parallel-network point")
    return profile.a + profile.b + profile.c - pt.alpha - pt.beta - pt.gamma


def objective_parallel(pt: ExponentPoint) -> float:
    """Outage exponent ``4 - alpha - beta - gamma - delta`` of the unit parallel network."""
    if not pt.is_parallel:
        raise ValueError("objective_parallel takes a parallel-network point")
    return 4.0 - pt.alpha - pt.beta - pt.gamma - pt.delta


def rate_fd(pt: ExponentPoint) -> float:
    """Full-duplex cutset multiplexing rate ``min(max(alpha,gamma), max(beta,gamma))``."""
    if pt.is_parallel:
        raise ValueError("rate_fd takes a single-relay point")
    return min(max(pt.alpha, pt.gamma), max(pt.beta, pt.gamma))


def rate_hd(t: float, pt: ExponentPoint) -> float:
    """Half-duplex cutset multiplexing rate when the relay listens a fraction ``t``.

    ``min{t*max(alpha,gamma) + (1-t)*gamma, t*gamma + (1-t)*max(beta,gamma)}``
    """
    _check_schedule(t)
    if pt.is_parallel:
        raise ValueError("rate_hd takes a single-relay point")
    a, b, g = pt.alpha, pt.beta, pt.gamma
    return min(t * max(a, g) + (1 - t) * g, t * g + (1 - t) * max(b, g))


def rate_hd_global(pt: ExponentPoint) -> float:
    """``max_t rate_hd(t, pt)``: the rate when the listen fraction sees every link.

    For ``gamma < min(alpha, beta)`` the two cuts are equalised at
    ``t = (beta-gamma)/(alpha+beta-2*gamma)``; otherwise the rate does not
    depend on ``t`` and equals the full-duplex cut value.
    """
    a, b, g = pt.alpha, pt.beta, pt.gamma
    if g < min(a, b):
        return (a * b - g * g) / (a + b - 2 * g)
    return min(max(a, g), max(b, g))


def rate_parallel(t1: float, t2: float, pt: ExponentPoint) -> float:
    """Parallel-network rate ``min(t1*alpha,(1-t1)*beta) + min(t2*gamma,(1-t2)*delta)``."""
    _check_schedule(t1)
    _check_schedule(t2)
    if not pt.is_parallel:
        raise ValueError("rate_parallel takes a parallel-network point (delta missing)")
    return min(t1 * pt.alpha, (1 - t1) * pt.beta) + min(t2 * pt.gamma, (1 - t2) * pt.delta)


def rate_parallel_global(pt: ExponentPoint) -> float:
    """``max_{t1,t2} rate_parallel``: each hop pair balanced, ``xy/(x+y)`` per path (0/0 -> 0)."""
    if not pt.is_parallel:
        raise ValueError("rate_parallel_global takes a parallel-network point")
    return _harmonic(pt.alpha, pt.beta) + _harmonic(pt.gamma, pt.delta)


def _harmonic(x: float, y: float) -> float:
    s = x + y
    return 0.0 if s <= 0 else x * y / s


def ddf_in_outage(r: float, pt: ExponentPoint, eps: float = FEAS_EPS) -> bool:
    """Dynamic decode-and-forward outage test at exponent scale.

    The relay listens ``t = r/alpha``. Outage when it never decodes
    (``alpha <= r``, including ``alpha = 0``) and the direct link is short
    (``gamma <= r``), or when it decodes and the destination-side cut
    ``t*gamma + (1-t)*max(gamma,beta)`` stays below ``r``.
    """
    a, b, g = pt.alpha, pt.beta, pt.gamma
    if a <= r + eps and g <= r + eps:
        return True
    if a <= 0 or r > a + eps:
        return False
    t = min(r / a, 1.0)
    return t * g + (1 - t) * max(g, b) <= r + eps


def dqmf_parallel_rate(r: float, pt: ExponentPoint) -> float:
    """Left side of the parallel DQMF outage test, listen times ``t_i = 1 - x_i(1-r)``.

    Returns ``alpha*min(1/(1-r)-alpha, beta) + gamma*min(1/(1-r)-gamma, delta)``,
    to be compared with ``r/(1-r)``.
    """
    if not pt.is_parallel:
        raise ValueError("dqmf_parallel_rate takes a parallel-network point")
    k = 1.0 / (1.0 - r)
    return pt.alpha * min(k - pt.alpha, pt.beta) + pt.gamma * min(k - pt.gamma, pt.delta)


def dqmf_parallel_in_outage(r: float, pt: ExponentPoint) -> bool:
    """Parallel DQMF outage test.

    The closed test ``dqmf_parallel_rate <= r/(1-r)`` admits isolated points
    such as ``(1, 1, 1, 0)``: at ``alpha = 1`` the first path delivers exactly
    ``r`` and every neighbouring point is out of outage, so the point has no
    weight at high SNR. The test is therefore strict (with a margin of
    ``DQMF_MARGIN``); a point where both paths have a dead hop is always in
    outage, which keeps the zero-rate limit.
    """
    if not 0 <= r < 1:
        raise ValueError("parallel DQMF needs 0 <= r < 1")
    dead1 = pt.alpha == 0 or pt.beta == 0
    dead2 = pt.gamma == 0 or pt.delta == 0
    if dead1 and dead2:
        return True
    return dqmf_parallel_rate(r, pt) <= r / (1.0 - r) - DQMF_MARGIN

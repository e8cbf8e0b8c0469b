"""Finite-SNR outage simulation under Rayleigh fading.

Channel gains ``|h|**2`` are unit-mean exponentials. Samples are generated in
fixed blocks of ``BLOCK`` indices, each block from its own RNG stream keyed by
``(seed, block index)``, so the value at a global sample index never depends
on how the index range is split up. Outage counting streams over blocks and
stores nothing per sample.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .exponents import ChannelProfile, as_profile
from .solvers import ScheduleRule

BLOCK = 1 << 16
LN2 = math.log(2.0)
MIN_SAMPLES = 10_000
MIN_HITS = 100

SINGLE_GAINS = ("g_sr", "g_rd", "g_sd")
PARALLEL_GAINS = ("g_sr1", "g_sr2", "g_r1d", "g_r2d")


@dataclass(frozen=True)
class FadingSample:
    g_sr: float
    g_rd: float
    g_sd: float


@dataclass(frozen=True)
class ParallelFadingSample:
    g_sr1: float
    g_sr2: float
    g_r1d: float
    g_r2d: float


@dataclass
class FadingBatch:
    """A contiguous run of samples, one array per gain."""

    start: int
    gains: dict
    parallel: bool

    def __len__(self) -> int:
        return len(next(iter(self.gains.values())))

    def __getattr__(self, name):
        gains = self.__dict__.get("gains", {})
        if name in gains:
            return gains[name]
        raise AttributeError(name)

    def sample(self, i: int):
        """The ``i``-th sample of the batch as a scalar record."""
        vals = {k: float(v[i]) for k, v in self.gains.items()}
        return ParallelFadingSample(**vals) if self.parallel else FadingSample(**vals)


def _block(seed: int, k: int, n_gains: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))
    return rng.standard_exponential((BLOCK, n_gains))


def iter_fading(n: int, seed: int, parallel: bool = False, start: int = 0) -> Iterator[FadingBatch]:
    """Stream samples ``start .. start+n-1`` as batches of at most ``BLOCK``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if seed < 0:
        raise ValueError("seed must be >= 0")
    names = PARALLEL_GAINS if parallel else SINGLE_GAINS
    stop = start + n
    pos = start
    while pos < stop:
        k, off = divmod(pos, BLOCK)
        take = min(BLOCK - off, stop - pos)
        raw = _block(seed, k, len(names))[off : off + take]
        yield FadingBatch(pos, {name: raw[:, i] for i, name in enumerate(names)}, parallel)
        pos += take


def sample_fading(n: int, seed: int, parallel: bool = False, start: int = 0) -> FadingBatch:
    """All ``n`` samples from ``start`` in one batch (use :func:`iter_fading` for large ``n``)."""
    parts = list(iter_fading(n, seed, parallel, start))
    gains = {k: np.concatenate([b.gains[k] for b in parts]) for k in parts[0].gains}
    return FadingBatch(start, gains, parallel)


@dataclass(frozen=True)
class SnrPoint:
    rho_db: float

    def __post_init__(self):
        if not math.isfinite(self.rho_db):
            raise ValueError("rho_db must be finite")

    @property
    def rho(self) -> float:
        return 10.0 ** (self.rho_db / 10.0)

    @property
    def log2_rho(self) -> float:
        return self.rho_db / 10.0 * math.log2(10.0)


def _g(sample, name):
    return np.asarray(getattr(sample, name), dtype=float)


def _log2_1p(x):
    return np.log1p(x) / LN2


def _rd_coherent(profile: ChannelProfile, sample, rho: float):
    # (sqrt(g_rd) rho^{b/2} + sqrt(g_sd) rho^{c/2})^2
    return (np.sqrt(_g(sample, "g_rd")) * rho ** (profile.b / 2) + np.sqrt(_g(sample, "g_sd")) * rho ** (profile.c / 2)) ** 2


def rate_p2p(profile: ChannelProfile, sample, rho: float):
    """Single link of exponent ``a`` over the S-R gain: ``log2(1 + g_sr rho^a)``."""
    p = as_profile(profile)
    return _log2_1p(_g(sample, "g_sr") * rho**p.a)


def rate_fd_cutset(profile: ChannelProfile, sample, rho: float):
    """Full-duplex cutset bound in bits."""
    p = as_profile(profile)
    bc = _log2_1p(_g(sample, "g_sr") * rho**p.a + _g(sample, "g_sd") * rho**p.c)
    mac = _log2_1p(_rd_coherent(p, sample, rho))
    return np.minimum(bc, mac)


def rate_hd_cutset(profile: ChannelProfile, sample, rho: float, t):
    """Half-duplex cutset bound when the relay listens a fraction ``t`` (scalar or per sample)."""
    p = as_profile(profile)
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise ValueError("schedule t must lie in [0, 1]")
    direct = _log2_1p(_g(sample, "g_sd") * rho**p.c)
    bc = _log2_1p(_g(sample, "g_sr") * rho**p.a + _g(sample, "g_sd") * rho**p.c)
    mac = _log2_1p(_rd_coherent(p, sample, rho))
    return np.minimum(t * bc + (1 - t) * direct, t * direct + (1 - t) * mac)


def rate_parallel_cutset(sample, rho: float, t1, t2):
    """Parallel-network cutset bound in bits (unit average exponents)."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    if np.any((t1 < 0) | (t1 > 1) | (t2 < 0) | (t2 > 1)):
        raise ValueError("schedules must lie in [0, 1]")
    p1 = np.minimum(t1 * _log2_1p(_g(sample, "g_sr1") * rho), (1 - t1) * _log2_1p(_g(sample, "g_r1d") * rho))
    p2 = np.minimum(t2 * _log2_1p(_g(sample, "g_sr2") * rho), (1 - t2) * _log2_1p(_g(sample, "g_r2d") * rho))
    return p1 + p2


def empirical_exponent(g, rho: float, upper: float = 1.0, avg_exponent: float = 1.0):
    """``log(g rho^avg_exponent) / log(rho)`` clamped to ``[0, upper]``."""
    with np.errstate(divide="ignore"):
        x = (np.log(np.asarray(g, float)) + avg_exponent * math.log(rho)) / math.log(rho)
    return np.clip(x, 0.0, upper)


class McKind(str, enum.Enum):
    P2P = "p2p"
    FD_CUTSET = "fd-cutset"
    HD_STATIC = "hd-static"
    HD_RULE = "hd-rule"
    DDF = "ddf"
    DQMF_PARALLEL = "dqmf-parallel"
    PARALLEL_STATIC = "parallel-static"


@dataclass(frozen=True)
class McScheme:
    """What to simulate: a rate expression plus its listen schedule."""

    kind: McKind
    t: float = 0.5
    t2: float = 0.5
    rule: Optional[ScheduleRule] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", McKind(self.kind))
        if self.kind is McKind.HD_RULE and self.rule is None:
            raise ValueError("hd-rule needs a ScheduleRule")
        for v in (self.t, self.t2):
            if not 0 <= v <= 1:
                raise ValueError("schedules must lie in [0, 1]")

    @property
    def parallel(self) -> bool:
        return self.kind in (McKind.DQMF_PARALLEL, McKind.PARALLEL_STATIC)

    @property
    def label(self) -> str:
        if self.kind is McKind.HD_STATIC:
            return f"hd-static(t={self.t:g})"
        if self.kind is McKind.PARALLEL_STATIC:
            return f"parallel-static(t1={self.t:g},t2={self.t2:g})"
        return self.kind.value


def outage_mask(scheme: McScheme, profile: ChannelProfile, r: float, rho: float, batch) -> np.ndarray:
    """Per-sample outage indicator: the scheme's rate expression falls below ``r log2 rho``."""
    p = as_profile(profile)
    target = r * math.log2(rho)
    k = scheme.kind
    if k is McKind.P2P:
        return rate_p2p(p, batch, rho) < target
    if k is McKind.FD_CUTSET:
        return rate_fd_cutset(p, batch, rho) < target
    if k is McKind.HD_STATIC:
        return rate_hd_cutset(p, batch, rho, scheme.t) < target
    if k is McKind.HD_RULE:
        alpha = empirical_exponent(batch.g_sr, rho, upper=p.a, avg_exponent=p.a)
        return rate_hd_cutset(p, batch, rho, scheme.rule(r, alpha)) < target
    if k is McKind.DDF:
        sr = _log2_1p(batch.g_sr * rho**p.a)
        direct = _log2_1p(batch.g_sd * rho**p.c)
        mac = _log2_1p(_rd_coherent(p, batch, rho))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(sr > 0, target / np.where(sr > 0, sr, 1.0), np.inf)
        never = (t > 1) & (direct < target)
        tc = np.minimum(t, 1.0)
        decoded = (t <= 1) & (tc * direct + (1 - tc) * mac < target)
        return never | decoded
    if k is McKind.DQMF_PARALLEL:
        t1 = 1 - empirical_exponent(batch.g_sr1, rho) * (1 - r)
        t2 = 1 - empirical_exponent(batch.g_sr2, rho) * (1 - r)
        return rate_parallel_cutset(batch, rho, np.clip(t1, 0, 1), np.clip(t2, 0, 1)) < target
    if k is McKind.PARALLEL_STATIC:
        return rate_parallel_cutset(batch, rho, scheme.t, scheme.t2) < target
    raise KeyError(k)


@dataclass(frozen=True)
class OutageEstimate:
    snr: SnrPoint
    rate_bits: float
    p_out: float
    n_samples: int
    ci95_halfwidth: float
    hits: int

    @property
    def zero(self) -> bool:
        """No outage observed; such points are excluded from slope fits."""
        return self.hits == 0

    @classmethod
    def from_counts(cls, snr: SnrPoint, r: float, hits: int, n: int) -> "OutageEstimate":
        p = hits / n
        return cls(snr, r * snr.log2_rho, p, n, 1.96 * math.sqrt(p * (1 - p) / n), hits)


def _check_n(n: int) -> None:
    if n < MIN_SAMPLES:
        raise ValueError(f"n={n} is below the minimum of {MIN_SAMPLES} samples")


def estimate_ladder(
    scheme: McScheme,
    profile: Optional[ChannelProfile],
    r: float,
    snrs: Sequence[SnrPoint],
    n: int,
    seed: int,
) -> list[OutageEstimate]:
    """Outage estimates at every SNR, all from the same ``n`` samples."""
    _check_n(n)
    if r < 0:
        raise ValueError("r must be >= 0")
    if scheme.kind is McKind.DQMF_PARALLEL and r >= 1:
        raise ValueError("dqmf-parallel needs r < 1")
    snrs = [s if isinstance(s, SnrPoint) else SnrPoint(float(s)) for s in snrs]
    p = ChannelProfile(1.0, 1.0, 1.0) if profile is None else as_profile(profile)
    hits = [0] * len(snrs)
    for batch in iter_fading(n, seed, parallel=scheme.parallel):
        for i, snr in enumerate(snrs):
            hits[i] += int(np.count_nonzero(outage_mask(scheme, p, r, snr.rho, batch)))
    return [OutageEstimate.from_counts(snr, r, h, n) for snr, h in zip(snrs, hits)]


def estimate_outage(
    scheme: McScheme, profile: Optional[ChannelProfile], r: float, snr: SnrPoint, n: int, seed: int
) -> OutageEstimate:
    """Monte Carlo outage frequency at one SNR."""
    return estimate_ladder(scheme, profile, r, [snr], n, seed)[0]


def p2p_outage_exact(a: float, r: float, rho: float) -> float:
    """Exact outage of the single Rayleigh link: ``1 - exp(-(rho^r - 1)/rho^a)``."""
    return -math.expm1(-(rho**r - 1.0) / rho**a)


class FitError(ValueError):
    """Slope-fit preconditions not met."""


@dataclass(frozen=True)
class SlopeFit:
    diversity_estimate: float
    intercept: float
    r_squared: float
    points_used: int


def fit_diversity(estimates: Sequence[OutageEstimate], min_hits: int = MIN_HITS) -> SlopeFit:
    """Least-squares slope of ``log10 p_out`` against ``log10 rho``; diversity is minus the slope.

    Points with no outage or fewer than ``min_hits`` expected hits
    (``n * p_out``) are dropped first.

    Raises:
        FitError: fewer than 3 usable points, or all at one SNR.
    """
    used = [e for e in estimates if e.p_out > 0 and e.n_samples * e.p_out >= min_hits]
    if len(used) < 3:
        raise FitError(f"need >= 3 SNR points with >= {min_hits} outage hits, have {len(used)}")
    x = np.array([e.snr.rho_db / 10.0 for e in used])
    if np.ptp(x) == 0:
        raise FitError("all usable points share one SNR; slope is undefined")
    y = np.log10([e.p_out for e in used])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(float(-slope), float(intercept), r2, len(used))

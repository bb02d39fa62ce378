"""Monte Carlo outage probability of the double-scattering channel.

The channel is H = Phi_R^(1/2) H1 Phi_S^(1/2) H2 Phi_T^(1/2) with fresh
i.i.d. complex Gaussian hops each trial; an outage at multiplexing gain r
is mutual information <= r * ln(SNR) nats.  Trials are simulated in fixed
blocks, each block on its own RNG stream keyed by (snr index, block index),
so outage counts are bit-reproducible and independent of the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dmt_core import ChannelTriple
from .randmat import CorrelationMatrix, complex_gaussian, identity_correlation, stream

__all__ = [
    "BLOCK_TRIALS",
    "InsufficientDataError",
    "ChannelSpec",
    "SimConfig",
    "OutageEstimate",
    "SlopeFit",
    "make_channel_spec",
    "default_normalization",
    "draw_channel",
    "mutual_information_nats",
    "estimate_outage",
    "run_simulation",
    "fit_slope",
    "correlation_invariance_experiment",
    "estimates_csv_lines",
]

BLOCK_TRIALS = 4096  # trials per RNG stream; fixed so counts don't depend on workers
MIN_EVENTS_FOR_FIT = 20
_WILSON_Z = 1.959963984540054  # two-sided 95%


class InsufficientDataError(RuntimeError):
    """Fewer than two SNR points carry enough outage events to fit a slope."""


@dataclass(frozen=True)
class ChannelSpec:
    """Channel dimensions, per-node correlations, and the SNR normalization C."""

    triple: ChannelTriple
    phi_t: CorrelationMatrix
    phi_s: CorrelationMatrix
    phi_r: CorrelationMatrix
    c_norm: float

    def __post_init__(self):
        t = self.triple
        dims = (self.phi_t.dim, self.phi_s.dim, self.phi_r.dim)
        if dims != t.as_tuple():
            raise ValueError(f"correlation dims {dims} do not match triple {t.as_tuple()}")
        if not self.c_norm > 0:
            raise ValueError(f"c_norm must be positive, got {self.c_norm}")


def default_normalization(triple: ChannelTriple, phi_t, phi_s, phi_r) -> float:
    """C = n_r / (tr Phi_T * tr Phi_S * tr Phi_R).

    Makes SNR the average per-receive-antenna SNR; reduces to 1/(n_s*n_t)
    for unit-diagonal correlations.
    """
    return triple.n_r / (phi_t.trace * phi_s.trace * phi_r.trace)


def make_channel_spec(triple, phi_t=None, phi_s=None, phi_r=None, c_norm=None) -> ChannelSpec:
    """ChannelSpec with identity correlations and default C unless overridden."""
    if not isinstance(triple, ChannelTriple):
        triple = ChannelTriple(*triple)
    phi_t = phi_t if phi_t is not None else identity_correlation(triple.n_t)
    phi_s = phi_s if phi_s is not None else identity_correlation(triple.n_s)
    phi_r = phi_r if phi_r is not None else identity_correlation(triple.n_r)
    if c_norm is None:
        c_norm = default_normalization(triple, phi_t, phi_s, phi_r)
    return ChannelSpec(triple=triple, phi_t=phi_t, phi_s=phi_s, phi_r=phi_r, c_norm=c_norm)


@dataclass(frozen=True)
class SimConfig:
    spec: ChannelSpec
    snr_grid_db: tuple[float, ...]
    r: float
    trials: int
    seed: int
    workers: int = 1

    def __post_init__(self):
        grid = tuple(float(v) for v in self.snr_grid_db)
        if len(grid) == 0 or any(a >= b for a, b in zip(grid, grid[1:])):
            raise ValueError(f"snr grid must be strictly ascending, got {grid}")
        object.__setattr__(self, "snr_grid_db", grid)
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.r < 0:
            raise ValueError(f"r must be nonnegative, got {self.r}")


@dataclass(frozen=True)
class OutageEstimate:
    snr_db: float
    p_out: float
    ci_low: float
    ci_high: float
    outage_count: int
    trials: int


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    points_used: int


def _draw_block(spec: ChannelSpec, count: int, rng) -> np.ndarray:
    """count channel matrices, shape (count, n_r, n_t); H1 is drawn before H2."""
    t = spec.triple
    h1 = complex_gaussian((count, t.n_r, t.n_s), rng)
    h2 = complex_gaussian((count, t.n_s, t.n_t), rng)
    return spec.phi_r.sqrt @ h1 @ spec.phi_s.sqrt @ h2 @ spec.phi_t.sqrt


def draw_channel(spec: ChannelSpec, rng) -> np.ndarray:
    """One n_r x n_t realization of the double-scattering channel."""
    return _draw_block(spec, 1, rng)[0]


def mutual_information_nats(h: np.ndarray, snr: float, c_norm: float) -> float:
    """ln det(I + snr * c_norm * H H^dagger) via a self-adjoint factorization."""
    h = np.asarray(h)
    if not np.all(np.isfinite(h.real)) or not np.all(np.isfinite(h.imag)):
        raise ValueError("channel matrix has non-finite entries")
    if snr <= 0:
        raise ValueError(f"snr must be positive, got {snr}")
    sv = np.linalg.svd(h, compute_uv=False)
    return float(np.sum(np.log1p(snr * c_norm * sv**2)))


def _mutual_information_block(hs: np.ndarray, gain: float) -> np.ndarray:
    # Gram matrix on the smaller side keeps the eigenproblem cheap.
    if hs.shape[1] <= hs.shape[2]:
        gram = hs @ np.conj(np.swapaxes(hs, 1, 2))
    else:
        gram = np.conj(np.swapaxes(hs, 1, 2)) @ hs
    eig = np.clip(np.linalg.eigvalsh(gram), 0.0, None)
    return np.sum(np.log1p(gain * eig), axis=1)


def _count_block(spec: ChannelSpec, r: float, snr: float, seed: int,
                 snr_index: int, block_index: int, count: int) -> int:
    rng = stream(seed, (snr_index, block_index))
    hs = _draw_block(spec, count, rng)
    mi = _mutual_information_block(hs, snr * spec.c_norm)
    return int(np.sum(mi <= r * math.log(snr)))


def _block_args(cfg: SimConfig, snr_db: float, snr_index: int):
    snr = 10.0 ** (snr_db / 10.0)
    done = 0
    block = 0
    while done < cfg.trials:
        count = min(BLOCK_TRIALS, cfg.trials - done)
        yield (cfg.spec, cfg.r, snr, cfg.seed, snr_index, block, count)
        done += count
        block += 1


def wilson_interval(count: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    p = count / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    lo = 0.0 if count == 0 else max(center - half, 0.0)
    hi = 1.0 if count == trials else min(center + half, 1.0)
    return lo, hi


def estimate_outage(cfg: SimConfig, snr_db: float) -> OutageEstimate:
    """Outage probability at one grid point, with a 95% Wilson interval.

    The point must belong to cfg.snr_grid_db: the grid position keys the RNG
    streams, which is what makes counts reproducible and worker-invariant.
    """
    matches = [i for i, v in enumerate(cfg.snr_grid_db) if abs(v - snr_db) < 1e-9]
    if not matches:
        raise ValueError(f"snr {snr_db} dB is not on the configured grid {cfg.snr_grid_db}")
    snr_index = matches[0]
    args = list(_block_args(cfg, snr_db, snr_index))
    if cfg.workers == 1 or len(args) == 1:
        counts = [_count_block(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            counts = list(pool.map(_count_block, *zip(*args), chunksize=8))
    total = int(sum(counts))
    lo, hi = wilson_interval(total, cfg.trials)
    return OutageEstimate(
        snr_db=float(snr_db),
        p_out=total / cfg.trials,
        ci_low=lo,
        ci_high=hi,
        outage_count=total,
        trials=cfg.trials,
    )


def run_simulation(cfg: SimConfig) -> list[OutageEstimate]:
    return [estimate_outage(cfg, snr_db) for snr_db in cfg.snr_grid_db]


def fit_slope(estimates) -> SlopeFit:
    """Least-squares slope of -log10(p_out) against log10(SNR).

    Points with fewer than MIN_EVENTS_FOR_FIT outage events are dropped as
    too noisy; at least two usable points are required.
    """
    from scipy import stats

    usable = [e for e in estimates if e.outage_count >= MIN_EVENTS_FOR_FIT]
    if len(usable) < 2:
        raise InsufficientDataError(
            f"need >= 2 points with >= {MIN_EVENTS_FOR_FIT} outage events, have {len(usable)}"
        )
    x = np.array([e.snr_db / 10.0 for e in usable])
    y = np.array([-math.log10(e.p_out) for e in usable])
    res = stats.linregress(x, y)
    return SlopeFit(slope=float(res.slope), stderr=float(res.stderr), points_used=len(usable))


@dataclass(frozen=True)
class PairedSlopes:
    identity: SlopeFit
    correlated: SlopeFit
    identity_estimates: tuple[OutageEstimate, ...]
    correlated_estimates: tuple[OutageEstimate, ...]


def correlation_invariance_experiment(triple, rho: float, r, snr_grid_db, trials: int,
                                      seed: int, workers: int = 1) -> PairedSlopes:
    """The same experiment with identity and exponential(rho) correlations.

    The runs share seed and streams (common random numbers), so the slope
    comparison isolates the effect of the correlation matrices.
    """
    if not 0 <= rho <= 0.9:
        raise ValueError(f"rho must lie in [0, 0.9], got {rho}")
    if not isinstance(triple, ChannelTriple):
        triple = ChannelTriple(*triple)
    results = []
    for corr in ("identity", "exponential"):
        if corr == "identity":
            spec = make_channel_spec(triple)
        else:
            from .randmat import exponential_correlation

            spec = make_channel_spec(
                triple,
                phi_t=exponential_correlation(triple.n_t, rho),
                phi_s=exponential_correlation(triple.n_s, rho),
                phi_r=exponential_correlation(triple.n_r, rho),
            )
        cfg = SimConfig(spec=spec, snr_grid_db=tuple(snr_grid_db), r=float(r),
                        trials=trials, seed=seed, workers=workers)
        estimates = run_simulation(cfg)
        results.append((fit_slope(estimates), tuple(estimates)))
    return PairedSlopes(
        identity=results[0][0],
        correlated=results[1][0],
        identity_estimates=results[0][1],
        correlated_estimates=results[1][1],
    )


def estimates_csv_lines(estimates, r: float) -> list[str]:
    """Per-point CSV rows: snr_db,rate_nats,trials,outages,p_out,ci_low,ci_high."""
    lines = ["snr_db,rate_nats,trials,outages,p_out,ci_low,ci_high"]
    for e in estimates:
        rate = r * math.log(10.0 ** (e.snr_db / 10.0))
        lines.append(
            f"{e.snr_db},{rate!r},{e.trials},{e.outage_count},{e.p_out!r},{e.ci_low!r},{e.ci_high!r}"
        )
    return lines

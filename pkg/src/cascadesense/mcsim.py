"""Monte Carlo oracle: cascaded-SNR sampling, energy-statistic simulation,
and empirical Pd/Pf estimates with confidence intervals.

Channel draws use the product construction gamma = gbar * prod_i E_i with E_i
i.i.d. unit-mean exponentials (|h|^2 of a unit-power Rayleigh amplitude is
exactly such a variate), whose Mellin transform Gamma(s)^N matches the
analytic kernel by construction.

Reproducibility: estimates are split over a fixed number of chunks regardless
of the worker count; chunk c of a stream (seed, i) draws from the
SeedSequence spawn key (i, c), and chunk results are reduced in index order.
The same (seed, stream_index, n_samples) therefore yields bit-identical
estimates at any parallelism level.

The semi-analytic estimator averages the exact AWGN Pd over sampled SNRs.
Its hot path evaluates the Marcum tail through scipy's C-level noncentral
chi-square survival function, an implementation independent of (and
cross-checked against) specfun.marcum_q.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import DomainError
from .detection import DetectorConfig

__all__ = [
    "RngStream",
    "McEstimate",
    "sample_cascaded_snr",
    "simulate_statistic",
    "estimate_avg_pd",
    "estimate_sls_pd",
]

N_CHUNKS = 32  # fixed partitioning; never depends on the worker count


@dataclass(frozen=True)
class RngStream:
    """Deterministic stream identity: (seed, stream_index)."""

    seed: int
    stream_index: int = 0

    def generator(self, chunk: int | None = None) -> np.random.Generator:
        key = (self.stream_index,) if chunk is None else (self.stream_index, chunk)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=key)
        return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    n_samples: int
    method: str


def _pd_awgn_vec(u: float, gammas: np.ndarray, threshold: float) -> np.ndarray:
    """Q_u(sqrt(2 gamma), sqrt(lambda)) over an SNR array (C-level evaluation)."""
    if threshold == 0.0:
        return np.ones_like(np.asarray(gammas, dtype=float))
    return 1.0 - sp.chndtr(threshold, 2.0 * u, 2.0 * np.asarray(gammas, dtype=float))


def sample_cascaded_snr(gbar: float, N: int, rng: RngStream, size: int | None = None):
    """Draw SNRs gamma = gbar * prod_{i=1}^N E_i, E_i ~ Exp(1)."""
    if not gbar > 0:
        raise DomainError(f"gbar must be > 0, got {gbar}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    gen = rng.generator()
    n = 1 if size is None else int(size)
    draws = gbar * np.prod(gen.standard_exponential((n, N)), axis=1)
    return float(draws[0]) if size is None else draws


def _draw_statistic(gen: np.random.Generator, u: int, gamma) -> np.ndarray:
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    z = gen.standard_normal((gamma.size, 2 * u))
    y = (z[:, 0] + np.sqrt(2.0 * gamma)) ** 2
    if u > 1:
        y += np.sum(z[:, 1:] ** 2, axis=1)
    return y


def simulate_statistic(u: int, gamma: float, rng: RngStream, size: int | None = None):
    """Draw the detector statistic Y ~ chi^2_{2u}(2 gamma) (central when gamma=0).

    The full-statistic construction needs 2u integer degrees of freedom; the
    semi-analytic estimator has no such restriction.
    """
    if not (isinstance(u, (int, np.integer)) and u >= 1):
        raise DomainError(f"full-statistic simulation requires integer u >= 1, got {u}")
    if gamma < 0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    gen = rng.generator()
    n = 1 if size is None else int(size)
    y = _draw_statistic(gen, int(u), np.full(n, float(gamma)))
    return float(y[0]) if size is None else y


def _chunk_sizes(n: int) -> list:
    base, extra = divmod(n, N_CHUNKS)
    return [base + (1 if c < extra else 0) for c in range(N_CHUNKS)]


def _run_chunks(worker, rng: RngStream, n_samples: int, workers: int) -> list:
    sizes = _chunk_sizes(n_samples)
    jobs = [(c, sizes[c]) for c in range(N_CHUNKS) if sizes[c] > 0]
    if workers <= 1:
        return [worker(rng.generator(c), m) for c, m in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(worker, rng.generator(c), m) for c, m in jobs]
        return [f.result() for f in futs]  # fixed chunk order


def estimate_avg_pd(config: DetectorConfig, n_samples: int = 1_000_000,
                    method: str = "semi_analytic", rng: RngStream = RngStream(0),
                    workers: int = 1) -> McEstimate:
    """Monte Carlo estimate of the fading-averaged detection probability.

    semi_analytic: mean of the exact AWGN Pd over sampled SNRs (lower variance,
    any u > 0). full_statistic: indicator mean of {Y > lambda} over sampled
    (gamma, Y) pairs (integer u only).
    """
    if n_samples < 1000:
        raise DomainError(f"n_samples must be >= 1000, got {n_samples}")
    u, gbar, N = config.u, config.avg_snr, config.N
    lam = config.resolved_threshold()

    if method == "semi_analytic":
        def worker(gen, m):
            g = gbar * np.prod(gen.standard_exponential((m, N)), axis=1)
            p = _pd_awgn_vec(u, g, lam)
            return float(np.sum(p)), float(np.sum(p * p)), m

        parts = _run_chunks(worker, rng, n_samples, workers)
        s1 = math.fsum(p[0] for p in parts)
        s2 = math.fsum(p[1] for p in parts)
        n = sum(p[2] for p in parts)
        mean = s1 / n
        var = max(s2 / n - mean * mean, 0.0) * n / (n - 1)
        return McEstimate(mean, math.sqrt(var / n), n, "semi_analytic")

    if method == "full_statistic":
        if not float(u).is_integer() or u < 1:
            raise DomainError(
                f"full_statistic requires integer u (2u degrees of freedom), got u={u}")
        ui = int(u)

        def worker(gen, m):
            g = gbar * np.prod(gen.standard_exponential((m, N)), axis=1)
            y = _draw_statistic(gen, ui, g)
            return int(np.count_nonzero(y > lam)), m

        parts = _run_chunks(worker, rng, n_samples, workers)
        hits = sum(p[0] for p in parts)
        n = sum(p[1] for p in parts)
        p_hat = hits / n
        return McEstimate(p_hat, math.sqrt(p_hat * (1.0 - p_hat) / n), n,
                          "full_statistic")

    raise DomainError(f"method must be 'semi_analytic' or 'full_statistic', got {method!r}")


def estimate_sls_pd(u: int, threshold: float, branch_snrs, N: int,
                    n_samples: int = 1_000_000, rng: RngStream = RngStream(0),
                    workers: int = 1) -> McEstimate:
    """Empirical SLS detection probability: max branch statistic vs threshold.

    Samples every branch independently and applies the max rule directly,
    which validates the analytic complement-product formula end to end.
    """
    if not (isinstance(u, (int, np.integer)) and u >= 1):
        raise DomainError(f"estimate_sls_pd requires integer u >= 1, got {u}")
    if threshold < 0:
        raise DomainError(f"threshold must be >= 0, got {threshold}")
    snrs = [float(s) for s in branch_snrs]
    if not snrs or any(s <= 0 for s in snrs):
        raise DomainError("branch_snrs must be a nonempty list of positives")
    if n_samples < 1000:
        raise DomainError(f"n_samples must be >= 1000, got {n_samples}")

    def worker(gen, m):
        best = np.full(m, -np.inf)
        for gbar in snrs:
            g = gbar * np.prod(gen.standard_exponential((m, N)), axis=1)
            np.maximum(best, _draw_statistic(gen, int(u), g), out=best)
        return int(np.count_nonzero(best > threshold)), m

    parts = _run_chunks(worker, rng, n_samples, workers)
    hits = sum(p[0] for p in parts)
    n = sum(p[1] for p in parts)
    p_hat = hits / n
    return McEstimate(p_hat, math.sqrt(p_hat * (1.0 - p_hat) / n), n, "full_statistic")

"""Oracle cross-check matrix backing the `verify` CLI command.

Each check compares two independent routes to the same quantity (closed form
vs quadrature vs Monte Carlo, fast paths vs contours, transform identities)
and reports pass/fail with the observed discrepancy. Tolerances scale with
`tol_scale` so a deliberately broken tolerance (0) fails every check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from . import detection as dt
from . import mcsim as mc
from . import mellin as ml
from . import specfun as sf

__all__ = ["CheckResult", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _kernel_mellin_quad(N: int, s: float) -> float:
    """int_0^inf x^{s-1} K_N(x)/x dx by trapezoid on the cached kernel grid."""
    v_lo, v_hi = -60.0, N * math.log(50.0 / N) + 4.0
    nseg = 2048
    prev = None
    for _ in range(6):
        kernel = ml._cached_kernel_on_grid(N, (v_lo, v_hi, nseg + 1))
        v = np.linspace(v_lo, v_hi, nseg + 1)
        f = np.exp((s - 1.0) * v) * kernel
        h = (v_hi - v_lo) / nseg
        total = h * (np.sum(f) - 0.5 * (f[0] + f[-1]))
        if prev is not None and abs(total - prev) <= 1e-9 * abs(total):
            return total
        prev = total
        nseg *= 2
    return total


def _check_kernel_fast_paths(tol_scale: float) -> CheckResult:
    worst = 0.0
    for N in (1, 2):
        spec = ml.cascaded_gspec(N)
        for x in np.geomspace(1e-3, 50.0, 13):
            contour = ml.meijer_g(spec, float(x))
            closed = ml.cascaded_kernel(N, float(x))
            worst = max(worst, abs(contour - closed) / abs(closed))
    ok = worst <= 1e-8 * tol_scale
    return CheckResult("kernel-fastpath-vs-contour", ok,
                       f"max rel diff {worst:.2e} (tol {1e-8 * tol_scale:.1e})")


def _check_mellin_identity(tol_scale: float) -> CheckResult:
    worst = 0.0
    for N in range(1, 6):
        for s in (1.0, 1.5, 2.0):
            got = _kernel_mellin_quad(N, s)
            want = math.gamma(s) ** N
            worst = max(worst, abs(got - want) / want)
    ok = worst <= 1e-6 * tol_scale
    return CheckResult("kernel-mellin-identity", ok,
                       f"max rel diff {worst:.2e} vs Gamma(s)^N (tol {1e-6 * tol_scale:.1e})")


def _check_pdf_moments(tol_scale: float) -> CheckResult:
    worst = 0.0
    for N in range(1, 6):
        norm = _kernel_mellin_quad(N, 1.0)
        mean = _kernel_mellin_quad(N, 2.0)  # in units of gbar
        worst = max(worst, abs(norm - 1.0), abs(mean - 1.0))
    ok = worst <= 1e-6 * tol_scale
    return CheckResult("pdf-normalization-and-mean", ok,
                       f"max deviation {worst:.2e} (tol {1e-6 * tol_scale:.1e})")


def _check_closed_vs_quadrature(tol_scale: float, fast: bool) -> CheckResult:
    us = (1.0, 5.0) if fast else (1.0, 2.0, 4.0, 5.0)
    gdbs = (0.0, 10.0, 20.0) if fast else (0.0, 5.0, 10.0, 15.0, 20.0)
    Ns = (1, 3, 5) if fast else (1, 2, 3, 4, 5)
    worst = 0.0
    unverified = 0
    cells = 0
    for u in us:
        for pf in (0.01, 0.1):
            for gdb in gdbs:
                for N in Ns:
                    gbar = 10.0 ** (gdb / 10.0)
                    res = dt.avg_pd_cascaded_result(u, pf, gbar, N, "closed_form")
                    quad = dt.avg_pd_cascaded(u, pf, gbar, N, "quadrature")
                    cells += 1
                    if not res.verified:
                        unverified += 1
                        continue
                    worst = max(worst, abs(res.value - quad))
    ok = worst <= 1e-4 * tol_scale
    return CheckResult(
        "avgpd-closed-vs-quadrature", ok,
        f"max |diff| {worst:.2e} over {cells} cells, verified fraction "
        f"{(cells - unverified) / cells:.3f} (tol {1e-4 * tol_scale:.1e})")


def _check_theorem1_paths(tol_scale: float, seed: int, trials: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        t = rng.uniform(0.5, 2.0)
        u = float(rng.choice([1.0, 2.0, 5.0]))
        b, c, k = rng.uniform(0.5, 3.0, size=3)
        N = int(rng.integers(1, 4))
        params = dt.Theorem1Params(t=t, u=u, b=float(b), c=float(c), k=float(k),
                                   gspec=ml.cascaded_gspec(N))
        quad = dt.theorem1_integral(params, "quadrature")
        closed = dt.theorem1_integral(params, "closed_form")
        worst = max(worst, abs(quad - closed) / (1.0 + abs(quad)))
    ok = worst <= 1e-6 * tol_scale
    return CheckResult("theorem1-quadrature-vs-closed", ok,
                       f"max scaled diff {worst:.2e} over {trials} parameter sets "
                       f"(tol {1e-6 * tol_scale:.1e})")


def _check_marcum_crosscheck(tol_scale: float, seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(60):
        u = float(rng.uniform(0.5, 8.0))
        a = float(rng.uniform(0.0, 8.0))
        b = float(rng.uniform(0.0, 8.0))
        mine = sf.marcum_q(u, a, b)
        ref = 1.0 - sp.chndtr(b * b, 2.0 * u, a * a) if b > 0 else 1.0
        worst = max(worst, abs(mine - ref))
    ok = worst <= 1e-11 * tol_scale
    return CheckResult("marcum-series-vs-chndtr", ok,
                       f"max |diff| {worst:.2e} (tol {1e-11 * tol_scale:.1e})")


def _check_quad_vs_mc(tol_scale: float, seed: int, n_samples: int,
                      fast: bool) -> CheckResult:
    if fast:
        cells = [(5.0, 0.1, 10.0, 2), (1.0, 0.1, 5.0, 1),
                 (2.0, 0.01, 15.0, 3), (4.0, 0.1, 12.0, 5)]
    else:
        cells = [(u, pf, gdb, N) for u in (1.0, 2.0, 4.0, 5.0)
                 for pf in (0.01, 0.1) for gdb in (0.0, 5.0, 10.0, 15.0, 20.0)
                 for N in (1, 2, 3, 4, 5)]
    worst_sigma = 0.0
    for i, (u, pf, gdb, N) in enumerate(cells):
        gbar = 10.0 ** (gdb / 10.0)
        quad = dt.avg_pd_cascaded(u, pf, gbar, N, "quadrature")
        est = mc.estimate_avg_pd(
            dt.DetectorConfig(u=u, avg_snr=gbar, N=N, target_pf=pf),
            n_samples=n_samples, method="semi_analytic",
            rng=mc.RngStream(seed, stream_index=i))
        sigma = max(est.stderr, 1e-12)
        worst_sigma = max(worst_sigma, abs(est.estimate - quad) / sigma)
    ok = worst_sigma <= 3.0 * tol_scale
    return CheckResult("avgpd-quadrature-vs-mc", ok,
                       f"worst |diff|/stderr {worst_sigma:.2f} over {len(cells)} cells "
                       f"at n={n_samples} (tol 3.0 sigma)")


def _check_sls_vs_mc(tol_scale: float, seed: int, n_samples: int) -> CheckResult:
    u, gdb, N, L = 4, 12.0, 2, 3
    gbar = 10.0 ** (gdb / 10.0)
    lam = dt.threshold_from_pf(u, 0.1)
    analytic = dt.avg_pd_sls(u, lam, [gbar] * L, N, "quadrature")
    est = mc.estimate_sls_pd(u, lam, [gbar] * L, N, n_samples=n_samples,
                             rng=mc.RngStream(seed, stream_index=97))
    sigma = max(est.stderr, 1e-12)
    z = abs(est.estimate - analytic) / sigma
    ok = z <= 3.0 * tol_scale
    return CheckResult("sls-product-vs-mc", ok,
                       f"|diff|/stderr {z:.2f} at n={n_samples} (tol 3.0 sigma)")


def run_checks(fast: bool = False, seed: int = 20250801, n_samples: int | None = None,
               tol_scale: float = 1.0) -> tuple[list, float]:
    """Run the oracle matrix; returns (results, elapsed seconds)."""
    t0 = time.time()
    n_mc = n_samples if n_samples is not None else (200_000 if fast else 1_000_000)
    results = [
        _check_kernel_fast_paths(tol_scale),
        _check_mellin_identity(tol_scale),
        _check_pdf_moments(tol_scale),
        _check_marcum_crosscheck(tol_scale, seed),
        _check_theorem1_paths(tol_scale, seed, trials=6 if fast else 27),
        _check_closed_vs_quadrature(tol_scale, fast),
        _check_quad_vs_mc(tol_scale, seed, n_mc, fast),
        _check_sls_vs_mc(tol_scale, seed, n_mc),
    ]
    return results, time.time() - t0

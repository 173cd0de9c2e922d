"""Command-line front end.

Subcommands
    pd-sweep  average detection probability over an SNR grid (per N, L)
    roc       (Pf, Pd) pairs over a false-alarm grid at fixed SNR
    verify    run the oracle cross-check matrix; exit 0 iff all checks pass
    sample    dump raw Monte Carlo channel / statistic samples

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numeric failure.
dB-to-linear SNR conversion happens here and nowhere else; every emitted
number carries its method in the column name (pd_closed / pd_quad / pd_mc)
plus a provenance column recording closed-form fallbacks, and every MC value
is accompanied by its standard error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import detection as dt
from . import mcsim as mc
from .errors import DomainError, NumericsError, ParameterError
from .verification import run_checks

__all__ = ["SweepResult", "main"]

_METHODS = ("closed", "quad", "mc")


@dataclass
class SweepResult:
    """Tabulated sweep rows; CSV and JSON carry the identical table."""

    columns: list
    rows: list = field(default_factory=list)

    def write(self, path: str | None, fmt: str) -> None:
        if fmt == "csv":
            out = open(path, "w", newline="") if path else sys.stdout
            try:
                w = csv.writer(out)
                w.writerow(self.columns)
                w.writerows(self.rows)
            finally:
                if path:
                    out.close()
        elif fmt == "json":
            payload = {"columns": self.columns, "rows": self.rows}
            text = json.dumps(payload, indent=1)
            if path:
                with open(path, "w") as fh:
                    fh.write(text + "\n")
            else:
                sys.stdout.write(text + "\n")
        else:
            raise DomainError(f"format must be csv or json, got {fmt!r}")


def _parse_grid(text: str) -> list:
    """'start:stop:step' inclusive dB grid."""
    try:
        start, stop, step = (float(tok) for tok in text.split(":"))
    except ValueError:
        raise DomainError(f"--snr-db expects start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise DomainError(f"--snr-db grid {text!r} is empty or descending")
    n = int(round((stop - start) / step))
    grid = [start + i * step for i in range(n + 1)]
    if grid[-1] > stop + 1e-9:
        grid.pop()
    return grid


def _parse_pf_grid(text: str) -> list:
    try:
        lo, hi, npts = text.split(":")
        lo, hi, npts = float(lo), float(hi), int(npts)
    except ValueError:
        raise DomainError(f"--pf-grid expects lo:hi:npts, got {text!r}") from None
    if not (0 < lo <= hi <= 1 and npts >= 2):
        raise DomainError(f"--pf-grid {text!r} out of range (need 0 < lo <= hi <= 1)")
    return [float(p) for p in np.geomspace(lo, hi, npts)]


def _parse_int_list(text: str, flag: str) -> list:
    try:
        vals = [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise DomainError(f"{flag} expects a comma-separated integer list, got {text!r}") \
            from None
    if not vals or any(v < 1 for v in vals):
        raise DomainError(f"{flag} entries must be >= 1, got {text!r}")
    return vals


def _parse_methods(text: str) -> list:
    methods = [tok.strip() for tok in text.split(",") if tok.strip()]
    for m in methods:
        if m not in _METHODS:
            raise DomainError(f"unknown method {m!r}; choose from {','.join(_METHODS)}")
    if not methods:
        raise DomainError("--methods must name at least one method")
    return methods


def _fmt(x) -> str:
    return repr(float(x))


def _resolve_threshold(args) -> float:
    if (args.pf is None) == (getattr(args, "threshold", None) is None):
        raise DomainError("exactly one of --pf / --lambda is required")
    if args.pf is not None:
        if not 0 < args.pf <= 1:
            raise DomainError(f"--pf must be in (0, 1], got {args.pf}")
        return dt.threshold_from_pf(args.u, args.pf)
    if args.threshold < 0:
        raise DomainError(f"--lambda must be >= 0, got {args.threshold}")
    return float(args.threshold)


def _scenario_rows(u, lam, snr_db_grid, Ns, Ls, methods, samples, seed, workers):
    """Rows (N, L, snr_db, pd columns...) sorted by scenario then abscissa."""
    rows = []
    row_idx = 0
    for N in Ns:
        for L in Ls:
            for gdb in snr_db_grid:
                gbar = 10.0 ** (gdb / 10.0)
                row = [N, L, gdb]
                if "closed" in methods:
                    if L == 1:
                        res = dt._avg_pd_from_threshold(u, lam, gbar, N,
                                                        "closed_form", None)
                        row += [_fmt(res.value),
                                "closed" if res.method_used == "closed_form"
                                else "quad-fallback"]
                    else:
                        val = dt.avg_pd_sls(u, lam, [gbar] * L, N, "closed_form")
                        row += [_fmt(val), "closed"]
                else:
                    row += ["", ""]
                if "quad" in methods:
                    if L == 1:
                        val = dt._avg_pd_from_threshold(u, lam, gbar, N,
                                                        "quadrature", None).value
                    else:
                        val = dt.avg_pd_sls(u, lam, [gbar] * L, N, "quadrature")
                    row += [_fmt(val)]
                else:
                    row += [""]
                if "mc" in methods:
                    stream = mc.RngStream(seed, stream_index=row_idx)
                    if L == 1:
                        est = mc.estimate_avg_pd(
                            dt.DetectorConfig(u=u, avg_snr=gbar, N=N, threshold=lam),
                            n_samples=samples, method="semi_analytic",
                            rng=stream, workers=workers)
                    else:
                        est = mc.estimate_sls_pd(int(u), lam, [gbar] * L, N,
                                                 n_samples=samples, rng=stream,
                                                 workers=workers)
                    row += [_fmt(est.estimate), _fmt(est.stderr)]
                else:
                    row += ["", ""]
                rows.append(row)
                row_idx += 1
    return rows


def _cmd_pd_sweep(args) -> int:
    lam = _resolve_threshold(args)
    grid = _parse_grid(args.snr_db)
    Ns = _parse_int_list(args.N, "--N")
    Ls = _parse_int_list(args.L, "--L")
    methods = _parse_methods(args.methods)
    if "mc" in methods and any(L > 1 for L in Ls) and not float(args.u).is_integer():
        raise DomainError("MC for L > 1 simulates full statistics: integer --u required")
    rows = _scenario_rows(args.u, lam, grid, Ns, Ls, methods,
                          args.samples, args.seed, args.workers)
    result = SweepResult(
        columns=["N", "L", "snr_db", "pd_closed", "closed_provenance",
                 "pd_quad", "pd_mc", "mc_stderr"],
        rows=rows)
    result.write(args.out, args.format)
    return 0


def _cmd_roc(args) -> int:
    if not 0 < args.pf_max <= 1:
        raise DomainError(f"--pf-max must be in (0, 1], got {args.pf_max}")
    pfs = _parse_pf_grid(args.pf_grid)
    Ns = _parse_int_list(args.N, "--N")
    Ls = _parse_int_list(args.L, "--L")
    methods = _parse_methods(args.methods)
    gbar = 10.0 ** (args.snr_db / 10.0)
    rows = []
    row_idx = 0
    for N in Ns:
        for L in Ls:
            for pf in pfs:
                if pf > args.pf_max:
                    continue
                lam = dt.threshold_from_pf(args.u, pf)
                pf_axis = pf if L == 1 else dt.pf_sls(args.u, lam, L)
                row = [N, L, _fmt(pf), _fmt(pf_axis)]
                if "closed" in methods:
                    if L == 1:
                        res = dt._avg_pd_from_threshold(args.u, lam, gbar, N,
                                                        "closed_form", None)
                        row += [_fmt(res.value),
                                "closed" if res.method_used == "closed_form"
                                else "quad-fallback"]
                    else:
                        row += [_fmt(dt.avg_pd_sls(args.u, lam, [gbar] * L, N,
                                                   "closed_form")), "closed"]
                else:
                    row += ["", ""]
                if "quad" in methods:
                    if L == 1:
                        val = dt._avg_pd_from_threshold(args.u, lam, gbar, N,
                                                        "quadrature", None).value
                    else:
                        val = dt.avg_pd_sls(args.u, lam, [gbar] * L, N, "quadrature")
                    row += [_fmt(val)]
                else:
                    row += [""]
                if "mc" in methods:
                    stream = mc.RngStream(args.seed, stream_index=row_idx)
                    if L == 1:
                        est = mc.estimate_avg_pd(
                            dt.DetectorConfig(u=args.u, avg_snr=gbar, N=N,
                                              threshold=lam),
                            n_samples=args.samples, method="semi_analytic",
                            rng=stream, workers=args.workers)
                    else:
                        est = mc.estimate_sls_pd(int(args.u), lam, [gbar] * L, N,
                                                 n_samples=args.samples, rng=stream,
                                                 workers=args.workers)
                    row += [_fmt(est.estimate), _fmt(est.stderr)]
                else:
                    row += ["", ""]
                rows.append(row)
                row_idx += 1
    result = SweepResult(
        columns=["N", "L", "pf_branch", "pf", "pd_closed", "closed_provenance",
                 "pd_quad", "pd_mc", "mc_stderr"],
        rows=rows)
    result.write(args.out, args.format)
    return 0


def _cmd_sample(args) -> int:
    gbar = 10.0 ** (args.snr_db / 10.0)
    stream = mc.RngStream(args.seed)
    if args.kind == "snr":
        g = mc.sample_cascaded_snr(gbar, args.N, stream, size=args.samples)
        result = SweepResult(columns=["index", "gamma"],
                             rows=[[i, _fmt(v)] for i, v in enumerate(g)])
    else:
        if not float(args.u).is_integer():
            raise DomainError("statistic samples require integer --u")
        gen = stream.generator()
        g = gbar * np.prod(gen.standard_exponential((args.samples, args.N)), axis=1)
        y = mc._draw_statistic(gen, int(args.u), g)
        result = SweepResult(
            columns=["index", "gamma", "statistic"],
            rows=[[i, _fmt(a), _fmt(b)] for i, (a, b) in enumerate(zip(g, y))])
    result.write(args.out, args.format)
    return 0


def _cmd_verify(args) -> int:
    results, elapsed = run_checks(fast=args.fast, seed=args.seed,
                                  n_samples=args.samples, tol_scale=args.tol)
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
    n_fail = sum(not r.ok for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed "
                 f"in {elapsed:.1f} s")
    report = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report)
    sys.stdout.write(report)
    return 0 if n_fail == 0 else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cascadesense",
        description="Energy-detection performance over N*Rayleigh cascaded fading")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_io(p):
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    def common_mc(p):
        p.add_argument("--samples", type=int, default=1_000_000,
                       help="Monte Carlo sample count")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("pd-sweep", help="average Pd over an SNR(dB) grid")
    p.add_argument("--u", type=float, required=True, help="time-bandwidth product")
    p.add_argument("--pf", type=float, default=None, help="target false alarm")
    p.add_argument("--lambda", dest="threshold", type=float, default=None,
                   help="energy threshold (alternative to --pf)")
    p.add_argument("--snr-db", required=True, help="start:stop:step grid in dB")
    p.add_argument("--N", default="1", help="comma list of cascade orders")
    p.add_argument("--L", default="1", help="comma list of SLS branch counts")
    p.add_argument("--methods", default="closed,quad",
                   help="comma subset of closed,quad,mc")
    common_mc(p)
    common_io(p)
    p.set_defaults(func=_cmd_pd_sweep)

    p = sub.add_parser("roc", help="(Pf, Pd) pairs over a false-alarm grid")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--snr-db", type=float, required=True, help="average SNR in dB")
    p.add_argument("--N", default="1")
    p.add_argument("--L", default="1")
    p.add_argument("--pf-grid", default="1e-4:1:50",
                   help="lo:hi:npts log-spaced branch-Pf grid")
    p.add_argument("--pf-max", type=float, default=1.0,
                   help="drop grid points above this branch Pf")
    p.add_argument("--methods", default="closed,quad")
    common_mc(p)
    common_io(p)
    p.set_defaults(func=_cmd_roc)

    p = sub.add_parser("verify", help="run the oracle cross-check matrix")
    p.add_argument("--fast", action="store_true", help="reduced grid, n=2e5")
    p.add_argument("--samples", type=int, default=None,
                   help="override MC sample count")
    p.add_argument("--seed", type=int, default=20250801)
    p.add_argument("--tol", type=float, default=1.0,
                   help="tolerance scale applied to every check")
    p.add_argument("--out", default=None, help="also write the report here")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sample", help="dump raw MC channel/statistic samples")
    p.add_argument("--kind", choices=("snr", "statistic"), default="snr")
    p.add_argument("--u", type=float, default=1.0)
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    common_io(p)
    p.set_defaults(func=_cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

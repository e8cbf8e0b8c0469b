"""``dmtlab`` command line: curves, figure data, Monte Carlo ladders and invariant checks.

Exit codes: 0 success, 2 invalid configuration, 3 invariant-suite failure
(or unmet slope-fit preconditions in ``mc``), 4 out-of-regime request with
no fallback.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from . import checks
from . import closed_form as cf
from . import solvers as sv
from .exponents import ChannelProfile, GridSpec
from .io import (
    curves_to_csv,
    curves_to_json,
    estimate_rows,
    estimates_to_csv,
    fit_row,
    fit_to_csv,
    mc_to_json,
    write_text,
)
from .montecarlo import FitError, McKind, McScheme, SnrPoint, estimate_ladder, fit_diversity

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3
EXIT_REGIME = 4


class ConfigError(ValueError):
    pass


class RegimeError(ValueError):
    pass


def parse_range(text: str) -> np.ndarray:
    """``min:max:step`` inclusive of both ends (last point clamped to ``max``); a bare number is one point."""
    parts = text.split(":")
    try:
        vals = [float(x) for x in parts]
    except ValueError:
        raise ConfigError(f"bad range {text!r}; expected min:max:step") from None
    if len(vals) == 1:
        return np.array(vals)
    if len(vals) != 3:
        raise ConfigError(f"bad range {text!r}; expected min:max:step")
    lo, hi, step = vals
    if step <= 0:
        raise ConfigError("range step must be > 0")
    if lo > hi:
        raise ConfigError("range min must be <= max")
    n = int(math.floor((hi - lo) / step + 1e-9))
    pts = lo + step * np.arange(n + 1)
    # snap to a decimal grid so 0.1*3 prints as 0.3
    pts = np.round(pts, 12)
    if hi - pts[-1] > 1e-9 * max(1.0, abs(hi)):
        pts = np.append(pts, hi)
    else:
        pts[-1] = hi
    return pts


def parse_snr_list(text: str) -> list[SnrPoint]:
    if ":" in text:
        return [SnrPoint(float(x)) for x in parse_range(text)]
    try:
        return [SnrPoint(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad SNR list {text!r}") from None


def _count(text: str) -> int:
    v = float(text)
    if v != int(v) or v < 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return int(v)


# scheme name -> (is closed form, needs profile)
CLOSED = {
    "fd": cf.Scheme.FULL_DUPLEX,
    "static-qmf": cf.Scheme.STATIC_QMF_HALF,
    "ddf": cf.Scheme.DDF,
    "theorem1": cf.Scheme.FOUR_REGIME_OPTIMAL,
    "parallel-optimal": cf.Scheme.PARALLEL_OPTIMAL,
    "parallel-static-qmf": cf.Scheme.PARALLEL_STATIC_QMF,
    "parallel-ddf-upper": cf.Scheme.PARALLEL_DDF_UPPER,
    "parallel-ddf-split": cf.Scheme.PARALLEL_DDF_SPLIT,
}
GRID = {s.value: s for s in cf.Scheme if s.value not in CLOSED}


def grid_curve(scheme: cf.Scheme, r_values, profile: Optional[ChannelProfile], grid: GridSpec, t: float = 0.5, t2: float = 0.5) -> cf.DmtCurve:
    """Sample a grid-solver curve."""
    S = cf.Scheme
    single = {
        S.GRID_FULL_DUPLEX: lambda r: sv.solve_full_duplex(profile, r, grid),
        S.GRID_STATIC_QMF: lambda r: sv.solve_static_qmf(profile, r, t, grid),
        S.GRID_BEST_STATIC_QMF: lambda r: sv.best_static_qmf(profile, r, grid),
        S.GRID_DDF: lambda r: sv.solve_ddf(profile, r, grid),
        S.GRID_GLOBAL_CSI: lambda r: sv.solve_global_csi(profile, r, grid),
        S.GRID_LOCAL_CSI: lambda r: sv.solve_local_csi(profile, r, grid),
    }
    parallel = {
        S.GRID_PARALLEL_GLOBAL: lambda r: sv.solve_parallel_global(r, grid),
        S.GRID_PARALLEL_DQMF: lambda r: sv.solve_parallel_dqmf(r, grid),
        S.GRID_PARALLEL_STATIC: lambda r: sv.solve_parallel_static(r, t, t2, grid),
        S.GRID_PARALLEL_LOCAL_CSI: lambda r: sv.solve_parallel_local_csi(r, grid),
    }
    fn = single.get(scheme) or parallel[scheme]
    if scheme is S.GRID_PARALLEL_DQMF and np.any(np.asarray(r_values) >= 1):
        raise ConfigError("parallel-dqmf needs r < 1")
    d = [max(fn(float(r)).value, 0.0) for r in r_values]
    prof = cf.UNIT_PARALLEL_PROFILE if scheme.is_parallel else profile
    return cf.DmtCurve(scheme, prof, r_values, d, method="grid", grid_step=grid.step)


def build_curve(name: str, r_values, profile: Optional[ChannelProfile], grid: GridSpec, t=0.5, t2=0.5, log=print):
    """Closed form when one exists and applies; the grid solver otherwise."""
    if name in CLOSED:
        scheme = CLOSED[name]
        if not scheme.is_parallel and profile is None:
            raise ConfigError(f"scheme {name} needs --a --b --c")
        try:
            return cf.closed_form_curve(scheme, r_values, profile)
        except cf.OutOfRegimeError as exc:
            if scheme is cf.Scheme.DDF:
                log(f"note: {exc}; falling back to grid-ddf at step {grid.step}")
                return grid_curve(cf.Scheme.GRID_DDF, r_values, profile, grid)
            raise RegimeError(str(exc)) from None
    if name in GRID:
        scheme = GRID[name]
        if not scheme.is_parallel and profile is None:
            raise ConfigError(f"scheme {name} needs --a --b --c")
        return grid_curve(scheme, r_values, profile, grid, t, t2)
    raise ConfigError(f"unknown scheme {name!r}")


def _profile(args) -> Optional[ChannelProfile]:
    if args.a is None and args.b is None and args.c is None:
        return None
    if None in (args.a, args.b, args.c):
        raise ConfigError("give all of --a --b --c")
    return ChannelProfile(args.a, args.b, args.c)


def _grid(args) -> GridSpec:
    return GridSpec(step=args.grid_step, t_step=args.t_step)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def _meta(args, started: float) -> dict:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    return {"tool": "dmtlab", "version": __version__, "config": config, "wall_time_s": round(time.perf_counter() - started, 6)}


def cmd_curve(args) -> int:
    started = time.perf_counter()
    r_values = parse_range(args.r)
    if np.any(r_values < 0):
        raise ConfigError("multiplexing gains must be >= 0")
    curve = build_curve(args.scheme, r_values, _profile(args), _grid(args), args.t, args.t2, log=lambda m: print(m, file=sys.stderr))
    text = curves_to_csv([curve]) if args.format == "csv" else curves_to_json([curve], _meta(args, started))
    _emit(text, args.out)
    return EXIT_OK


FIGURES = {
    "relay-1-1-02": dict(
        profile=ChannelProfile(1, 1, 0.2),
        curves=[("theorem1", "0:0.6:0.01"), ("fd", "0:1:0.01"), ("static-qmf", "0:0.6:0.01"), ("ddf", "0:0.6:0.01")],
    ),
    "dqmf-15-2-05": dict(
        profile=ChannelProfile(1.5, 2, 0.5),
        curves=[("best-static-qmf", None), ("ddf", None), ("dqmf", None)],
    ),
    "parallel": dict(
        profile=None,
        curves=[
            ("parallel-optimal", "0:1:0.01"),
            ("parallel-static-qmf", "0:1:0.01"),
            ("parallel-ddf-upper", "0:1:0.01"),
            ("parallel-ddf-split", "0:1:0.01"),
        ],
    ),
}


def cmd_figure(args) -> int:
    fig = FIGURES[args.name]
    grid = _grid(args)
    outdir = Path(args.out or args.name)
    outdir.mkdir(parents=True, exist_ok=True)
    default_r = f"0:1.25:{args.r_step}"
    manifest = {"figure": args.name, "version": __version__, "grid_step": grid.step, "t_step": grid.t_step, "files": []}
    for name, rng in fig["curves"]:
        started = time.perf_counter()
        r_values = parse_range(rng or default_r)
        curve = build_curve(name, r_values, fig["profile"], grid, log=lambda m: print(m, file=sys.stderr))
        elapsed = time.perf_counter() - started
        fname = f"{name}.{args.format}"
        text = curves_to_csv([curve]) if args.format == "csv" else curves_to_json([curve], {"scheme": name})
        write_text(outdir / fname, text)
        manifest["files"].append(
            {
                "file": fname,
                "scheme": curve.scheme.value,
                "method": curve.method,
                "grid_step": curve.grid_step,
                "t_step": grid.t_step if curve.method == "grid" else None,
                "points": int(len(curve.r)),
                "runtime_s": round(elapsed, 6),
            }
        )
    write_text(outdir / "manifest.json", json.dumps(manifest, indent=1) + "\n")
    print(str(outdir))
    return EXIT_OK


def mc_scheme(args) -> McScheme:
    kind = McKind(args.scheme)
    if kind is McKind.HD_RULE:
        raise ConfigError("hd-rule is library-only; pick a named scheme")
    t1 = args.t1 if args.t1 is not None else args.t
    return McScheme(kind, t=t1, t2=args.t2)


def cmd_mc(args) -> int:
    started = time.perf_counter()
    scheme = mc_scheme(args)
    snrs = parse_snr_list(args.snr)
    if len({s.rho_db for s in snrs}) < 3:
        raise ConfigError("the SNR ladder needs at least 3 distinct points")
    if args.n < 10_000:
        raise ConfigError("--n must be >= 1e4")
    profile = None if scheme.parallel else _profile(args)
    if not scheme.parallel and profile is None:
        raise ConfigError(f"scheme {scheme.kind.value} needs --a --b --c")
    est = estimate_ladder(scheme, profile, args.r, snrs, args.n, args.seed)
    rows = estimate_rows(scheme.label, profile, args.r, est, args.seed)
    status = EXIT_OK
    try:
        fit = fit_diversity(est)
        frow = fit_row(scheme.label, profile, args.r, fit, args.seed)
    except FitError as exc:
        print(f"fit: {exc}", file=sys.stderr)
        frow, status = None, EXIT_CHECK
    if args.format == "json":
        _emit(mc_to_json(rows, frow, _meta(args, started)), args.out)
    else:
        _emit(estimates_to_csv(rows), args.out)
        if frow is not None:
            if args.out:
                out = Path(args.out)
                write_text(out.with_name(out.stem + "_fit" + out.suffix), fit_to_csv(frow))
            else:
                sys.stdout.write(fit_to_csv(frow))
    return status


def cmd_check(args) -> int:
    grid = _grid(args)
    kw = {"seed": args.seed}
    if args.suite in ("ordering", "oracle"):
        kw["grid"] = grid
    if args.quick:
        kw.update({"ordering": {"n_profiles": 5}, "oracle": {"n_cases": 20}, "monotonicity": {"n_profiles": 5}, "tables": {"n_draws": 100}}[args.suite])
    rep = checks.run_suite(args.suite, **kw)
    _emit(json.dumps(rep.as_dict(), indent=1, default=float) + "\n", args.out)
    print(f"{args.suite}: {'pass' if rep.passed else 'FAIL'} ({rep.cases} cases, {rep.seconds:.1f}s)", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dmtlab", description="Diversity-multiplexing tradeoff curves for half-duplex relay networks.")
    ap.add_argument("--version", action="version", version=f"dmtlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--out", help="output path (default: stdout)")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--grid-step", type=float, default=0.005)
        p.add_argument("--t-step", type=float, default=0.01)

    def profile_args(p):
        p.add_argument("--a", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--c", type=float)

    p = sub.add_parser("curve", help="sample one DMT curve")
    p.add_argument("--scheme", required=True, choices=sorted(set(CLOSED) | set(GRID)))
    profile_args(p)
    p.add_argument("--r", required=True, help="min:max:step, inclusive")
    p.add_argument("--t", type=float, default=0.5, help="listen fraction for static schemes (t1 on the parallel network)")
    p.add_argument("--t2", type=float, default=0.5)
    common(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("figure", help="write every curve of a named figure plus a manifest")
    p.add_argument("name", choices=sorted(FIGURES))
    p.add_argument("--r-step", type=float, default=0.05, help="rate step for grid-solver curves")
    common(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("mc", help="Monte Carlo outage ladder and slope fit")
    p.add_argument("--scheme", required=True, choices=[k.value for k in McKind if k is not McKind.HD_RULE])
    profile_args(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--t1", type=float)
    p.add_argument("--t2", type=float, default=0.5)
    p.add_argument("--snr", default="30,40,50,60", help="comma list or min:max:step, in dB")
    p.add_argument("--n", type=_count, default=10**6)
    common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("check", help="run an invariant suite")
    p.add_argument("suite", choices=checks.SUITES)
    p.add_argument("--quick", action="store_true", help="fewer random draws")
    common(p, fmt=False)
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, (RegimeError, cf.OutOfRegimeError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_REGIME
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

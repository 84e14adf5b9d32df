"""Command-line surface: enumerate, moments, density, simulate, popdyn, check.

Every artifact embeds its resolved configuration (JSON files carry a
"config" key, CSV files a leading ``# {...}`` comment line), so reruns are
reproducible from the output alone.  Report paths also render a PNG next to
the delimited output unless --no-plot is given.

Exit codes: 0 success, 2 invalid parameters, 3 resource guard exceeded,
4 numeric failure, 5 check-suite failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import bernoulli as br
from . import checks
from . import heavytail as ht
from . import limitlaw as ll
from . import spectra as sx
from . import treewords as tw
from .errors import GuardLimitError, NumericError, ParameterError

try:
    VERSION = version("wishartlaw")
except PackageNotFoundError:  # running from a source tree
    VERSION = "0.1.0"

EXIT_OK = 0
EXIT_PARAMS = 2
EXIT_GUARD = 3
EXIT_NUMERIC = 4
EXIT_CHECK_FAILED = 5


def _config_dict(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    cfg["version"] = VERSION
    return cfg


def _emit_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        parent = os.path.dirname(os.path.abspath(out))
        os.makedirs(parent, exist_ok=True)
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _csv_text(header: str, rows, config: dict) -> str:
    lines = ["# " + json.dumps(config, sort_keys=True), header]
    for row in rows:
        lines.append(",".join(format(v, ".17g") if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _figure_path(out: str) -> str:
    stem, _ = os.path.splitext(out)
    return stem + ".png"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_enumerate(args) -> int:
    table = tw.cached_count_table(args.k, args.cache_dir, args.guard)
    payload = json.loads(table.to_json())
    payload["config"] = _config_dict(args)
    _emit_text(json.dumps(payload, indent=1), args.out)
    return EXIT_OK


def _moment_vector(args) -> ll.MomentVector:
    tables = tw.table_provider(args.cache_dir, args.guard)
    if args.model == "mp":
        return ll.mp_moments(args.alpha, args.kmax)
    if args.model == "bernoulli":
        if args.c is None:
            raise ParameterError("--c is required for the bernoulli model")
        return br.bernoulli_moments(br.BernoulliParams(args.alpha, args.c), args.kmax, tables)
    if args.model == "heavy":
        if args.beta is None or args.B is None:
            raise ParameterError("--beta and --B are required for the heavy model")
        params = ht.HeavyTailParams(beta=args.beta, B=args.B, alpha=args.alpha)
        return ht.heavy_moments(params, args.kmax, tables)
    # custom-A: comma-separated A_2, A_3, ..., zero-padded to 2*kmax
    if not args.A:
        raise ParameterError("--A is required for the custom-A model (values A_2,A_3,...)")
    given = [float(v) for v in args.A.split(",")]
    values = np.zeros(2 * args.kmax + 1)
    for i, v in enumerate(given):
        k = i + 2
        if k < len(values):
            values[k] = v
    seq = ll.AsymptoticSequence(values=values, gamma=max(1.0, np.max(np.abs(values))))
    return ll.limit_moments(seq, args.alpha, args.kmax, tables)


def cmd_moments(args) -> int:
    mv = _moment_vector(args)
    cfg = _config_dict(args)
    if args.format == "csv":
        rows = [(k, mv.moment(k)) for k in range(1, mv.kmax + 1)]
        _emit_text(_csv_text("k,moment", rows, cfg), args.out)
    else:
        payload = {"alpha": mv.alpha, "moments": [float(v) for v in mv.values], "config": cfg}
        _emit_text(json.dumps(payload, indent=1), args.out)
    return EXIT_OK


def _density_grid(args) -> np.ndarray:
    if args.points < 2:
        raise ParameterError("--points must be >= 2")
    if not args.xmax > args.xmin:
        raise ParameterError("--xmax must exceed --xmin")
    return np.linspace(args.xmin, args.xmax, args.points)


def cmd_density(args) -> int:
    xs = _density_grid(args)
    cfg = _config_dict(args)
    stderr = None
    if args.law == "mp":
        ys = ll.mp_density(xs, args.alpha)
    elif args.law == "perturb":
        ys = ll.perturb_density(xs, args.alpha)
    elif args.law == "combined":
        if args.c is None:
            raise ParameterError("--c is required for the combined law")
        ys = ll.mp_density(xs, args.alpha) + ll.perturb_density(xs, args.alpha) / args.c
    else:  # popdyn
        if args.c is None:
            raise ParameterError("--c is required for the popdyn law")
        params = br.BernoulliParams(alpha=args.alpha, c=args.c)
        vals, errs = [], []
        for i, x in enumerate(xs):
            if x <= 0:
                vals.append(0.0)
                errs.append(0.0)
                continue
            res = br.popdyn_wishart_density(
                params,
                float(x),
                epsilon=args.epsilon,
                pool_size=args.pool_size,
                sweeps=args.sweeps,
                seed=args.seed + i,
            )
            vals.append(float(np.real(res.value)))
            errs.append(res.stderr)
        ys, stderr = np.array(vals), np.array(errs)

    if stderr is None:
        rows = [(float(x), float(y)) for x, y in zip(xs, ys)]
        text = _csv_text("x,density", rows, cfg)
    else:
        rows = [(float(x), float(y), float(e)) for x, y, e in zip(xs, ys, stderr)]
        text = _csv_text("x,density,stderr", rows, cfg)
    _emit_text(text, args.out)

    if args.out and not args.no_plot:
        from . import plotting

        if stderr is None:
            plotting.render_curves(
                _figure_path(args.out), xs, {args.law: np.asarray(ys, dtype=float)},
                title=f"{args.law} density, alpha={args.alpha}",
            )
        else:
            plotting.render_curve_with_band(
                _figure_path(args.out), xs, ys, stderr,
                title=f"popdyn density, alpha={args.alpha}, c={args.c}",
            )
    return EXIT_OK


def _simulate_params(args):
    if args.model == "bernoulli":
        if args.c is None:
            raise ParameterError("--c is required for bernoulli simulation")
        return br.BernoulliParams(alpha=args.alpha, c=args.c, centered=args.centered)
    if args.beta is None or args.B is None:
        raise ParameterError("--beta and --B are required for heavy simulation")
    return ht.HeavyTailParams(beta=args.beta, B=args.B, alpha=args.alpha)


def cmd_simulate(args) -> int:
    params = _simulate_params(args)
    cfg = _config_dict(args)
    samples = sx.run_trials(args.n, params, args.trials, seed=args.seed, workers=args.workers)
    prefix = args.out
    os.makedirs(os.path.dirname(os.path.abspath(prefix)) or ".", exist_ok=True)
    for i, sample in enumerate(samples):
        sx.save_sample(sample, f"{prefix}_trial{i:03d}")

    pooled = np.concatenate([s.eigenvalues for s in samples])
    hist = sx.histogram_of(pooled, args.bins, sx.default_range(args.alpha))
    rows = [(float(c), float(d)) for c, d in zip(hist.centers, hist.density)]
    _emit_text(_csv_text("x,density", rows, cfg), f"{prefix}_hist.csv")

    kmax = args.kmax or 5
    per_trial = np.stack([sx.empirical_moments(s, kmax).values for s in samples])
    moments = {
        "alpha": args.alpha,
        "moments": [float(v) for v in per_trial.mean(axis=0)],
        "stderr": [float(v) for v in per_trial.std(axis=0, ddof=1) / np.sqrt(len(samples))]
        if len(samples) > 1
        else None,
        "trials": len(samples),
        "overflow": hist.overflow,
        "config": cfg,
    }
    _emit_text(json.dumps(moments, indent=1), f"{prefix}_moments.json")

    if not args.no_plot:
        from . import plotting

        curves = {}
        if isinstance(params, br.BernoulliParams) and params.c > 0:
            grid = np.linspace(hist.centers[0], hist.centers[-1], 400)
            curves["mp"] = (grid, ll.mp_density(grid, args.alpha))
            curves["mp + perturb/c"] = (
                grid,
                ll.mp_density(grid, args.alpha) + ll.perturb_density(grid, args.alpha) / params.c,
            )
        plotting.render_histogram_overlay(
            f"{prefix}.png",
            hist,
            curves,
            title=f"{args.model} spectrum, n={args.n}, trials={args.trials}",
        )
    return EXIT_OK


def cmd_popdyn(args) -> int:
    params = br.BernoulliParams(alpha=args.alpha, c=args.c)
    xs = _density_grid(args)
    cfg = _config_dict(args)
    vals, errs, residuals, converged = [], [], [], True
    for i, x in enumerate(xs):
        if x <= 0:
            vals.append(0.0)
            errs.append(0.0)
            continue
        res = br.popdyn_wishart_density(
            params,
            float(x),
            epsilon=args.epsilon,
            pool_size=args.pool_size,
            sweeps=args.sweeps,
            seed=args.seed + i,
        )
        vals.append(float(np.real(res.value)))
        errs.append(res.stderr)
        residuals.append(res.residual)
        converged &= res.converged
    rows = [(float(x), v, e) for x, v, e in zip(xs, vals, errs)]
    _emit_text(_csv_text("x,density,stderr", rows, cfg), args.out)

    diag = {
        "converged": bool(converged),
        "max_residual": max(residuals) if residuals else 0.0,
        "pool_size": args.pool_size,
        "sweeps": args.sweeps,
        "seed": args.seed,
        "config": cfg,
    }
    diag_path = (os.path.splitext(args.out)[0] + "_diag.json") if args.out else None
    _emit_text(json.dumps(diag, indent=1), diag_path)

    if args.out and not args.no_plot:
        from . import plotting

        plotting.render_curve_with_band(
            _figure_path(args.out),
            xs,
            np.array(vals),
            np.array(errs),
            title=f"popdyn density, alpha={args.alpha}, c={args.c}",
        )
    return EXIT_OK


def cmd_check(args) -> int:
    results = checks.run_suite(args.suite, seed=args.seed, workers=args.workers)
    lines = [r.line() for r in results]
    report = "\n".join(lines)
    print(report)
    if args.out:
        payload = {
            "suite": args.suite,
            "results": [
                {"name": r.name, "passed": bool(r.passed), "detail": r.detail}
                for r in results
            ],
            "config": _config_dict(args),
        }
        _emit_text(json.dumps(payload, indent=1), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--cache-dir", default=os.environ.get("WISHARTLAW_CACHE"),
                        help="count-table cache directory (env WISHARTLAW_CACHE)")
    parser.add_argument("--guard", type=int, default=tw.DEFAULT_GUARD,
                        help="enumeration guard on the half-length k")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wishartlaw",
        description="Limiting spectral laws of Wishart matrices with size-dependent entries",
    )
    parser.add_argument("--version", action="version", version=f"wishartlaw {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="write the exact count table for one k")
    p.add_argument("--k", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("moments", help="moments of a limit law")
    p.add_argument("--model", choices=("mp", "bernoulli", "heavy", "custom-A"), default="mp")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--B", type=float)
    p.add_argument("--A", help="custom-A values A_2,A_3,... (comma separated)")
    p.add_argument("--kmax", type=int, default=5)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("density", help="density curves on a grid")
    p.add_argument("--law", choices=("mp", "perturb", "combined", "popdyn"), default="mp")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float)
    p.add_argument("--xmin", type=float, default=0.0)
    p.add_argument("--xmax", type=float)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--pool-size", type=int, default=100_000)
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-plot", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("simulate", help="sample spectra, write dumps/histogram/moments")
    p.add_argument("--model", choices=("bernoulli", "heavy"), default="bernoulli")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--B", type=float)
    p.add_argument("--centered", action="store_true")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=80)
    p.add_argument("--kmax", type=int, help="moments to report (default 5)")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--out", required=True, help="output path prefix")
    p.add_argument("--cache-dir", default=os.environ.get("WISHARTLAW_CACHE"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("popdyn", help="population-dynamics density curve")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--xmin", type=float, default=0.05)
    p.add_argument("--xmax", type=float)
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--pool-size", type=int, default=100_000)
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-plot", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_popdyn)

    p = sub.add_parser("check", help="run a cross-validation suite")
    p.add_argument("--suite", choices=("oracles", "expansion", "variance", "popdyn"),
                   required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="optional JSON report path")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "xmax", None) is None and args.command in ("density", "popdyn"):
        args.xmax = ll.support_edges(args.alpha)[1] + 1.0
    try:
        return args.func(args)
    except GuardLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

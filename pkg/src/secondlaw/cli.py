"""Command-line entry point: ``secondlaw analyze | simulate-map | optimize``.

Exit codes: 0 pass, 1 audit warnings present, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import parse_config, parse_design
from .microdynamics import contraction_stats, make_map, per_second
from .model import SecondLawError
from .report import analyze, emit_report, to_json
from .variational import minimize_lost_work

EXIT_OK, EXIT_WARN, EXIT_INPUT = 0, 1, 2


def _add_version(p: argparse.ArgumentParser) -> None:
    p.add_argument("--version", action="version", version=f"secondlaw {__version__}")


def _analyze_one(path: str, fmt: str) -> tuple[int, str, str]:
    """Returns (exit code, stdout text, stderr text) for one config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        return EXIT_INPUT, "", f"{path}: io_error: {exc}\n"
    try:
        cfg = parse_config(text)
        report = analyze(cfg, text)
    except SecondLawError as exc:
        return EXIT_INPUT, "", f"{path}: {exc}\n"
    return report.exit_code, emit_report(report, fmt), ""


def cmd_analyze(args) -> int:
    jobs = max(1, args.jobs)
    if jobs > 1 and len(args.configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_analyze_one, args.configs, [args.format] * len(args.configs)))
    else:
        results = [_analyze_one(path, args.format) for path in args.configs]
    out = "".join(text for _, text, _ in results)
    for _, _, err in results:
        if err:
            sys.stderr.write(err)
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return max(code for code, _, _ in results)


def _parse_params(items: list[str]) -> dict:
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise SecondLawError("bad_param", f"expected k=v, got {item!r}")
        try:
            params[key] = int(value) if key == "dim" else float(value)
        except ValueError:
            raise SecondLawError("bad_param", f"{key} must be numeric, got {value!r}") from None
    return params


def cmd_simulate_map(args) -> int:
    try:
        m = make_map(args.map, **_parse_params(args.param))
    except (TypeError, ValueError) as exc:
        raise SecondLawError("bad_param", str(exc)) from None
    if args.steps <= args.burn_in:
        raise SecondLawError("bad_param", "--steps must exceed --burn-in")
    rng = np.random.default_rng(args.seed)
    sigma0 = m.sample(rng, 1)[0]
    stats = contraction_stats(m, sigma0, args.steps, args.burn_in, seed=args.seed)
    doc = {
        "map": m.name,
        "params": {k: float(v) for k, v in m.params.items()},
        "seed": args.seed,
        "initial_point": [float(x) for x in sigma0],
        "steps": stats.T,
        "burn_in": stats.burn_in,
        "mean_contraction_per_step": stats.mean,
        "stderr": stats.stderr,
        "first_half_mean": stats.halves[0],
        "second_half_mean": stats.halves[1],
    }
    if args.step_duration is not None:
        doc["mean_contraction_per_second"] = per_second(stats.mean, args.step_duration)
    if args.format == "json":
        sys.stdout.write(to_json(doc))
    else:
        width = max(len(k) for k in doc)
        for key, value in doc.items():
            if isinstance(value, float):
                value = f"{value:.12g}"
            sys.stdout.write(f"{key.ljust(width)}  {value}\n")
    return EXIT_OK


def cmd_optimize(args) -> int:
    try:
        text = Path(args.design).read_text(encoding="utf-8")
    except OSError as exc:
        raise SecondLawError("io_error", str(exc)) from None
    design = parse_design(text)
    result = minimize_lost_work(design.space, budget=args.budget, tol=args.tol, viewpoint=design.viewpoint, objective=design.objective)
    doc = {
        "template": design.template,
        "viewpoint": design.viewpoint.value,
        "objective": design.objective.value,
        "params_star": result.as_dict(design.names),
        "W_lambda_star": result.W_lambda_star,
        "stationarity": result.stationarity,
        "evaluations": result.evaluations,
        "converged": result.converged,
        "failures": [{"point": list(p), "reason": why} for p, why in result.failures],
    }
    if args.format == "json":
        sys.stdout.write(to_json(doc))
    else:
        for name, value in doc["params_star"].items():
            sys.stdout.write(f"{name}  {value:.10g}\n")
        sys.stdout.write(f"W_lambda*  {result.W_lambda_star:.10g} J\n")
        sys.stdout.write(f"stationarity  {result.stationarity:.3g} J per unit param\n")
        sys.stdout.write(f"evaluations  {result.evaluations}\n")
        sys.stdout.write(f"converged  {'yes' if result.converged else 'no'}\n")
        for item in doc["failures"]:
            sys.stdout.write(f"failed  {item['point']}  {item['reason']}\n")
    return EXIT_WARN if result.failures or not result.converged else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secondlaw", description="Second-law audits of open systems.")
    _add_version(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="entropy generation / lost work audit of a config file")
    _add_version(p)
    p.add_argument("configs", nargs="+", metavar="config.json")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers across config files")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate-map", help="orbit statistics of the per-step phase-space contraction")
    _add_version(p)
    p.add_argument("--map", required=True, choices=["cat", "linear", "baker"])
    p.add_argument("--param", action="append", default=[], metavar="k=v")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-duration", type=float, default=None, help="seconds per step, to report a per-second rate")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_simulate_map)

    p = sub.add_parser("optimize", help="minimize lost work over a built-in design template")
    _add_version(p)
    p.add_argument("design", metavar="design.json")
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SecondLawError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

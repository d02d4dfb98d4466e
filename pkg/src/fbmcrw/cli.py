"""Command-line front end with bit-exact file formats.

Four subcommands: simulate (write a trajectory), advise (print an
accuracy plan), validate (statistical report with verdicts), compare
(side by side against the exact Gaussian sampler).  Exit codes: 0 ok,
2 usage error, 3 infeasible plan, 4 validation verdict failure.  Every
written file gets a JSON manifest with parameter values and SHA-256
digests; outputs contain no timestamps, so a manifest's command line
reproduces its files byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .ensemble import EnsembleConfig, simulate_fbm
from .errors import InfeasiblePlanError, ParameterError
from .measures import Family, make_measure
from .oracle import exact_fbm_sample, fgn_autocovariance
from .planner import advise, cost_estimate
from .rng import replication_seed
from .stats import (ValidationReport, covariance_check,
                    empirical_autocovariance, estimate_hurst,
                    marginal_normality, rise_tail_report,
                    window_autocovariance_theory)
from .walks import first_rise_lengths

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_VALIDATION = 4

_WINDOWS = 16  # span count for increment statistics; N must divide evenly
_RISE_DEPTHS = (10, 50, 100, 500)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_manifest(command: str, parameters: dict, master_seed: int,
                    outputs: list[str]) -> str:
    digests = {}
    for path in outputs:
        with open(path, "rb") as fh:
            digests[os.path.basename(path)] = hashlib.sha256(
                fh.read()).hexdigest()
    manifest = {
        "command": command,
        "parameters": parameters,
        "master_seed": master_seed,
        "library_version": __version__,
        "outputs": digests,
    }
    path = outputs[0] + ".manifest.json"
    with open(path, "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _measure_from(args) -> "MeasureSpec":
    return make_measure(Family(args.family), args.hurst, args.k)


def _replicate(measure, steps: int, walks: int, seed: int,
               count: int) -> np.ndarray:
    """Matrix of `count` independent trajectories, one per row."""
    rows = np.empty((count, steps + 1))
    for rep in range(count):
        cfg = EnsembleConfig(measure, steps, walks,
                             replication_seed(seed, rep))
        rows[rep] = simulate_fbm(cfg).values
    return rows


def cmd_simulate(args) -> int:
    measure = _measure_from(args)
    if args.walks is None and args.target_error is None:
        raise ParameterError("need --walks or --target-error")
    if args.walks is not None and args.target_error is not None:
        raise ParameterError("--walks and --target-error are exclusive")
    k = args.k
    if args.walks is not None:
        walks = args.walks
    else:
        plan = advise(args.hurst, args.steps, args.target_error,
                      Family(args.family), k=args.k,
                      max_walks=args.max_walks)
        walks, k = plan.walks, plan.k
        measure = make_measure(Family(args.family), args.hurst, k)
    cfg = EnsembleConfig(measure, args.steps, walks, args.seed)
    traj = simulate_fbm(cfg)
    if args.format == "csv":
        lines = ["t,value"]
        lines += [f"{i / args.steps:.17g},{v:.17g}"
                  for i, v in enumerate(traj.values)]
        _write_lines(args.out, lines)
    else:
        with open(args.out, "wb") as fh:
            fh.write(np.ascontiguousarray(traj.values, dtype="<f8").tobytes())
    params = {
        "hurst": args.hurst, "steps": args.steps, "walks": walks,
        "k": k, "family": args.family, "format": args.format,
        "out": args.out,
    }
    manifest = _write_manifest("simulate", params, args.seed, [args.out])
    print(f"wrote {args.out} ({args.steps + 1} points), manifest {manifest}")
    print(f"walks={walks}")
    print(f"scale={_fmt(traj.scale)}")
    return EXIT_OK


def cmd_advise(args) -> int:
    plan = advise(args.hurst, args.steps, args.target_error,
                  Family(args.family), k=args.k, max_walks=args.max_walks,
                  slack=args.slack)
    print(f"hurst={_fmt(plan.hurst)}")
    print(f"steps={plan.steps}")
    print(f"target_error={_fmt(plan.target_error)}")
    print(f"family={plan.family.value}")
    print(f"k={_fmt(plan.k)}")
    print(f"walks={plan.walks}")
    print(f"predicted_error={_fmt(plan.predicted_error)}")
    print(f"cost_units={_fmt(plan.cost_units)}")
    print(f"rate_condition_ok={_fmt(plan.rate_condition_ok)}")
    for i, note in enumerate(plan.notes):
        print(f"note_{i}={note}")
    return EXIT_OK


def _window_increments(values: np.ndarray, steps: int,
                       hurst: float) -> np.ndarray:
    bounds = np.arange(_WINDOWS + 1) * (steps // _WINDOWS)
    return np.diff(values[:, bounds], axis=1) * _WINDOWS ** hurst


def cmd_validate(args) -> int:
    measure = _measure_from(args)
    steps, walks, reps = args.steps, args.walks, args.replications
    if reps < 30:
        raise ParameterError("validation needs at least 30 replications")
    if steps < 32 or steps % _WINDOWS:
        raise ParameterError(
            f"validation needs steps divisible by {_WINDOWS} (and >= 32)")
    values = _replicate(measure, steps, walks, args.seed, reps)

    verdicts: list[tuple[str, bool]] = []
    thresholds = [("autocovariance_z", 4.0), ("covariance_z", 4.0),
                  ("hurst_tolerance", args.hurst_tolerance),
                  ("ks_p", 0.01)]

    incs = _window_increments(values, steps, args.hurst)
    rows = empirical_autocovariance(incs, 3)
    theory = window_autocovariance_theory(measure, steps, _WINDOWS, 3)
    table = tuple((lag, est, float(theory[lag]), se)
                  for lag, (est, se) in enumerate(rows))
    autocov_ok = all(abs(est - th) <= 4.0 * se for _, est, th, se in table)
    verdicts.append(("autocovariance", autocov_ok))

    grid = np.arange(1, 9) * (steps // 8)
    max_abs, max_z = covariance_check(values[:, grid], grid / steps,
                                      args.hurst)
    verdicts.append(("covariance", max_z <= 4.0))

    scales = [steps // 8, steps // 4, steps // 2, steps]
    if reps >= 100:
        h_hat, ci = estimate_hurst({s: values[:, s] for s in scales})
        if args.hurst != 0.5:
            verdicts.append(("hurst", abs(h_hat - args.hurst)
                             <= args.hurst_tolerance))
    else:
        h_hat, ci = math.nan, (math.nan, math.nan)

    if reps >= 500:
        ks_d, ks_p = marginal_normality(values[:, steps], 1.0)
        verdicts.append(("marginal_normality", ks_p > 0.01))
    else:
        ks_d = ks_p = None

    if args.hurst >= 0.5:
        runs = first_rise_lengths(measure, 200_000,
                                  replication_seed(args.seed, reps))
        rise = rise_tail_report(runs, args.hurst, depths=_RISE_DEPTHS)
    else:
        rise = ()

    report = ValidationReport(
        autocovariance=table, covariance_max_abs_error=max_abs,
        covariance_max_z=max_z, hurst_estimate=h_hat, hurst_ci=ci,
        ks_statistic=ks_d, ks_p_value=ks_p, rise_tail=rise,
        verdicts=tuple(verdicts), thresholds=tuple(thresholds))

    lines = [f"hurst={_fmt(args.hurst)}", f"steps={steps}",
             f"walks={walks}", f"replications={reps}",
             f"family={args.family}", f"k={_fmt(args.k)}"]
    for lag, est, th, se in report.autocovariance:
        lines.append(f"autocov_lag{lag}_estimate={_fmt(est)}")
        lines.append(f"autocov_lag{lag}_theory={_fmt(th)}")
        lines.append(f"autocov_lag{lag}_se={_fmt(se)}")
    lines.append(f"autocov_asymptote_lag1="
                 f"{_fmt(fgn_autocovariance(1, args.hurst))}")
    lines.append(f"covariance_max_abs_error={_fmt(max_abs)}")
    lines.append(f"covariance_max_z={_fmt(max_z)}")
    if not math.isnan(h_hat):
        lines.append(f"hurst_estimate={_fmt(h_hat)}")
        lines.append(f"hurst_ci_low={_fmt(ci[0])}")
        lines.append(f"hurst_ci_high={_fmt(ci[1])}")
    if ks_p is not None:
        lines.append(f"ks_statistic={_fmt(ks_d)}")
        lines.append(f"ks_p_value={_fmt(ks_p)}")
    for row in rise:
        tag = f"rise_n{row.depth}"
        lines.append(f"{tag}_probability={_fmt(row.probability)}")
        lines.append(f"{tag}_scaled={_fmt(row.scaled)}")
        lines.append(f"{tag}_stated_constant={_fmt(row.stated_constant)}")
        lines.append(f"{tag}_exact_probability={_fmt(row.exact_probability)}")
    for name, value in thresholds:
        lines.append(f"threshold_{name}={_fmt(value)}")
    for name, ok in verdicts:
        lines.append(f"verdict_{name}={'pass' if ok else 'fail'}")
    overall = all(ok for _, ok in verdicts)
    lines.append(f"overall={'pass' if overall else 'fail'}")
    _write_lines(args.report, lines)
    params = {"hurst": args.hurst, "steps": steps, "walks": walks,
              "replications": reps, "k": args.k, "family": args.family,
              "hurst_tolerance": args.hurst_tolerance, "report": args.report}
    _write_manifest("validate", params, args.seed, [args.report])
    for name, ok in verdicts:
        print(f"verdict_{name}={'pass' if ok else 'fail'}")
    print(f"overall={'pass' if overall else 'fail'} (report: {args.report})")
    return EXIT_OK if overall else EXIT_VALIDATION


def cmd_compare(args) -> int:
    measure = _measure_from(args)
    steps, walks, reps = args.steps, args.walks, args.replications
    if steps > 4096:
        raise ParameterError("the exact sampler is capped at 4096 steps")
    if steps < 32 or steps % _WINDOWS:
        raise ParameterError(
            f"comparison needs steps divisible by {_WINDOWS} (and >= 32)")
    if reps < 100:
        raise ParameterError("comparison needs at least 100 replications")

    t0 = time.perf_counter()
    crw = _replicate(measure, steps, walks, args.seed, reps)
    crw_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    oracle = np.zeros((reps, steps + 1))
    for rep in range(reps):
        oracle[rep, 1:] = exact_fbm_sample(args.hurst, steps,
                                           replication_seed(args.seed, rep))
    oracle_seconds = time.perf_counter() - t0

    scales = [steps // 8, steps // 4, steps // 2, steps]
    print(f"hurst={_fmt(args.hurst)}")
    print(f"steps={steps}")
    print(f"walks={walks}")
    print(f"replications={reps}")
    for name, values in (("crw", crw), ("oracle", oracle)):
        rows = empirical_autocovariance(
            _window_increments(values, steps, args.hurst), 3)
        for lag, (est, se) in enumerate(rows):
            print(f"{name}_lag{lag}_estimate={_fmt(est)}")
            print(f"{name}_lag{lag}_se={_fmt(se)}")
        h_hat, ci = estimate_hurst({s: values[:, s] for s in scales})
        print(f"{name}_hurst_estimate={_fmt(h_hat)}")
        print(f"{name}_hurst_ci_low={_fmt(ci[0])}")
        print(f"{name}_hurst_ci_high={_fmt(ci[1])}")
    print(f"asymptote_lag1={_fmt(fgn_autocovariance(1, args.hurst))}")
    print(f"crw_seconds={crw_seconds:.3f}")
    print(f"oracle_seconds={oracle_seconds:.3f}")
    print(f"crw_draws={_fmt(cost_estimate(measure, steps, walks) * reps)}")
    print(f"oracle_draws={_fmt(float(steps) * reps)}")
    return EXIT_OK


def _add_measure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--hurst", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--family", choices=[f.value for f in Family],
                   default=Family.MU_K.value)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbmcrw",
        description="Fractional Brownian motion via superposed "
                    "persistence-mixed random walks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write one trajectory file")
    _add_measure_flags(p)
    p.add_argument("--walks", type=int)
    p.add_argument("--target-error", type=float)
    p.add_argument("--max-walks", type=int, default=10 ** 6)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "f64le"), default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("advise", help="plan walk count for a target error")
    p.add_argument("--hurst", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--target-error", type=float, required=True)
    p.add_argument("--family", choices=[f.value for f in Family],
                   default=Family.MU_K.value)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--max-walks", type=int, default=10 ** 6)
    p.add_argument("--slack", type=float, default=1.0)
    p.set_defaults(func=cmd_advise)

    p = sub.add_parser("validate", help="statistical validation report")
    _add_measure_flags(p)
    p.add_argument("--walks", type=int, required=True)
    p.add_argument("--replications", type=int, required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--hurst-tolerance", type=float, default=0.1)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare", help="side by side with the exact sampler")
    _add_measure_flags(p)
    p.add_argument("--walks", type=int, required=True)
    p.add_argument("--replications", type=int, default=200)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasiblePlanError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())

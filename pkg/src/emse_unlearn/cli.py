"""Command-line entry point.

Exit codes: 0 success, 1 post-unlearning thresholds not met, 2 usage or
configuration error, 3 numerical failure during a run.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from .data import SCENARIOS, ScenarioSpec, generate, load_csv, save_csv, scale_x
from .experiment import load_config, load_model, run_experiment, write_outputs
from .metrics import DegenerateSubsetError, evaluate
from .plotting import TITLES, plot_fit

EXIT_OK, EXIT_THRESHOLD, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

logger = logging.getLogger("emse_unlearn")


def _cmd_generate(args) -> int:
    overrides = {k: v for k, v in (("n_wanted", args.n_wanted), ("n_unwanted", args.n_unwanted),
                                   ("noise_sd", args.noise_sd)) if v is not None}
    spec = ScenarioSpec(name=args.scenario, seed=args.seed, **overrides)
    ds = generate(spec)
    save_csv(ds, args.output)
    logger.info("wrote %d samples (%d wanted, %d unwanted) to %s",
                len(ds), ds.n_wanted, ds.n_unwanted, args.output)
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = load_config(args.config).with_overrides(
        seed=args.seed, out_dir=args.out_dir, plot=False if args.no_plot else None)
    result = run_experiment(cfg)
    paths = write_outputs(result)
    pre, post = result.pre_metrics, result.post_metrics
    print(f"r2_wanted        {pre.r2_wanted:9.4f} -> {post.r2_wanted:9.4f}")
    print(f"exp_r2_unwanted  {pre.exp_r2_unwanted:9.4f} -> {post.exp_r2_unwanted:9.4f}")
    print(f"fair_r2          {pre.fair_r2:9.4f} -> {post.fair_r2:9.4f}")
    print(f"overlap (diagnostic) {post.overlap_score:.4f}")
    if result.overlap_warning:
        print(f"WARNING: overlap diagnostic above {cfg.overlap_threshold}; "
              "fair R^2 relies on an independence assumption these data may violate")
    for check in result.checks:
        status = "ok" if check["passed"] else "FAILED"
        print(f"threshold {check['name']}: {check['value']:.4f} vs {check['limit']} {status}")
    print(f"report written to {paths['report']}")
    return EXIT_OK if result.thresholds_met else EXIT_THRESHOLD


def _cmd_plot(args) -> int:
    ds = load_csv(args.data)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, path in (("before", args.before), ("after", args.after)):
        if path is None:
            continue
        model, x_range = load_model(path)
        target = out / f"{name}.svg"
        plot_fit(ds, model, target, x_range, TITLES[name])
        print(target)
    return EXIT_OK


def _cmd_eval(args) -> int:
    ds = load_csv(args.data)
    model, x_range = load_model(args.model)
    xs = ds.xs if x_range is None else scale_x(ds.xs, x_range)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = evaluate(model, xs, ds.ys, ds.wanted, args.overlap_threshold)
    out = report.to_dict()
    out["overlap_warning"] = report.overlap_warning(args.overlap_threshold)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emse-unlearn",
                                     description="Polynomial regression unlearning with the EMSE criterion.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic scenario to CSV")
    p.add_argument("--scenario", choices=SCENARIOS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-wanted", type=int)
    p.add_argument("--n-unwanted", type=int)
    p.add_argument("--noise-sd", type=float)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("run", help="learn on all data, unlearn, evaluate and report")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("plot", help="render before/after SVGs from saved models")
    p.add_argument("--data", required=True)
    p.add_argument("--before")
    p.add_argument("--after")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("eval", help="print metrics of a saved model on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--overlap-threshold", type=float, default=0.5)
    p.set_defaults(func=_cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (FloatingPointError, DegenerateSubsetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

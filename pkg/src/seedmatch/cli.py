"""Command-line entry point.

Subcommands: generate, match, sweep, verify, seedless, report.
Exit codes: 0 success, 1 input/config error, 2 check failure,
3 resource/budget exceeded.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness, report, verify
from .config import ALGORITHMS, load_config
from .errors import BudgetError, ConfigError, DerivationError, InputError
from .model import load_instance


def _parse_overrides(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise InputError(f"--set expects key=value, got {item!r}")
        key, _, val = item.partition("=")
        out[key] = val
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seedmatch",
        description="Seeded graph matching experiments on correlated "
        "Erdos-Renyi graph pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="sample instance directories")
    p_gen.add_argument("--config", required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--seed", type=int, help="override master seed")

    p_match = sub.add_parser("match", help="run one matcher on one instance")
    p_match.add_argument("instance", help="instance directory")
    p_match.add_argument("--algo", required=True, choices=ALGORITHMS)
    p_match.add_argument("--out", help="CSV to append the result row to")
    p_match.add_argument("--epsilon", type=float, default=0.1)
    p_match.add_argument("--mode", choices=("exact", "fast"), default="fast")
    p_match.add_argument("--budget", type=int, default=10**6)
    p_match.add_argument("--seed", type=int, default=0)
    p_match.add_argument(
        "--set", action="append", default=[], metavar="KEY=VAL",
        help="override a derived parameter (ell, m, tau, d, eta)",
    )

    p_sweep = sub.add_parser("sweep", help="run the full grid x trials")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--jobs", type=int)
    p_sweep.add_argument("--seed", type=int, help="override master seed")

    p_verify = sub.add_parser("verify", help="run the self-check suite")
    p_verify.add_argument("--quick", action="store_true")

    p_seedless = sub.add_parser(
        "seedless", help="run seed-enumeration matching on one instance"
    )
    p_seedless.add_argument("instance")
    p_seedless.add_argument("--budget", type=int, default=10**6)
    p_seedless.add_argument("--out")
    p_seedless.add_argument("--seed", type=int, default=0)

    p_report = sub.add_parser("report", help="render figures from a sweep CSV")
    p_report.add_argument("csv")
    p_report.add_argument("--out", help="directory for figures")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (InputError, ConfigError, DerivationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3


def _dispatch(args) -> int:
    if args.command == "generate":
        config = load_config(args.config)
        if args.seed is not None:
            config.master_seed = args.seed
        paths = harness.generate_instances(config, args.out)
        print(f"wrote {len(paths)} instance directories under {args.out}")
        return 0

    if args.command == "match":
        row = harness.match_instance_dir(
            args.instance,
            args.algo,
            epsilon=args.epsilon,
            mode=args.mode,
            budget=args.budget,
            overrides=_parse_overrides(args.set),
            seed=args.seed,
        )
        if row["error"]:
            print(row["error"], file=sys.stderr)
        if args.out:
            harness.append_csv_row(row, args.out)
        print(
            f"algorithm={args.algo} exact={row.get('exact', '')} "
            f"fraction={row.get('fraction_correct', '')} "
            f"failed={row.get('failed', '')} qap={row.get('qap', '')}"
        )
        if row["error"].startswith("BudgetError"):
            return 3
        return 0

    if args.command == "sweep":
        config = load_config(args.config)
        if args.seed is not None:
            config.master_seed = args.seed
        rows = harness.run_sweep(config, jobs=args.jobs)
        harness.write_csv(rows, args.out)
        errors = sum(1 for r in rows if r.get("error"))
        print(f"wrote {len(rows)} rows to {args.out} ({errors} error rows)")
        return 0

    if args.command == "verify":
        results = verify.run_all_checks(quick=args.quick)
        failed = False
        for res in results:
            tag = "PASS" if res.passed else "FAIL"
            print(f"[{tag}] {res.name}: {res.detail}")
            failed = failed or not res.passed
        return 2 if failed else 0

    if args.command == "seedless":
        inst, seeds = load_instance(args.instance)
        row = harness.run_match(
            inst,
            seeds,
            "seedless",
            epsilon=0.1,
            rng=np.random.default_rng(
                inst.rng_seed if inst.rng_seed is not None else args.seed
            ),
            budget=args.budget,
        )
        row["trial"] = 0
        row["seed"] = inst.rng_seed if inst.rng_seed is not None else args.seed
        if row["error"]:
            print(row["error"], file=sys.stderr)
            if row["error"].startswith("BudgetError"):
                return 3
        if args.out:
            harness.append_csv_row(row, args.out)
        print(
            f"exact={row.get('exact', '')} fraction={row.get('fraction_correct', '')} "
            f"qap={row.get('qap', '')}"
        )
        return 0

    if args.command == "report":
        written = report.render_report(args.csv, out_dir=args.out)
        for path in written:
            print(path)
        return 0

    raise InputError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())

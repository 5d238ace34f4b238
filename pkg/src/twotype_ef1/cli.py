"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 ratio bound violated (bench),
3 oracle size guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from . import bench
from .core import InstanceError, ef1_violation, is_complete, social_welfare
from .oracle import SizeGuardExceeded, brute_force_opt_ef1, gen_random, gen_tightness_norm, gen_tightness_unnorm
from .serialize import (
    format_rational,
    parse_allocation,
    parse_instance,
    parse_rational,
    serialize_instance,
    serialize_oracle_report,
    serialize_report,
)

EXIT_OK, EXIT_INVALID, EXIT_BOUND, EXIT_GUARD = 0, 1, 2, 3


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text, path=None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args):
    inst = parse_instance(_read(args.input))
    report = bench.solve_report(inst, args.algo, with_oracle=args.oracle)
    _emit(serialize_report(report), args.output)
    return EXIT_OK


def cmd_verify(args):
    inst = parse_instance(_read(args.input))
    alloc = parse_allocation(_read(args.allocation), inst)
    violation = ef1_violation(inst, alloc)
    doc = {
        "complete": is_complete(inst, alloc),
        "ef1": violation is None,
        "violation": None,
        "welfare": format_rational(social_welfare(inst, alloc)),
    }
    if violation is not None:
        envier, envied = violation
        row = inst.row(envier)
        witness = max(sorted(alloc[envied]), key=lambda g: (row[g], -g))
        doc["violation"] = {"envier": envier, "envied": envied, "witness_item": witness}
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_oracle(args):
    inst = parse_instance(_read(args.input))
    _emit(serialize_oracle_report(brute_force_opt_ef1(inst)), args.output)
    return EXIT_OK


def cmd_gen(args):
    if args.kind == "tightness-unnorm":
        inst = gen_tightness_unnorm(parse_rational(args.epsilon, "--epsilon"))
    elif args.kind == "tightness-norm":
        inst = gen_tightness_norm(parse_rational(args.epsilon, "--epsilon"))
    else:
        inst = gen_random(args.seed, args.n, args.m, normalized=args.normalized)
    _emit(serialize_instance(inst), args.output)
    return EXIT_OK


def cmd_bench(args):
    if args.suite == "paper":
        rows = bench.tightness_suite()
    else:
        rows = bench.random_suite(args.seed, args.count, args.jobs)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["label", "algorithm", "n", "m", "sol", "opt", "opt_over_sol", "approx", "ef1", "complete", "ok"])
    for r in rows:
        ratio = r.ratio
        writer.writerow([
            r.label, r.family, r.n, r.m, format_rational(r.sol), format_rational(r.opt),
            "inf" if ratio is None else format_rational(ratio),
            "inf" if ratio is None else "%.6f" % float(ratio),
            r.ef1, r.complete, r.ok,
        ])
    by_family = {}
    for r in rows:
        by_family.setdefault(r.family, []).append(r)
    for family, group in sorted(by_family.items()):
        finite = [r.ratio for r in group if r.ratio is not None]
        worst = max(finite, default=Fraction(1))
        bad = sum(not r.ok for r in group)
        print("# %s: %d instances, worst OPT/SOL %s (%.6f), bound %s, violations %d"
              % (family, len(group), format_rational(worst), float(worst),
                 format_rational(bench.RATIO_BOUND[family]), bad), file=sys.stderr)
    return EXIT_BOUND if any(not r.ok for r in rows) else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="twotype-ef1", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run an approximation algorithm on an instance file")
    p.add_argument("--input", required=True)
    p.add_argument("--algo", default="auto", choices=("auto",) + bench.ALGORITHMS)
    p.add_argument("--output")
    p.add_argument("--oracle", action="store_true", help="also compute the brute-force optimum")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check an allocation for completeness and EF1")
    p.add_argument("--input", required=True)
    p.add_argument("--allocation", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force the optimal EF1 welfare")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="write an instance file")
    p.add_argument("--kind", required=True, choices=("tightness-unnorm", "tightness-norm", "random"))
    p.add_argument("--epsilon", default="1/1000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="compare solvers against the oracle")
    p.add_argument("--suite", required=True, choices=("paper", "random"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=300)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeGuardExceeded as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_GUARD
    except (InstanceError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

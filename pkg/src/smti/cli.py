"""Command-line interface.

Subcommands: solve, opt, verify, gen, audit, bench. Exit codes: 0 on
success, 1 for input or usage errors, 2 when a requested check finds a
violation (blocking pairs, failed audit, missed ratio floor).
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from fractions import Fraction

from .audit import check_all
from .engine import Policy
from .instance import (
    Instance,
    ParseError,
    build_matching,
    gen_random,
    gen_tight,
    observed_max_tie,
    parse_instance,
    parse_matching,
    serialize_instance,
    serialize_matching,
    tight_optimum,
    validate_instance,
)
from .matcher import solve
from .oracle import brute_force_opt
from .stability import find_blocking_pairs


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_instance(path: str, tiecap: int | None = None) -> Instance:
    inst = parse_instance(_read(path))
    if tiecap is not None:
        if tiecap < observed_max_tie(inst):
            raise ValueError(f"tiecap {tiecap} is smaller than the largest tie group")
        inst = replace(inst, tie_cap=tiecap)
        validate_instance(inst)
    return inst


def _policy(args: argparse.Namespace) -> Policy:
    if args.policy == "shuffle":
        return Policy(man_order="shuffle", woman_tiebreak="shuffle", seed=args.seed)
    return Policy(seed=args.seed)


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance, args.tiecap)
    result = solve(inst, _policy(args))
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(result.trace.to_jsonl())
    if args.gprime:
        with open(args.gprime, "w", encoding="utf-8") as fh:
            fh.write(result.graph.dump_lines())
    sys.stdout.write(serialize_matching(result.matching))
    return 0


def cmd_opt(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    matching, size, optima = brute_force_opt(inst, limit=args.limit)
    sys.stdout.write(f"# size {size} optima {optima}\n")
    sys.stdout.write(serialize_matching(matching))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    pairs = parse_matching(_read(args.matching))
    matching = build_matching(inst, pairs)
    blocking = find_blocking_pairs(inst, matching)
    for a, b in blocking:
        sys.stdout.write(f"{a} {b}\n")
    return 2 if blocking else 0


def cmd_gen(args: argparse.Namespace) -> int:
    if args.family == "random":
        inst = gen_random(args.men, args.women, args.density, args.maxtie, args.seed)
    else:
        inst = gen_tight(args.L)
    text = serialize_instance(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_audit(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    result = solve(inst)
    opt, _, _ = brute_force_opt(inst, limit=args.limit)
    report = check_all(inst, result.graph, result.trace, result.matching, opt)
    sys.stdout.write(report.to_json() + "\n")
    return 0 if report.all_pass else 2


def _bench_rows(args: argparse.Namespace):
    if args.family == "tight":
        for L in range(args.lmin, args.lmax + 1):
            inst = gen_tight(L)
            result = solve(inst)
            opt = tight_optimum(L)
            if find_blocking_pairs(inst, opt):
                raise RuntimeError(f"reference matching for L={L} is not stable")
            report = check_all(inst, result.graph, result.trace, result.matching, opt)
            yield {
                "seed": L,
                "n": inst.n_men,
                "L": L,
                "E": len(inst.edges()),
                "M": result.matching.size,
                "OPT": opt.size,
                "ratio": f"{opt.size}/{result.matching.size}",
                "all_checks_pass": report.all_pass,
            }
    else:
        for i in range(args.count):
            seed = args.seed0 + i
            inst = gen_random(args.men, args.women, args.density, args.maxtie, seed)
            result = solve(inst)
            opt, opt_size, _ = brute_force_opt(inst, limit=args.limit)
            report = check_all(inst, result.graph, result.trace, result.matching, opt)
            n = inst.n_men if inst.n_men == inst.n_women else f"{inst.n_men}x{inst.n_women}"
            yield {
                "seed": seed,
                "n": n,
                "L": inst.tie_cap,
                "E": len(inst.edges()),
                "M": result.matching.size,
                "OPT": opt_size,
                "ratio": f"{opt_size}/{result.matching.size}",
                "all_checks_pass": report.all_pass,
            }


def cmd_bench(args: argparse.Namespace) -> int:
    fieldnames = ["seed", "n", "L", "E", "M", "OPT", "ratio", "all_checks_pass"]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames)
    writer.writeheader()
    rows = list(_bench_rows(args))
    for row in rows:
        writer.writerow(row)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        out = sys.stdout
    else:
        sys.stdout.write(buf.getvalue())
        out = sys.stderr

    ok = all(r["all_checks_pass"] for r in rows)
    ratios = [Fraction(r["M"], r["OPT"]) for r in rows if r["OPT"]]
    if ratios:
        worst = min(ratios)
        out.write(f"min M/OPT = {worst.numerator}/{worst.denominator}\n")
    for L in sorted({r["L"] for r in rows}):
        floor = Fraction(2 * L - 1, 3 * L - 2)
        sub = [Fraction(r["M"], r["OPT"]) for r in rows if r["L"] == L and r["OPT"]]
        if not sub:
            continue
        worst = min(sub)
        held = worst >= floor
        ok = ok and held
        out.write(
            f"floor at L={L}: {floor.numerator}/{floor.denominator} "
            f"(observed {worst.numerator}/{worst.denominator}) {'ok' if held else 'VIOLATED'}\n"
        )
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smti",
        description="Stable matching with bounded ties and incomplete lists: "
        "approximate solver, exact oracle, verifier, and run auditor.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the two-stage solver on an instance file")
    p.add_argument("instance")
    p.add_argument("--tiecap", type=int, default=None, help="raise the tie cap (and proposal budget)")
    p.add_argument("--seed", type=int, default=None, help="seed for shuffled policies")
    p.add_argument("--policy", choices=["default", "shuffle"], default="default")
    p.add_argument("--trace", metavar="PATH", help="write the event trace as JSON lines")
    p.add_argument("--gprime", metavar="PATH", help="write held proposals as 'man woman count' lines")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("opt", help="exhaustive largest stable matching (small instances)")
    p.add_argument("instance")
    p.add_argument("--limit", type=int, default=10, help="largest side the search will accept")
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("verify", help="check a matching file for blocking pairs")
    p.add_argument("instance")
    p.add_argument("matching")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate an instance")
    gsub = p.add_subparsers(dest="family", required=True)
    pr = gsub.add_parser("random", help="random instance")
    pr.add_argument("--men", type=int, required=True)
    pr.add_argument("--women", type=int, required=True)
    pr.add_argument("--density", type=float, required=True)
    pr.add_argument("--maxtie", type=int, required=True)
    pr.add_argument("--seed", type=int, required=True)
    pr.add_argument("-o", "--output")
    pr.set_defaults(func=cmd_gen)
    pt = gsub.add_parser("tight", help="worst-case family for a given tie bound")
    pt.add_argument("L", type=int)
    pt.add_argument("-o", "--output")
    pt.set_defaults(func=cmd_gen)

    p = sub.add_parser("audit", help="solve, find the optimum, and check the whole analysis")
    p.add_argument("instance")
    p.add_argument("--limit", type=int, default=10)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bench", help="batch runs with ratio tracking")
    p.add_argument("--family", choices=["random", "tight"], default="random")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--men", type=int, default=6)
    p.add_argument("--women", type=int, default=6)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--maxtie", type=int, default=2)
    p.add_argument("--seed0", type=int, default=0)
    p.add_argument("--limit", type=int, default=10)
    p.add_argument("--lmin", type=int, default=2)
    p.add_argument("--lmax", type=int, default=6)
    p.add_argument("--csv", metavar="PATH")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: group tools, closures, certificates, verification."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import catalog as cat
from . import verifiers as ver
from .cache import ResultCache
from .critical import (
    cr_exhaustive,
    cr_formula,
    cr_sampled_upper,
    resolving_sequence,
    witness_lower_bound,
)
from .groups import ElementSet, GroupValidationError, load_cayley, make_group, save_cayley
from .sumsets import sigma
from .verifiers import DEFAULT_SEED, DEFAULT_TRIALS


def _print_json(obj: dict, pretty: bool) -> None:
    if pretty:
        width = max((len(k) for k in obj), default=0)
        for k, v in obj.items():
            print(f"{k.ljust(width)}  {v}")
        print()
    else:
        print(json.dumps(obj, separators=(",", ":")))


def _parse_set(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ValueError(f"--set expects comma-separated integers, got {text!r}") from None


def _group_summary(g) -> dict:
    flags = cat.compute_flags(g)
    return {
        "name": g.name,
        "order": g.n,
        "abelian": flags["abelian"],
        "nilpotent": flags["nilpotent"],
        "has_index2_subgroup": flags["has_index2_subgroup"],
        "smallest_prime": flags["smallest_prime"],
    }


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="critnum",
        description="Subset-sum closures and critical numbers of small finite groups.",
    )
    parser.add_argument("--pretty", action="store_true", help="human-readable output")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
    parser.add_argument("--no-cache", action="store_true", help="bypass the result cache")
    # the same flags are accepted after the subcommand; SUPPRESS keeps a
    # pre-subcommand value from being clobbered by the subparser default
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
    shared.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    shared.add_argument("--no-cache", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p_group = sub.add_parser("group", help="construct, load, or inspect groups")
    group_sub = p_group.add_subparsers(dest="group_command", required=True)
    p_make = group_sub.add_parser("make", parents=[shared], help="build from a descriptor, print Cayley text")
    p_make.add_argument("descriptor", help="e.g. 'dihedral(3)' or 'semidirect_cyclic(9,3,4)'")
    p_load = group_sub.add_parser("load", parents=[shared], help="validate a Cayley file and summarize")
    p_load.add_argument("path")
    p_show = group_sub.add_parser("show", parents=[shared], help="summarize a catalog group")
    p_show.add_argument("name")

    p_sigma = sub.add_parser("sigma", parents=[shared], help="subset-sum closure of a set")
    p_sigma.add_argument("--group", required=True)
    p_sigma.add_argument("--set", required=True, dest="elements")
    p_sigma.add_argument("--by-cardinality", action="store_true")

    p_cr = sub.add_parser("cr", parents=[shared], help="critical-number certificates")
    p_cr.add_argument("method", choices=["exact", "formula", "witness", "sample"])
    p_cr.add_argument("--group", required=True)
    p_cr.add_argument("--budget", type=int, default=None)
    p_cr.add_argument("--t", type=int, default=None, help="subset size for sampling")
    p_cr.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p_cr.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p_res = sub.add_parser("resolve", parents=[shared], help="resolving sequence of a set")
    p_res.add_argument("--group", required=True)
    p_res.add_argument("--set", required=True, dest="elements")

    p_ver = sub.add_parser("verify", parents=[shared], help="run a verifier")
    p_ver.add_argument("lemma_id")
    p_ver.add_argument("--group", default=None)
    p_ver.add_argument("--mode", choices=["exhaustive", "sampled"], default=None)
    p_ver.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p_ver.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_ver.add_argument("--budget", type=int, default=None)

    p_cat = sub.add_parser("catalog", help="catalog management")
    cat_sub = p_cat.add_subparsers(dest="catalog_command", required=True)
    cat_sub.add_parser("list", parents=[shared], help="list catalog entries")

    return parser


def _run_cr(args) -> dict:
    g = cat.resolve_group(args.group)
    if args.method == "exact":
        cert = cr_exhaustive(g, budget=args.budget, jobs=args.jobs)
    elif args.method == "formula":
        maybe = cr_formula(g)
        if maybe is None:
            return {"group_name": g.name, "n": g.n, "method": "formula", "applicable": False}
        cert = maybe
    elif args.method == "witness":
        cert = witness_lower_bound(g)
    else:
        if args.t is None:
            raise ValueError("cr sample requires --t (the subset size)")
        cert = cr_sampled_upper(g, args.t, args.trials, seed=args.seed)
    return cert.to_json()


def _run_verify(args) -> list[dict]:
    lemma = args.lemma_id
    if lemma == "L2.1":
        g = cat.resolve_group(_require_group(args))
        reports = [ver.verify_L2_1(g, mode=args.mode, trials=args.trials, seed=args.seed)]
    elif lemma == "L2.2":
        g = cat.resolve_group(_require_group(args))
        from .groups import smallest_prime_divisor

        p = smallest_prime_divisor(g.n)
        q = g.n // p
        which = "product" if "x" in g.name else "cyclic"
        reports = [
            ver.verify_L2_2(
                p, q, which, mode=args.mode, trials=args.trials, seed=args.seed, jobs=args.jobs
            )
        ]
    elif lemma == "L2.3":
        g = cat.resolve_group(_require_group(args))
        reports = [ver.verify_L2_3(g, mode=args.mode, trials=args.trials, seed=args.seed)]
    elif lemma == "L2.4":
        g = cat.resolve_group(_require_group(args))
        reports = [ver.verify_L2_4(g, mode=args.mode, trials=args.trials, seed=args.seed)]
    elif lemma == "L2.5":
        g = cat.resolve_group(_require_group(args))
        reports = ver.run_L2_5(g)
    elif lemma in ("L2.5i", "L2.5ii", "L2.5iii", "L2.5iv", "L2.5v"):
        g = cat.resolve_group(_require_group(args))
        reports = [ver.verify_L2_5(g, lemma[len("L2.5"):])]
    elif lemma == "L2.6":
        reports = [ver.verify_L2_6(group=args.group, budget=args.budget, jobs=args.jobs)]
    elif lemma == "INEQ2.3":
        g = cat.resolve_group(_require_group(args))
        reports = [ver.verify_ineq_2_3(g, mode=args.mode, trials=args.trials, seed=args.seed)]
    elif lemma == "INEQ2.4":
        g = cat.resolve_group(_require_group(args))
        reports = [ver.verify_ineq_2_4(g, trials=args.trials, seed=args.seed)]
    elif lemma == "CDFOLD":
        reports = [ver.verify_cd_fold()]
    elif lemma == "T1.3small":
        reports = [ver.verify_T1_3_small(jobs=args.jobs, budget=args.budget)]
    else:
        raise ValueError(
            f"unknown lemma id {lemma!r}; choose from {', '.join(ver.LEMMA_IDS)}"
        )
    return [r.to_json() for r in reports]


def _require_group(args) -> str:
    if args.group is None:
        raise ValueError(f"verify {args.lemma_id} requires --group")
    return args.group


def _cache_params(args, keys: Sequence[str]) -> dict:
    params = {k: getattr(args, k, None) for k in keys}
    params["jobs"] = args.jobs
    return params


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "group":
            if args.group_command == "make":
                print(save_cayley(make_group(args.descriptor)), end="")
            elif args.group_command == "load":
                with open(args.path, encoding="utf-8") as fh:
                    g = load_cayley(fh.read())
                _print_json(_group_summary(g), args.pretty)
            else:
                _print_json(_group_summary(cat.resolve_group(args.name)), args.pretty)
            return 0

        if args.command == "catalog":
            for entry in cat.catalog_init():
                _print_json(entry.to_json(), args.pretty)
            return 0

        if args.command == "sigma":
            g = cat.resolve_group(args.group)
            s = ElementSet.from_indices(g, _parse_set(args.elements))
            clo = sigma(g, s, want_by_cardinality=args.by_cardinality)
            out = {
                "group_name": g.name,
                "set": list(s.indices()),
                "full": list(clo.full.indices()),
                "size": len(clo.full),
                "exact": clo.exact,
            }
            if clo.by_cardinality is not None:
                out["by_cardinality"] = {
                    str(r): list(es.indices()) for r, es in sorted(clo.by_cardinality.items())
                }
            _print_json(out, args.pretty)
            return 0

        if args.command == "resolve":
            g = cat.resolve_group(args.group)
            s = ElementSet.from_indices(g, _parse_set(args.elements))
            rs = resolving_sequence(g, s)
            _print_json(
                {
                    "group_name": g.name,
                    "set": list(s.indices()),
                    "ordering": list(rs.ordering),
                    "lambdas": list(rs.lambdas),
                    "critical_index": rs.critical_index,
                    "prefix_sizes": list(rs.prefix_sizes),
                },
                args.pretty,
            )
            return 0

        if args.command == "cr":
            cache = None if args.no_cache else ResultCache()
            operation = f"cr {args.method}"
            params = _cache_params(args, ["group", "method", "budget", "t", "trials", "seed"])
            group_key = args.group
            if cache is not None:
                with cache.lock():
                    record = cache.get(group_key, operation, params)
                    if record is None:
                        record = cache.put(group_key, operation, params, _run_cr(args))
            else:
                record = _run_cr(args)
            _print_json(record, args.pretty)
            lower = record.get("lower_bound")
            upper = record.get("upper_bound")
            if lower is not None and upper is not None and lower > upper:
                return 1
            return 0

        if args.command == "verify":
            cache = None if args.no_cache else ResultCache()
            operation = f"verify {args.lemma_id}"
            params = _cache_params(
                args, ["group", "lemma_id", "mode", "trials", "seed", "budget"]
            )
            group_key = args.group or "*"
            if cache is not None:
                with cache.lock():
                    stored = cache.get(group_key, operation, params)
                    if stored is None:
                        stored = cache.put(
                            group_key, operation, params, {"reports": _run_verify(args)}
                        )
            else:
                stored = {"reports": _run_verify(args)}
            reports = stored["reports"]
            for report in reports:
                _print_json(report, args.pretty)
            return 1 if any(r.get("failures") for r in reports) else 0

    except (KeyError, ValueError, GroupValidationError, FileNotFoundError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        print("run 'critnum --help' for usage", file=sys.stderr)
        return 2
    return 2


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

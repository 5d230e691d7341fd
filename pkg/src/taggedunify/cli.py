"""Command-line front end.

Subcommands: ``unify``, ``dnut check``, ``dnut tag``, ``prove-theorem`` and
``parse`` (round-trip debug).  Input is a path, ``-`` for stdin, or inline
text via ``-e``.  Exit codes: 0 success/unifiable/satisfied, 1 negative
result, 2 input error, 3 enumeration caps hit.

The environment variable ``TAGGEDUNIFY_CAPS`` overrides enumeration caps,
e.g. ``TAGGEDUNIFY_CAPS="partition-vars=12,branches=50000,orders=5040"``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from typing import Sequence

from .acun import unify_acun
from .bsca import BscaConfig, ChoiceSpaceExceeded, unify_combined
from .dnut import dnut_check, dnut_tag
from .oracle import GenConfig, run_harness
from .terms import Problem, Theory
from .textfmt import (
    ParseError,
    ProblemFile,
    parse_problem_file,
    render_substitution,
    render_term,
    substitution_to_jsonable,
)
from .unify import ImpureTermError, unify_free_xor, unify_std

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_CAPS = 3

_CAP_KEYS = {
    "partition-vars": "max_partition_vars",
    "orders": "max_orders",
    "branches": "max_branches",
}


def caps_from_env(base: BscaConfig | None = None) -> BscaConfig:
    base = base or BscaConfig()
    raw = os.environ.get("TAGGEDUNIFY_CAPS", "").strip()
    if not raw:
        return base
    overrides = {}
    for part in raw.split(","):
        if not part.strip():
            continue
        try:
            key, value = part.split("=", 1)
            overrides[_CAP_KEYS[key.strip()]] = int(value)
        except (ValueError, KeyError) as exc:
            raise ValueError(f"bad TAGGEDUNIFY_CAPS entry {part!r}") from exc
    return dataclasses.replace(base, **overrides)


def _read_input(args: argparse.Namespace) -> str:
    if getattr(args, "expr", None):
        return args.expr
    path = getattr(args, "input", None)
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _problems_and_theory(pf: ProblemFile, flag: str | None) -> tuple[list[Problem], Theory]:
    if not pf.entries:
        raise ValueError("no unification entries in input")
    if flag is not None:
        theory = Theory(flag)
    else:
        theories = {e.theory for e in pf.entries}
        if len(theories) > 1:
            raise ValueError(
                "entries carry different theories; pass --theory to pick one"
            )
        theory = theories.pop()
    return [e.problem for e in pf.entries], theory


def cmd_unify(args: argparse.Namespace) -> int:
    try:
        pf = parse_problem_file(_read_input(args))
        problems, theory = _problems_and_theory(pf, args.theory)
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    caps = caps_from_env()
    traces = None
    try:
        if theory is Theory.STD:
            sigma = unify_std(problems)
            unifiers = [sigma] if sigma is not None else []
        elif theory is Theory.FREE_XOR:
            sigma = unify_free_xor(problems)
            unifiers = [sigma] if sigma is not None else []
        elif theory is Theory.ACUN:
            unifiers = unify_acun(problems)
        else:
            result = unify_combined(
                problems, dataclasses.replace(caps, keep_traces=args.explain)
            )
            unifiers = result.unifiers
            traces = result.traces
    except ImpureTermError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ChoiceSpaceExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPS

    if args.format == "json":
        for sigma in unifiers:
            print(json.dumps({"unifier": substitution_to_jsonable(sigma)}, sort_keys=True))
    else:
        if unifiers:
            for sigma in unifiers:
                print(render_substitution(sigma))
        else:
            print("not unifiable")
    if args.explain and traces is not None:
        for trace in traces:
            print(json.dumps(trace.to_jsonable(), sort_keys=True))
    return EXIT_OK if unifiers else EXIT_NEGATIVE


def _term_sets(pf: ProblemFile) -> list[tuple[str, list]]:
    sets = list(pf.sets.items())
    if pf.terms:
        sets.insert(0, ("", pf.terms))
    return sets


def cmd_dnut(args: argparse.Namespace) -> int:
    try:
        pf = parse_problem_file(_read_input(args))
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sets = _term_sets(pf)

    if args.action == "check":
        all_ok = True
        for name, terms in sets:
            report = dnut_check(terms)
            all_ok &= report.satisfied
            label = f"{name}: " if name else ""
            if args.format == "json":
                print(json.dumps({"set": name, **report.to_jsonable()}, sort_keys=True))
            else:
                print(f"{label}{report.to_text()}")
        return EXIT_OK if all_ok else EXIT_NEGATIVE

    # tag: retag every set's messages in order, preserving the input shape
    for name, terms in sets:
        tagged = dnut_tag(terms)
        if name:
            print(f"set {name} {{")
            for t in tagged:
                print(f"  {render_term(t)}")
            print("}")
        else:
            for t in tagged:
                print(render_term(t))
    return EXIT_OK


def cmd_prove_theorem(args: argparse.Namespace) -> int:
    cfg = GenConfig(seed=args.seed, samples=args.samples, max_depth=args.depth)
    from .oracle import _HARNESS_CAPS

    caps = caps_from_env(_HARNESS_CAPS)
    population = {"with-sequences": "non-variables"}.get(args.population, args.population)
    report = run_harness(cfg, caps, population)
    if args.format == "json":
        print(json.dumps(report.to_jsonable(), sort_keys=True))
    else:
        j = report.to_jsonable()
        print(f"samples: {j['samples']}  seed: {j['seed']}  pairs: {j['pairs_total']}")
        print(
            f"combined-unifiable pairs: {j['combined_unifiable_pairs']}  "
            f"free-unifiable pairs: {j['free_unifiable_pairs']}"
        )
        print(f"counterexamples (population {population}): {len(report.counterexamples)}")
        print(
            "counterexamples, order-insensitive xor variant: "
            f"{report.counterexamples_unordered_variant}"
        )
        print(f"incomplete pairs (caps hit): {len(report.incomplete)}")
    if report.incomplete:
        return EXIT_CAPS
    return EXIT_OK if not report.counterexamples else EXIT_NEGATIVE


def cmd_parse(args: argparse.Namespace) -> int:
    from .textfmt import render_problem_file

    try:
        pf = parse_problem_file(_read_input(args))
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(render_problem_file(pf))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="taggedunify",
        description="Equational unification with xor, disjoint-theory "
        "combination, and the DNUT tagging tools.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add_input(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", nargs="?", default="-", help="input path, or - for stdin")
        p.add_argument("-e", "--expr", help="inline input text instead of a path")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p_unify = sub.add_parser("unify", help="unify the entries of a problem file")
    add_input(p_unify)
    p_unify.add_argument(
        "--theory",
        choices=[t.value for t in Theory],
        help="override the theory of all entries",
    )
    p_unify.add_argument(
        "--explain", action="store_true", help="dump per-branch trace JSON (combined only)"
    )
    p_unify.set_defaults(func=cmd_unify)

    p_dnut = sub.add_parser("dnut", help="check or apply the tagging discipline")
    p_dnut.add_argument("action", choices=("check", "tag"))
    add_input(p_dnut)
    p_dnut.set_defaults(func=cmd_dnut)

    p_thm = sub.add_parser(
        "prove-theorem", help="run the tagged-protocol harness and report counterexamples"
    )
    p_thm.add_argument("--samples", type=int, default=10_000)
    p_thm.add_argument("--seed", type=int, default=0)
    p_thm.add_argument("--depth", type=int, default=3, help="generator depth bound")
    p_thm.add_argument(
        "--population",
        choices=("both", "non-variables", "with-sequences", "no-sequences"),
        default="both",
        help="which pairs count (with-sequences is an alias of non-variables)",
    )
    p_thm.add_argument("--format", choices=("text", "json"), default="text")
    p_thm.set_defaults(func=cmd_prove_theorem)

    p_parse = sub.add_parser("parse", help="parse input and print its canonical rendering")
    add_input(p_parse)
    p_parse.set_defaults(func=cmd_parse)

    return top


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())

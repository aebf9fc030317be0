"""Command-line front end.

Exit codes: 0 when everything passes, 1 when a suite reports a failure,
2 on usage, parse or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from . import oracles
from .machines import (
    A1,
    A2,
    DEFAULT_LETTER_BUDGET,
    LetterBudgetError,
    SymbolicWord,
    build,
    counters_of,
    parse_letters,
    render_runs,
    render_word,
)
from .reductions import FiniteOrder, TreeSet, encode, order_to_tree
from .suites import SUITES, ExperimentConfig, bench, run_suite
from .vass import explore

log = logging.getLogger("blindvass")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: Optional[str], what: str) -> str:
    if path is None:
        raise UsageError(f"missing {what}")
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path}: {exc}") from exc


def _read_json(path: Optional[str], what: str):
    text = _read(path, what)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path} is not JSON: {exc}") from exc


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _tree(args) -> TreeSet:
    return TreeSet.from_json(_read_json(args.tree_file, "tree file"))


def _phases(args, X: TreeSet) -> int:
    return X.depth + 1 if args.phases is None else args.phases


def _load_word(args):
    """The word as ``(SymbolicWord or None, letters or None)``; JSON files are symbolic."""
    path = args.word_file
    text = _read(path, "word file")
    k = counters_of(args.automaton)
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            w = SymbolicWord.from_json(json.loads(stripped))
        except json.JSONDecodeError as exc:
            raise UsageError(f"word file {path} is not JSON: {exc}") from exc
        if w.counters != k:
            raise UsageError(f"{args.automaton} needs a {k}-counter word, file has {w.counters}")
        return w, None
    if len(stripped) > args.letter_budget:
        raise LetterBudgetError(f"word has {len(stripped)} letters, budget is {args.letter_budget}")
    return None, stripped


def cmd_encode(args) -> int:
    X = _tree(args)
    w = encode(args.automaton, X, _phases(args, X))
    if args.format == "letters":
        _write(args.out, render_word(w, budget=args.letter_budget))
    else:
        _write(args.out, w.dumps())
    return EXIT_OK


def cmd_check(args) -> int:
    w, letters = _load_word(args)
    k = args.min_accepting
    if args.engine == "symbolic":
        if w is None:
            w = parse_letters(letters, counters_of(args.automaton))
        report = oracles.chosen_block_trace(args.automaton, w, cap=k)
        visits = report.value if report.witness.get("full_run", True) else None
        witness = report.witness
    else:
        word = letters if w is None else render_runs(w, budget=args.letter_budget)
        found = explore(build(args.automaton), word, k)
        visits = found.visits
        witness = {"choices": [[pos, state] for pos, state in found.choices]}
    out = {"visits": visits, "reached_K": visits is not None and visits >= k, "witness": witness}
    _write(args.out, json.dumps(out, indent=1))
    return EXIT_OK


def cmd_oracle(args) -> int:
    X = _tree(args)
    n = _phases(args, X)
    if args.automaton == A1:
        value, chain = oracles.max_good_steps(X, n)
        report = oracles.WitnessReport("chain", value, {"chain": list(chain.nodes), "good_steps": sorted(chain.good_steps)})
    else:
        value, branch = oracles.max_branch_hits(X, n)
        report = oracles.WitnessReport("branch", value, {"branch": branch})
    _write(args.out, json.dumps(report.to_json(), indent=1))
    return EXIT_OK


def _config(args, suite: str) -> ExperimentConfig:
    return ExperimentConfig(
        suite=suite,
        max_depth=args.max_depth,
        samples=args.samples,
        seed=args.seed,
        letter_budget=args.letter_budget,
        out=args.out,
    )


def cmd_verify(args) -> int:
    report = run_suite(_config(args, args.suite))
    _write(args.out, report.dumps())
    print(f"{report.suite}: {report.passed} passed, {report.failed} failed", file=sys.stderr)
    return EXIT_OK if report.failed == 0 else EXIT_FAIL


def cmd_reduce_order(args) -> int:
    o = FiniteOrder.from_json(_read_json(args.order_file, "order file"))
    xs, X = order_to_tree(o)
    _write(args.out, json.dumps({"nodes": xs, "tree": X.to_json()}, indent=1))
    return EXIT_OK


def cmd_bench(args) -> int:
    _, table = bench(_config(args, "bench"))
    _write(args.out, table)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blindvass", description="Block-word encodings for one- and two-counter Buchi VASS.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, automaton=False, tree=False, phases=False, budget=True):
        if automaton:
            p.add_argument("--automaton", choices=(A1, A2), default=A1)
        if tree:
            p.add_argument("--tree-file", required=True)
        if phases:
            p.add_argument("--phases", type=int, help="number of phases (default: tree depth + 1)")
        if budget:
            p.add_argument("--letter-budget", type=int, default=DEFAULT_LETTER_BUDGET)
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("encode", help="encode a tree set as a block word")
    common(p, automaton=True, tree=True, phases=True)
    p.add_argument("--format", choices=("symbolic", "letters"), default="symbolic")
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("check", help="best accepting-visit count on a word")
    common(p, automaton=True)
    p.add_argument("--word-file", required=True, help="symbolic JSON or letter file, '-' for stdin")
    p.add_argument("--min-accepting", type=int, required=True, metavar="K")
    p.add_argument("--engine", choices=("symbolic", "letters"), default="symbolic")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("oracle", help="combinatorial optimum with a witness")
    common(p, automaton=True, tree=True, phases=True, budget=False)
    p.set_defaults(fn=cmd_oracle)

    for name, fn, helptext in (("verify", cmd_verify, "run a validation suite"), ("bench", cmd_bench, "timing table as CSV")):
        p = sub.add_parser(name, help=helptext)
        if name == "verify":
            p.add_argument("suite", choices=SUITES)
        common(p)
        p.add_argument("--max-depth", type=int, default=4)
        p.add_argument("--samples", type=int, default=500)
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(fn=fn)

    p = sub.add_parser("reduce-order", help="place a finite linear order on tree nodes")
    p.add_argument("--order-file", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_reduce_order)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "min_accepting", 0) < 0 or (getattr(args, "phases", None) or 0) < 0:
        print("error: counts must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

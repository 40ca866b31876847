"""Command-line front end.

Exit codes: 0 REACHABLE, 1 UNREACHABLE_UP_TO_BOUND, 2 UNKNOWN (budget),
3 input error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .bounded import bowtie_grammar, intersect_grammar
from .control_set import letter_bounded_control_set
from .df_automaton import explore
from .errors import BudgetExceeded, FlatOctError, InputError
from .generators import random_pilp_instance
from .fop import FopFile, program_to_fop, read_fop
from .octagon import parse_octagon
from .grammar import normalize_2nf, reduce
from .reach import (
    AnalysisConfig,
    Status,
    Verdict,
    bounded_words,
    brute_oracle,
    pilp_encode,
    pilp_feasible,
    pilp_iteration_bound,
    reach_fo,
    reach_fo_k,
)
from .semantics import word_semantics

EXIT = {Status.REACHABLE: 0, Status.UNREACHABLE_UP_TO_BOUND: 1, Status.UNKNOWN: 2}
EXIT_INPUT = 3


def _config(args: argparse.Namespace) -> AnalysisConfig:
    return AnalysisConfig(
        K=getattr(args, "K", None),
        iteration_bound=getattr(args, "iter_bound", 10),
        word_bound=getattr(args, "word_bound", 30),
    )


def _load(path: str, query: str | None = None) -> FopFile:
    try:
        fop = read_fop(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    if query is not None:
        try:
            parse_octagon(query, fop.varset)
        except InputError as exc:
            raise type(exc)(f"--query: {exc.message}", None, exc.column) from exc
        fop = fop.with_query(query)
    return fop


def report_json(verdict: Verdict) -> str:
    """The verdict as JSON: sorted keys, with a ``timestamp`` and ``timings_ms``
    as the only run-dependent fields."""
    data = verdict.to_json()
    data["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)


def report_text(verdict: Verdict) -> str:
    lines = [verdict.status.value]
    w = verdict.witness
    if w is not None:
        lines.append(f"word: {' '.join(w.word)}")
        lines.append(f"relation: {w.relation.pretty()}")
        if w.control_word:
            lines.append(f"control word: {' '.join(w.control_word)}")
    for key, value in verdict.diagnostics.items():
        lines.append(f"{key}: {value}")
    bounds = ", ".join(f"{k}={v}" for k, v in verdict.bounds.items() if v is not None)
    if bounds:
        lines.append(f"bounds: {bounds}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    fop = _load(args.file, args.query)
    program, b = fop.program(), fop.bounded_expression()
    cfg = _config(args)
    if args.oracle:
        verdict = brute_oracle(program, b, cfg)
    elif args.k is not None:
        verdict = reach_fo_k(program, b, args.k, cfg)
    else:
        verdict = reach_fo(program, b, cfg)
    print(report_json(verdict) if args.json else report_text(verdict))
    return EXIT[verdict.status]


def cmd_stage(args: argparse.Namespace) -> int:
    fop = _load(args.file)
    program = fop.program()
    g, axiom = program.grammar, program.axiom
    stage = args.stage
    if stage == "semantics":
        if args.word is None:
            raise InputError("the semantics stage needs --word")
        print(word_semantics(args.word.split(), program.labels).pretty())
        return 0
    if stage == "automaton":
        print(explore(g, args.k, axiom).dump())
        return 0
    b = fop.bounded_expression()
    if stage == "oracle":
        for w in bounded_words(g, axiom, b, args.word_bound):
            print(" ".join(w) if w else "ε")
        return 0
    g2, _ = normalize_2nf(g)
    inter = intersect_grammar(g2, axiom, b)
    if stage == "intersect":
        print(f"axioms: {' '.join(inter.axioms)}")
        print(inter.grammar.to_text())
        return 0
    bow = bowtie_grammar(inter)
    if stage == "bowtie":
        print(f"axioms: {' '.join(bow.axioms)}")
        print(f"letters: {' '.join(bow.letters.letters)}")
        print(bow.grammar.to_text())
        return 0
    if stage == "controlset":
        K = args.K if args.K is not None else min(2, 2 + len(inter.grammar.nonterminals))
        for x in bow.axioms:
            gx = reduce(bow.grammar, x)
            for i, member in enumerate(letter_bounded_control_set(gx, x, bow.letters, K)):
                if i >= args.limit:
                    break
                print(f"{x} [{i}] {member.serialize(inter.grammar)}")
        return 0
    raise InputError(f"unknown stage {stage}")


def parse_matrix(text: str) -> tuple[list[list[int]], list[int]]:
    """Rows ``a: <ints>`` (one per unknown) and one row ``c: <ints>``."""
    a: list[list[int]] = []
    c: list[int] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, _, rest = line.partition(":")
        try:
            row = [int(t) for t in rest.split()]
        except ValueError:
            raise InputError("expected integers", lineno) from None
        if tag.strip() == "a":
            a.append(row)
        elif tag.strip() == "c":
            if c is not None:
                raise InputError("duplicate c row", lineno)
            c = row
        else:
            raise InputError(f"unknown row tag {tag.strip()!r}", lineno, 1)
    if c is None:
        raise InputError("missing c row")
    if not a:
        raise InputError("at least one a row is required")
    for row in a:
        if len(row) != len(c):
            raise InputError("every a row needs one entry per constraint")
    return a, c


def cmd_pilp(args: argparse.Namespace) -> int:
    try:
        text = Path(args.matrix).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {args.matrix}: {exc.strerror}") from exc
    a, c = parse_matrix(text)
    program, b = pilp_encode(a, c)
    out = program_to_fop(program, b).serialize()
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(out)
    return 0


def cmd_random_check(args: argparse.Namespace) -> int:
    """Agreement of the pipeline with brute force on seeded PILP instances."""
    rng = random.Random(args.seed)
    failures = 0
    t0 = time.perf_counter()
    for i in range(args.count):
        inst = random_pilp_instance(rng)
        a, c, m, n = inst.a, inst.c, len(inst.a), len(inst.c)
        program, b = pilp_encode(a, c)
        verdict = reach_fo(program, b, AnalysisConfig(iteration_bound=pilp_iteration_bound(m)))
        expected = pilp_feasible(a, c) is not None
        ok = verdict.reachable == expected
        failures += not ok
        print(f"{i:3d} m={m} n={n} a={[list(r) for r in a]} c={list(c)} {verdict.status.value} "
              f"brute={'feasible' if expected else 'infeasible'} {'ok' if ok else 'MISMATCH'}")
    print(f"{args.count - failures}/{args.count} agree in {time.perf_counter() - t0:.1f} s")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 3), not budget outcomes (exit 2)."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flatoct", description="Bounded reachability for octagonal recursive programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = sub.add_parser("check", help="decide reachability of the query within the bound")
    check.add_argument("file")
    check.add_argument("--k", type=int, help="restrict to derivations of index at most k")
    check.add_argument("--K", type=int, help="index of the control-set construction")
    check.add_argument("--iter-bound", type=int, default=10)
    check.add_argument("--word-bound", type=int, default=30)
    check.add_argument("--query", help="override the file's query")
    check.add_argument("--oracle", action="store_true", help="use word enumeration instead")
    check.add_argument("--json", action="store_true")
    check.set_defaults(func=cmd_check)

    stage = sub.add_parser("stage", help="dump an intermediate artifact")
    stage.add_argument("file")
    stage.add_argument("stage", choices=["intersect", "bowtie", "automaton", "controlset", "oracle", "semantics"])
    stage.add_argument("--k", type=int, default=2)
    stage.add_argument("--K", type=int)
    stage.add_argument("--word")
    stage.add_argument("--word-bound", type=int, default=30)
    stage.add_argument("--limit", type=int, default=10, help="family members to print per axiom")
    stage.set_defaults(func=cmd_stage)

    pilp = sub.add_parser("pilp", help="encode a linear system as a program file")
    pilp.add_argument("matrix")
    pilp.add_argument("-o", "--output")
    pilp.set_defaults(func=cmd_pilp)

    rnd = sub.add_parser("random-check", help="compare with brute force on random instances")
    rnd.add_argument("--seed", type=int, default=0)
    rnd.add_argument("--count", type=int, default=20)
    rnd.set_defaults(func=cmd_random_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT[Status.UNKNOWN]
    except FlatOctError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

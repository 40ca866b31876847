"""Reader and writer for ``.fop`` program files.

::

    vars: x z
    axiom: X1
    prod p1: X1 -> t1 X2
    prod p2: X2 -> call[t2] X1 ret[t2] X3
    rel t1: x > 0, x' = x
    frame t2: x' = x
    bound: (t1 call[t2])* (t4)* (ret[t2] t3)*
    query: x > 0, z' < x

``#`` starts a comment.  Constraint texts are kept verbatim so that writing a
parsed file reproduces it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .bounded import BoundedExpression
from .errors import FlatOctError, InputError
from .grammar import EPS, Grammar, Production
from .octagon import OctRelation, VarSet, parse_octagon
from .reach import Program
from .semantics import ProgramLabels, call_name, ret_name

_PROD = re.compile(r"^prod\s+(\S+?)\s*:\s*(\S+)\s*->(.*)$")
_KEYED = re.compile(r"^(rel|frame)\s+(\S+?)\s*:(.*)$")


@dataclass
class FopFile:
    vars: tuple[str, ...]
    axiom: str
    productions: list[tuple[str, str, tuple[str, ...]]]
    relations: dict[str, str]
    frames: dict[str, str] = field(default_factory=dict)
    bound: str | None = None
    query: str | None = None

    # -- derived objects -------------------------------------------------

    @property
    def varset(self) -> VarSet:
        return VarSet(self.vars)

    def grammar(self) -> Grammar:
        return Grammar(
            [Production(i, head, body, name) for i, (name, head, body) in enumerate(self.productions, 1)]
        )

    def labels(self) -> ProgramLabels:
        vs = self.varset
        return ProgramLabels(
            vs,
            {s: parse_octagon(t, vs) for s, t in self.relations.items()},
            {s: parse_octagon(t, vs) for s, t in self.frames.items()},
        )

    def query_relation(self) -> OctRelation | None:
        return None if self.query is None else parse_octagon(self.query, self.varset)

    def program(self) -> Program:
        return Program(self.grammar(), self.axiom, self.labels(), self.query_relation())

    def bounded_expression(self) -> BoundedExpression:
        if self.bound is None:
            raise InputError("the file has no bound line")
        return BoundedExpression.parse(self.bound)

    # -- text --------------------------------------------------------------

    def serialize(self) -> str:
        lines = [f"vars: {' '.join(self.vars)}", f"axiom: {self.axiom}"]
        for name, head, body in self.productions:
            lines.append(f"prod {name}: {head} -> {' '.join(body) if body else EPS}")
        lines += [f"rel {s}: {t}" for s, t in self.relations.items()]
        lines += [f"frame {s}: {t}" for s, t in self.frames.items()]
        if self.bound is not None:
            lines.append(f"bound: {self.bound}")
        if self.query is not None:
            lines.append(f"query: {self.query}")
        return "\n".join(lines) + "\n"

    def with_query(self, query: str | None) -> "FopFile":
        return FopFile(self.vars, self.axiom, list(self.productions), dict(self.relations),
                       dict(self.frames), self.bound, query)


def parse_fop(text: str) -> FopFile:
    """Parse ``.fop`` text; errors are :class:`InputError` with line and column."""
    vars_: tuple[str, ...] | None = None
    axiom = None
    prods: list[tuple[str, str, tuple[str, ...]]] = []
    rels: dict[str, str] = {}
    frames: dict[str, str] = {}
    bound = query = None
    where: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        try:
            if stripped.startswith("vars:"):
                vars_ = tuple(v for v in re.split(r"[\s,]+", stripped[5:].strip()) if v)
            elif stripped.startswith("axiom:"):
                axiom = stripped[6:].strip()
                if not axiom:
                    raise InputError("missing axiom name", lineno, col)
            elif stripped.startswith("bound:"):
                bound = stripped[6:].strip()
                where["bound"] = lineno
            elif stripped.startswith("query:"):
                query = stripped[6:].strip()
                where["query"] = lineno
            elif (m := _PROD.match(stripped)) is not None:
                body = tuple(s for s in m.group(3).split() if s != EPS)
                if any(n == m.group(1) for n, _, _ in prods):
                    raise InputError(f"duplicate production {m.group(1)}", lineno, col)
                prods.append((m.group(1), m.group(2), body))
            elif (m := _KEYED.match(stripped)) is not None:
                table = rels if m.group(1) == "rel" else frames
                if m.group(2) in table:
                    raise InputError(f"duplicate {m.group(1)} for {m.group(2)}", lineno, col)
                table[m.group(2)] = m.group(3).strip()
                where[f"{m.group(1)} {m.group(2)}"] = lineno
            else:
                raise InputError(f"unrecognized line {stripped!r}", lineno, col)
        except InputError as exc:
            if exc.line is None:
                raise type(exc)(exc.message, lineno, exc.column) from exc
            raise
    if vars_ is None:
        raise InputError("missing vars: line")
    if axiom is None:
        raise InputError("missing axiom: line")
    if not prods:
        raise InputError("no productions")
    fop = FopFile(vars_, axiom, prods, rels, frames, bound, query)
    _validate(fop, where)
    return fop


def _validate(fop: FopFile, where: dict[str, int]) -> None:
    vs = fop.varset
    checks = [(f"rel {s}", t) for s, t in fop.relations.items()]
    checks += [(f"frame {s}", t) for s, t in fop.frames.items()]
    if fop.query is not None:
        checks.append(("query", fop.query))
    for key, text in checks:
        try:
            parse_octagon(text, vs)
        except InputError as exc:
            raise type(exc)(f"{key}: {exc.message}", where.get(key), exc.column) from exc
    try:
        g = fop.grammar()
    except FlatOctError as exc:
        raise InputError(str(exc)) from exc
    if fop.axiom not in g.nonterminals:
        raise InputError(f"axiom {fop.axiom} has no production")
    for s in sorted(g.terminals):
        if s not in fop.relations:
            raise InputError(f"terminal {s} has no rel line")
        t = call_name(s) or ret_name(s)
        if t is not None and t not in fop.frames:
            raise InputError(f"call {t} has no frame line")
    if fop.bound is not None:
        try:
            fop.bounded_expression()
        except InputError as exc:
            raise type(exc)(f"bound: {exc.message}", where.get("bound"), exc.column) from exc


def read_fop(path: str | Path) -> FopFile:
    return parse_fop(Path(path).read_text(encoding="utf-8"))


def write_fop(fop: FopFile, path: str | Path) -> None:
    Path(path).write_text(fop.serialize(), encoding="utf-8", newline="\n")


def program_to_fop(p: Program, b: BoundedExpression | None = None) -> FopFile:
    """A file for an in-memory program; relations are written with ``pretty()``."""
    g = p.grammar
    prods = [(q.name, q.head, q.body) for q in g.productions]
    rels = {s: r.pretty() for s, r in sorted(p.labels.relations.items()) if s in g.terminals}
    frames = {s: r.pretty() for s, r in sorted(p.labels.frames.items())}
    query = p.query.pretty() if p.query is not None else None
    return FopFile(p.vars.names, p.axiom, prods, rels, frames, str(b) if b is not None else None, query)

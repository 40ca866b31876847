"""Integer octagonal relations over unprimed/primed variable copies.

A relation over variables ``x̄`` is a difference-bound matrix over the
signed literals ``+v, -v`` of ``x̄ ∪ x̄'``.  Dimension ``d`` (``0 ≤ d < 2n``;
the first ``n`` are unprimed) owns literals ``2d`` (``+v``) and ``2d+1``
(``-v``); ``m[i][j] = c`` encodes ``L_j - L_i ≤ c``.  Every stored matrix is
tightly closed (integer-canonical) unless the relation is empty, so equality
is a plain matrix comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConstraintSyntaxError, InputError, NonOctagonal, VarMismatch

INF = float("inf")

Matrix = list[list]


@dataclass(frozen=True)
class VarSet:
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise InputError("variable set must be nonempty")
        if len(set(names)) != len(names):
            raise InputError(f"duplicate variables in {names}")
        for v in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
                raise InputError(f"invalid variable name {v!r}")

    def __len__(self) -> int:
        return len(self.names)

    def dims(self) -> tuple[str, ...]:
        """Names of all 2n dimensions: x̄ followed by x̄'."""
        return self.names + tuple(v + "'" for v in self.names)

    def dim(self, name: str) -> int:
        try:
            return self.dims().index(name)
        except ValueError:
            raise InputError(f"unknown variable {name!r}") from None


def _close(m: Matrix, pivots: Iterable[int] | None = None) -> bool:
    """Tight integer closure in place; returns False when the octagon is empty.

    ``pivots`` restricts the shortest-path phase to intermediate literals; it
    is exact when every shortest path can be routed through them (as when
    gluing two closed matrices that share only those literals).
    """
    size = len(m)
    for k in range(size) if pivots is None else pivots:
        rowk = m[k]
        for i in range(size):
            mik = m[i][k]
            if mik == INF:
                continue
            rowi = m[i]
            for j in range(size):
                v = rowk[j]
                if v != INF:
                    s = mik + v
                    if s < rowi[j]:
                        rowi[j] = s
    for i in range(size):
        if m[i][i] < 0:
            return False
    # tighten unary bounds to even values
    for i in range(size):
        v = m[i][i ^ 1]
        if v != INF:
            m[i][i ^ 1] = 2 * (v // 2)
    for i in range(size):
        if m[i][i ^ 1] != INF and m[i ^ 1][i] != INF and m[i][i ^ 1] + m[i ^ 1][i] < 0:
            return False
    # strengthen through unary bounds
    for i in range(size):
        a = m[i][i ^ 1]
        if a == INF:
            continue
        rowi = m[i]
        for j in range(size):
            b = m[j ^ 1][j]
            if b != INF:
                s = (a + b) // 2
                if s < rowi[j]:
                    rowi[j] = s
    for i in range(size):
        if m[i][i] < 0:
            return False
        m[i][i] = 0
    return True


def _top(size: int) -> Matrix:
    m = [[INF] * size for _ in range(size)]
    for i in range(size):
        m[i][i] = 0
    return m


def _add_atom(m: Matrix, li: int, lj: int, c: int) -> None:
    """Add ``L_li + L_lj ≤ c`` (literal indices) with its coherent twin."""
    if li == lj:
        # 2 L ≤ c
        if c < m[li ^ 1][li]:
            m[li ^ 1][li] = c
        return
    if li == lj ^ 1:
        # L - L = 0 ≤ c
        if c < 0:
            m[0][0] = min(m[0][0], -1)
        return
    # L_li - (-L_lj) ≤ c  →  m[lj^1][li]
    if c < m[lj ^ 1][li]:
        m[lj ^ 1][li] = c
    if c < m[li ^ 1][lj]:
        m[li ^ 1][lj] = c


class OctRelation:
    """An octagonal relation; construct through the module functions."""

    __slots__ = ("vars", "_m", "empty", "_key")

    def __init__(self, vars: VarSet, matrix: Matrix | None, empty: bool):
        self.vars = vars
        self._m = matrix
        self.empty = empty
        self._key = None

    # -- construction ---------------------------------------------------
    @classmethod
    def from_matrix(cls, vars: VarSet, m: Matrix) -> "OctRelation":
        """Close ``m`` (mutated) and wrap it."""
        if not _close(m):
            return cls(vars, None, True)
        return cls(vars, m, False)

    @classmethod
    def top(cls, vars: VarSet) -> "OctRelation":
        return cls(vars, _top(4 * len(vars)), False)

    @classmethod
    def bottom(cls, vars: VarSet) -> "OctRelation":
        return cls(vars, None, True)

    @classmethod
    def identity(cls, vars: VarSet) -> "OctRelation":
        n = len(vars)
        m = _top(4 * n)
        for d in range(n):
            _add_atom(m, 2 * (n + d), 2 * d + 1, 0)
            _add_atom(m, 2 * d, 2 * (n + d) + 1, 0)
        return cls.from_matrix(vars, m)

    @classmethod
    def from_atoms(cls, vars: VarSet, atoms: Iterable[tuple[dict[str, int], int]]) -> "OctRelation":
        """Atoms ``({name: ±1|±2}, c)`` meaning ``Σ coeff·name ≤ c`` over dims."""
        m = _top(4 * len(vars))
        for coeffs, c in atoms:
            lits = []
            for name, a in coeffs.items():
                d = vars.dim(name)
                if a == 2:
                    lits += [2 * d, 2 * d]
                elif a == -2:
                    lits += [2 * d + 1, 2 * d + 1]
                elif a == 1:
                    lits.append(2 * d)
                elif a == -1:
                    lits.append(2 * d + 1)
                elif a != 0:
                    raise NonOctagonal(f"coefficient {a} on {name}")
            if len(lits) == 0:
                if c < 0:
                    return cls.bottom(vars)
                continue
            if len(lits) == 1:
                _add_atom(m, lits[0], lits[0], 2 * c)
            elif len(lits) == 2:
                _add_atom(m, lits[0], lits[1], c)
            else:
                raise NonOctagonal("more than two variables in one atom")
        if m[0][0] < 0:
            return cls.bottom(vars)
        return cls.from_matrix(vars, m)

    # -- queries --------------------------------------------------------
    def is_empty(self) -> bool:
        return self.empty

    @property
    def matrix(self) -> Matrix | None:
        return None if self._m is None else [row[:] for row in self._m]

    def bound(self, i: int, j: int):
        assert self._m is not None
        return self._m[i][j]

    def key(self):
        if self._key is None:
            self._key = (self.vars, None if self.empty else tuple(tuple(r) for r in self._m))
        return self._key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OctRelation):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"OctRelation({self.pretty()!r})"

    def contains(self, valuation: Sequence[int]) -> bool:
        """Membership of a point given as values for all 2n dimensions."""
        if self.empty:
            return False
        m = self._m
        size = len(m)
        lit = []
        for v in valuation:
            lit += [v, -v]
        for i in range(size):
            row = m[i]
            for j in range(size):
                c = row[j]
                if c != INF and lit[j] - lit[i] > c:
                    return False
        return True

    def atoms(self) -> list[str]:
        """Canonical dump: sorted non-infinite atoms ``±u ±w <= c``."""
        if self.empty:
            return ["0 <= -1"]
        dims = self.vars.dims()
        out = set()
        size = len(self._m)
        for i in range(size):
            for j in range(size):
                c = self._m[i][j]
                if i == j or c == INF:
                    continue
                if j == i ^ 1:
                    out.add((((j, dims[j // 2]),), c // 2))
                    continue
                a, b = sorted([(j, dims[j // 2]), (i ^ 1, dims[(i ^ 1) // 2])])
                out.add(((a, b), c))
        lines = []
        for lits, c in sorted(out, key=lambda t: (tuple(l[0] for l in t[0]), t[1])):
            terms = " ".join(("-" if idx & 1 else "+") + name for idx, name in lits)
            lines.append(f"{terms} <= {c}")
        return lines

    def dump(self) -> str:
        return "\n".join(self.atoms())

    def pretty(self) -> str:
        """Compact, re-parseable constraint list (equalities folded, implied atoms dropped)."""
        if self.empty:
            return "false"
        m = self._m
        dims = self.vars.dims()
        size = len(m)
        parts: list[str] = []
        ub = [m[i ^ 1][i] for i in range(size)]  # 2*L_i <= ub[i]
        for d, name in enumerate(dims):
            hi, lo = ub[2 * d], ub[2 * d + 1]
            if hi != INF and lo != INF and hi == -lo:
                parts.append(f"{name} = {hi // 2}")
            else:
                if hi != INF:
                    parts.append(f"{name} <= {hi // 2}")
                if lo != INF:
                    parts.append(f"{name} >= {-lo // 2}")
        diffs: dict[tuple[int, int], int] = {}
        sums: list[tuple[int, int, int]] = []
        seen = set()
        for i in range(size):
            for j in range(size):
                if i == j or j == i ^ 1 or m[i][j] == INF:
                    continue
                c = m[i][j]
                a, b = sorted((j, i ^ 1))  # atom L_a + L_b <= c
                if (a, b) in seen:
                    continue
                seen.add((a, b))
                if ub[a] != INF and ub[b] != INF and c >= (ub[a] + ub[b]) // 2:
                    continue
                if (a & 1) != (b & 1):
                    pos, neg = (a, b) if not a & 1 else (b, a)
                    diffs[(pos // 2, neg // 2)] = c
                else:
                    sums.append((a, b, c))
        done = set()
        for (u, w), c in sorted(diffs.items()):
            if (u, w) in done:
                continue
            back = diffs.get((w, u))
            if back is not None and back == -c:
                done.update({(u, w), (w, u)})
                hi_d, lo_d, off = (u, w, c) if u > w else (w, u, -c)
                rhs = dims[lo_d] + (f" + {off}" if off > 0 else f" - {-off}" if off < 0 else "")
                parts.append(f"{dims[hi_d]} = {rhs}")
            else:
                done.add((u, w))
                parts.append(f"{dims[u]} - {dims[w]} <= {c}")
        for a, b, c in sums:
            if a & 1:
                parts.append(f"{dims[a // 2]} + {dims[b // 2]} >= {-c}")
            else:
                parts.append(f"{dims[a // 2]} + {dims[b // 2]} <= {c}")
        return ", ".join(parts) if parts else "true"

    def forget(self, names: Iterable[str]) -> "OctRelation":
        """Existentially quantify the given dimensions (projection, kept in place as free)."""
        if self.empty:
            return self
        m = self.matrix
        for name in names:
            d = self.vars.dim(name)
            for lit in (2 * d, 2 * d + 1):
                for k in range(len(m)):
                    if k != lit:
                        m[lit][k] = INF
                        m[k][lit] = INF
        return OctRelation(self.vars, m, False)


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------


def _same_vars(r1: OctRelation, r2: OctRelation) -> None:
    if r1.vars != r2.vars:
        raise VarMismatch(f"{r1.vars.names} vs {r2.vars.names}")


def identity(vars: VarSet) -> OctRelation:
    return OctRelation.identity(vars)


def top(vars: VarSet) -> OctRelation:
    return OctRelation.top(vars)


def intersect(r1: OctRelation, r2: OctRelation) -> OctRelation:
    _same_vars(r1, r2)
    if r1.empty or r2.empty:
        return OctRelation.bottom(r1.vars)
    a, b = r1._m, r2._m
    m = [[x if x <= y else y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]
    return OctRelation.from_matrix(r1.vars, m)


def compose(r1: OctRelation, r2: OctRelation) -> OctRelation:
    """``r1 ∘ r2 = ∃ȳ. r1(x̄, ȳ) ∧ r2(ȳ, x̄')``."""
    _same_vars(r1, r2)
    vars = r1.vars
    if r1.empty or r2.empty:
        return OctRelation.bottom(vars)
    n = len(vars)
    h = 2 * n  # literals per block
    big = _top(3 * h)
    # blocks: 0 = x, 1 = y (middle), 2 = x'
    for src, offset in ((r1._m, 0), (r2._m, h)):
        for i in range(2 * h):
            row = src[i]
            bi = big[i + offset]
            for j in range(2 * h):
                c = row[j]
                if c < bi[j + offset]:
                    bi[j + offset] = c
    # both operands are closed, so shortest paths only switch at the middle block
    if not _close(big, range(h, 2 * h)):
        return OctRelation.bottom(vars)
    keep = list(range(h)) + list(range(2 * h, 3 * h))
    m = [[big[i][j] for j in keep] for i in keep]
    # projection of a tightly closed octagon is tightly closed
    return OctRelation(vars, m, False)


def power(r: OctRelation, n: int) -> OctRelation:
    if n < 0:
        raise ValueError("power must be non-negative")
    acc = OctRelation.identity(r.vars)
    for _ in range(n):
        acc = compose(acc, r)
    return acc


def is_empty(r: OctRelation) -> bool:
    return r.empty


def equal(r1: OctRelation, r2: OctRelation) -> bool:
    _same_vars(r1, r2)
    return r1 == r2


def compose_all(rels: Iterable[OctRelation], vars: VarSet) -> OctRelation:
    acc = OctRelation.identity(vars)
    for r in rels:
        acc = compose(acc, r)
        if acc.empty:
            break
    return acc


# ---------------------------------------------------------------------------
# Surface syntax
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<var>[A-Za-z_][A-Za-z0-9_]*'?)|(?P<op><=|>=|==|!=|≤|≥|=|<|>)|(?P<sign>[+\-−])|(?P<star>\*))"
)


def _split_atoms(text: str) -> list[tuple[str, int]]:
    text = text.replace("∧", ",").replace("&&", ",")
    text = re.sub(r"\band\b", ",", text)
    out = []
    pos = 0
    for piece in text.split(","):
        stripped = piece.strip()
        if stripped:
            out.append((stripped, pos + piece.index(stripped) + 1))
        pos += len(piece) + 1
    return out


def _parse_side(tokens: list[tuple[str, str, int]], vars: VarSet) -> tuple[dict[str, int], int]:
    coeffs: dict[str, int] = {}
    const = 0
    sign = 1
    expect_term = True
    i = 0
    while i < len(tokens):
        kind, val, col = tokens[i]
        if kind == "sign":
            sign = sign * (-1 if val in "-−" else 1)
            i += 1
            expect_term = True
            continue
        if not expect_term:
            raise ConstraintSyntaxError(f"unexpected {val!r}", column=col)
        if kind == "num":
            factor = int(val)
            if i + 2 < len(tokens) + 1 and i + 1 < len(tokens) and tokens[i + 1][0] == "star":
                if i + 2 >= len(tokens) or tokens[i + 2][0] != "var":
                    raise ConstraintSyntaxError("expected variable after '*'", column=col)
                name = tokens[i + 2][1]
                vars.dim(name)
                coeffs[name] = coeffs.get(name, 0) + sign * factor
                i += 3
            elif i + 1 < len(tokens) and tokens[i + 1][0] == "var":
                name = tokens[i + 1][1]
                vars.dim(name)
                coeffs[name] = coeffs.get(name, 0) + sign * factor
                i += 2
            else:
                const += sign * factor
                i += 1
        elif kind == "var":
            try:
                vars.dim(val)
            except InputError:
                raise ConstraintSyntaxError(f"unknown variable {val!r}", column=col) from None
            coeffs[val] = coeffs.get(val, 0) + sign
            i += 1
        else:
            raise ConstraintSyntaxError(f"unexpected {val!r}", column=col)
        sign = 1
        expect_term = False
    if expect_term:
        raise ConstraintSyntaxError("dangling operator or empty side")
    return coeffs, const


def _tokenize(atom: str, base: int) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    atom_len = len(atom)
    while pos < atom_len:
        if atom[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(atom, pos)
        if not m or m.end() == pos:
            raise ConstraintSyntaxError(f"unexpected character {atom[pos]!r}", column=base + pos)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), base + m.start(kind)))
        pos = m.end()
    return toks


def parse_atoms(text: str, vars: VarSet) -> list[tuple[dict[str, int], int]]:
    """Parse a constraint list into normalized atoms ``Σ a·v ≤ c``."""
    atoms: list[tuple[dict[str, int], int]] = []
    for atom, col in _split_atoms(text):
        if atom in ("true", "⊤"):
            continue
        if atom in ("false", "⊥"):
            atoms.append(({}, -1))
            continue
        toks = _tokenize(atom, col)
        ops = [i for i, t in enumerate(toks) if t[0] == "op"]
        if len(ops) != 1:
            raise ConstraintSyntaxError(f"expected exactly one comparison in {atom!r}", column=col)
        k = ops[0]
        op = toks[k][1]
        lc, lk = _parse_side(toks[:k], vars)
        rc, rk = _parse_side(toks[k + 1:], vars)
        coeffs = dict(lc)
        for name, a in rc.items():
            coeffs[name] = coeffs.get(name, 0) - a
        coeffs = {n: a for n, a in coeffs.items() if a != 0}
        c = rk - lk  # Σ coeffs·v  op  c
        if op in ("<=", "≤"):
            forms = [(coeffs, c)]
        elif op == "<":
            forms = [(coeffs, c - 1)]
        elif op in (">=", "≥"):
            forms = [({n: -a for n, a in coeffs.items()}, -c)]
        elif op == ">":
            forms = [({n: -a for n, a in coeffs.items()}, -c - 1)]
        elif op in ("=", "=="):
            forms = [(coeffs, c), ({n: -a for n, a in coeffs.items()}, -c)]
        else:
            raise NonOctagonal(f"disequality {atom!r} is not octagonal", column=col)
        for co, cc in forms:
            nz = list(co.values())
            if len(nz) > 2 or any(abs(a) > 2 for a in nz) or (len(nz) == 2 and any(abs(a) != 1 for a in nz)):
                raise NonOctagonal(f"atom {atom!r} is not of the form ±u ±w <= c", column=col)
            if len(nz) == 1 and abs(nz[0]) == 2:
                # 2u ≤ c  ⇔  u ≤ floor(c/2) over the integers
                (name, a), = co.items()
                co, cc = {name: a // 2}, cc // 2
            atoms.append((co, cc))
    return atoms


def parse_octagon(text: str, vars: VarSet | Sequence[str]) -> OctRelation:
    if not isinstance(vars, VarSet):
        vars = VarSet(tuple(vars))
    return OctRelation.from_atoms(vars, parse_atoms(text, vars))

"""Max-atom systems: parsing, clean-up and conversion to matrix form."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import BOTTOM, Matrix, _aligned, format_scalar


class AtomSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True, order=True)
class Atom:
    """``x[lhs] <= offset + max(x[r] for r in rhs)``; rhs holds one or two indices."""

    lhs: int
    offset: Fraction
    rhs: tuple[int, ...]

    def __post_init__(self):
        rhs = tuple(sorted(set(self.rhs)))
        if not 1 <= len(rhs) <= 2:
            raise ValueError("an atom needs one or two right-hand variables")
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "offset", Fraction(self.offset))

    @property
    def negative(self) -> bool:
        return self.offset < 0

    def format(self, names) -> str:
        lhs = names[self.lhs]
        args = ", ".join(names[r] for r in self.rhs)
        target = names[self.rhs[0]] if len(self.rhs) == 1 else f"max({args})"
        if self.offset == 0:
            return f"{lhs} <= {target}"
        return f"{lhs} <= {format_scalar(self.offset)} + {target}"


@dataclass(frozen=True)
class MapSystem:
    names: tuple[str, ...]
    atoms: tuple[Atom, ...]
    forced_bottom: frozenset[int] = field(default_factory=frozenset)

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def m_minus(self) -> tuple[int, ...]:
        counts = [0] * self.n
        for a in self.atoms:
            if a.negative:
                counts[a.lhs] += 1
        return tuple(counts)

    @property
    def m_plus(self) -> tuple[int, ...]:
        counts = [0] * self.n
        for a in self.atoms:
            if not a.negative:
                counts[a.lhs] += 1
        return tuple(counts)

    @property
    def m_bar(self) -> int:
        return max(self.m_minus, default=0)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def format(self) -> str:
        lines = ["vars " + ", ".join(self.names)]
        lines += [a.format(self.names) for a in self.atoms]
        lines += [f"{self.names[v]} <= -1 + {self.names[v]}" for v in sorted(self.forced_bottom)]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MatrixSystem:
    """``x <= A x`` for every A in ``negative + positive``."""

    negative: tuple[Matrix, ...]
    positive: tuple[Matrix, ...]
    names: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.negative[0].rows

    @property
    def all(self) -> tuple[Matrix, ...]:
        return self.negative + self.positive

    def holds(self, x: Matrix) -> np.ndarray:
        """Per column of ``x``: does it satisfy ``x <= A x`` for every matrix?"""
        ok = np.ones(x.cols, dtype=bool)
        for a in self.all:
            _, (lhs, rhs) = _aligned(x, a @ x)
            ok &= (lhs <= rhs).all(axis=0)
        return ok


class Classification(enum.Enum):
    ALL_POSITIVE = "AllPositive"
    HAS_NEGATIVE = "HasNegative"


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<le><=)|(?P<num>[+-]?\d+(?:\.\d+)?(?:/\d+)?)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<punct>[(),+:])|(?P<bad>\S))"
)


def _tokens(line: str, lineno: int):
    pos = 0
    out = []
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None or m.end() == pos:
            break
        kind = m.lastgroup
        col = m.start(kind) + 1
        if kind == "bad":
            raise AtomSyntaxError(f"unknown token {m.group(kind)!r}", lineno, col)
        out.append((kind, m.group(kind), col))
        pos = m.end()
    out.append(("end", "", len(line) + 1))
    return out


class _Line:
    def __init__(self, tokens, lineno):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind, text=None):
        tok = self.tokens[self.pos]
        if tok[0] != kind or (text is not None and tok[1] != text):
            want = text or kind
            got = tok[1] or "end of line"
            raise AtomSyntaxError(f"expected {want}, got {got!r}", self.lineno, tok[2])
        self.pos += 1
        return tok


def parse_atoms(text: str) -> MapSystem:
    """Parse the atom file format.

    One atom per line, ``#`` starts a comment::

        vars x1, x2, x3, x4          # optional, fixes the variable order
        x3 <= -10 + x1
        x4 <= 25 + max(x2, x3)
        x2 <= x4

    Without a ``vars`` line variables are numbered by first appearance.
    With one, every variable used in an atom must have been declared.
    """
    names: list[str] = []
    index: dict[str, int] = {}
    declared = False
    atoms: list[Atom] = []

    def var(tok, lineno):
        name = tok[1]
        if name not in index:
            if declared:
                raise AtomSyntaxError(f"undeclared variable {name!r}", lineno, tok[2])
            index[name] = len(names)
            names.append(name)
        return index[name]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        p = _Line(_tokens(line, lineno), lineno)
        first = p.peek()
        if first[0] == "name" and first[1] == "vars" and p.tokens[1][0] != "le":
            if atoms:
                raise AtomSyntaxError("vars must come before the first atom", lineno, first[2])
            p.take("name")
            if p.peek()[1] == ":":
                p.take("punct", ":")
            while True:
                tok = p.take("name")
                if tok[1] in index:
                    raise AtomSyntaxError(f"variable {tok[1]!r} declared twice", lineno, tok[2])
                index[tok[1]] = len(names)
                names.append(tok[1])
                if p.peek()[1] != ",":
                    break
                p.take("punct", ",")
            declared = True
            p.take("end")
            continue

        lhs = var(p.take("name"), lineno)
        p.take("le")
        offset = Fraction(0)
        if p.peek()[0] == "num":
            offset = Fraction(p.take("num")[1])
            p.take("punct", "+")
        tok = p.peek()
        if tok[0] == "name" and tok[1] == "max" and p.tokens[p.pos + 1][1] == "(":
            p.take("name")
            p.take("punct", "(")
            rhs = [var(p.take("name"), lineno)]
            if p.peek()[1] == ",":
                p.take("punct", ",")
                rhs.append(var(p.take("name"), lineno))
            p.take("punct", ")")
        else:
            rhs = [var(p.take("name"), lineno)]
        p.take("end")
        atoms.append(Atom(lhs, offset, tuple(rhs)))
    return MapSystem(tuple(names), tuple(atoms))


# ---------------------------------------------------------------- preprocessing


def preprocess(system: MapSystem) -> MapSystem:
    """Remove self-references.

    ``x <= a + max(x, y)`` is always true for ``a >= 0`` (dropped) and
    equivalent to ``x <= a + y`` for ``a < 0``.  ``x <= a + x`` with ``a < 0``
    forces x to BOTTOM.  Forced variables are then erased from every max and
    atoms on a forced left side disappear, until nothing changes.
    """
    pinned = set(system.forced_bottom)
    atoms = list(system.atoms)
    changed = True
    while changed:
        changed = False
        kept = []
        for atom in atoms:
            if atom.lhs in pinned:
                continue
            rhs = tuple(v for v in atom.rhs if v not in pinned)
            if atom.lhs in rhs:
                if atom.offset >= 0:
                    continue
                rhs = tuple(v for v in rhs if v != atom.lhs)
            if not rhs:
                pinned.add(atom.lhs)
                changed = True
                continue
            kept.append(atom if rhs == atom.rhs else Atom(atom.lhs, atom.offset, rhs))
        atoms = kept
    return MapSystem(system.names, tuple(atoms), frozenset(pinned))


def classify(system: MapSystem) -> Classification:
    if system.m_bar == 0 and not system.forced_bottom:
        return Classification.ALL_POSITIVE
    return Classification.HAS_NEGATIVE


# ---------------------------------------------------------------- matrix filling


def _row(n: int, atom: Atom) -> list:
    row = [BOTTOM] * n
    for r in atom.rhs:
        row[r] = atom.offset
    return row


def _fill(n: int, lists: list[list[list]]) -> list[Matrix]:
    count = max(1, max((len(lst) for lst in lists), default=0))
    mats = []
    for t in range(count):
        rows = []
        for i, lst in enumerate(lists):
            if t < len(lst):
                rows.append(lst[t])
            else:
                e = [BOTTOM] * n
                e[i] = 0
                rows.append(e)
        mats.append(Matrix(rows) if n else Matrix.zeros(0, 0))
    return mats


def fill_matrices(system: MapSystem) -> MatrixSystem:
    """Build ``[A_1..A_l | A_l+1..A_L]`` with x satisfying the system iff x <= A_i x.

    Each variable's atoms are sorted by offset (tightest first, ties by rhs),
    deduplicated, and dealt out one per matrix; exhausted lists contribute
    the trivial row e_i.  A forced-BOTTOM variable gets the row of
    ``x <= -1 + x``, which only BOTTOM satisfies.
    """
    n = system.n
    neg: list[list[list]] = [[] for _ in range(n)]
    pos: list[list[list]] = [[] for _ in range(n)]
    for i in range(n):
        mine = sorted({a for a in system.atoms if a.lhs == i}, key=lambda a: (a.offset, a.rhs))
        if any(i in a.rhs for a in mine):
            raise ValueError("fill_matrices expects a preprocessed system")
        if i in system.forced_bottom:
            if mine:
                raise ValueError("forced variable still constrained; preprocess first")
            pin = [BOTTOM] * n
            pin[i] = -1
            neg[i].append(pin)
        for a in mine:
            (neg if a.negative else pos)[i].append(_row(n, a))
    return MatrixSystem(tuple(_fill(n, neg)), tuple(_fill(n, pos)), system.names)


def matrices_from_text(text: str) -> tuple[MapSystem, MatrixSystem]:
    system = preprocess(parse_atoms(text))
    return system, fill_matrices(system)

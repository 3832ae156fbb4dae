"""Reference implementations written without the package's numpy kernels,
plus random instance generators shared by the test modules."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from pathlib import Path

from hypothesis import strategies as st

from maxatom.core import BOTTOM, TOP, Matrix
from maxatom.model import Atom, MapSystem

DATA = Path(__file__).resolve().parent.parent / "data"

NEG = BOTTOM


def read(name: str) -> str:
    return (DATA / name).read_text()


# ---------------------------------------------------------------- reference algebra


def ref_mul(a: list[list], b: list[list]) -> list[list]:
    """Max-plus product on nested lists, one scalar at a time."""
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            best = BOTTOM
            for k in range(inner):
                if a[i][k] != BOTTOM and b[k][j] != BOTTOM:
                    best = max(best, a[i][k] + b[k][j])
            row.append(best)
        out.append(row)
    return out


def ref_add(a, b):
    return [[max(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def ref_identity(n):
    return [[Fraction(0) if i == j else BOTTOM for j in range(n)] for i in range(n)]


def ref_star(a):
    """I + A + ... + A^(n-1) by plain repeated multiplication."""
    n = len(a)
    acc = ref_identity(n)
    power = ref_identity(n)
    for _ in range(n - 1):
        power = ref_mul(power, a)
        acc = ref_add(acc, power)
    return acc


def ref_residual(a, b):
    """min_k (-a[k][i] + b[k][j]) with TOP absorbing."""
    m = len(a)
    n = len(a[0]) if a else 0
    q = len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(q):
            best = TOP
            for k in range(m):
                if a[k][i] == BOTTOM:
                    continue
                val = BOTTOM if b[k][j] == BOTTOM else b[k][j] - a[k][i]
                best = min(best, val)
            row.append(best)
        out.append(row)
    return out


def elementary_circuits(a) -> list[tuple[list[int], Fraction]]:
    """Every elementary circuit of G(A) (edge j -> i iff a[i][j] finite) with its weight."""
    n = len(a)
    out = []
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            first = combo[0]
            for rest in itertools.permutations(combo[1:]):
                cycle = (first,) + rest
                weight = Fraction(0)
                ok = True
                for p in range(size):
                    src, dst = cycle[p], cycle[(p + 1) % size]
                    if a[dst][src] == BOTTOM:
                        ok = False
                        break
                    weight += a[dst][src]
                if ok:
                    out.append((list(cycle), weight))
    return out


def ref_sign(a) -> str:
    weights = [w for _, w in elementary_circuits(a)]
    if not weights:
        return "no_circuit"
    top = max(weights)
    if top > 0:
        return "has_positive"
    if top == 0:
        return "has_zero"
    return "all_negative"


def ref_holds(x, a) -> bool:
    ax = ref_mul(a, [[v] for v in x])
    return all(xi <= row[0] for xi, row in zip(x, ax))


# ---------------------------------------------------------------- generators


def sparse_entries(lo=-5, hi=5, p_bottom=0.4):
    return st.one_of(
        st.just(BOTTOM),
        st.integers(lo, hi).map(Fraction),
    ) if p_bottom else st.integers(lo, hi).map(Fraction)


@st.composite
def matrices(draw, min_n=1, max_n=4, lo=-5, hi=5, rows=None, cols=None, square=True):
    r = rows if rows is not None else draw(st.integers(min_n, max_n))
    c = cols if cols is not None else (r if square else draw(st.integers(min_n, max_n)))
    entry = sparse_entries(lo, hi)
    return [[draw(entry) for _ in range(c)] for _ in range(r)]


@st.composite
def nonpositive_circuit_matrices(draw, min_n=1, max_n=4):
    """Square matrices whose entries are all <= -1, so every circuit is negative."""
    n = draw(st.integers(min_n, max_n))
    entry = st.one_of(st.just(BOTTOM), st.integers(-5, -1).map(Fraction))
    return [[draw(entry) for _ in range(n)] for _ in range(n)]


def random_atom(rng: random.Random, n: int, lo: int, hi: int) -> Atom:
    rhs = tuple(rng.sample(range(n), min(n, rng.choice((1, 2)))))
    return Atom(rng.randrange(n), rng.randint(lo, hi), rhs)


def random_system(rng: random.Random, n: int, m: int, lo: int = -5, hi: int = 5) -> MapSystem:
    atoms = tuple(random_atom(rng, n, lo, hi) for _ in range(m))
    return MapSystem(tuple(f"x{i + 1}" for i in range(n)), atoms)


@st.composite
def systems(draw, max_n=3, max_m=5, lo=-3, hi=3):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(0, max_m))
    atoms = []
    for _ in range(m):
        lhs = draw(st.integers(0, n - 1))
        rhs = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=2))
        atoms.append(Atom(lhs, draw(st.integers(lo, hi)), tuple(rhs)))
    return MapSystem(tuple(f"x{i + 1}" for i in range(n)), tuple(atoms))


def large_nonpositive_system(n: int, m: int, seed: int, free_fraction: float = 0.2) -> MapSystem:
    """Random system with a strictly negative atom on every non-free variable."""
    rng = random.Random(seed)
    free = set(rng.sample(range(n), max(1, int(free_fraction * n))))
    atoms = []
    for i in range(n):
        if i not in free:
            rhs = tuple(rng.sample(range(n), rng.choice((1, 2))))
            atoms.append(Atom(i, -rng.randint(1, 5), rhs))
    while len(atoms) < m:
        rhs = tuple(rng.sample(range(n), rng.choice((1, 2))))
        atoms.append(Atom(rng.randrange(n), rng.randint(-5, 5), rhs))
    return MapSystem(tuple(f"x{i}" for i in range(n)), tuple(atoms))


def as_lists(m: Matrix) -> list[list]:
    return m.tolist()

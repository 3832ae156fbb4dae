"""Exact max-plus scalar and matrix arithmetic.

Scalars are exact rationals (:class:`fractions.Fraction`) or one of the two
sentinels ``BOTTOM`` (-inf, the max-plus zero) and ``TOP`` (+inf, only
produced by residuation).  Matrices store their entries as int64 numerators
over a single shared denominator, so every operation is integer arithmetic
and no rounding ever happens.
"""

from __future__ import annotations

import enum
import graphlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

BOTTOM = -math.inf
TOP = math.inf
ONE = Fraction(0)
ZERO = BOTTOM

# int64 encoding.  Finite numerators live in [-_LIMIT, _LIMIT]; the sentinels
# sit far outside so that NEG + NEG still fits in int64.
_NEG = -(1 << 62)
_POS = 1 << 62
_LIMIT = 1 << 60
_NEG_CUT = -(5 << 59)
_POS_CUT = 5 << 59
_CHUNK = 1 << 21


class MaxPlusError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(MaxPlusError, ValueError):
    pass


class NoStarError(MaxPlusError, ArithmeticError):
    """The Kleene star diverges: some circuit has weight > 0."""


class PreconditionError(MaxPlusError, ValueError):
    pass


class ContractViolation(MaxPlusError, RuntimeError):
    """An internal invariant failed.  Always a bug, never bad input."""


# ---------------------------------------------------------------- scalars


def scalar(value) -> Fraction | float:
    """Coerce ``value`` to an exact scalar.

    Accepts ints, Fractions, decimal strings, ``"p/q"`` strings, ``"-inf"`` /
    ``"+inf"`` and float infinities.  Finite floats are read through their
    shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isinf(value):
            return BOTTOM if value < 0 else TOP
        if math.isnan(value):
            raise ValueError("NaN is not a max-plus scalar")
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("-inf", "-infinity", "bottom", "-∞"):
            return BOTTOM
        if text in ("inf", "+inf", "infinity", "+infinity", "top", "+∞"):
            return TOP
        return Fraction(text)
    if value is None:
        return BOTTOM
    raise TypeError(f"cannot interpret {value!r} as a max-plus scalar")


def oplus(a, b):
    """Max-plus addition: max(a, b)."""
    return max(scalar(a), scalar(b))


def otimes(a, b):
    """Max-plus multiplication: a + b, with BOTTOM absorbing."""
    a, b = scalar(a), scalar(b)
    if a == BOTTOM or b == BOTTOM:
        if a == TOP or b == TOP:
            raise ContractViolation("TOP cannot enter a max-plus product")
        return BOTTOM
    return a + b


def format_scalar(value) -> str:
    value = scalar(value)
    if value == BOTTOM:
        return "-inf"
    if value == TOP:
        return "+inf"
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------- matrices


def _is_finite(num: np.ndarray) -> np.ndarray:
    return np.abs(num) <= _LIMIT


def _normalize(num: np.ndarray) -> np.ndarray:
    """Collapse out-of-range sums back onto the sentinels and check range."""
    num[num <= _NEG_CUT] = _NEG
    num[num >= _POS_CUT] = _POS
    finite = num[(num > _NEG) & (num < _POS)]
    if finite.size and np.abs(finite).max() > _LIMIT:
        raise OverflowError("max-plus value exceeds the exact int64 range")
    return num


def _rescale(num: np.ndarray, factor: int) -> np.ndarray:
    if factor == 1:
        return num
    out = num.copy()
    mask = _is_finite(num)
    if mask.any():
        biggest = int(np.abs(num[mask]).max())
        if biggest * factor > _LIMIT:
            raise OverflowError("common denominator too large for exact int64 storage")
    out[mask] = num[mask] * factor
    return out


class Matrix:
    """Dense max-plus matrix with exact rational entries.

    ``Matrix([[0, "-inf"], [Fraction(-1, 2), 3]])`` builds a 2x2 matrix.
    Instances are immutable.  Operators: ``A @ B`` (product), ``A | B``
    (entrywise max), ``A & B`` (entrywise min), ``A <= B`` (entrywise order,
    returns a bool).
    """

    __slots__ = ("_num", "_den")

    def __init__(self, entries: Iterable[Iterable] | "Matrix" = ()):
        if isinstance(entries, Matrix):
            self._num, self._den = entries._num, entries._den
            return
        rows = [[scalar(v) for v in row] for row in entries]
        n_cols = len(rows[0]) if rows else 0
        if any(len(r) != n_cols for r in rows):
            raise DimensionError("ragged rows")
        den = 1
        for row in rows:
            for v in row:
                if isinstance(v, Fraction):
                    den = math.lcm(den, v.denominator)
        num = np.empty((len(rows), n_cols), dtype=np.int64)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v == BOTTOM:
                    num[i, j] = _NEG
                elif v == TOP:
                    num[i, j] = _POS
                else:
                    scaled = v * den
                    if abs(scaled) > _LIMIT:
                        raise OverflowError(f"entry {v} is out of the exact range")
                    num[i, j] = int(scaled)
        self._num, self._den = num, den
        self._num.setflags(write=False)

    @classmethod
    def _raw(cls, num: np.ndarray, den: int) -> "Matrix":
        m = cls.__new__(cls)
        num = np.ascontiguousarray(num, dtype=np.int64)
        if den != 1:
            mask = _is_finite(num)
            g = math.gcd(den, *map(int, np.unique(num[mask]))) if mask.any() else den
            if g > 1:
                num = num.copy()
                num[mask] //= g
                den //= g
        num.setflags(write=False)
        m._num, m._den = num, den
        return m

    # -- constructors

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        num = np.full((n, n), _NEG, dtype=np.int64)
        np.fill_diagonal(num, 0)
        return cls._raw(num, 1)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls._raw(np.full((rows, cols), _NEG, dtype=np.int64), 1)

    @classmethod
    def column(cls, values: Iterable) -> "Matrix":
        return cls([[v] for v in values])

    # -- inspection

    @property
    def shape(self) -> tuple[int, int]:
        return self._num.shape

    @property
    def rows(self) -> int:
        return self._num.shape[0]

    @property
    def cols(self) -> int:
        return self._num.shape[1]

    @property
    def denominator(self) -> int:
        return self._den

    def _decode(self, v: int):
        if v <= _NEG_CUT:
            return BOTTOM
        if v >= _POS_CUT:
            return TOP
        return Fraction(int(v), self._den)

    def __getitem__(self, idx):
        i, j = idx
        return self._decode(self._num[i, j])

    def tolist(self) -> list[list]:
        return [[self._decode(v) for v in row] for row in self._num]

    def column_values(self, j: int = 0) -> list:
        return [self._decode(v) for v in self._num[:, j]]

    def to_strings(self) -> list[list[str]]:
        return [[format_scalar(v) for v in row] for row in self.tolist()]

    def has_top(self) -> bool:
        return bool((self._num >= _POS_CUT).any())

    def finite_mask(self) -> np.ndarray:
        return _is_finite(self._num)

    def max_abs(self) -> Fraction:
        mask = self.finite_mask()
        if not mask.any():
            return Fraction(0)
        return Fraction(int(np.abs(self._num[mask]).max()), self._den)

    # -- slicing

    def take(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "Matrix":
        num = self._num
        if rows is not None:
            num = num[np.asarray(rows, dtype=np.intp)]
        if cols is not None:
            num = num[:, np.asarray(cols, dtype=np.intp)]
        return Matrix._raw(num.copy(), self._den)

    def permuted(self, perm: Sequence[int]) -> "Matrix":
        """Symmetric permutation ``P A P^T``; new position p holds old ``perm[p]``."""
        return self.take(perm, perm)

    @property
    def T(self) -> "Matrix":
        return Matrix._raw(self._num.T.copy(), self._den)

    # -- comparison and operators

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            other = Matrix(other)
        if self.shape != other.shape:
            return False
        _, (a, b) = _aligned(self, other)
        return bool(np.array_equal(a, b))

    __hash__ = None

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __or__(self, other):
        return mat_add(self, other)

    def __and__(self, other):
        return mat_min(self, other)

    def __le__(self, other):
        return mat_leq(self, other)

    def __repr__(self):
        body = "; ".join(" ".join(row) for row in self.to_strings())
        return f"Matrix([{body}])"


def _aligned(*mats: Matrix) -> tuple[int, list[np.ndarray]]:
    den = 1
    for m in mats:
        den = math.lcm(den, m._den)
    return den, [_rescale(m._num, den // m._den) for m in mats]


def _same_shape(a: Matrix, b: Matrix, what: str) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{what}: shapes {a.shape} and {b.shape} differ")


def vstack(blocks: Sequence[Matrix]) -> Matrix:
    den, arrays = _aligned(*blocks)
    if len({a.shape[1] for a in arrays}) > 1:
        raise DimensionError("vstack: column counts differ")
    return Matrix._raw(np.vstack(arrays), den)


def hstack(blocks: Sequence[Matrix]) -> Matrix:
    den, arrays = _aligned(*blocks)
    if len({a.shape[0] for a in arrays}) > 1:
        raise DimensionError("hstack: row counts differ")
    return Matrix._raw(np.hstack(arrays), den)


def clamp(m: Matrix, value) -> Matrix:
    """Replace every TOP entry by the finite ``value``."""
    value = scalar(value)
    if not isinstance(value, Fraction):
        raise ValueError("clamp value must be finite")
    den = math.lcm(m._den, value.denominator)
    num = _rescale(m._num, den // m._den).copy()
    num[num >= _POS_CUT] = int(value * den)
    return Matrix._raw(num, den)


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    _same_shape(a, b, "mat_add")
    den, (x, y) = _aligned(a, b)
    return Matrix._raw(np.maximum(x, y), den)


def mat_min(a: Matrix, b: Matrix) -> Matrix:
    _same_shape(a, b, "mat_min")
    den, (x, y) = _aligned(a, b)
    return Matrix._raw(np.minimum(x, y), den)


def mat_leq(a: Matrix, b: Matrix) -> bool:
    _same_shape(a, b, "mat_leq")
    _, (x, y) = _aligned(a, b)
    return bool((x <= y).all())


def _mp_product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    m, k = x.shape
    q = y.shape[1]
    out = np.empty((m, q), dtype=np.int64)
    if k == 0:
        out.fill(_NEG)
        return out
    step = max(1, _CHUNK // max(1, k * q))
    for start in range(0, m, step):
        block = x[start:start + step, :, None] + y[None, :, :]
        out[start:start + step] = block.max(axis=1)
    return _normalize(out)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Max-plus product: ``(AB)[i, j] = max_k a[i, k] + b[k, j]``."""
    if a.cols != b.rows:
        raise DimensionError(f"mat_mul: inner dimensions {a.shape} x {b.shape}")
    if a.has_top() or b.has_top():
        raise ContractViolation("TOP cannot enter a max-plus product; clamp first")
    den, (x, y) = _aligned(a, b)
    return Matrix._raw(_mp_product(x, y), den)


# ---------------------------------------------------------------- graphs


class CircuitSign(enum.Enum):
    NO_CIRCUIT = "no_circuit"
    ALL_NEGATIVE = "all_negative"
    HAS_ZERO = "has_zero"
    HAS_POSITIVE = "has_positive"


_SIGN_RANK = {s: r for r, s in enumerate(CircuitSign)}


@dataclass(frozen=True)
class GraphAnalysis:
    """Structure of G(A): edge j -> i iff ``a[i, j]`` is not BOTTOM."""

    scc_count: int
    scc_of: tuple[int, ...]
    condensation_order: tuple[int, ...]
    worst_circuit_weight_sign: CircuitSign
    scc_signs: tuple[CircuitSign, ...]


def _plus_closure(num: np.ndarray) -> np.ndarray | None:
    """Max weight of non-empty paths between every pair of vertices.

    Elimination in vertex order.  Returns None as soon as a circuit of
    positive weight shows up on the diagonal, which keeps every intermediate
    value bounded by a simple-path weight.
    """
    p = num.copy()
    for k in range(p.shape[0]):
        if p[k, k] > 0 and p[k, k] < _POS_CUT:
            return None
        through = p[:, k, None] + p[None, k, :]
        through[through <= _NEG_CUT] = _NEG
        np.maximum(p, through, out=p)
    if (p[(p > _NEG) & (p < _POS)] > _LIMIT).any():
        raise OverflowError("path weights exceed the exact range")
    return p


def _square(a: Matrix, what: str) -> None:
    if a.rows != a.cols:
        raise DimensionError(f"{what}: matrix must be square, got {a.shape}")
    if a.has_top():
        raise ContractViolation(f"{what}: TOP entries are not allowed")


def analyze_graph(a: Matrix) -> GraphAnalysis:
    _square(a, "analyze_graph")
    n = a.rows
    edges = a.finite_mask()
    # csgraph reads adjacency[u, v] as u -> v, and j -> i is an edge iff a[i, j] finite
    n_comp, labels = connected_components(csr_matrix(edges.T), directed=True, connection="strong")
    sorter = graphlib.TopologicalSorter({c: () for c in range(n_comp)})
    for i, j in zip(*np.nonzero(edges)):
        if labels[i] != labels[j]:
            sorter.add(int(labels[i]), int(labels[j]))
    order = tuple(sorter.static_order())

    plus = _plus_closure(a._num)
    comp_signs = [CircuitSign.NO_CIRCUIT] * n_comp
    if plus is None:
        # locate positive circuits per component: a positive circuit stays
        # within one SCC, so re-run the closure on each block
        for c in range(n_comp):
            members = np.flatnonzero(labels == c)
            comp_signs[c] = _block_sign(a._num[np.ix_(members, members)])
    else:
        diag = np.diagonal(plus)
        for v in range(n):
            comp_signs[labels[v]] = _worse(comp_signs[labels[v]], _sign_of(diag[v]))
    worst = max(comp_signs, key=_SIGN_RANK.__getitem__, default=CircuitSign.NO_CIRCUIT)
    return GraphAnalysis(
        scc_count=int(n_comp),
        scc_of=tuple(int(x) for x in labels),
        condensation_order=order,
        worst_circuit_weight_sign=worst,
        scc_signs=tuple(comp_signs),
    )


def _sign_of(v: int) -> CircuitSign:
    if v <= _NEG_CUT:
        return CircuitSign.NO_CIRCUIT
    if v < 0:
        return CircuitSign.ALL_NEGATIVE
    if v == 0:
        return CircuitSign.HAS_ZERO
    return CircuitSign.HAS_POSITIVE


def _worse(a: CircuitSign, b: CircuitSign) -> CircuitSign:
    return a if _SIGN_RANK[a] >= _SIGN_RANK[b] else b


def _block_sign(num: np.ndarray) -> CircuitSign:
    plus = _plus_closure(num)
    if plus is None:
        return CircuitSign.HAS_POSITIVE
    sign = CircuitSign.NO_CIRCUIT
    for v in np.diagonal(plus):
        sign = _worse(sign, _sign_of(v))
    return sign


def all_circuits_negative(a: Matrix) -> bool:
    """True iff A^k tends to the zero matrix (every circuit weighs < 0)."""
    return analyze_graph(a).worst_circuit_weight_sign in (
        CircuitSign.NO_CIRCUIT,
        CircuitSign.ALL_NEGATIVE,
    )


def scc_decompose(a: Matrix) -> list[list[int]]:
    """Strongly connected components, listed in topological order of G(A)."""
    g = analyze_graph(a)
    return [[v for v, c in enumerate(g.scc_of) if c == comp] for comp in g.condensation_order]


def kleene_star(a: Matrix) -> Matrix:
    """``A* = I + A + ... + A^(n-1)``; raises NoStarError on a positive circuit."""
    _square(a, "kleene_star")
    plus = _plus_closure(a._num)
    if plus is None:
        raise NoStarError("G(A) has a circuit of weight > 0")
    np.fill_diagonal(plus, np.maximum(np.diagonal(plus), 0))
    return Matrix._raw(plus, a._den)


def has_star(a: Matrix) -> bool:
    _square(a, "has_star")
    return _plus_closure(a._num) is not None


def saturate(a: Matrix, b: Matrix) -> Matrix:
    """Greatest solution of ``x <= A x + b``; requires A^k -> O."""
    _square(a, "saturate")
    if a.rows != b.rows:
        raise DimensionError(f"saturate: A is {a.shape}, b is {b.shape}")
    if not all_circuits_negative(a):
        raise PreconditionError("saturate needs every circuit of G(A) to be strictly negative")
    x = kleene_star(a) @ b
    if not x == (a @ x) | b:
        raise ContractViolation("saturated vector is not a fixed point")
    return x


def residual(a: Matrix, b: Matrix) -> Matrix:
    """Greatest X with ``A X <= B`` (left residual ``A \\ B``).

    ``(A\\B)[i, j] = min_k (-a[k, i] + b[k, j])`` in (min, +), where
    ``-BOTTOM = TOP`` and TOP absorbs everything, BOTTOM included.
    """
    if a.rows != b.rows:
        raise DimensionError(f"residual: A is {a.shape}, B is {b.shape}")
    if a.has_top():
        raise ContractViolation("residual: divisor may not contain TOP")
    den, (x, y) = _aligned(a, b)
    inv = np.where(x <= _NEG_CUT, _POS, -x).T  # n x m
    n, m = inv.shape
    q = y.shape[1]
    out = np.empty((n, q), dtype=np.int64)
    if m == 0:
        out.fill(_POS)
        return Matrix._raw(out, den)
    step = max(1, _CHUNK // max(1, m * q))
    for start in range(0, n, step):
        left = inv[start:start + step, :, None]
        right = y[None, :, :]
        block = left + right
        block = np.where(left >= _POS_CUT, _POS, np.where(right <= _NEG_CUT, _NEG,
                         np.where(right >= _POS_CUT, _POS, block)))
        out[start:start + step] = block.min(axis=1)
    return Matrix._raw(_normalize(out), den)

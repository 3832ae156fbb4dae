"""Solution sets of max-atom systems that contain strictly negative atoms.

Stage 1 folds the strictly negative matrices (and any positive matrix with
the same free-variable block shape) into one generator matrix ``T``: column j
is the greatest solution of the folded constraints when free variable j is 0
and the other free variables are BOTTOM.  Stage 2 tests which free variables
survive the remaining matrices and bounds the others through residuation.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (
    BOTTOM,
    TOP,
    ContractViolation,
    Matrix,
    PreconditionError,
    _LIMIT,
    _NEG,
    _aligned,
    clamp,
    has_star,
    hstack,
    kleene_star,
    residual,
    scalar,
    vstack,
)
from .model import MatrixSystem


class Stage1Outcome(enum.Enum):
    ONLY_BOTTOM = "OnlyBottom"
    IDENTITY_SYSTEM = "IdentitySystem"


class Status(enum.Enum):
    ONLY_BOTTOM = "OnlyBottom"
    COMPLETE = "Complete"
    REDUCED = "Reduced"


@dataclass(frozen=True)
class Stage1Result:
    n: int
    k: int
    perm: tuple[int, ...]
    folded: tuple[int, ...]
    unfolded: tuple[int, ...]
    T_wedge: Matrix
    formula_T_wedge: Matrix

    @property
    def l_prime(self) -> int:
        return len(self.folded)

    @property
    def J_wedge(self) -> Matrix:
        return self.T_wedge.take(rows=range(self.k, self.n))

    @property
    def formula_agrees(self) -> bool:
        """Does ``min_i C_i* B_i`` coincide with the exact greatest generator?"""
        return self.T_wedge == self.formula_T_wedge


@dataclass(frozen=True)
class SolutionDescription:
    """Parametric solution set ``x = T [D; F] u1`` with D <= I and F <= F_wedge D.

    Matrices are expressed in ``perm`` order: position p holds original
    variable ``perm[p]``; survivors u1 first, then the other free variables,
    then the rest.
    """

    status: Status
    n: int
    k: int
    k_prime: int
    perm: tuple[int, ...]
    T_wedge: Matrix | None
    J: Matrix | None
    K: Matrix | None
    F_wedge: Matrix | None
    pinned: frozenset[int]
    clamp_value: Fraction
    free_tests: tuple[bool, ...] = ()
    F_formula: Matrix | None = None

    @property
    def u1_variables(self) -> tuple[int, ...]:
        return self.perm[: self.k_prime]


# ---------------------------------------------------------------- stage 1


def free_variables(a: Matrix) -> tuple[int, ...]:
    """Indices whose row is the unit row e_i."""
    fin = a.finite_mask()
    out = []
    for i in range(a.rows):
        support = np.flatnonzero(fin[i])
        if len(support) == 1 and support[0] == i and a[i, i] == 0:
            out.append(i)
    return tuple(out)


def _head_is_identity(ap: Matrix, k: int) -> bool:
    top = ap.take(rows=range(k))
    return top == hstack([Matrix.identity(k), Matrix.zeros(k, ap.cols - k)])


def _blocks(ap: Matrix, k: int) -> tuple[Matrix, Matrix]:
    n = ap.rows
    return ap.take(range(k, n), range(k)), ap.take(range(k, n), range(k, n))


def greatest_generator(mats: Sequence[Matrix], k: int) -> Matrix:
    """Exact greatest ``J`` with ``[I; J] <= A [I; J]`` for every A in ``mats``.

    ``mats`` are permuted so the k free variables come first and every
    non-unit row has weights <= 0.  Column j is the value of the game where
    each bound variable picks its tightest row and each row picks its best
    support, with free variable j worth 0 and the other free variables
    BOTTOM.  Non-positive weights make a Dijkstra sweep in decreasing value
    order exact.
    """
    n = mats[0].rows
    den, arrays = _aligned(*mats)
    owner: list[int] = []
    refs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    n_rows = [0] * n
    seen = set()
    for arr in arrays:
        for r in range(k, n):
            row = arr[r]
            support = np.flatnonzero(np.abs(row) <= _LIMIT)
            if len(support) == 1 and support[0] == r and row[r] == 0:
                continue
            key = (r, tuple((int(s), int(row[s])) for s in support))
            if key in seen:
                continue
            seen.add(key)
            rid = len(owner)
            owner.append(r)
            n_rows[r] += 1
            for s, w in key[1]:
                if w > 0:
                    raise ContractViolation("folded rows must have non-positive weights")
                refs[s].append((rid, w))
    if any(n_rows[r] == 0 for r in range(k, n)):
        raise ContractViolation("a bound variable has no constraining row")

    out = np.full((n - k, k), _NEG, dtype=np.int64)
    for j in range(k):
        value = [None] * n
        best = [_NEG] * len(owner)
        done = [False] * len(owner)
        pending = list(n_rows)
        low = [None] * n
        heap = [(0, 0, j)]  # (-value, kind, id); kind 0 = variable, 1 = row
        while heap:
            neg, kind, idx = heapq.heappop(heap)
            val = -neg
            if kind == 0:
                if value[idx] is not None:
                    continue
                value[idx] = val
                for rid, w in refs[idx]:
                    if not done[rid] and val + w > best[rid]:
                        best[rid] = val + w
                        heapq.heappush(heap, (-(val + w), 1, rid))
            else:
                if done[idx] or val != best[idx]:
                    continue
                done[idx] = True
                r = owner[idx]
                low[r] = val if low[r] is None else min(low[r], val)
                pending[r] -= 1
                if pending[r] == 0:
                    heapq.heappush(heap, (-low[r], 0, r))
        for r in range(k, n):
            if value[r] is not None:
                out[r - k, j] = value[r]
    return Matrix._raw(out, den)


def stage1(ms: MatrixSystem, fold_positive: bool = True) -> Stage1Result | Stage1Outcome:
    n = ms.n
    a1 = ms.negative[0]
    if a1 == Matrix.identity(n):
        return Stage1Outcome.IDENTITY_SYSTEM
    free = free_variables(a1)
    if not free:
        return Stage1Outcome.ONLY_BOTTOM
    k = len(free)
    perm = tuple(free) + tuple(i for i in range(n) if i not in free)
    mats = [a.permuted(perm) for a in ms.all]
    l = len(ms.negative)

    formula = None
    for ap in mats[:l]:
        if not _head_is_identity(ap, k):
            raise ContractViolation("negative matrix lacks the free-variable block form")
        b, c = _blocks(ap, k)
        j_i = kleene_star(c) @ b
        formula = j_i if formula is None else formula & j_i

    eye = Matrix.identity(k)
    j_cur = greatest_generator(mats[:l], k)
    folded = list(range(l))
    if fold_positive:
        for idx in range(l, len(mats)):
            ap = mats[idx]
            if not _head_is_identity(ap, k):
                continue
            b, c = _blocks(ap, k)
            if not has_star(c):
                continue
            # folding must not shrink the greatest generator
            current = vstack([eye, j_cur])
            if current <= ap @ current:
                formula = formula & (kleene_star(c) @ b)
                folded.append(idx)

    t_wedge = vstack([eye, j_cur])
    for f in folded:
        if not t_wedge <= mats[f] @ t_wedge:
            raise ContractViolation("stage-1 generator violates a folded matrix")
    return Stage1Result(
        n=n,
        k=k,
        perm=perm,
        folded=tuple(folded),
        unfolded=tuple(i for i in range(len(mats)) if i not in folded),
        T_wedge=t_wedge,
        formula_T_wedge=vstack([eye, formula]),
    )


# ---------------------------------------------------------------- stage 2


def _default_clamp(mats: Sequence[Matrix]) -> Fraction:
    biggest = max((m.max_abs() for m in mats), default=Fraction(0))
    total = Fraction(0)
    for m in mats:
        for row in m.tolist():
            finite = [abs(v) for v in row if v not in (BOTTOM, TOP)]
            total += max(finite, default=0)
    return biggest + total + 1


def _keep_where(m: Matrix, keep: np.ndarray) -> Matrix:
    num = m._num.copy()
    num[~keep] = _NEG
    return Matrix._raw(num, m.denominator)


def stage2(
    s1: Stage1Result,
    unfolded: Sequence[Matrix],
    pinned: frozenset[int] = frozenset(),
    clamp_value=None,
) -> SolutionDescription:
    """Free-variable survival test and parameter bounds for the unfolded matrices.

    ``unfolded`` holds the matrices left out of stage 1, in original
    variable order.  ``F_wedge`` is the entrywise min over those matrices of
    the residual bound ``[I; K] \\ Z`` (Z = C* B, or B when C* diverges),
    further capped so that every F below ``F_wedge D`` yields a solution.
    """
    n, k = s1.n, s1.k
    t = s1.T_wedge
    if clamp_value is None:
        clamp_value = _default_clamp(list(unfolded) + [t])
    clamp_value = Fraction(clamp_value)
    ups = [a.permuted(s1.perm) for a in unfolded]
    tests = []
    for j in range(k):
        col = t.take(cols=[j])
        tests.append(all(col <= ap @ col for ap in ups))
    surv = [j for j in range(k) if tests[j]]
    rest = [j for j in range(k) if not tests[j]]
    kp = len(surv)
    common = dict(n=n, k=k, k_prime=kp, pinned=frozenset(pinned),
                  clamp_value=clamp_value, free_tests=tuple(tests))
    if kp == 0:
        return SolutionDescription(status=Status.ONLY_BOTTOM, perm=s1.perm, T_wedge=None,
                                   J=None, K=None, F_wedge=None, **common)

    order = surv + rest + list(range(k, n))
    perm = tuple(s1.perm[p] for p in order)
    tp = t.take(order, surv + rest)
    j_blk = tp.take(range(k, n), range(kp))
    k_blk = tp.take(range(k, n), range(kp, k))
    if kp == k:
        return SolutionDescription(status=Status.COMPLETE, perm=perm, T_wedge=tp,
                                   J=j_blk, K=k_blk, F_wedge=None, **common)

    gen = vstack([Matrix.identity(k - kp), k_blk])
    u1_cols = tp.take(cols=range(kp))
    f_wedge = f_formula = None
    for a in unfolded:
        ap = a.permuted(perm)
        image = ap @ u1_cols
        if not u1_cols <= image:
            raise ContractViolation("surviving column fails its own test")
        b = image.take(rows=range(kp, n))
        c = ap.take(range(kp, n), range(kp, n))
        z = kleene_star(c) @ b if has_star(c) else b
        f_resid = residual(gen, z)
        # every F below the bound must work, and [I; K] F <= B ⊕ C [I; K] F
        # only constrains rows where the generator is not self-supported
        _, (g_num, h_num) = _aligned(gen, c @ gen)
        safe = residual(_keep_where(gen, g_num > h_num), b)
        f_a = f_resid & safe
        f_wedge = f_a if f_wedge is None else f_wedge & f_a
        f_formula = f_resid if f_formula is None else f_formula & f_resid
    return SolutionDescription(status=Status.REDUCED, perm=perm, T_wedge=tp, J=j_blk,
                               K=k_blk, F_wedge=f_wedge, F_formula=f_formula, **common)


def solve_nonpositive(ms: MatrixSystem, pinned=frozenset(), fold_positive: bool = True,
                      clamp_value=None) -> SolutionDescription | Stage1Outcome:
    s1 = stage1(ms, fold_positive=fold_positive)
    if s1 is Stage1Outcome.IDENTITY_SYSTEM:
        return s1
    if s1 is Stage1Outcome.ONLY_BOTTOM:
        n = ms.n
        return SolutionDescription(status=Status.ONLY_BOTTOM, n=n, k=0, k_prime=0,
                                   perm=tuple(range(n)), T_wedge=None, J=None, K=None,
                                   F_wedge=None, pinned=frozenset(pinned),
                                   clamp_value=Fraction(0))
    mats = ms.all
    if clamp_value is None:
        clamp_value = _default_clamp(mats)
    return stage2(s1, [mats[i] for i in s1.unfolded], pinned, clamp_value)


# ---------------------------------------------------------------- solutions


def _unpermute(desc: SolutionDescription, xp: Matrix) -> list:
    vals = xp.column_values()
    x = [BOTTOM] * desc.n
    for p, v in enumerate(vals):
        x[desc.perm[p]] = v
    return x


def _check_u1(desc: SolutionDescription, u1) -> Matrix:
    if desc.status is Status.ONLY_BOTTOM:
        raise PreconditionError("the only solution is the all-BOTTOM vector")
    u1 = [scalar(v) for v in u1]
    if len(u1) != desc.k_prime:
        raise PreconditionError(f"expected {desc.k_prime} free values, got {len(u1)}")
    if TOP in u1:
        raise PreconditionError("free values must be finite or BOTTOM")
    return Matrix.column(u1)


def sup_solution(desc: SolutionDescription, u1) -> list:
    """Greatest solution whose surviving free variables equal ``u1``."""
    u = _check_u1(desc, u1)
    if desc.status is Status.COMPLETE:
        return _unpermute(desc, desc.T_wedge @ u)
    f = clamp(desc.F_wedge, desc.clamp_value)
    gen = vstack([Matrix.identity(desc.k_prime), f, desc.J | (desc.K @ f)])
    return _unpermute(desc, gen @ u)


def coupled_bound(desc: SolutionDescription, d) -> Matrix:
    """``F_wedge D``: column j of the bound shifted by ``d[j]`` (BOTTOM kills it)."""
    rows = []
    for row in desc.F_wedge.tolist():
        out = []
        for f, dj in zip(row, d):
            out.append(BOTTOM if dj == BOTTOM else f + dj if f != TOP else TOP)
        rows.append(out)
    return Matrix(rows)


def sample_solution(desc: SolutionDescription, u1, d, f: Matrix | None = None) -> list:
    """``x = T [D; F] u1`` for diagonal ``D = diag(d) <= I`` and ``F <= F_wedge D``."""
    u = _check_u1(desc, u1)
    d = [scalar(v) for v in d]
    if len(d) != desc.k_prime or any(v == TOP or v > 0 for v in d):
        raise PreconditionError("D must be diagonal with entries <= 0")
    kp, k = desc.k_prime, desc.k
    diag = Matrix([[d[i] if i == j else BOTTOM for j in range(kp)] for i in range(kp)])
    if desc.status is Status.COMPLETE:
        return _unpermute(desc, desc.T_wedge @ (diag @ u))
    if f is None:
        f = coupled_bound(desc, d)
    f = Matrix(f)
    if f.shape != (k - kp, kp):
        raise PreconditionError(f"F must be {(k - kp, kp)}, got {f.shape}")
    if not f <= coupled_bound(desc, d):
        raise PreconditionError("F exceeds F_wedge D")
    if f.has_top():
        f = clamp(f, desc.clamp_value)
    return _unpermute(desc, desc.T_wedge @ (vstack([diag, f]) @ u))

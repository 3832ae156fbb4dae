"""Brute-force ground truth for small systems.

Nothing here touches the matrix machinery when deciding whether a vector is
a solution: atoms are evaluated directly in extended-real arithmetic.
"""

from __future__ import annotations

import itertools
import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import BOTTOM, MaxPlusError, Matrix, residual, scalar
from .model import MapSystem
from .nonpositive import SolutionDescription, Status, sup_solution
from .positive import PositiveSystem

DEFAULT_BUDGET = 10**7


class BudgetExceeded(MaxPlusError, RuntimeError):
    pass


class CompletenessWarning(UserWarning):
    pass


def default_budget() -> int:
    return int(os.environ.get("TROPICAL_MAP_BUDGET", DEFAULT_BUDGET))


@dataclass(frozen=True)
class Grid:
    values: tuple
    n: int

    def __post_init__(self):
        vals = sorted({scalar(v) for v in self.values} | {BOTTOM})
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def symmetric(cls, bound: int, n: int) -> "Grid":
        return cls(tuple(range(-bound, bound + 1)), n)

    @classmethod
    def for_system(cls, system: MapSystem) -> "Grid":
        offsets = [abs(a.offset) for a in system.atoms]
        bound = int(math.ceil(max(offsets, default=0))) + system.n
        return cls.symmetric(bound, system.n)

    @property
    def size(self) -> int:
        return len(self.values) ** self.n


def _atom_holds(x, atom) -> bool:
    best = max(x[r] for r in atom.rhs)
    if best == BOTTOM:
        return x[atom.lhs] == BOTTOM
    return x[atom.lhs] <= atom.offset + best


def violated_atoms(x: Sequence, system: MapSystem) -> list:
    """Atoms (and forced-BOTTOM pins) that ``x`` breaks."""
    x = [scalar(v) for v in x]
    if len(x) != system.n:
        raise ValueError(f"vector has {len(x)} entries, system has {system.n} variables")
    bad = [a for a in system.atoms if not _atom_holds(x, a)]
    bad += [v for v in sorted(system.forced_bottom) if x[v] != BOTTOM]
    return bad


def check(x: Sequence, system: MapSystem) -> bool:
    return not violated_atoms(x, system)


def _check_budget(grid: Grid, budget: int | None) -> None:
    budget = default_budget() if budget is None else budget
    if grid.size > budget:
        raise BudgetExceeded(f"grid has {grid.size} points, budget is {budget}")


def grid_enumerate(system: MapSystem, grid: Grid, budget: int | None = None) -> list[tuple]:
    """All grid vectors satisfying the system, in lexicographic order.

    Points are tested in vectorised blocks; values are scaled to integers so
    the float64 comparison is exact (BOTTOM maps to -inf).
    """
    if grid.n != system.n:
        raise ValueError("grid dimension does not match the system")
    _check_budget(grid, budget)
    n = system.n
    den = 1
    for v in list(grid.values) + [a.offset for a in system.atoms]:
        if isinstance(v, Fraction):
            den = math.lcm(den, v.denominator)
    coded = np.array([-math.inf if v == BOTTOM else float(v * den) for v in grid.values])
    if n == 0:
        return [()]
    per_block = max(1, 200_000 // max(1, len(grid.values) ** max(0, n - 1)))
    out = []
    head_idx = list(itertools.product(range(len(grid.values)), repeat=1))
    tail_list = list(itertools.product(range(len(grid.values)), repeat=n - 1))
    tail = np.array(tail_list, dtype=np.intp).reshape(len(tail_list), n - 1)
    for start in range(0, len(head_idx), per_block):
        heads = np.array(head_idx[start:start + per_block], dtype=np.intp)
        idx = np.concatenate([np.repeat(heads, len(tail), axis=0),
                              np.tile(tail, (len(heads), 1))], axis=1)
        pts = coded[idx]
        ok = np.ones(len(pts), dtype=bool)
        for atom in system.atoms:
            best = pts[:, list(atom.rhs)].max(axis=1)
            bound = best + float(atom.offset * den)
            ok &= pts[:, atom.lhs] <= bound
        for v in system.forced_bottom:
            ok &= pts[:, v] == -math.inf
        for row in idx[ok]:
            out.append(tuple(grid.values[i] for i in row))
    return out


# ---------------------------------------------------------------- completeness


@dataclass
class CompletenessReport:
    total: int = 0
    dominated: int = 0
    represented: int = 0
    not_dominated: list = field(default_factory=list)
    not_represented: list = field(default_factory=list)

    @property
    def dominated_fraction(self) -> float:
        return self.dominated / self.total if self.total else 1.0

    @property
    def represented_fraction(self) -> float:
        return self.represented / self.total if self.total else 1.0

    def summary(self) -> str:
        return (f"{self.total} grid solutions, {self.dominated} dominated "
                f"({100 * self.dominated_fraction:.1f}%), {self.represented} represented "
                f"({100 * self.represented_fraction:.1f}%)")


def _leq(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def representable(desc: SolutionDescription, x: Sequence) -> bool:
    """Is ``x = T [D; F] u1`` for some u1, D <= I and F <= F_wedge D?

    Taking D = I and u1 = x on the surviving free variables loses nothing,
    after which the largest admissible F is a residual and the test is exact.
    """
    x = [scalar(v) for v in x]
    if any(x[v] != BOTTOM for v in desc.pinned):
        return False
    if desc.status is Status.ONLY_BOTTOM:
        return all(v == BOTTOM for v in x)
    kp, k, n = desc.k_prime, desc.k, desc.n
    xp = [x[desc.perm[p]] for p in range(n)]
    u1 = Matrix.column(xp[:kp])
    ubar1 = Matrix.column(xp[kp:k])
    rest = Matrix.column(xp[k:])
    if desc.status is Status.COMPLETE:
        return desc.J @ u1 == rest if n > k else True
    # greatest F with F u1 <= ubar1, capped by F_wedge
    f_best = residual(u1.T, ubar1.T).T
    capped = []
    for frow, brow in zip(f_best.tolist(), desc.F_wedge.tolist()):
        capped.append([min(f, b) for f, b in zip(frow, brow)])
    f = Matrix(capped)
    if f.has_top():
        return False
    if not f @ u1 == ubar1:
        return False
    return (desc.J @ u1) | (desc.K @ ubar1) == rest if n > k else True


def in_cone(generators: Matrix, x: Sequence) -> bool:
    """Is ``x`` a max-plus combination of the columns of ``generators``?"""
    col = Matrix.column(x)
    coeff = residual(generators, col)
    if coeff.has_top():
        # a TOP coefficient multiplies an all-BOTTOM column
        rows = [[BOTTOM if v == math.inf else v] for v in coeff.column_values()]
        coeff = Matrix(rows)
    return generators @ coeff == col


def completeness_report(
    desc: SolutionDescription | PositiveSystem,
    system: MapSystem,
    grid: Grid,
    budget: int | None = None,
    warn: bool = True,
) -> CompletenessReport:
    """Compare every grid solution with the parametric description.

    For a positive system "dominated" means some cone element lies above x
    and "represented" means x is itself in the cone.
    """
    report = CompletenessReport()
    for x in grid_enumerate(system, grid, budget):
        report.total += 1
        if isinstance(desc, PositiveSystem):
            dom = _leq(x, _cone_sup(desc, x))
            rep = in_cone(desc.sharp, x)
        elif desc.status is Status.ONLY_BOTTOM:
            dom = rep = all(v == BOTTOM for v in x)
        else:
            u1 = [x[v] for v in desc.u1_variables]
            dom = _leq(x, sup_solution(desc, u1))
            rep = representable(desc, x)
        if dom:
            report.dominated += 1
        elif len(report.not_dominated) < 20:
            report.not_dominated.append(x)
        if rep:
            report.represented += 1
        elif len(report.not_represented) < 20:
            report.not_represented.append(x)
    if warn and report.represented < report.total:
        warnings.warn(f"parametric family misses grid solutions: {report.summary()}",
                      CompletenessWarning, stacklevel=2)
    if warn and report.dominated < report.total:
        warnings.warn(f"grid solutions above the supremum: {report.summary()}",
                      CompletenessWarning, stacklevel=2)
    return report


def _cone_sup(ps: PositiveSystem, x) -> list:
    """A cone element above ``x``, or BOTTOM where no column reaches."""
    sup = [BOTTOM] * ps.sharp.rows
    for j in range(ps.sharp.cols):
        col = ps.sharp.column_values(j)
        finite = [(i, c) for i, c in enumerate(col) if c != BOTTOM]
        if not finite:
            continue
        # weight large enough to lift column j above x wherever it is finite
        shift = max((x[i] - c for i, c in finite if x[i] != BOTTOM), default=0)
        for i, c in finite:
            sup[i] = max(sup[i], c + shift)
    return sup

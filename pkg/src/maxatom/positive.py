"""Non-trivial solutions of positive max-atom systems.

A positive system always has the all-zero vector as a solution.  Every
column of the star of the combined pseudo-inverse is a further solution, and
so is every max-plus combination of those columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .core import (
    ContractViolation,
    DimensionError,
    MaxPlusError,
    Matrix,
    _LIMIT,
    _NEG,
    _aligned,
    kleene_star,
    mat_add,
)


class NotMonomialError(MaxPlusError, ValueError):
    pass


@dataclass(frozen=True)
class PositiveSystem:
    matrices: tuple[Matrix, ...]
    combined_inverse: Matrix
    inverse_star: Matrix
    sharp: Matrix

    @property
    def nontrivial_columns(self) -> int:
        """Distinct columns of the sharp matrix that are not all-BOTTOM."""
        cols = {tuple(self.sharp.column_values(j)) for j in range(self.sharp.cols)}
        return sum(1 for c in cols if any(v != float("-inf") for v in c))


def pseudo_inverse(a: Matrix) -> Matrix:
    """Transpose and negate on the support: ``A^-[i, j] = -a[j, i]`` when finite."""
    if a.rows != a.cols:
        raise DimensionError("pseudo_inverse needs a square matrix")
    num = a._num.T.copy()
    mask = np.abs(num) <= _LIMIT
    num[mask] = -num[mask]
    return Matrix._raw(num, a.denominator)


def is_monomial(a: Matrix) -> bool:
    """Exactly one finite entry in every row and every column."""
    if a.rows != a.cols:
        return False
    fin = a.finite_mask()
    return bool((fin.sum(axis=0) == 1).all() and (fin.sum(axis=1) == 1).all())


def monomial_cone(a: Matrix) -> Matrix:
    """Generators of ``{x : x <= A x}`` for monomial A, namely ``(A^-)*``."""
    if not is_monomial(a):
        raise NotMonomialError("matrix is not monomial")
    return kleene_star(pseudo_inverse(a))


def _violations(col: np.ndarray, images: list[np.ndarray]) -> np.ndarray:
    bad = np.zeros(col.shape, dtype=bool)
    for img in images:
        bad |= col > img
    return bad & (col > _NEG)


def sharp_matrix(matrices: Sequence[Matrix]) -> PositiveSystem:
    """Filter the columns of ``(A_1^- + ... + A_L^-)*`` into solutions.

    An entry (i, j) is kept when it is below ``(A_k a_j)_i`` for every k; any
    entry still violating a constraint after that is zeroed and the check
    repeated until column j solves every ``x <= A_k x``.
    """
    matrices = tuple(matrices)
    if not matrices:
        raise ValueError("need at least one matrix")
    combined = reduce(mat_add, (pseudo_inverse(a) for a in matrices))
    star = kleene_star(combined)
    den, arrays = _aligned(star, *(a @ star for a in matrices))
    sharp = arrays[0].copy()
    keep = np.ones(sharp.shape, dtype=bool)
    for img in arrays[1:]:
        keep &= sharp <= img
    sharp[~keep] = _NEG
    for j in range(sharp.shape[1]):
        for _ in range(sharp.shape[0] + 1):
            col = Matrix._raw(sharp[:, j:j + 1].copy(), den)
            _, imgs = _aligned(col, *(a @ col for a in matrices))
            bad = _violations(imgs[0][:, 0], [im[:, 0] for im in imgs[1:]])
            if not bad.any():
                break
            sharp[bad, j] = _NEG
    result = Matrix._raw(sharp, den)
    for a in matrices:
        if not result <= a @ result:
            raise ContractViolation("a sharp column violates the system")
    return PositiveSystem(matrices, combined, star, result)


def combine(ps: PositiveSystem, weights) -> list:
    """``A^# w``: a max-plus combination of the sharp columns."""
    return (ps.sharp @ Matrix.column(weights)).column_values()

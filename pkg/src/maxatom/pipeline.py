"""parse -> preprocess -> classify -> solve, and solution sampling."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .core import BOTTOM, ContractViolation, Matrix
from .model import Classification, MapSystem, MatrixSystem, classify, fill_matrices, parse_atoms, preprocess
from .nonpositive import (
    SolutionDescription,
    Stage1Outcome,
    Status,
    coupled_bound,
    sample_solution,
    solve_nonpositive,
)
from .oracle import violated_atoms
from .positive import PositiveSystem, combine, sharp_matrix


class ReportStatus(enum.Enum):
    ONLY_BOTTOM = "OnlyBottom"
    COMPLETE = "Complete"
    REDUCED = "Reduced"
    POSITIVE_SHARP = "PositiveSharp"


@dataclass(frozen=True)
class Solved:
    system: MapSystem
    matrices: MatrixSystem
    classification: Classification
    status: ReportStatus
    description: SolutionDescription | None = None
    positive: PositiveSystem | None = None

    @property
    def n(self) -> int:
        return self.system.n


def solve(source: str | MapSystem, fold_positive: bool = True) -> Solved:
    """Solve a system given as atom text or an already parsed MapSystem."""
    system = parse_atoms(source) if isinstance(source, str) else source
    system = preprocess(system)
    ms = fill_matrices(system)
    cls = classify(system)
    if cls is Classification.HAS_NEGATIVE:
        desc = solve_nonpositive(ms, system.forced_bottom, fold_positive=fold_positive)
        if desc is not Stage1Outcome.IDENTITY_SYSTEM:
            return Solved(system, ms, cls, ReportStatus(desc.status.value), description=desc)
    ps = sharp_matrix(ms.all)
    return Solved(system, ms, cls, ReportStatus.POSITIVE_SHARP, positive=ps)


def _draw(rng: random.Random, scale: int):
    """A random finite integer or, one time in five, BOTTOM."""
    if rng.random() < 0.2:
        return BOTTOM
    return rng.randint(-scale, scale)


def _draw_nonpositive(rng: random.Random, scale: int):
    if rng.random() < 0.2:
        return BOTTOM
    return -rng.randint(0, scale)


def random_solution(solved: Solved, rng: random.Random, scale: int = 10) -> list:
    """One randomized draw from the parametric family."""
    n = solved.n
    if solved.status is ReportStatus.ONLY_BOTTOM:
        return [BOTTOM] * n
    if solved.status is ReportStatus.POSITIVE_SHARP:
        cols = solved.positive.sharp.cols
        return combine(solved.positive, [_draw(rng, scale) for _ in range(cols)])
    desc = solved.description
    kp, k = desc.k_prime, desc.k
    u1 = [_draw(rng, scale) for _ in range(kp)]
    d = [_draw_nonpositive(rng, scale) for _ in range(kp)]
    if desc.status is Status.COMPLETE:
        return sample_solution(desc, u1, d)
    bound = coupled_bound(desc, d)
    rows = []
    for row in bound.tolist():
        out = []
        for b in row:
            if b == BOTTOM:
                out.append(BOTTOM)
            elif b == float("inf"):
                out.append(_draw(rng, scale))
            else:
                # somewhere at or below the bound, occasionally BOTTOM
                out.append(_draw_nonpositive(rng, scale) + b if rng.random() < 0.8 else BOTTOM)
        rows.append(out)
    f = Matrix(rows) if rows else Matrix.zeros(k - kp, kp)
    return sample_solution(desc, u1, d, f)


def sample(solved: Solved, count: int, seed: int | None = None, scale: int = 10) -> list[list]:
    """``count`` random solutions, each checked directly against the atoms.

    When only BOTTOM solves the system at most one vector is returned.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if solved.status is ReportStatus.ONLY_BOTTOM:
        count = min(count, 1)
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        x = random_solution(solved, rng, scale)
        bad = violated_atoms(x, solved.system)
        if bad:
            raise ContractViolation(f"sampled vector {x} violates {bad[0]}")
        out.append(x)
    return out


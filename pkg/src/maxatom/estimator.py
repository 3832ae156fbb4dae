"""scikit-learn style wrapper around the solver."""

from __future__ import annotations

import os

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted

from .core import scalar
from .model import MapSystem, parse_atoms
from .nonpositive import sup_solution
from .oracle import check
from .pipeline import ReportStatus, sample, solve
from .positive import combine


def _as_system(source) -> MapSystem:
    if isinstance(source, MapSystem):
        return source
    if isinstance(source, os.PathLike) or (isinstance(source, str) and "<=" not in source
                                            and os.path.exists(source)):
        with open(source, encoding="utf-8") as fh:
            return parse_atoms(fh.read())
    if isinstance(source, str):
        return parse_atoms(source)
    raise TypeError("expected atom text, a file path or a MapSystem")


def _validate_extended(X, width: int, name: str) -> np.ndarray:
    """2-D float array whose entries are finite or -inf."""
    X = check_array(X, dtype=np.float64, ensure_all_finite=False,
                    ensure_min_samples=0, ensure_min_features=0, input_name=name)
    if X.shape[1] != width:
        raise ValueError(f"{name} has {X.shape[1]} columns, expected {width}")
    if np.isnan(X).any() or np.isposinf(X).any():
        raise ValueError(f"{name} may contain finite values and -inf only")
    return X


def _to_float(x) -> list[float]:
    return [float(v) for v in x]


class MaxAtomSolver(TransformerMixin, BaseEstimator):
    """Solve a max-atom system once, then query its solution set.

    ``fit`` takes the system (atom text, a path or a parsed MapSystem).
    ``transform`` maps rows of free parameters to solutions: values of the
    surviving free variables for systems with negative atoms, weights on the
    generator columns for positive ones.  ``predict`` tells whether each row
    of ``X`` solves the system.

    Parameters
    ----------
    fold_positive : bool, default=True
        Fold positive matrices with a compatible block shape into the
        generator computation.
    scale : int, default=10
        Spread of the random parameters used by :meth:`sample`.
    """

    def __init__(self, fold_positive: bool = True, scale: int = 10):
        self.fold_positive = fold_positive
        self.scale = scale

    def fit(self, X, y=None):
        self.solved_ = solve(_as_system(X), fold_positive=self.fold_positive)
        self.system_ = self.solved_.system
        self.status_ = self.solved_.status
        self.classification_ = self.solved_.classification
        self.n_variables_ = self.system_.n
        self.variable_names_ = np.asarray(self.system_.names, dtype=object)
        return self

    @property
    def n_parameters_(self) -> int:
        check_is_fitted(self, "solved_")
        if self.status_ is ReportStatus.POSITIVE_SHARP:
            return self.solved_.positive.sharp.cols
        if self.status_ is ReportStatus.ONLY_BOTTOM:
            return 0
        return self.solved_.description.k_prime

    def transform(self, X):
        check_is_fitted(self, "solved_")
        U = _validate_extended(X, self.n_parameters_, "X")
        out = np.full((U.shape[0], self.n_variables_), -np.inf)
        for r, row in enumerate(U):
            params = [scalar(v) for v in row]
            if self.status_ is ReportStatus.ONLY_BOTTOM:
                continue
            if self.status_ is ReportStatus.POSITIVE_SHARP:
                out[r] = _to_float(combine(self.solved_.positive, params))
            else:
                out[r] = _to_float(sup_solution(self.solved_.description, params))
        return out

    def predict(self, X):
        check_is_fitted(self, "solved_")
        X = _validate_extended(X, self.n_variables_, "X")
        return np.array([check([scalar(v) for v in row], self.system_) for row in X], dtype=bool)

    def sample(self, n_samples: int = 1, random_state=None):
        """Random solutions as an ``(n_samples, n_variables)`` array."""
        check_is_fitted(self, "solved_")
        seed = int(check_random_state(random_state).randint(np.iinfo(np.int32).max))
        rows = [_to_float(x) for x in sample(self.solved_, n_samples, seed, self.scale)]
        return np.array(rows, dtype=np.float64).reshape(len(rows), self.n_variables_)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "solved_")
        return self.variable_names_.copy()


"""Estimator-style wrappers around the Minkowski solvers.

These follow the scikit-learn convention (constructor stores hyperparameters,
``fit`` consumes data, fitted attributes carry trailing underscores) so the
solvers can sit in pipelines and grid searches alongside other estimators.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .chord_measure import DiscreteSphericalMeasure
from .minkowski import (
    SolverConfig,
    solve_chord_log_minkowski,
    solve_chord_minkowski,
)


def _as_measure(X, masses=None) -> DiscreteSphericalMeasure:
    if isinstance(X, DiscreteSphericalMeasure):
        return X
    return DiscreteSphericalMeasure(np.asarray(X, dtype=float), np.asarray(masses, dtype=float))


class _SolverMixin:
    def _config(self) -> SolverConfig:
        return SolverConfig(
            q=self.q,
            max_iters=self.max_iters,
            residual_tol=self.residual_tol,
            seed=self.seed,
            symmetric=self.symmetric,
        )

    def predict(self, U):
        """Support-function values of the fitted body at directions U."""
        from .geometry import support_batch

        if not hasattr(self, "body_"):
            raise AttributeError("call fit before predict")
        return support_batch(self.body_, np.atleast_2d(np.asarray(U, dtype=float)))


class ChordMinkowskiSolver(_SolverMixin, BaseEstimator):
    """Recover a polytope from its prescribed chord measure F_q."""

    symmetric = False

    def __init__(self, q: float = 2.0, max_iters: int = 300, residual_tol: float = 1e-2, seed: int = 0):
        self.q = q
        self.max_iters = max_iters
        self.residual_tol = residual_tol
        self.seed = seed

    def fit(self, X, masses=None):
        mu = _as_measure(X, masses)
        result = solve_chord_minkowski(mu, self._config())
        self.body_ = result.body
        self.result_ = result
        self.residual_ = result.residual
        return self


class ChordLogMinkowskiSolver(_SolverMixin, BaseEstimator):
    """Recover an origin-symmetric polytope from its cone-chord measure G_q."""

    symmetric = True

    def __init__(self, q: float = 2.0, max_iters: int = 300, residual_tol: float = 1e-2, seed: int = 0):
        self.q = q
        self.max_iters = max_iters
        self.residual_tol = residual_tol
        self.seed = seed

    def fit(self, X, masses=None):
        mu = _as_measure(X, masses)
        result = solve_chord_log_minkowski(mu, self._config())
        self.body_ = result.body
        self.result_ = result
        self.residual_ = result.residual
        return self

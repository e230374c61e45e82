"""scikit-learn style front end.

Each estimator works on one object at a time (a model or a polynomial
system), so they chain in a :class:`sklearn.pipeline.Pipeline`::

    pipe = make_pipeline(SystemGenerator(seed=1), BasisEliminator(), IdentifiabilityClassifier())
    pipe.fit(model)
    pipe.predict(model)
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .algebra import DEFAULT_PRIME, MonomialOrder
from .basis import DEFAULT_CANDIDATES, BasisCandidate, enumerate_candidates, jacobian_data
from .entropy import score, select_best
from .groebner import DEFAULT_MAX_PAIRS, STRATEGIES, buchberger, classify
from .prolongation import SpecializationConfig, generate_Et
from .substitution import substitute_basis
from .validation import (check_is_fitted, check_model, check_positive_int, check_prime,
                         check_probability, check_system)


class SystemGenerator(TransformerMixin, BaseEstimator):
    """Turn an ODE model into its specialized prolonged polynomial system."""

    def __init__(self, seed: int = 0, prime: int = DEFAULT_PRIME, prob=0.99, bound=None):
        self.seed = seed
        self.prime = prime
        self.prob = prob
        self.bound = bound

    def _config(self) -> SpecializationConfig:
        bound = None if self.bound is None else check_positive_int(self.bound, "bound")
        return SpecializationConfig(seed=int(self.seed), bound=bound,
                                    prob=check_probability(self.prob), prime=check_prime(self.prime))

    def fit(self, X, y=None):
        self.model_ = check_model(X)
        self.config_ = self._config()
        return self

    def transform(self, X):
        cfg = self._config()
        return generate_Et(check_model(X), cfg)


class BasisEliminator(TransformerMixin, BaseEstimator):
    """Pick an entropy-ranked transcendence basis and substitute random values for it.

    ``selection="entropy"`` ranks the candidate pool; ``"pivots"`` keeps the
    non-pivot columns of the sampled Jacobian.  ``fit`` stores the basis,
    ``transform`` applies it, giving a zero-dimensional system.
    """

    def __init__(self, n_candidates: int = DEFAULT_CANDIDATES, seed: int = 0, prob=None,
                 selection: str = "entropy"):
        self.n_candidates = n_candidates
        self.seed = seed
        self.prob = prob
        self.selection = selection

    def fit(self, X, y=None):
        sys = check_system(X)
        check_positive_int(self.n_candidates, "n_candidates")
        if self.selection not in ("entropy", "pivots"):
            raise ValueError(f"unknown selection {self.selection!r}")
        data = jacobian_data(sys, self.seed)
        self.transcendence_degree_ = data.degree
        if self.selection == "pivots":
            from .linalg import pivot_columns

            piv = set(pivot_columns(data.matrix))
            self.pool_ = None
            self.basis_ = BasisCandidate(tuple(n for i, n in enumerate(data.names) if i not in piv), valid=True)
        else:
            pool = enumerate_candidates(sys, self.n_candidates, self.seed, data=data)
            score(sys, pool)
            self.pool_ = pool
            self.basis_ = select_best(pool)
        self.basis_labels_ = self.basis_.labels(sys)
        self._data = data
        self._fitted_on = sys
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        sys = check_system(X)
        data = self._data if sys is self._fitted_on else None
        prob = None if self.prob is None else check_probability(self.prob)
        out, record = substitute_basis(sys, self.basis_, seed=self.seed, prob=prob, data=data)
        self.record_ = record
        return out


class IdentifiabilityClassifier(BaseEstimator):
    """Groebner basis of a system and the per-unknown identifiability classes."""

    def __init__(self, max_pairs: int = DEFAULT_MAX_PAIRS, max_seconds=None, strategy: str = "normal",
                 weights=None):
        self.max_pairs = max_pairs
        self.max_seconds = max_seconds
        self.strategy = strategy
        self.weights = weights

    def _order(self, sys):
        if self.weights is None:
            return None
        w = list(self.weights)
        if len(w) != sys.ring.nvars:
            raise ValueError(f"expected {sys.ring.nvars} weights, got {len(w)}")
        return MonomialOrder.weighted(w)

    def fit(self, X, y=None):
        sys = check_system(X)
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        check_positive_int(self.max_pairs, "max_pairs")
        self.gb_ = buchberger(sys, self._order(sys), max_pairs=self.max_pairs,
                              max_seconds=self.max_seconds, strategy=self.strategy)
        self.report_ = classify(self.gb_, sys) if self.gb_.complete else None
        self.labels_ = list(self.report_.classes) if self.report_ else []
        self._fitted_on = sys
        return self

    def predict(self, X):
        """Class of every parameter and initial condition, in ``labels_`` order."""
        check_is_fitted(self, "gb_")
        sys = check_system(X)
        if sys is not self._fitted_on:
            self.fit(sys)
        if self.report_ is None:
            raise RuntimeError("the Groebner basis computation ran out of budget")
        return np.array([self.report_.classes[k] for k in self.labels_], dtype=object)

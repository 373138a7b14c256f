"""Scikit-learn style estimator around the NPMLE solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .families import Family, neg_binomial, poisson
from .npmle import SolverConfig, solve
from .validation import check_counts, histogram_from


class MixtureNPMLE(BaseEstimator):
    """Nonparametric MLE of a mixing distribution from count data.

    Fits the convex nonparametric maximum likelihood program over mixing
    distributions on ``[0, theta_star]`` for a discrete exponential family
    observation model.  Follows the sklearn estimator contract: parameters
    are stored verbatim at construction, ``fit`` validates and solves, and
    fitted state lives in trailing-underscore attributes.

    Parameters
    ----------
    family : str or Family, default "poisson"
        Observation model: "poisson", "negbinomial", or a prebuilt
        :class:`~gotmix.families.Family` (which carries its own theta_star).
    r : int, default 1
        Failure count for the negative binomial model.
    theta_star : float or None, default None
        Upper end of the mixing support.  When None it is inferred from the
        data: ``max(X, 1)`` for Poisson, ``x/(x+r)`` moment heuristic capped
        below 1 for the negative binomial.
    grid_size, max_em_iters, loglik_tol, grad_tol, refine_rounds, prune_floor
        Solver knobs, see :class:`~gotmix.npmle.SolverConfig`.

    Attributes
    ----------
    family_ : Family
        The resolved observation model.
    mixing_ : DiscreteMeasure
        Estimated mixing distribution (atoms and weights).
    result_ : NpmleResult
        Full solver output (log-likelihood, optimality certificate, ...).
    converged_ : bool
        Whether the directional derivative certified optimality.
    """

    def __init__(self, family="poisson", r=1, theta_star=None, grid_size=400,
                 max_em_iters=10000, loglik_tol=1e-10, grad_tol=1e-4,
                 refine_rounds=3, prune_floor=1e-12):
        self.family = family
        self.r = r
        self.theta_star = theta_star
        self.grid_size = grid_size
        self.max_em_iters = max_em_iters
        self.loglik_tol = loglik_tol
        self.grad_tol = grad_tol
        self.refine_rounds = refine_rounds
        self.prune_floor = prune_floor

    def _resolve_family(self, xs: np.ndarray) -> Family:
        if isinstance(self.family, Family):
            return self.family
        name = str(self.family).lower()
        if name == "poisson":
            ts = self.theta_star if self.theta_star is not None \
                else float(max(xs.max(), 1))
            return poisson(ts)
        if name == "negbinomial":
            if self.theta_star is not None:
                ts = self.theta_star
            else:
                mean = float(xs.mean())
                ts = min(0.95, max(0.05, mean / (mean + self.r)) * 1.5)
            return neg_binomial(self.r, ts)
        raise ValueError(f"unknown family {self.family!r}")

    def fit(self, X, y=None):
        """Fit the mixing distribution to observed counts X (shape (n,) or
        (n, 1)); y is ignored (sklearn API)."""
        xs = check_counts(X)
        fam = self._resolve_family(xs)
        hist = histogram_from(xs)
        cfg = SolverConfig(grid_size=self.grid_size,
                           max_em_iters=self.max_em_iters,
                           loglik_tol=self.loglik_tol,
                           grad_tol=self.grad_tol,
                           refine_rounds=self.refine_rounds,
                           prune_floor=self.prune_floor)
        res = solve(fam, hist, cfg)
        self.family_ = fam
        self.result_ = res
        self.mixing_ = res.q_hat
        self.loglik_ = res.loglik
        self.sup_gradient_ = res.sup_gradient
        self.converged_ = res.converged
        self.n_iter_ = res.em_iters
        return self

    def _check_fitted(self):
        if not hasattr(self, "mixing_"):
            raise RuntimeError("call fit before using the estimator")

    def predict_proba(self, X) -> np.ndarray:
        """Posterior responsibilities over fitted atoms, shape (n, n_atoms)."""
        self._check_fitted()
        xs = check_counts(X)
        pm = self.family_.pmf_matrix(xs, self.mixing_.atoms)
        joint = pm * self.mixing_.weights
        total = joint.sum(axis=1, keepdims=True)
        if np.any(total <= 0.0):
            raise ValueError("an observation has zero mass under the fit")
        return joint / total

    def predict(self, X) -> np.ndarray:
        """Index of the posterior-mode atom for each observation."""
        return np.argmax(self.predict_proba(X), axis=1)

    def posterior_mean(self, X) -> np.ndarray:
        """Posterior mean of the mixing parameter given each observation."""
        return self.predict_proba(X) @ self.mixing_.atoms

    def score(self, X, y=None) -> float:
        """Mean log-likelihood of X under the fitted mixture."""
        self._check_fitted()
        xs = check_counts(X)
        pm = self.family_.pmf_matrix(xs, self.mixing_.atoms)
        hq = pm @ self.mixing_.weights
        if np.any(hq <= 0.0):
            return -np.inf
        return float(np.mean(np.log(hq)))

"""Discrete exponential family models on the nonnegative integers.

A family is a pmf of the form ``f(x | theta) = g(theta) * w(x) * theta**x``
for x = 0, 1, 2, ... with positive coefficients ``w`` and a normalizer
``g(theta) = 1 / sum_x w(x) theta**x``, evaluated for mixing parameters
``theta`` in ``[0, theta_star]``.  Built-ins: Poisson (``w(x) = 1/x!``) and
negative binomial (``w(x) = binom(x+r-1, x)``); arbitrary coefficient tables
are supported through :func:`custom_series`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

POISSON = "poisson"
NEG_BINOMIAL = "negbinomial"
CUSTOM = "custom"

#: coefficient growth classes: 1/w(x) bounded geometrically vs factorially
GEOMETRIC_BOUND = "geometric"
FACTORIAL_BOUND = "factorial"


class FamilyError(ValueError):
    """Invalid family specification or out-of-range evaluation."""


@dataclass(frozen=True)
class Family:
    """A discrete exponential family with mixing parameters in [0, theta_star].

    Use the :func:`poisson`, :func:`neg_binomial`, or :func:`custom_series`
    constructors; they validate the invariants (positive coefficients,
    ``theta_star`` below the series' radius of convergence, attainable
    truncation budget for tables).  Instances are immutable and all
    evaluation methods are pure, so they are safe to share across threads.
    """

    kind: str
    theta_star: float
    theta_radius: float
    growth_class: str
    r: int = 1
    x_cap: int = 0
    w_table: tuple[float, ...] | None = None
    g_tol: float = 1e-10

    def __post_init__(self):
        if self.theta_star <= 0.0:
            raise FamilyError("theta_star must be positive")
        if not self.theta_star < self.theta_radius:
            raise FamilyError(
                f"theta_star={self.theta_star} must be below the radius of "
                f"convergence {self.theta_radius}")

    # -- coefficients -------------------------------------------------------

    def log_w(self, x):
        """log w(x), vectorized over nonnegative integer x."""
        x = np.asarray(x)
        if np.any(x < 0):
            raise FamilyError("x must be nonnegative")
        if self.kind == POISSON:
            return -gammaln(x + 1.0)
        if self.kind == NEG_BINOMIAL:
            return gammaln(x + self.r) - gammaln(self.r) - gammaln(x + 1.0)
        table = np.asarray(self.w_table)
        if np.any(x > self.x_cap):
            raise FamilyError(f"custom series defined only up to x={self.x_cap}")
        with np.errstate(divide="ignore"):
            return np.log(table[np.asarray(x, dtype=np.int64)])

    def w(self, x):
        """Coefficient w(x)."""
        return np.exp(self.log_w(x))

    # -- normalizer ---------------------------------------------------------

    def g(self, theta):
        """Normalizer g(theta) = 1 / sum_x w(x) theta**x on [0, theta_star].

        Closed forms for the built-ins (``exp(-theta)`` and
        ``(1-theta)**r``); truncated series for tables, whose tail budget was
        certified at construction.
        """
        theta = self._check_theta(theta)
        if self.kind == POISSON:
            return np.exp(-theta)
        if self.kind == NEG_BINOMIAL:
            return (1.0 - theta) ** self.r
        powers = np.power.outer(theta, np.arange(self.x_cap + 1))
        return 1.0 / (powers @ np.asarray(self.w_table))

    def log_g(self, theta):
        theta = self._check_theta(theta)
        if self.kind == POISSON:
            return -theta
        if self.kind == NEG_BINOMIAL:
            return self.r * np.log1p(-theta)
        return np.log(self.g(theta))

    # -- pmf ----------------------------------------------------------------

    def pmf(self, x, theta):
        """f(x | theta) = g(theta) w(x) theta**x, with the 0**0 = 1 convention.

        Evaluated in log space to stay stable for large x; either argument
        may be an array (they broadcast).
        """
        x_arr = np.asarray(x)
        theta_arr = self._check_theta(theta)
        x_b, t_b = np.broadcast_arrays(x_arr, theta_arr)
        with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
            logs = self.log_g(t_b) + self.log_w(x_b) + x_b * np.log(t_b)
            vals = np.exp(logs)
        # theta = 0: all mass at x = 0 (0**0 = 1)
        at_zero = t_b == 0.0
        if np.any(at_zero):
            vals = np.where(at_zero, np.where(x_b == 0, self.g(0.0) * self.w(0), 0.0), vals)
        if vals.ndim == 0 or (np.isscalar(x) and np.isscalar(theta)):
            return float(vals)
        return vals

    def pmf_matrix(self, xs, thetas):
        """Matrix ``[i, j] = f(xs[i] | thetas[j])`` for integer xs and grid thetas."""
        xs = np.asarray(xs)
        thetas = np.asarray(thetas, dtype=float)
        return self.pmf(xs[:, None], thetas[None, :])

    def mixture_pmf(self, q, x):
        """Mixture mass ``h_q(x) = sum_j q.weights[j] * f(x | q.atoms[j])``."""
        atoms = np.asarray(q.atoms, dtype=float)
        if atoms.size and (atoms.min() < 0.0 or atoms.max() > self.theta_star):
            raise FamilyError("mixing atoms must lie in [0, theta_star]")
        x_arr = np.atleast_1d(np.asarray(x))
        vals = self.pmf(x_arr[:, None], atoms[None, :]) @ np.asarray(q.weights)
        return float(vals[0]) if np.isscalar(x) or np.ndim(x) == 0 else vals

    # -- helpers ------------------------------------------------------------

    def _check_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < 0.0) or np.any(theta > self.theta_star * (1 + 1e-12)):
            raise FamilyError(
                f"theta must lie in [0, theta_star={self.theta_star}]")
        return np.minimum(theta, self.theta_star)

    def tail_ratio(self, x):
        """Upper bound on ``w(x+1) * theta_star / w(x)`` valid for all x' >= x.

        The coefficient ratios of the built-ins are nonincreasing, so the
        ratio at x dominates every later one; tables use the declared ratio
        at the end of the table.  Raises when the bound is >= 1 (ratio test
        inconclusive).
        """
        if self.kind == POISSON:
            rho = self.theta_star / (x + 1.0)
        elif self.kind == NEG_BINOMIAL:
            rho = (x + self.r) / (x + 1.0) * self.theta_star
        else:
            table = self.w_table
            rho = table[self.x_cap] / table[self.x_cap - 1] * self.theta_star
        if rho >= 1.0:
            raise FamilyError(
                f"ratio test inconclusive at x={x}: bound {rho} >= 1")
        return rho


def poisson(theta_star: float) -> Family:
    """Poisson family with natural parameter in [0, theta_star]."""
    return Family(kind=POISSON, theta_star=float(theta_star),
                  theta_radius=math.inf, growth_class=FACTORIAL_BOUND)


def neg_binomial(r: int, theta_star: float) -> Family:
    """Negative binomial family with r failures; requires theta_star < 1."""
    if r < 1 or r != int(r):
        raise FamilyError("r must be a positive integer")
    if theta_star >= 1.0:
        raise FamilyError("negative binomial requires theta_star < 1")
    return Family(kind=NEG_BINOMIAL, theta_star=float(theta_star),
                  theta_radius=1.0, growth_class=GEOMETRIC_BOUND, r=int(r))


def custom_series(w_table, theta_star: float, growth_class: str,
                  g_tol: float = 1e-10) -> Family:
    """Family from an explicit table ``w(0..x_cap)`` of positive coefficients.

    The reciprocal normalizer is evaluated as the truncated series
    ``sum_{x<=x_cap} w(x) theta**x``.  The truncation error is bounded by
    geometric domination with ratio ``rho = w(x_cap)/w(x_cap-1) * theta_star``;
    tables where ``rho >= 1`` or where the certified relative tail exceeds
    ``g_tol`` are rejected.
    """
    table = tuple(float(v) for v in w_table)
    if len(table) < 2:
        raise FamilyError("w_table needs at least two entries")
    if any(v <= 0.0 for v in table):
        raise FamilyError("w(x) must be positive for every tabulated x")
    if growth_class not in (GEOMETRIC_BOUND, FACTORIAL_BOUND):
        raise FamilyError(f"unknown growth class {growth_class!r}")
    x_cap = len(table) - 1
    rho = table[x_cap] / table[x_cap - 1] * theta_star
    if rho >= 1.0:
        raise FamilyError(
            f"series ratio test fails at x_cap: w(x_cap)/w(x_cap-1)*theta_star"
            f" = {rho} >= 1")
    partial = sum(w * theta_star ** x for x, w in enumerate(table))
    tail = table[x_cap] * theta_star ** x_cap * rho / (1.0 - rho)
    if tail > g_tol * partial:
        raise FamilyError(
            f"truncation budget unattainable: certified relative tail "
            f"{tail / partial:.3e} exceeds g_tol={g_tol}")
    # the certified geometric tail sits below theta_star / rho
    return Family(kind=CUSTOM, theta_star=float(theta_star),
                  theta_radius=float(theta_star) / rho,
                  growth_class=growth_class, x_cap=x_cap,
                  w_table=table, g_tol=g_tol)

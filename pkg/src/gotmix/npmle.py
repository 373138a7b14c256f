"""Nonparametric MLE of the mixing distribution over [0, theta_star].

The estimator maximizes ``sum_x counts[x] * log h_Q(x)`` over all mixing
distributions Q, a convex program.  Grid EM alone converges in likelihood
but leaves weight smeared across neighboring grid nodes, so the solver uses
it only to localize support clusters: each cluster is collapsed to its
weight centroid, atom positions are polished by golden-section ascent, and
vertex-direction steps add the maximizer of the directional derivative D
whenever D exceeds 1 + grad_tol, re-optimizing weights by EM in between.
``D <= 1`` everywhere certifies optimality, so the result carries the sup
of D over a 10x-finer verification grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import DiscreteMeasure, SampleHistogram, measure

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_LOCALIZE_ITERS = 1500  # grid EM only needs to find the clusters


class NpmleError(RuntimeError):
    """Infeasible data or invalid state for the NPMLE program."""


@dataclass(frozen=True)
class SolverConfig:
    grid_size: int = 400
    max_em_iters: int = 10000
    loglik_tol: float = 1e-10
    grad_tol: float = 1e-4
    refine_rounds: int = 3
    prune_floor: float = 1e-12

    def __post_init__(self):
        if min(self.grid_size, self.max_em_iters) < 1 or self.refine_rounds < 0:
            raise ValueError("grid_size/max_em_iters must be >= 1")
        if min(self.loglik_tol, self.grad_tol, self.prune_floor) <= 0.0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class NpmleResult:
    q_hat: DiscreteMeasure
    loglik: float
    sup_gradient: float
    em_iters: int
    converged: bool
    #: per-phase EM log-likelihood traces; each phase is nondecreasing
    em_traces: tuple[tuple[float, ...], ...] = ()


def loglikelihood(family, h: SampleHistogram, q: DiscreteMeasure) -> float:
    """``sum_x counts[x] * log h_q(x)``; -inf when an observed x has no mass."""
    xs, cs = h.arrays()
    hq = np.atleast_1d(family.mixture_pmf(q, xs))
    if np.any(hq <= 0.0):
        return -math.inf
    return float(cs @ np.log(hq))


def directional_derivative(family, h: SampleHistogram, q: DiscreteMeasure,
                           theta) -> float | np.ndarray:
    """First-order quantity ``D(theta) = (1/n) sum_x c_x f(x|theta)/h_q(x)``.

    At a maximizer, ``D <= 1`` on all of [0, theta_star] with equality on
    the support atoms.
    """
    xs, cs = h.arrays()
    hq = np.atleast_1d(family.mixture_pmf(q, xs))
    if np.any(hq <= 0.0):
        raise NpmleError("h_q vanishes on an observed x (division by zero)")
    ratio = cs / (h.n * hq)
    t = np.atleast_1d(np.asarray(theta, dtype=float))
    vals = family.pmf_matrix(xs, t).T @ ratio
    return float(vals[0]) if np.ndim(theta) == 0 else vals


def em_step(family, h: SampleHistogram, q: DiscreteMeasure) -> DiscreteMeasure:
    """One multiplicative EM update ``p_j <- p_j * D(theta_j)`` of the weights."""
    d = directional_derivative(family, h, q, q.atoms)
    return measure(q.atoms, q.weights * d, prune_floor=0.0)


class _Program:
    """Workspace for one NPMLE solve."""

    def __init__(self, family, h: SampleHistogram, cfg: SolverConfig):
        self.family = family
        self.cfg = cfg
        self.xs, self.cs = h.arrays()
        self.n = h.n
        self.theta_star = family.theta_star
        self.em_iters = 0
        self.traces: list[tuple[float, ...]] = []

    def pmat(self, thetas):
        return self.family.pmf_matrix(self.xs, np.asarray(thetas, dtype=float))

    def loglik(self, atoms, weights):
        hq = self.pmat(atoms) @ weights
        if np.any(hq <= 0.0):
            return -math.inf
        return float(self.cs @ np.log(hq))

    def dir_deriv(self, atoms, weights, thetas):
        hq = self.pmat(atoms) @ weights
        ratio = self.cs / (self.n * hq)
        return self.pmat(thetas).T @ ratio

    def em(self, atoms, weights, max_iters=None):
        """Multiplicative EM until the per-iteration gain falls below the
        loglik tolerance, then (on small supports) a constrained Newton
        polish of the weights; records the monotone trace."""
        cap = self.cfg.max_em_iters if max_iters is None else max_iters
        pmat = self.pmat(atoms)
        trace = []
        prev = -math.inf
        em_cap = min(cap, 500) if weights.size <= 60 else cap
        for _ in range(em_cap):
            hq = pmat @ weights
            ll = float(self.cs @ np.log(hq))
            trace.append(ll)
            if ll - prev < self.cfg.loglik_tol:
                break
            prev = ll
            weights = weights * (pmat.T @ (self.cs / (self.n * hq)))
            weights = weights / weights.sum()
        if weights.size <= 60:
            weights, newton_lls = _newton_weights(pmat, self.cs, weights)
            trace.extend(newton_lls)
        self.em_iters += len(trace)
        self.traces.append(tuple(trace))
        return weights, trace[-1]

    def polish_atom(self, atoms, weights, j, lo, hi):
        """Golden-section ascent of the likelihood in the position of atom j."""
        others = np.delete(np.arange(atoms.size), j)
        base = self.pmat(atoms[others]) @ weights[others] \
            if others.size else np.zeros(self.xs.size)
        wj = weights[j]

        def obj(t):
            hq = base + wj * np.atleast_1d(self.family.pmf(self.xs, t))
            if np.any(hq <= 0.0):
                return -math.inf
            return float(self.cs @ np.log(hq))

        cur = obj(atoms[j])
        best, val = _golden_max(obj, lo, hi)
        return best if val > cur else atoms[j]

    def polish_all(self, atoms, weights, reach):
        """Polish every atom inside its neighbor-bounded bracket."""
        atoms = atoms.copy()
        for j in range(atoms.size):
            lo = 0.0 if j == 0 else 0.5 * (atoms[j - 1] + atoms[j])
            hi = self.theta_star if j == atoms.size - 1 \
                else 0.5 * (atoms[j] + atoms[j + 1])
            lo = max(lo, atoms[j] - reach)
            hi = min(hi, atoms[j] + reach)
            if hi > lo:
                atoms[j] = self.polish_atom(atoms, weights, j, lo, hi)
        order = np.argsort(atoms, kind="stable")
        return atoms[order], weights[order]

    def prune(self, atoms, weights):
        keep = weights > self.cfg.prune_floor
        if not keep.any():
            keep = weights == weights.max()
        q = measure(atoms[keep], weights[keep], prune_floor=0.0)
        return q.atoms.copy(), q.weights.copy()

    def merge_pass(self, atoms, weights, slack=1e-7):
        """Merge adjacent atoms whenever the re-optimized likelihood loses at
        most ``slack``; a merge that was too greedy is undone later by the
        vertex-direction step, so this only removes redundant support."""
        cap = min(4000, self.cfg.max_em_iters)
        while atoms.size > 1:
            weights, ll0 = self.em(atoms, weights, max_iters=cap)
            gaps = np.diff(atoms)
            merged = False
            for j in np.argsort(gaps, kind="stable"):
                wsum = weights[j] + weights[j + 1]
                cand_atoms = np.delete(atoms, j + 1)
                cand_weights = np.delete(weights, j + 1)
                cand_atoms[j] = (atoms[j] * weights[j]
                                 + atoms[j + 1] * weights[j + 1]) / wsum
                cand_weights[j] = wsum
                lo = max(0.0, cand_atoms[j] - gaps[j])
                hi = min(self.theta_star, cand_atoms[j] + gaps[j])
                cand_atoms[j] = self.polish_atom(cand_atoms, cand_weights, j,
                                                 lo, hi)
                order = np.argsort(cand_atoms, kind="stable")
                cand_atoms, cand_weights = cand_atoms[order], cand_weights[order]
                cand_weights, ll1 = self.em(cand_atoms, cand_weights,
                                            max_iters=cap)
                if ll1 >= ll0 - slack:
                    atoms, weights = cand_atoms, cand_weights
                    merged = True
                    break
            if not merged:
                break
        return atoms, weights

    def insert(self, atoms, weights, new_atom):
        """Add an atom, entering with the line-search-optimal fraction."""
        if np.min(np.abs(atoms - new_atom)) < 1e-12:
            return atoms, weights
        hq = self.pmat(atoms) @ weights
        col = np.atleast_1d(self.family.pmf(self.xs, new_atom))

        def obj(lam):
            mix = (1.0 - lam) * hq + lam * col
            if np.any(mix <= 0.0):
                return -math.inf
            return float(self.cs @ np.log(mix))

        lam, _ = _golden_max(obj, 0.0, 0.95, tol=1e-10)
        lam = max(lam, 1e-8)
        atoms = np.append(atoms, new_atom)
        weights = np.append(weights * (1.0 - lam), lam)
        order = np.argsort(atoms, kind="stable")
        return atoms[order], weights[order]


def solve(family, h: SampleHistogram, cfg: SolverConfig = SolverConfig()) -> NpmleResult:
    """Maximize the mixture log-likelihood over mixing distributions.

    Returns the pruned support measure together with the final
    log-likelihood, the sup of the directional derivative over the
    verification grid, the total EM iteration count, and a converged flag
    (``sup_gradient <= 1 + grad_tol``).  Raises :class:`NpmleError` when
    some observed count has identically zero pmf on the support interval.
    """
    prog = _Program(family, h, cfg)
    theta_star = family.theta_star
    grid = np.linspace(0.0, theta_star, cfg.grid_size)
    spacing = theta_star / (cfg.grid_size - 1) if cfg.grid_size > 1 else theta_star

    pmat = prog.pmat(grid)
    attainable = pmat.max(axis=1)
    if np.any(attainable <= 0.0):
        bad = int(prog.xs[int(np.argmin(attainable))])
        raise NpmleError(f"observation x={bad} has zero pmf everywhere on the grid")

    # phase 1: grid EM localizes the support clusters
    w0 = np.full(cfg.grid_size, 1.0 / cfg.grid_size)
    w0, smear_ll = prog.em(grid, w0, max_iters=min(_LOCALIZE_ITERS,
                                                   cfg.max_em_iters))
    keep = w0 > cfg.prune_floor
    smear_atoms, smear_weights = grid[keep], w0[keep] / w0[keep].sum()

    # phase 2: sparse restart, one polished centroid per cluster
    atoms, weights = _cluster_centroids(smear_atoms, smear_weights, spacing)
    atoms, weights = prog.polish_all(atoms, weights, reach=theta_star)
    weights, _ = prog.em(atoms, weights)
    atoms, weights = prog.prune(atoms, weights)

    # phase 3: polish / add-vertex rounds
    fine = np.linspace(0.0, theta_star, 10 * (cfg.grid_size - 1) + 1)
    fine_spacing = theta_star / (fine.size - 1)
    max_support = prog.xs.size + 2
    for _ in range(cfg.refine_rounds):
        atoms, weights = prog.polish_all(atoms, weights, reach=2.0 * spacing)
        weights, _ = prog.em(atoms, weights)
        atoms, weights = prog.prune(atoms, weights)
        atoms, weights = prog.merge_pass(atoms, weights)
        atoms, weights = prog.prune(atoms, weights)
        added = 0
        while atoms.size < max_support:
            cand, d_cand = _best_vertex(prog, atoms, weights, fine,
                                        fine_spacing)
            if d_cand <= 1.0 + cfg.grad_tol:
                break
            atoms, weights = prog.insert(atoms, weights, cand)
            weights, _ = prog.em(atoms, weights)
            atoms, weights = prog.prune(atoms, weights)
            added += 1
        if added == 0:
            break

    # final cleanup: drop any support redundancy the last vertex additions
    # left behind, then alternate polish and weight steps to stationarity
    atoms, weights = prog.merge_pass(atoms, weights)
    atoms, weights = prog.prune(atoms, weights)
    sparse_ll = -math.inf
    for _ in range(30):
        atoms, weights = prog.polish_all(atoms, weights, reach=2.0 * spacing)
        weights, ll_now = prog.em(atoms, weights)
        atoms, weights = prog.prune(atoms, weights)
        if ll_now - sparse_ll < cfg.loglik_tol:
            sparse_ll = ll_now
            break
        sparse_ll = ll_now
    atoms, weights = prog.merge_pass(atoms, weights)
    atoms, weights = prog.prune(atoms, weights)

    # certificate repair: the cleanup may have dropped or shifted support the
    # bound needs, so re-add vertices until D is back under 1 + grad_tol
    for _ in range(max_support if cfg.refine_rounds > 0 else 0):
        cand, d_cand = _best_vertex(prog, atoms, weights, fine, fine_spacing)
        if d_cand <= 1.0 + cfg.grad_tol:
            break
        atoms, weights = prog.insert(atoms, weights, cand)
        weights, _ = prog.em(atoms, weights)
        atoms, weights = prog.prune(atoms, weights)
        atoms, weights = prog.polish_all(atoms, weights, reach=2.0 * spacing)
        weights, _ = prog.em(atoms, weights)
        atoms, weights = prog.prune(atoms, weights)
    sup_sparse = float(prog.dir_deriv(atoms, weights, fine).max())

    # fall back to the (pruned) grid iterate in the rare case the sparse
    # path failed its certificate and lost likelihood
    if sup_sparse > 1.0 + cfg.grad_tol and smear_ll > sparse_ll:
        atoms, weights = smear_atoms, smear_weights
        weights, _ = prog.em(atoms, weights)
        atoms, weights = prog.prune(atoms, weights)
        sup_sparse = float(prog.dir_deriv(atoms, weights, fine).max())

    q_hat = measure(atoms, weights, prune_floor=cfg.prune_floor)
    loglik = prog.loglik(q_hat.atoms, q_hat.weights)
    sup_grad = float(prog.dir_deriv(q_hat.atoms, q_hat.weights, fine).max())
    return NpmleResult(q_hat=q_hat, loglik=loglik, sup_gradient=sup_grad,
                       em_iters=prog.em_iters,
                       converged=bool(sup_grad <= 1.0 + cfg.grad_tol),
                       em_traces=tuple(prog.traces))


# -- internals ---------------------------------------------------------------

def _newton_weights(pmat, cs, weights, max_iters=30):
    """Constrained Newton ascent for the weight subproblem.

    Solves the KKT system of ``max sum c_x log(P w)`` on the simplex with the
    support held fixed; quadratically convergent from the EM iterate.  Steps
    are backtracked to keep weights positive and the likelihood nondecreasing,
    so the appended trace stays monotone.
    """
    n = cs.sum()
    m = weights.size
    lls = []
    for _ in range(max_iters):
        hq = pmat @ weights
        ll = float(cs @ np.log(hq))
        ratio = cs / hq
        grad = pmat.T @ ratio / n
        res = grad - 1.0
        if np.max(np.abs(res)) < 1e-13:
            break
        curv = (pmat.T * (cs / hq ** 2)) @ pmat / n
        kkt = np.zeros((m + 1, m + 1))
        kkt[:m, :m] = curv
        kkt[:m, m] = 1.0
        kkt[m, :m] = 1.0
        rhs = np.concatenate([res, [0.0]])
        try:
            step = np.linalg.solve(kkt, rhs)[:m]
        except np.linalg.LinAlgError:
            break
        scale = 1.0
        improved = False
        for _ in range(60):
            cand = weights + scale * step
            if np.all(cand > 0.0):
                h_cand = pmat @ cand
                if np.all(h_cand > 0.0):
                    ll_cand = float(cs @ np.log(h_cand))
                    if ll_cand >= ll:
                        weights = cand / cand.sum()
                        lls.append(ll_cand)
                        improved = ll_cand > ll
                        break
            scale *= 0.5
        if not improved:
            break
    return weights, lls


def _cluster_centroids(atoms, weights, spacing):
    """Weight centroid of each run of atoms with gaps <= ~2 grid spacings."""
    if atoms.size <= 1:
        return atoms.copy(), weights.copy()
    splits = np.where(np.diff(atoms) > 2.05 * spacing)[0] + 1
    groups = np.split(np.arange(atoms.size), splits)
    cents, wsums = [], []
    for g in groups:
        wsum = weights[g].sum()
        cents.append(float(atoms[g] @ weights[g] / wsum))
        wsums.append(wsum)
    return np.asarray(cents), np.asarray(wsums) / np.sum(wsums)


def _best_vertex(prog, atoms, weights, fine, fine_spacing):
    """Fine-grid argmax of D (first index on ties), polished locally."""
    d_fine = prog.dir_deriv(atoms, weights, fine)
    j = int(np.argmax(d_fine))
    cand = fine[j]

    def d_of(t):
        return float(prog.dir_deriv(atoms, weights, np.array([t]))[0])

    lo = max(0.0, cand - fine_spacing)
    hi = min(prog.theta_star, cand + fine_spacing)
    best, val = _golden_max(d_of, lo, hi)
    return (best, val) if val >= d_fine[j] else (cand, float(d_fine[j]))


def _golden_max(f, lo, hi, tol=1e-12):
    """Golden-section maximizer of f on [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)

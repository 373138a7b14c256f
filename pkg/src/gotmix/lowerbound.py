"""Moment-matched measure pairs and the two-point minimax lower bound.

Gauss-Legendre quadrature of Uniform[0, M] produces a discrete measure
whose first 2m-1 moments match the uniform's exactly while staying
W1-separated from it; feeding such a pair through the mixture map and the
product-measure TV bound ``TV(h^(x)n) <= n TV(h)`` yields the computable
two-point lower bound ``(w1/2) * max(0, 1 - n*TV)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distances import tv_mixtures
from .measures import DiscreteMeasure, measure


class QuadratureError(RuntimeError):
    """Eigensolver or discretization refinement failed to converge."""


def _tridiag_eig_firstrow(diag, offdiag, max_sweeps=50):
    """Eigenvalues and first eigenvector components of a symmetric
    tridiagonal matrix (implicit QL with Wilkinson shifts).

    Returns (eigenvalues ascending, first components aligned with them).
    """
    d = np.asarray(diag, dtype=float).copy()
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = np.asarray(offdiag, dtype=float)
    z = np.zeros(n)
    z[0] = 1.0
    eps = np.finfo(float).eps

    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise QuadratureError("tridiagonal QL did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                z[i], z[i + 1] = c * z[i] - s * z[i + 1], s * z[i] + c * z[i + 1]
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0

    order = np.argsort(d, kind="stable")
    return d[order], z[order]


def gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights for Uniform[0, 1].

    Golub-Welsch construction: the Jacobi matrix for Legendre polynomials
    (zero diagonal, off-diagonals ``j / sqrt(4 j^2 - 1)``) is diagonalized
    by the in-repo tridiagonal QL solver; nodes map to (0, 1) and weights
    are the squared first eigenvector components (summing to one).
    """
    if not 1 <= m <= 64:
        raise ValueError("m must lie in [1, 64]")
    if m == 1:
        return np.array([0.5]), np.array([1.0])
    j = np.arange(1, m)
    beta = j / np.sqrt(4.0 * j * j - 1.0)
    nodes, firstrow = _tridiag_eig_firstrow(np.zeros(m), beta)
    weights = firstrow ** 2
    weights = weights / weights.sum()
    return (nodes + 1.0) / 2.0, weights


@dataclass(frozen=True)
class MomentMatchedPair:
    """Uniform[0, M] alongside a quadrature measure matching its first
    ``matched_k`` moments, with their exact W1 separation."""

    M: float
    p2: DiscreteMeasure
    matched_k: int
    w1_value: float


def moment_pair(M: float, k: int) -> MomentMatchedPair:
    """Construct a pair matching at least the first k moments on [0, M]."""
    if M <= 0.0 or k < 1:
        raise ValueError("require M > 0 and k >= 1")
    m = (k + 2) // 2  # ceil((k+1)/2) nodes match 2m-1 >= k moments
    if m > 64:
        raise ValueError("k beyond the 64-node quadrature cap")
    nodes, weights = gauss_legendre(m)
    p2 = measure(M * nodes, weights)
    return MomentMatchedPair(M=float(M), p2=p2, matched_k=2 * m - 1,
                             w1_value=_w1_uniform_vs_discrete(M, p2))


def _w1_uniform_vs_discrete(M: float, q: DiscreteMeasure) -> float:
    """Exact ``int_0^M |t/M - F_q(t)| dt`` (piecewise linear minus step)."""
    cuts = np.concatenate(([0.0], q.atoms, [M]))
    cum = np.concatenate(([0.0], np.cumsum(q.weights)))
    total = 0.0
    for i in range(cuts.size - 1):
        a, b = cuts[i], cuts[i + 1]
        if b <= a:
            continue
        c = cum[i]

        def anti(t):
            return t * t / (2.0 * M) - c * t

        cross = c * M
        if a < cross < b:
            total += abs(anti(cross) - anti(a)) + abs(anti(b) - anti(cross))
        else:
            total += abs(anti(b) - anti(a))
    return total


def lecam_bound(family, pair: MomentMatchedPair, n: int,
                tol: float = 1e-6) -> float:
    """Two-point minimax lower bound ``(w1/2) * max(0, 1 - n * TV)``.

    TV between the two induced count distributions is evaluated with the
    uniform component discretized to L midpoint atoms, L doubling from 2048
    until the value settles below tol/4.
    """
    if pair.M > family.theta_star * (1.0 + 1e-12):
        raise ValueError("pair support must lie inside [0, theta_star]")
    if n < 1:
        raise ValueError("n must be positive")
    tv_prev = None
    L = 2048
    while True:
        mids = (np.arange(L) + 0.5) * pair.M / L
        p1 = measure(mids, np.full(L, 1.0 / L))
        tv = tv_mixtures(family, p1, pair.p2, tol)
        if tv_prev is not None and abs(tv - tv_prev) < tol / 4.0:
            break
        if L >= 1 << 16:
            raise QuadratureError("uniform discretization did not settle")
        tv_prev = tv
        L *= 2
    return 0.5 * pair.w1_value * max(0.0, 1.0 - n * tv)

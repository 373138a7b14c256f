"""Shared helpers: random inputs and independent oracles."""

from __future__ import annotations

import numpy as np

from gotmix import DiscreteMeasure, LipschitzFn, measure


def random_measure(rng, max_atoms=4, lo=0.0, hi=2.0) -> DiscreteMeasure:
    m = int(rng.integers(1, max_atoms + 1))
    atoms = np.sort(rng.uniform(lo, hi, size=m))
    atoms += np.arange(m) * 1e-9  # keep strictly increasing
    weights = rng.dirichlet(np.ones(m))
    return measure(atoms, weights)


def random_lipschitz(rng, max_hinges=5, interval=(-1.0, 1.0)) -> LipschitzFn:
    """Random hinge function with partial slopes in [-1, 1]."""
    a, b = interval
    m = int(rng.integers(1, max_hinges + 1))
    cs = np.sort(rng.uniform(a, b, size=m))
    cs += np.arange(m) * 1e-9
    slopes = rng.uniform(-1.0, 1.0, size=m + 1)
    coeffs = np.diff(slopes)
    return LipschitzFn(breakpoints=tuple(cs), hinge_coeffs=tuple(coeffs),
                       base_slope=float(slopes[0]))


def w1_pairing_oracle(q1: DiscreteMeasure, q2: DiscreteMeasure) -> float:
    """W1 by explicit monotone mass pairing (optimal coupling in 1-D)."""
    i = j = 0
    rem1 = q1.weights.copy()
    rem2 = q2.weights.copy()
    cost = 0.0
    while i < q1.size and j < q2.size:
        moved = min(rem1[i], rem2[j])
        cost += moved * abs(q1.atoms[i] - q2.atoms[j])
        rem1[i] -= moved
        rem2[j] -= moved
        if rem1[i] <= 1e-17:
            i += 1
        if rem2[j] <= 1e-17:
            j += 1
    return cost

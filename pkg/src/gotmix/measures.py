"""Discrete mixing measures, count histograms, and seeded sampling.

Sampling is bit-reproducible: the random stream is a splitmix64 generator
(public constants 0x9E3779B97F4A7C15 / 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB)
whose state for replication ``r`` is the splitmix64 scramble of
``base XOR r``.  Both the mixing atom and the count are drawn by inverse-CDF
lookups, so any implementation of the same stream reproduces the histograms
byte for byte.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

MERGE_TOL = 1e-13
PRUNE_FLOOR = 1e-15

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64(z: int) -> int:
    """One splitmix64 output scramble of a 64-bit value."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """The splitmix64 sequence: state += golden gamma, output = scramble."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return splitmix64(self._state)

    def next_float(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_uint64() >> 11) * 2.0 ** -53


@dataclass(frozen=True)
class Seed:
    """Experiment base seed plus replication index."""

    base: int
    replication: int = 0

    def stream_seed(self) -> int:
        return splitmix64((self.base ^ self.replication) & _MASK64)

    def stream(self) -> SplitMix64:
        return SplitMix64(self.stream_seed())


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure on the real line.

    Atoms are strictly increasing and weights are positive and sum to one;
    build instances through :func:`measure` (or :func:`point_mass`), which
    normalizes, merges near-duplicate atoms, and prunes negligible weights.
    """

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if atoms.shape != weights.shape or atoms.ndim != 1 or atoms.size == 0:
            raise ValueError("atoms and weights must be equal-length 1-D arrays")
        if np.any(np.diff(atoms) <= 0.0):
            raise ValueError("atoms must be strictly increasing")
        if np.any(weights < PRUNE_FLOOR):
            raise ValueError(f"weights must all be >= {PRUNE_FLOOR}")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to one")
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (self.atoms.shape == other.atoms.shape
                and bool(np.all(self.atoms == other.atoms))
                and bool(np.all(self.weights == other.weights)))

    @property
    def size(self) -> int:
        return self.atoms.size

    def mean(self) -> float:
        """First moment ``sum_j weights[j] * atoms[j]``."""
        return float(self.weights @ self.atoms)

    def moment(self, j: int) -> float:
        return float(self.weights @ self.atoms ** j)

    def cdf(self, t) -> np.ndarray:
        """Right-continuous CDF evaluated at t (vectorized)."""
        idx = np.searchsorted(self.atoms, np.asarray(t, dtype=float), side="right")
        cum = np.concatenate(([0.0], np.cumsum(self.weights)))
        return cum[idx]


def measure(atoms, weights, merge_tol: float = MERGE_TOL,
            prune_floor: float = PRUNE_FLOOR) -> DiscreteMeasure:
    """Build a normalized :class:`DiscreteMeasure`.

    Sorts by atom, merges atoms closer than ``merge_tol`` (weights added),
    normalizes, and drops weights below ``prune_floor`` (renormalizing).
    """
    atoms = np.asarray(atoms, dtype=float).ravel()
    weights = np.asarray(weights, dtype=float).ravel()
    if atoms.size != weights.size or atoms.size == 0:
        raise ValueError("atoms and weights must be nonempty and equal length")
    if np.any(weights < 0.0) or weights.sum() <= 0.0:
        raise ValueError("weights must be nonnegative with positive total")
    order = np.argsort(atoms, kind="stable")
    atoms, weights = atoms[order], weights[order]

    merged_a, merged_w = [atoms[0]], [weights[0]]
    for a, w in zip(atoms[1:], weights[1:]):
        if a - merged_a[-1] <= merge_tol:
            merged_w[-1] += w
        else:
            merged_a.append(a)
            merged_w.append(w)
    a = np.asarray(merged_a)
    w = np.asarray(merged_w)
    w = w / w.sum()
    keep = w >= max(prune_floor, PRUNE_FLOOR)
    if not keep.any():
        raise ValueError("all weights fell below the prune floor")
    a, w = a[keep], w[keep]
    w = w / w.sum()
    return DiscreteMeasure(a, w)


def point_mass(atom: float) -> DiscreteMeasure:
    return DiscreteMeasure(np.array([float(atom)]), np.array([1.0]))


@dataclass(frozen=True)
class SampleHistogram:
    """Observed counts ``x -> c_x`` with total sample size n."""

    counts: dict[int, int]
    n: int = field(init=False)

    def __post_init__(self):
        counts = {int(x): int(c) for x, c in sorted(self.counts.items()) if c != 0}
        if any(x < 0 or c < 0 for x, c in counts.items()):
            raise ValueError("counts require nonnegative x and c")
        n = sum(counts.values())
        if n < 1:
            raise ValueError("histogram must contain at least one observation")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_samples(cls, xs) -> "SampleHistogram":
        return cls(dict(Counter(int(x) for x in xs)))

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted distinct values and their counts as arrays."""
        xs = np.fromiter(self.counts.keys(), dtype=np.int64)
        cs = np.fromiter(self.counts.values(), dtype=np.int64)
        return xs, cs

    def empirical_pmf(self, x: int) -> float:
        """Observed frequency ``c_x / n`` (0 when x was never seen)."""
        return self.counts.get(int(x), 0) / self.n

    def max_x(self) -> int:
        return max(self.counts)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write("x,count\n")
            for x, c in self.counts.items():
                fh.write(f"{x},{c}\n")

    @classmethod
    def from_csv(cls, path) -> "SampleHistogram":
        counts: dict[int, int] = {}
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().strip()
            if header != "x,count":
                raise ValueError(f"expected 'x,count' header, got {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                x_s, c_s = line.split(",")
                counts[int(x_s)] = counts.get(int(x_s), 0) + int(c_s)
        return cls(counts)


def _count_cdf(family, theta: float, tail_tol: float = 1e-15,
               hard_cap: int = 1_000_000) -> np.ndarray:
    """Cumulative pmf table of f(. | theta), extended until the tail is below
    tail_tol (draws beyond the table are assigned the cap)."""
    block = 64
    vals: list[float] = []
    total = 0.0
    x0 = 0
    limit = family.x_cap + 1 if family.w_table is not None else hard_cap
    while total < 1.0 - tail_tol and x0 < limit:
        xs = np.arange(x0, min(x0 + block, limit))
        block_vals = np.atleast_1d(family.pmf(xs, theta))
        vals.extend(block_vals.tolist())
        total += float(block_vals.sum())
        x0 = int(xs[-1]) + 1
        block *= 2
    cum = np.cumsum(vals)
    cut = int(np.searchsorted(cum, 1.0 - tail_tol, side="left"))
    return cum[:min(cut + 1, len(cum))]


def sample(family, q: DiscreteMeasure, n: int, seed: Seed) -> SampleHistogram:
    """Draw n observations from the mixture of ``family`` under ``q``.

    Two inverse-CDF stages per draw: an atom from the mixing weights, then a
    count from the pmf table of that atom.  Deterministic given ``seed``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    atoms = np.asarray(q.atoms)
    if atoms.min() < 0.0 or atoms.max() > family.theta_star:
        raise ValueError("mixing atoms must lie in [0, theta_star]")
    weight_cdf = np.cumsum(q.weights).tolist()
    count_cdfs = [_count_cdf(family, float(t)).tolist() for t in atoms]
    rng = seed.stream()
    counts: Counter[int] = Counter()
    m = len(weight_cdf)
    for _ in range(n):
        j = bisect_left(weight_cdf, rng.next_float())
        if j >= m:
            j = m - 1
        cdf = count_cdfs[j]
        x = bisect_left(cdf, rng.next_float())
        if x >= len(cdf):
            x = len(cdf) - 1
        counts[x] += 1
    return SampleHistogram(dict(counts))

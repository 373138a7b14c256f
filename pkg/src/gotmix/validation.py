"""Input validation helpers shared by the estimator and the CLI."""

from __future__ import annotations

import numpy as np

from .measures import SampleHistogram


def check_counts(X) -> np.ndarray:
    """Coerce observations to a 1-D array of nonnegative integers.

    Accepts sequences, 1-D arrays, or single-column 2-D arrays (the sklearn
    ``(n_samples, 1)`` shape).  Float inputs must hold integral values.
    """
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected 1-D count data, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("empty sample")
    vals = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("counts must be finite")
    rounded = np.rint(vals)
    if np.any(np.abs(vals - rounded) > 0.0):
        raise ValueError("counts must be integers")
    if np.any(rounded < 0):
        raise ValueError("counts must be nonnegative")
    return rounded.astype(np.int64)


def histogram_from(X) -> SampleHistogram:
    return SampleHistogram.from_samples(check_counts(X))

"""1-Lipschitz test functions in hinge form and their Gaussian smoothing.

A function is represented as ``l(u) = s*u + sum_j a_j * max(u - c_j, 0)``,
shifted so that ``l(0) = 0``.  The partial slopes ``s + sum_{c_j <= u} a_j``
are required to stay in [-1, 1], which makes the function globally
1-Lipschitz on the whole line (the hinge form extends past any working
interval with its boundary slopes).  Convolution with a centered Gaussian
has a closed form per hinge, so smoothing is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._normal import norm_cdf, norm_pdf


@dataclass(frozen=True)
class LipschitzFn:
    """Piecewise-linear 1-Lipschitz function, pinned to 0 at the origin."""

    breakpoints: tuple[float, ...]
    hinge_coeffs: tuple[float, ...]
    base_slope: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.breakpoints, dtype=float)
        a = np.asarray(self.hinge_coeffs, dtype=float)
        if c.shape != a.shape:
            raise ValueError("breakpoints and hinge_coeffs must match in length")
        if c.size and np.any(np.diff(c) <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        slopes = self.base_slope + np.concatenate(([0.0], np.cumsum(a)))
        if np.any(np.abs(slopes) > 1.0 + 1e-12):
            raise ValueError("partial slopes must stay in [-1, 1]")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        c = np.asarray(self.breakpoints)
        a = np.asarray(self.hinge_coeffs)
        hinges = np.maximum(u[..., None] - c, 0.0) - np.maximum(-c, 0.0)
        val = self.base_slope * u + hinges @ a
        return float(val) if np.ndim(u) == 0 else val

    def smoothed(self, sigma: float, theta):
        return convolve_gauss(self, sigma, theta)


def convolve_gauss(l: LipschitzFn, sigma: float, theta):
    """Exact Gaussian convolution ``(l * phi_sigma)(theta)``.

    Affine parts pass through unchanged; each hinge contributes
    ``(t - c) Phi((t - c)/sigma) + sigma phi((t - c)/sigma)``.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    t = np.asarray(theta, dtype=float)
    c = np.asarray(l.breakpoints)
    a = np.asarray(l.hinge_coeffs)
    if c.size:
        d = t[..., None] - c
        ramp = d * norm_cdf(d / sigma) + sigma * norm_pdf(d / sigma)
        shift = np.maximum(-c, 0.0)
        val = l.base_slope * t + (ramp - shift) @ a
    else:
        val = l.base_slope * t
    return float(val) if np.ndim(theta) == 0 else val


def abs_fn() -> LipschitzFn:
    """``l(u) = |u|`` (slope -1 then +1)."""
    return LipschitzFn(breakpoints=(0.0,), hinge_coeffs=(2.0,), base_slope=-1.0)


#: canonical relative hinge positions for the 5-hinge sawtooth; deliberately
#: asymmetric -- symmetric layouts sit on a parity degeneracy of Chebyshev
#: interpolation that masks the generic error decay at small degrees
_SAWTOOTH_REL = (0.15, 0.375, 0.55, 0.725, 0.9)


def sawtooth_fn(hinges: int = 5, interval: tuple[float, float] = (-1.0, 1.0)) -> LipschitzFn:
    """Zigzag with the given number of interior hinges, slopes alternating +-1.

    The default is the canonical 5-hinge sawtooth on [-1, 1] used by the
    approximation sweeps and their tests.
    """
    if hinges < 1:
        raise ValueError("need at least one hinge")
    a, b = interval
    rel = np.asarray(_SAWTOOTH_REL) if hinges == 5 \
        else np.linspace(0.15, 0.9, hinges)
    cs = a + (b - a) * rel
    coeffs = tuple(2.0 if j % 2 else -2.0 for j in range(hinges))
    return LipschitzFn(breakpoints=tuple(cs), hinge_coeffs=coeffs, base_slope=1.0)

"""Chebyshev interpolation, basis conversion, and Hermite polynomials.

:class:`ChebPoly` stores coefficients in the Chebyshev basis on an interval
[a, b] and lazily derives monomial coefficients in the original variable.
Chebyshev-to-monomial conversion is notoriously ill-conditioned as the
degree grows, so the conversion matrices (whose entries are dyadic
rationals) are applied in exact ``fractions`` arithmetic with a single
rounding at the end, and degrees above 40 are refused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_CONVERSION_DEGREE = 40


class DegreeError(ValueError):
    """Degree outside the supported conversion range."""


@lru_cache(maxsize=None)
def _cheb_mono_rows(k: int) -> tuple[tuple[int, ...], ...]:
    """Row m = integer monomial coefficients of T_m, m = 0..k."""
    rows = [(1,), (0, 1)]
    for m in range(1, k):
        prev, cur = rows[m - 1], rows[m]
        nxt = [0] * (m + 2)
        for i, c in enumerate(cur):
            nxt[i + 1] += 2 * c
        for i, c in enumerate(prev):
            nxt[i] -= c
        rows.append(tuple(nxt))
    return tuple(rows[: k + 1])


@lru_cache(maxsize=None)
def _mono_cheb_rows(k: int) -> tuple[tuple[Fraction, ...], ...]:
    """Row n = Chebyshev coefficients of u**n (dyadic rationals), n = 0..k.

    ``u**n = 2**(1-n) * sum_j binom(n, j) T_{n-2j}`` with the T_0 term
    halved.
    """
    rows = []
    for n in range(k + 1):
        row = [Fraction(0)] * (n + 1)
        if n == 0:
            row[0] = Fraction(1)
        else:
            scale = Fraction(1, 2 ** (n - 1))
            for j in range(n // 2 + 1):
                m = n - 2 * j
                coef = scale * math.comb(n, j)
                if m == 0:
                    coef /= 2
                row[m] += coef
        rows.append(tuple(row))
    return tuple(rows)


def _poly_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _strip_trailing_zeros(coeffs: list[Fraction]) -> list[Fraction]:
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _affine_substitute(coeffs: list[Fraction], lin: list[Fraction]) -> list[Fraction]:
    """Exact coefficients of ``sum coeffs[x] * (lin[0] + lin[1]*v)**x``."""
    out = [Fraction(0)]
    for c in reversed(coeffs):
        out = _poly_mul(out, lin)
        out[0] += c
    return _strip_trailing_zeros(out)


@dataclass(frozen=True)
class ChebPoly:
    """Polynomial in the Chebyshev basis on [a, b]."""

    coeffs: np.ndarray  # coefficients of T_m in the mapped variable u in [-1, 1]
    interval: tuple[float, float]
    _mono_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coeffs must be a nonempty 1-D array")
        a, b = self.interval
        if not a < b:
            raise ValueError("interval must satisfy a < b")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "interval", (float(a), float(b)))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, theta):
        """Evaluate by Clenshaw recurrence on the mapped variable."""
        a, b = self.interval
        u = (2.0 * np.asarray(theta, dtype=float) - (a + b)) / (b - a)
        c = self.coeffs
        b1 = np.zeros_like(u)
        b2 = np.zeros_like(u)
        for cm in c[:0:-1]:
            b1, b2 = 2.0 * u * b1 - b2 + cm, b1
        val = u * b1 - b2 + c[0]
        return float(val) if np.ndim(theta) == 0 else val

    def monomial_coeffs(self) -> np.ndarray:
        """Coefficients of powers of theta (the original variable), exact
        dyadic-rational conversion rounded once to float."""
        if "theta" not in self._mono_cache:
            fracs = self._mono_fractions()
            self._mono_cache["theta"] = np.array([float(f) for f in fracs])
        return self._mono_cache["theta"]

    def unit_monomial_coeffs(self) -> np.ndarray:
        """Coefficients of powers of the mapped variable u in [-1, 1]."""
        if "unit" not in self._mono_cache:
            self._mono_cache["unit"] = np.array(
                [float(f) for f in self._unit_mono_fractions()])
        return self._mono_cache["unit"]

    def unit_interval(self) -> "ChebPoly":
        """The same Chebyshev coefficients read on [-1, 1]."""
        return ChebPoly(self.coeffs.copy(), (-1.0, 1.0))

    def _unit_mono_fractions(self) -> list[Fraction]:
        k = self.degree
        if k > MAX_CONVERSION_DEGREE:
            raise DegreeError(
                f"basis conversion refused beyond degree {MAX_CONVERSION_DEGREE}")
        rows = _cheb_mono_rows(k)
        out = [Fraction(0)] * (k + 1)
        for m, cm in enumerate(self.coeffs):
            fm = Fraction(float(cm))
            for x, t in enumerate(rows[m]):
                if t:
                    out[x] += fm * t
        return out

    def _mono_fractions(self) -> list[Fraction]:
        a, b = self.interval
        mono_u = self._unit_mono_fractions()
        if (a, b) == (-1.0, 1.0):
            return mono_u
        # u = (2*theta - (a+b)) / (b - a)
        span = Fraction(b) - Fraction(a)
        lin = [-(Fraction(a) + Fraction(b)) / span, Fraction(2) / span]
        return _affine_substitute(mono_u, lin)

    @classmethod
    def from_monomial(cls, coeffs, interval) -> "ChebPoly":
        """Build from monomial coefficients in theta (exact conversion;
        Fraction inputs pass through unrounded)."""
        coeffs = [c if isinstance(c, Fraction) else Fraction(float(c))
                  for c in coeffs]
        if len(coeffs) - 1 > MAX_CONVERSION_DEGREE:
            raise DegreeError(
                f"basis conversion refused beyond degree {MAX_CONVERSION_DEGREE}")
        a, b = float(interval[0]), float(interval[1])
        if (a, b) != (-1.0, 1.0):
            # theta = ((b-a)*u + (a+b)) / 2
            half_span = (Fraction(b) - Fraction(a)) / 2
            lin = [(Fraction(a) + Fraction(b)) / 2, half_span]
            coeffs = _affine_substitute(coeffs, lin)
        rows = _mono_cheb_rows(len(coeffs) - 1)
        out = [Fraction(0)] * len(coeffs)
        for n, cn in enumerate(coeffs):
            for m, t in enumerate(rows[n]):
                if t:
                    out[m] += cn * t
        return cls(np.array([float(f) for f in out]), (a, b))


def chebyshev_approx(f, interval, k: int) -> ChebPoly:
    """Interpolate f at the k+1 Chebyshev extremal nodes mapped to [a, b].

    Degree-k interpolation at ``cos(pi*j/k)``; reproduces polynomials of
    degree <= k exactly and is the constructive stand-in for best
    polynomial approximation.
    """
    if k < 0:
        raise ValueError("degree must be nonnegative")
    a, b = float(interval[0]), float(interval[1])
    if k == 0:
        mid = 0.5 * (a + b)
        return ChebPoly(np.array([float(_eval_scalar(f, mid))]), (a, b))
    j = np.arange(k + 1)
    u = np.cos(np.pi * j / k)
    thetas = a + (b - a) * (u + 1.0) / 2.0
    fv = _eval_vector(f, thetas)
    # DCT-I: c_m = (2/k) * sum'' f_j cos(pi j m / k), ends halved twice over
    fv_weighted = fv.copy()
    fv_weighted[0] *= 0.5
    fv_weighted[-1] *= 0.5
    phases = np.cos(np.pi * np.outer(j, j) / k)
    c = (2.0 / k) * (phases @ fv_weighted)
    c[0] *= 0.5
    c[-1] *= 0.5
    return ChebPoly(c, (a, b))


def _eval_scalar(f, t):
    return float(np.asarray(f(t)))


def _eval_vector(f, ts):
    try:
        vals = np.asarray(f(ts), dtype=float)
        if vals.shape == ts.shape:
            return vals
    except Exception:
        pass
    return np.array([float(f(t)) for t in ts])


def sup_error(f, p: ChebPoly, grid_size: int = 10001) -> float:
    """Max of |f - p| over a uniform grid on p's interval."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    a, b = p.interval
    ts = np.linspace(a, b, grid_size)
    return float(np.max(np.abs(_eval_vector(f, ts) - p(ts))))


def hermite(r: int, x):
    """Probabilists' Hermite polynomial H_r via the three-term recurrence.

    ``H_0 = 1, H_1 = x, H_{r+1} = x H_r - r H_{r-1}``; normalized so that
    the Gaussian-weighted square integral is r!.  Guarded at r <= 40.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r > 40:
        raise ValueError("hermite degree capped at 40 (overflow guard)")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if r == 0:
        return float(h_prev) if x.ndim == 0 else h_prev
    h_cur = x.copy()
    for m in range(1, r):
        h_prev, h_cur = h_cur, x * h_cur - m * h_prev
    return float(h_cur) if x.ndim == 0 else h_cur


def coeff_bound_check(p: ChebPoly, grid_size: int = 4001) -> bool:
    """Check the classical coefficient bound on [-1, 1].

    Every monomial coefficient of a degree-k polynomial obeys
    ``|c_x| <= k**x / x! * max_{|u|<=1} |p(u)|``; a False return on a
    correctly built polynomial indicates a conversion bug.
    """
    a, b = p.interval
    if abs(a + 1.0) > 1e-12 or abs(b - 1.0) > 1e-12:
        raise ValueError("coeff_bound_check expects a polynomial on [-1, 1]")
    k = p.degree
    cx = p.unit_monomial_coeffs()
    m = float(np.max(np.abs(p(np.linspace(-1.0, 1.0, grid_size)))))
    for x in range(k + 1):
        bound = m * k ** x / math.factorial(x) if k > 0 else m
        if abs(cx[x]) > bound * (1.0 + 1e-8):
            return False
    return True

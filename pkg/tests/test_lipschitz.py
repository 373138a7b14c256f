import math

import numpy as np
import pytest

from conftest import random_lipschitz
from gotmix import LipschitzFn, abs_fn, convolve_gauss, sawtooth_fn
from gotmix._normal import norm_pdf


def test_pinned_at_origin():
    rng = np.random.default_rng(0)
    for _ in range(50):
        l = random_lipschitz(rng)
        assert l(0.0) == pytest.approx(0.0, abs=1e-15)


def test_lipschitz_constant_one():
    rng = np.random.default_rng(1)
    us = np.linspace(-2.0, 2.0, 801)
    for _ in range(25):
        l = random_lipschitz(rng)
        vals = l(us)
        slopes = np.diff(vals) / np.diff(us)
        assert np.max(np.abs(slopes)) <= 1.0 + 1e-9


def test_slope_constraint_enforced():
    with pytest.raises(ValueError):
        LipschitzFn(breakpoints=(0.0,), hinge_coeffs=(3.0,), base_slope=-1.0)


def test_affine_passes_through_convolution():
    l = LipschitzFn(breakpoints=(), hinge_coeffs=(), base_slope=0.8)
    for theta in (-1.0, 0.0, 0.3, 2.0):
        assert convolve_gauss(l, 0.7, theta) == pytest.approx(0.8 * theta, abs=1e-12)


def test_abs_convolved_at_zero_is_gaussian_mean():
    # E|N(0, sigma^2)| = sigma sqrt(2/pi)
    for sigma in (0.25, 0.5, 2.0):
        got = convolve_gauss(abs_fn(), sigma, 0.0)
        assert got == pytest.approx(sigma * math.sqrt(2.0 / math.pi), rel=1e-13)


def test_sawtooth_convolution_matches_quadrature():
    # 1e5-point trapezoid oracle for (l * phi_sigma)(0.3)
    saw = sawtooth_fn()
    sigma, theta = 0.5, 0.3
    us = np.linspace(-10.0 * sigma, 10.0 * sigma, 100_001)
    vals = saw(theta - us) * norm_pdf(us / sigma) / sigma
    oracle = np.trapezoid(vals, us)
    assert convolve_gauss(saw, sigma, theta) == pytest.approx(oracle, abs=1e-8)


def test_convolution_requires_positive_sigma():
    with pytest.raises(ValueError):
        convolve_gauss(abs_fn(), 0.0, 0.1)


def test_sawtooth_shape():
    saw = sawtooth_fn()
    assert len(saw.breakpoints) == 5
    us = np.linspace(-1.0, 1.0, 2001)
    slopes = np.diff(saw(us)) / np.diff(us)
    assert np.max(slopes) <= 1.0 + 1e-9
    assert np.min(slopes) >= -1.0 - 1e-9
    # slopes alternate: both extremes realized
    assert np.max(slopes) > 0.99
    assert np.min(slopes) < -0.99


def test_smoothed_method_matches_function():
    saw = sawtooth_fn()
    ts = np.linspace(-1.0, 1.0, 17)
    assert np.allclose(saw.smoothed(0.4, ts), convolve_gauss(saw, 0.4, ts))

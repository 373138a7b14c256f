import math

import numpy as np
import pytest

from gotmix import FamilyError, custom_series, measure, neg_binomial, point_mass, poisson
from gotmix.families import FACTORIAL_BOUND, GEOMETRIC_BOUND


def test_poisson_normalizer_closed_form():
    fam = poisson(1.0)
    assert fam.g(1.0) == pytest.approx(math.exp(-1.0), abs=1e-15)
    assert fam.g(0.0) == 1.0


def test_negbinomial_normalizer_closed_form():
    fam = neg_binomial(2, 0.6)
    assert fam.g(0.5) == pytest.approx(0.25, abs=1e-15)


def test_custom_series_matches_poisson_normalizer():
    # Poisson coefficients tabulated to x = 30: the truncated reciprocal
    # series must reproduce exp(-theta) to full precision at theta = 1
    w = [1.0 / math.factorial(x) for x in range(31)]
    fam = custom_series(w, 1.0, FACTORIAL_BOUND)
    assert abs(fam.g(1.0) - math.exp(-1.0)) < 1e-12


@pytest.mark.parametrize("x,theta,expected", [
    (0, 1.0, math.exp(-1.0)),
    (2, 1.0, math.exp(-1.0) / 2.0),
])
def test_poisson_pmf_values(x, theta, expected):
    assert poisson(1.0).pmf(x, theta) == pytest.approx(expected, rel=1e-14)


def test_negbinomial_pmf_value():
    # w(1) = binom(2, 1) = 2, g(0.5) = 0.25
    assert neg_binomial(2, 0.6).pmf(1, 0.5) == pytest.approx(0.25, rel=1e-14)


def test_pmf_zero_zero_convention():
    fam = poisson(1.0)
    assert fam.pmf(0, 0.0) == 1.0
    assert fam.pmf(3, 0.0) == 0.0


def test_mixture_pmf_two_atoms():
    fam = poisson(1.0)
    q = measure([0.0, 1.0], [0.5, 0.5])
    assert fam.mixture_pmf(q, 0) == pytest.approx(0.5 * (1 + math.exp(-1)), rel=1e-14)


def test_mixture_pmf_single_atom_is_pmf():
    fam = neg_binomial(1, 0.9)
    q = point_mass(0.3)
    for x in range(6):
        assert fam.mixture_pmf(q, x) == pytest.approx(fam.pmf(x, 0.3), rel=1e-14)


def test_mixture_pmf_derived_two_term_value():
    # direct two-term evaluation: 0.3*0.5*e^{-0.5} + 0.7*1.5*e^{-1.5}
    expected = 0.3 * 0.5 * math.exp(-0.5) + 0.7 * 1.5 * math.exp(-1.5)
    assert expected == pytest.approx(0.3252662671127463, abs=1e-15)
    fam = poisson(2.0)
    q = measure([0.5, 1.5], [0.3, 0.7])
    assert fam.mixture_pmf(q, 1) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("fam,x_hi", [
    (poisson(1.0), 40),
    (poisson(2.0), 60),
    (neg_binomial(2, 0.8), 300),
])
def test_pmf_sums_to_one(fam, x_hi):
    for theta in (0.0, fam.theta_star / 2, fam.theta_star):
        total = float(np.sum(fam.pmf(np.arange(x_hi + 1), theta)))
        assert total >= 1.0 - 1e-10
        assert total <= 1.0 + 1e-10


def test_mixture_pmf_linear_in_q():
    fam = poisson(2.0)
    rng = np.random.default_rng(11)
    for _ in range(20):
        a1, a2 = np.sort(rng.uniform(0, 2, 2))
        alpha = rng.uniform()
        q1, q2 = point_mass(a1), point_mass(a2 + 1e-6)
        mix = measure([q1.atoms[0], q2.atoms[0]], [alpha, 1 - alpha])
        for x in (0, 1, 3):
            direct = alpha * fam.mixture_pmf(q1, x) + (1 - alpha) * fam.mixture_pmf(q2, x)
            assert fam.mixture_pmf(mix, x) == pytest.approx(direct, abs=1e-14)


def test_pmf_positive_on_open_interval():
    for fam in (poisson(2.0), neg_binomial(3, 0.7)):
        thetas = np.linspace(1e-6, fam.theta_star, 25)
        for x in (0, 1, 5, 17):
            assert np.all(fam.pmf(np.full_like(thetas, x, dtype=int), thetas) > 0.0)


def test_builtin_growth_class_tags():
    # 1/w(x) = x! grows factorially; 1/binom(x+r-1, x) <= 1 is geometric
    assert poisson(1.0).growth_class == FACTORIAL_BOUND
    assert neg_binomial(4, 0.5).growth_class == GEOMETRIC_BOUND
    xs = np.arange(1, 30)
    fact = 1.0 / poisson(1.0).w(xs)
    assert np.all(fact >= 0.4 ** xs * xs ** (0.4 * xs))
    assert np.all(fact <= 3.0 ** xs * xs ** (3.0 * xs))
    assert np.all(1.0 / neg_binomial(4, 0.5).w(xs) <= 1.0)


def test_theta_out_of_range_rejected():
    fam = poisson(1.0)
    with pytest.raises(FamilyError):
        fam.pmf(0, 1.5)
    with pytest.raises(FamilyError):
        fam.g(-0.2)


def test_negbinomial_requires_theta_star_below_one():
    with pytest.raises(FamilyError):
        neg_binomial(2, 1.0)


def test_custom_series_rejects_failing_ratio_test():
    # growing coefficients: w(x+1)/w(x) * theta_star >= 1
    with pytest.raises(FamilyError):
        custom_series([1.0, 2.0, 4.0, 8.0], 0.9, GEOMETRIC_BOUND)


def test_custom_series_rejects_unattainable_budget():
    # ratio barely below one: certified tail exceeds the budget
    with pytest.raises(FamilyError):
        custom_series([1.0] * 6, 0.999, GEOMETRIC_BOUND, g_tol=1e-10)


def test_custom_series_rejects_nonpositive_coefficients():
    with pytest.raises(FamilyError):
        custom_series([1.0, 0.0, 0.5], 0.5, GEOMETRIC_BOUND)


def test_mixture_atom_outside_support_rejected():
    fam = poisson(1.0)
    with pytest.raises(FamilyError):
        fam.mixture_pmf(point_mass(1.5), 0)

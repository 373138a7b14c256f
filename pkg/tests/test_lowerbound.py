import math

import numpy as np
import pytest

from gotmix import (MomentMatchedPair, gauss_legendre, lecam_bound,
                    measure, moment_pair, neg_binomial, poisson, tv_mixtures,
                    w1_discrete)


def test_single_node_is_midpoint():
    nodes, weights = gauss_legendre(1)
    assert np.allclose(nodes, [0.5])
    assert np.allclose(weights, [1.0])


def test_two_nodes_closed_form():
    nodes, weights = gauss_legendre(2)
    lo = 0.5 - 1.0 / (2.0 * math.sqrt(3.0))
    hi = 0.5 + 1.0 / (2.0 * math.sqrt(3.0))
    assert np.allclose(nodes, [lo, hi], atol=1e-12)
    assert np.allclose(weights, [0.5, 0.5], atol=1e-12)
    for j, target in ((1, 0.5), (2, 1.0 / 3.0), (3, 0.25)):
        assert float(weights @ nodes ** j) == pytest.approx(target, abs=1e-12)


def test_five_nodes_degree_nine_exactness():
    nodes, weights = gauss_legendre(5)
    assert float(weights @ nodes ** 9) == pytest.approx(0.1, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3, 7, 16, 33, 64])
def test_matches_numpy_quadrature(m):
    nodes, weights = gauss_legendre(m)
    xo, wo = np.polynomial.legendre.leggauss(m)
    assert np.max(np.abs(nodes - (xo + 1.0) / 2.0)) <= 1e-13
    assert np.max(np.abs(weights - wo / 2.0)) <= 1e-13


def test_nodes_symmetric_and_interior():
    nodes, weights = gauss_legendre(9)
    assert np.all(nodes > 0.0) and np.all(nodes < 1.0)
    assert np.allclose(nodes + nodes[::-1], 1.0, atol=1e-12)
    assert weights.sum() == pytest.approx(1.0, abs=1e-14)


def test_node_count_bounds():
    with pytest.raises(ValueError):
        gauss_legendre(0)
    with pytest.raises(ValueError):
        gauss_legendre(65)


def test_moment_pair_k1_closed_form():
    pair = moment_pair(1.0, 1)
    assert pair.p2.size == 1
    assert pair.p2.atoms[0] == pytest.approx(0.5)
    assert pair.w1_value == pytest.approx(0.25, abs=1e-14)
    assert pair.matched_k == 1


def test_moment_pair_k3_frozen_value():
    pair = moment_pair(1.0, 3)
    assert 1.0 / 24.0 <= pair.w1_value <= 0.25
    # frozen from the exact piecewise closed form, checked against a fine
    # Riemann sum when recorded
    assert pair.w1_value == pytest.approx(0.12799153207185385, abs=1e-12)


def test_moment_pair_dilation_homogeneity():
    a = moment_pair(1.0, 3)
    b = moment_pair(2.0, 3)
    assert b.w1_value == pytest.approx(2.0 * a.w1_value, abs=1e-12)


def test_w1_value_matches_riemann_oracle():
    pair = moment_pair(1.0, 5)
    ts = np.linspace(0.0, 1.0, 2_000_001)
    oracle = np.trapezoid(np.abs(ts - pair.p2.cdf(ts)), ts)
    assert pair.w1_value == pytest.approx(oracle, abs=1e-7)


@pytest.mark.parametrize("k", range(1, 10))
def test_moments_match_uniform(k):
    pair = moment_pair(1.0, k)
    for j in range(1, pair.matched_k + 1):
        target = 1.0 / (j + 1)  # uniform moment, M = 1
        assert abs(pair.p2.moment(j) - target) <= 1e-9 * target


@pytest.mark.parametrize("k", range(1, 30))
def test_separation_scale_regression(k):
    pair = moment_pair(1.0, k)
    if pair.matched_k <= 15:
        assert pair.w1_value >= 1.0 / (8.0 * pair.matched_k)


def test_lecam_clamps_to_zero_for_large_n():
    fam = poisson(1.0)
    pair = moment_pair(0.25, 1)
    tv = tv_mixtures(fam, _unif_disc(0.25, 4096), pair.p2, 1e-8)
    n_big = int(2.0 / tv) + 1
    assert lecam_bound(fam, pair, n_big, 1e-6) == 0.0


def test_lecam_degenerate_pair_is_zero():
    fam = poisson(1.0)
    p2 = _unif_disc(0.25, 2048)
    pair = MomentMatchedPair(M=0.25, p2=p2, matched_k=1, w1_value=0.0)
    assert lecam_bound(fam, pair, 10, 1e-6) == 0.0


def test_lecam_tolerance_refinement_consistent():
    fam = poisson(1.0)
    pair = moment_pair(0.25, 5)
    b1 = lecam_bound(fam, pair, 100, 1e-5)
    b2 = lecam_bound(fam, pair, 100, 1e-6)
    assert b1 > 0.0
    assert b1 == pytest.approx(b2, abs=1e-6)


def test_lecam_nonincreasing_in_n():
    fam = poisson(1.0)
    pair = moment_pair(0.25, 3)
    vals = [lecam_bound(fam, pair, n, 1e-6) for n in (1, 10, 100, 10 ** 4, 10 ** 8)]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


def test_lecam_rejects_pair_outside_support():
    fam = neg_binomial(1, 0.5)
    pair = moment_pair(1.0, 2)
    with pytest.raises(ValueError):
        lecam_bound(fam, pair, 10, 1e-6)


def test_lecam_with_negbinomial_family():
    fam = neg_binomial(2, 0.8)
    pair = moment_pair(0.2, 3)
    assert lecam_bound(fam, pair, 50, 1e-6) >= 0.0


def _unif_disc(M, L):
    mids = (np.arange(L) + 0.5) * M / L
    return measure(mids, np.full(L, 1.0 / L))


def test_pair_w1_consistent_with_distance_module():
    # the closed-form uniform-vs-quadrature value agrees with w1 against a
    # fine discretization of the uniform measure
    pair = moment_pair(0.5, 4)
    approx = w1_discrete(_unif_disc(0.5, 2 ** 14), pair.p2)
    assert pair.w1_value == pytest.approx(approx, abs=1e-4)

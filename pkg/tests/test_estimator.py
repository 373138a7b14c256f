import numpy as np
import pytest
from sklearn.base import clone

from gotmix import MixtureNPMLE, Seed, measure, poisson, sample


def _draws(n=1500, seed=4):
    fam = poisson(2.0)
    q = measure([0.5, 1.5], [0.5, 0.5])
    h = sample(fam, q, n, Seed(seed, 0))
    return np.repeat(list(h.counts.keys()), list(h.counts.values()))


def test_fit_sets_derived_attributes():
    X = _draws()
    est = MixtureNPMLE(family="poisson", theta_star=2.0).fit(X)
    assert est.converged_
    assert est.mixing_.size >= 1
    assert est.sup_gradient_ <= 1.0 + est.grad_tol
    assert np.isfinite(est.loglik_)
    assert est.n_iter_ > 0


def test_score_is_mean_loglik():
    X = _draws()
    est = MixtureNPMLE(family="poisson", theta_star=2.0).fit(X)
    assert est.score(X) == pytest.approx(est.loglik_ / len(X), rel=1e-12)


def test_two_dim_column_input_accepted():
    X = _draws()
    est = MixtureNPMLE(family="poisson", theta_star=2.0).fit(X.reshape(-1, 1))
    assert est.converged_


def test_predict_proba_rows_normalized():
    X = _draws()
    est = MixtureNPMLE(family="poisson", theta_star=2.0).fit(X)
    probs = est.predict_proba(X[:20])
    assert probs.shape == (20, est.mixing_.size)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-12)
    labels = est.predict(X[:20])
    assert np.all((0 <= labels) & (labels < est.mixing_.size))


def test_posterior_mean_monotone_in_count():
    X = _draws()
    est = MixtureNPMLE(family="poisson", theta_star=2.0).fit(X)
    means = est.posterior_mean(np.arange(5))
    assert np.all(np.diff(means) >= -1e-12)
    assert np.all((0.0 <= means) & (means <= 2.0))


def test_theta_star_inferred_from_data():
    X = _draws()
    est = MixtureNPMLE(family="poisson").fit(X)
    assert est.family_.theta_star == float(max(X.max(), 1))


def test_family_instance_passthrough():
    fam = poisson(2.0)
    est = MixtureNPMLE(family=fam).fit(_draws())
    assert est.family_ is fam


def test_negbinomial_fit_smoke():
    from gotmix import neg_binomial
    fam = neg_binomial(2, 0.8)
    h = sample(fam, measure([0.2, 0.6], [0.5, 0.5]), 800, Seed(5, 0))
    X = np.repeat(list(h.counts.keys()), list(h.counts.values()))
    est = MixtureNPMLE(family="negbinomial", r=2, theta_star=0.8).fit(X)
    assert est.converged_


def test_sklearn_params_round_trip():
    est = MixtureNPMLE(theta_star=2.0, grid_size=150)
    params = est.get_params()
    assert params["grid_size"] == 150
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(grid_size=300)
    assert est.get_params()["grid_size"] == 300


def test_input_validation_errors():
    est = MixtureNPMLE(theta_star=1.0)
    with pytest.raises(ValueError):
        est.fit(np.array([1.5, 2.0]))
    with pytest.raises(ValueError):
        est.fit(np.array([-1, 2]))
    with pytest.raises(ValueError):
        est.fit(np.empty((0,)))
    with pytest.raises(ValueError):
        est.fit(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        MixtureNPMLE(family="gaussian").fit(np.array([0, 1]))


def test_unfitted_estimator_raises():
    with pytest.raises(RuntimeError):
        MixtureNPMLE().predict_proba(np.array([0, 1]))

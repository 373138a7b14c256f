"""gotmix: nonparametric mixture MLE under smoothed optimal transport.

Estimate mixing distributions of discrete exponential family mixtures by
nonparametric maximum likelihood, measure the error in exact and
Gaussian-smoothed Wasserstein-1 distance, build polynomial dual
certificates for the smoothed error, and probe convergence rates with a
reproducible Monte Carlo harness.
"""

from .certificate import (DualCoefficients, certify, dual_coeff_bound,
                          dual_coefficients, smoothed_approx_bound,
                          tail_remainder, truncated_series)
from .chebyshev import (ChebPoly, chebyshev_approx, coeff_bound_check,
                        hermite, sup_error)
from .config import ExperimentConfig, load_experiment, parse_measure_literal
from .distances import (DistanceError, GotParams, empirical_kl, smoothed_w1,
                        tv_mixtures, w1_discrete)
from .estimator import MixtureNPMLE
from .families import (Family, FamilyError, custom_series, neg_binomial,
                       poisson)
from .harness import RateRecord, approx_sweep, fit_slope, run_rates
from .lipschitz import LipschitzFn, abs_fn, convolve_gauss, sawtooth_fn
from .lowerbound import (MomentMatchedPair, gauss_legendre, lecam_bound,
                         moment_pair)
from .measures import (DiscreteMeasure, SampleHistogram, Seed, SplitMix64,
                       measure, point_mass, sample, splitmix64)
from .npmle import (NpmleError, NpmleResult, SolverConfig,
                    directional_derivative, em_step, loglikelihood, solve)

__version__ = "0.1.0"

__all__ = [
    "ChebPoly", "DiscreteMeasure", "DistanceError", "DualCoefficients",
    "ExperimentConfig", "Family", "FamilyError", "GotParams", "LipschitzFn",
    "MixtureNPMLE", "MomentMatchedPair", "NpmleError", "NpmleResult",
    "RateRecord", "SampleHistogram", "Seed", "SolverConfig", "SplitMix64",
    "abs_fn", "approx_sweep", "certify", "chebyshev_approx",
    "coeff_bound_check", "convolve_gauss", "custom_series",
    "directional_derivative", "dual_coeff_bound", "dual_coefficients",
    "em_step", "empirical_kl", "fit_slope", "gauss_legendre", "hermite",
    "lecam_bound", "load_experiment", "loglikelihood", "measure",
    "moment_pair", "neg_binomial", "parse_measure_literal", "point_mass",
    "poisson", "run_rates", "sample", "sawtooth_fn", "smoothed_approx_bound",
    "smoothed_w1", "solve", "splitmix64", "sup_error", "tail_remainder",
    "truncated_series", "tv_mixtures", "w1_discrete",
]

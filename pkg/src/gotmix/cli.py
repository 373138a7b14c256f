"""Command-line harness.

Subcommands: ``rates`` (Monte Carlo rate experiment from a config file),
``approx-sweep`` (polynomial approximation error vs. degree), ``lowerbound``
(two-point minimax bound), ``certify`` (confidence certificate for one
replication), ``distance`` (W1 / smoothed W1 between measure literals), and
``estimate`` (NPMLE from a histogram CSV).  Exit codes: 0 success, 1 usage
error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def build_parser() -> _Parser:
    parser = _Parser(prog="gotmix",
                     description="Mixing-distribution estimation harness")
    sub = parser.add_subparsers(dest="command")

    p_rates = sub.add_parser("rates", help="run the Monte Carlo rate experiment")
    p_rates.add_argument("--config", required=True)
    p_rates.add_argument("--output", default=None,
                         help="override the config's output_path")

    p_sweep = sub.add_parser("approx-sweep",
                             help="approximation error vs. degree (CSV to stdout)")
    p_sweep.add_argument("--sigma", type=float, default=0.5)
    p_sweep.add_argument("--k-list", default="4,8,12,16")
    p_sweep.add_argument("--c1", type=float, default=1.0)
    p_sweep.add_argument("--hinges", type=int, default=5)

    p_lb = sub.add_parser("lowerbound", help="two-point minimax lower bound")
    p_lb.add_argument("--M", type=float, default=None,
                      help="pair support bound (default theta_star/4)")
    p_lb.add_argument("--k", type=int, required=True)
    p_lb.add_argument("--n", type=int, required=True)
    p_lb.add_argument("--family", default="poisson",
                      choices=["poisson", "negbinomial"])
    p_lb.add_argument("--r", type=int, default=1)
    p_lb.add_argument("--theta-star", type=float, default=1.0)
    p_lb.add_argument("--tol", type=float, default=1e-6)

    p_cert = sub.add_parser("certify",
                            help="confidence certificate for one replication")
    p_cert.add_argument("--config", required=True)
    p_cert.add_argument("--n", type=int, default=None)
    p_cert.add_argument("--rep", type=int, default=0)

    p_dist = sub.add_parser("distance", help="distances between two measures")
    p_dist.add_argument("--q1", required=True, help="e.g. '0.2:0.5, 0.8:0.5'")
    p_dist.add_argument("--q2", required=True)
    p_dist.add_argument("--sigma", type=float, action="append", default=None)
    p_dist.add_argument("--tol", type=float, default=1e-8)

    p_est = sub.add_parser("estimate", help="NPMLE from a histogram CSV")
    p_est.add_argument("--histogram", required=True, help="CSV with x,count")
    p_est.add_argument("--family", default="poisson",
                       choices=["poisson", "negbinomial"])
    p_est.add_argument("--r", type=int, default=1)
    p_est.add_argument("--theta-star", type=float, required=True)
    p_est.add_argument("--grid-size", type=int, default=400)
    return parser


def _family_from_args(args):
    from .families import neg_binomial, poisson

    if args.family == "poisson":
        return poisson(args.theta_star)
    return neg_binomial(args.r, args.theta_star)


def _cmd_rates(args) -> int:
    from .config import load_experiment
    from .harness import run_rates

    cfg = load_experiment(args.config)
    run_rates(cfg, output_path=args.output)
    dest = args.output if args.output is not None else cfg.output_path
    print(f"wrote {dest}")
    return 0


def _cmd_sweep(args) -> int:
    from .harness import approx_sweep

    ks = [int(p) for p in args.k_list.split(",") if p.strip()]
    print("k,sup_error,bound_A,ratio")
    for k, err, bound, ratio in approx_sweep(args.sigma, ks, args.c1,
                                             args.hinges):
        print(f"{k},{_fmt(err)},{_fmt(bound)},{_fmt(ratio)}")
    return 0


def _cmd_lowerbound(args) -> int:
    from .distances import tv_mixtures
    from .lowerbound import lecam_bound, moment_pair
    from .measures import measure

    family = _family_from_args(args)
    m_bound = args.M if args.M is not None else family.theta_star / 4.0
    pair = moment_pair(m_bound, args.k)
    bound = lecam_bound(family, pair, args.n, args.tol)
    # reconstruct the discretized-uniform TV that the bound clamped
    mids = (np.arange(4096) + 0.5) * pair.M / 4096
    tv = tv_mixtures(family, measure(mids, np.full(4096, 1.0 / 4096)),
                     pair.p2, args.tol)
    print("w1_value,tv,bound")
    print(f"{_fmt(pair.w1_value)},{_fmt(tv)},{_fmt(bound)}")
    return 0


def _cmd_certify(args) -> int:
    from .certificate import certify
    from .config import load_experiment
    from .distances import GotParams, smoothed_w1
    from .measures import Seed, sample
    from .npmle import solve

    cfg = load_experiment(args.config)
    n = args.n if args.n is not None else cfg.n_grid[0]
    hist = sample(cfg.family, cfg.true_q, n, Seed(cfg.base_seed, args.rep))
    res = solve(cfg.family, hist, cfg.solver)
    k = cfg.degree_for(n)
    print("n,rep,k,sigma,got_err,cert")
    for s in cfg.sigma_list:
        got_err = smoothed_w1(cfg.true_q, res.q_hat,
                              GotParams(sigma=s, tol=cfg.got_tol))
        cert = certify(cfg.family, hist, res.q_hat, s, k, cfg.delta, cfg.c1)
        print(f"{n},{args.rep},{k},{s:g},{_fmt(got_err)},{_fmt(cert)}")
    return 0


def _cmd_distance(args) -> int:
    from .config import parse_measure_literal
    from .distances import GotParams, smoothed_w1, w1_discrete

    q1 = parse_measure_literal(args.q1)
    q2 = parse_measure_literal(args.q2)
    sigmas = args.sigma if args.sigma else []
    header = ["w1"] + [f"got_{s:g}" for s in sigmas]
    vals = [w1_discrete(q1, q2)]
    vals += [smoothed_w1(q1, q2, GotParams(sigma=s, tol=args.tol))
             for s in sigmas]
    print(",".join(header))
    print(",".join(_fmt(v) for v in vals))
    return 0


def _cmd_estimate(args) -> int:
    from .measures import SampleHistogram
    from .npmle import SolverConfig, solve

    hist = SampleHistogram.from_csv(args.histogram)
    family = _family_from_args(args)
    res = solve(family, hist, SolverConfig(grid_size=args.grid_size))
    print("atom,weight")
    for a, w in zip(res.q_hat.atoms, res.q_hat.weights):
        print(f"{_fmt(a)},{_fmt(w)}")
    print(f"loglik,{_fmt(res.loglik)}", file=sys.stderr)
    print(f"sup_gradient,{_fmt(res.sup_gradient)}", file=sys.stderr)
    print(f"converged,{int(res.converged)}", file=sys.stderr)
    return 0


_COMMANDS = {
    "rates": _cmd_rates,
    "approx-sweep": _cmd_sweep,
    "lowerbound": _cmd_lowerbound,
    "certify": _cmd_certify,
    "distance": _cmd_distance,
    "estimate": _cmd_estimate,
}


def dispatch(argv) -> int:
    """Run a CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return 0 if exc.code in (0, None) else 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except KeyboardInterrupt:
        raise
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

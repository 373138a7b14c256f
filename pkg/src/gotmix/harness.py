"""Monte Carlo rate experiments, approximation sweeps, and slope fits.

``run_rates`` samples - solves - measures for every (n, rep) cell of an
:class:`~gotmix.config.ExperimentConfig` and writes one CSV row per cell in
deterministic n-major, rep-minor order.  All columns except ``wall_ms`` are
byte-reproducible for a fixed config: floats are printed with 17 significant
digits and rows are buffered and emitted in order even when replications run
on a thread pool (``GOTMIX_THREADS``; 0 or unset = serial).
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .certificate import certify, smoothed_approx_bound
from .chebyshev import chebyshev_approx, sup_error
from .config import ExperimentConfig
from .distances import GotParams, smoothed_w1, w1_discrete
from .lipschitz import convolve_gauss, sawtooth_fn
from .measures import Seed, sample
from .npmle import solve

WALL_COLUMN = "wall_ms"


@dataclass(frozen=True)
class RateRecord:
    n: int
    rep: int
    seed: int
    w1_err: float
    got_err: tuple[float, ...]
    cert: tuple[float, ...]
    loglik: float
    sup_gradient: float
    em_iters: int
    converged: bool
    wall_ms: float


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def rate_header(sigma_list) -> list[str]:
    cols = ["n", "rep", "seed", "w1_err"]
    cols += [f"got_err_{s:g}" for s in sigma_list]
    cols += [f"cert_{s:g}" for s in sigma_list]
    cols += ["loglik", "sup_gradient", "em_iters", "converged", WALL_COLUMN]
    return cols


def _record_row(rec: RateRecord) -> list[str]:
    row = [str(rec.n), str(rec.rep), str(rec.seed), _fmt(rec.w1_err)]
    row += [_fmt(v) for v in rec.got_err]
    row += [_fmt(v) for v in rec.cert]
    row += [_fmt(rec.loglik), _fmt(rec.sup_gradient), str(rec.em_iters),
            str(int(rec.converged)), _fmt(rec.wall_ms)]
    return row


def _one_cell(cfg: ExperimentConfig, n: int, rep: int, rid: int) -> RateRecord:
    seed = Seed(cfg.base_seed, rid)
    t0 = time.perf_counter()
    hist = sample(cfg.family, cfg.true_q, n, seed)
    res = solve(cfg.family, hist, cfg.solver)
    k = cfg.degree_for(n)
    got_vals, cert_vals = [], []
    for s in cfg.sigma_list:
        got_vals.append(smoothed_w1(cfg.true_q, res.q_hat,
                                    GotParams(sigma=s, tol=cfg.got_tol)))
        cert_vals.append(certify(cfg.family, hist, res.q_hat, s, k,
                                 cfg.delta, cfg.c1))
    wall = (time.perf_counter() - t0) * 1e3
    return RateRecord(
        n=n, rep=rep, seed=seed.stream_seed(),
        w1_err=w1_discrete(cfg.true_q, res.q_hat),
        got_err=tuple(got_vals), cert=tuple(cert_vals),
        loglik=res.loglik, sup_gradient=res.sup_gradient,
        em_iters=res.em_iters, converged=res.converged, wall_ms=wall)


def run_rates(cfg: ExperimentConfig, output_path=None) -> list[RateRecord]:
    """Run the full (n, rep) grid and write the CSV; returns the records."""
    path = output_path if output_path is not None else cfg.output_path
    workers = int(os.environ.get("GOTMIX_THREADS", "0") or "0")
    records: list[RateRecord] = []
    for i_n, n in enumerate(cfg.n_grid):
        cells = [(n, rep, i_n * cfg.reps + rep) for rep in range(cfg.reps)]
        if workers > 0:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futs = [pool.submit(_one_cell, cfg, *cell) for cell in cells]
                records += [f.result() for f in futs]
        else:
            records += [_one_cell(cfg, *cell) for cell in cells]
    lines = [",".join(rate_header(cfg.sigma_list))]
    lines += [",".join(_record_row(r)) for r in records]
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return records


def read_csv_columns(path) -> dict[str, list[str]]:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        cols: dict[str, list[str]] = {h: [] for h in header}
        for line in fh:
            line = line.strip()
            if not line:
                continue
            for h, v in zip(header, line.split(",")):
                cols[h].append(v)
    return cols


def fit_slope(csv_path, column: str) -> float:
    """OLS slope of log(median over reps of ``column``) against log n.

    Medians rather than means tame heavy-tailed replication noise.
    """
    cols = read_csv_columns(csv_path)
    if column not in cols:
        raise KeyError(f"column {column!r} not in {sorted(cols)}")
    ns = np.array([float(v) for v in cols["n"]])
    vals = np.array([float(v) for v in cols[column]])
    uniq = np.unique(ns)
    if uniq.size < 2:
        raise ValueError("need at least two distinct n values")
    medians = np.array([np.median(vals[ns == n]) for n in uniq])
    slope, _ = np.polyfit(np.log(uniq), np.log(medians), 1)
    return float(slope)


def approx_sweep(sigma: float, ks, c1: float = 1.0, hinges: int = 5,
                 interval=(-1.0, 1.0), grid_size: int = 10001):
    """Rows (k, sup_error, bound_A, ratio) for the canonical sawtooth.

    ``sup_error`` is the measured Chebyshev interpolation error of the
    smoothed sawtooth, ``bound_A`` the a priori bound at the same degree,
    and ``ratio`` their quotient.
    """
    saw = sawtooth_fn(hinges=hinges, interval=interval)
    width = interval[1] - interval[0]
    shift = convolve_gauss(saw, sigma, 0.0)

    def target(t):
        return convolve_gauss(saw, sigma, t) - shift

    rows = []
    for k in ks:
        p = chebyshev_approx(target, interval, k)
        err = sup_error(target, p, grid_size)
        bound = smoothed_approx_bound(sigma, k, width, c1)
        rows.append((int(k), err, bound, err / bound))
    return rows

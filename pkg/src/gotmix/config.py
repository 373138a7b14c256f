"""INI-style experiment configuration.

Grammar (stdlib ``configparser``, flat keys, arrays comma-separated,
measures as ``atom:weight`` pairs)::

    [family]
    kind = poisson | negbinomial | custom
    theta_star = 2.0
    r = 2                      ; negbinomial only
    w_coeffs = 1.0, 1.0, 0.5   ; custom only
    growth_class = geometric | factorial   ; custom only

    [experiment]
    true_q = 0.5:0.5, 1.5:0.5
    sigma_list = 1.0
    n_grid = 100, 1000, 10000
    reps = 20
    base_seed = 20260809
    alpha = 1.0                ; degree schedule k = max(1, floor(alpha*ln n))
    delta = 0.05
    c1 = 1.0
    got_tol = 1e-8
    output_path = rates.csv

    [solver]
    grid_size = 400
    max_em_iters = 10000
    loglik_tol = 1e-10
    grad_tol = 1e-4
    refine_rounds = 3
    prune_floor = 1e-12
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .families import Family, custom_series, neg_binomial, poisson
from .measures import DiscreteMeasure, measure
from .npmle import SolverConfig


class ConfigError(ValueError):
    """Malformed configuration file."""


def parse_measure_literal(text: str) -> DiscreteMeasure:
    """Parse ``atom:weight, atom:weight, ...``."""
    atoms, weights = [], []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            a_s, w_s = part.split(":")
            atoms.append(float(a_s))
            weights.append(float(w_s))
        except ValueError as exc:
            raise ConfigError(f"bad measure entry {part!r}") from exc
    if not atoms:
        raise ConfigError("empty measure literal")
    return measure(atoms, weights)


def _floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _ints(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip()]


def family_from_section(section) -> Family:
    kind = section.get("kind", "poisson").strip().lower()
    theta_star = float(section.get("theta_star", "1.0"))
    if kind == "poisson":
        return poisson(theta_star)
    if kind == "negbinomial":
        return neg_binomial(int(section.get("r", "1")), theta_star)
    if kind == "custom":
        if "w_coeffs" not in section:
            raise ConfigError("custom family needs w_coeffs")
        coeffs = _floats(section["w_coeffs"])
        if "x_cap" in section:
            cap = int(section["x_cap"])
            if cap + 1 > len(coeffs):
                raise ConfigError(f"x_cap={cap} needs {cap + 1} w_coeffs")
            coeffs = coeffs[: cap + 1]
        return custom_series(coeffs, theta_star,
                             section.get("growth_class", "geometric").strip(),
                             g_tol=float(section.get("g_tol", "1e-10")))
    raise ConfigError(f"unknown family kind {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    family: Family
    true_q: DiscreteMeasure
    sigma_list: tuple[float, ...]
    n_grid: tuple[int, ...]
    reps: int
    base_seed: int
    solver: SolverConfig = field(default_factory=SolverConfig)
    alpha: float = 1.0
    delta: float = 0.05
    c1: float = 1.0
    got_tol: float = 1e-8
    output_path: str = "rates.csv"

    def __post_init__(self):
        if not self.sigma_list:
            raise ConfigError("sigma_list must be nonempty")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])) or not self.n_grid:
            raise ConfigError("n_grid must be nonempty and increasing")

    def degree_for(self, n: int) -> int:
        """Degree schedule ``k = max(1, floor(alpha * ln n))``."""
        return max(1, math.floor(self.alpha * math.log(n)))


def load_experiment(path) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found")
    if "family" not in parser or "experiment" not in parser:
        raise ConfigError("config needs [family] and [experiment] sections")
    family = family_from_section(parser["family"])
    exp = parser["experiment"]
    if "true_q" not in exp:
        raise ConfigError("[experiment] needs true_q")
    solver = solver_from_section(parser["solver"]) if "solver" in parser \
        else SolverConfig()
    return ExperimentConfig(
        family=family,
        true_q=parse_measure_literal(exp["true_q"]),
        sigma_list=tuple(_floats(exp.get("sigma_list", "1.0"))),
        n_grid=tuple(_ints(exp.get("n_grid", "100"))),
        reps=int(exp.get("reps", "1")),
        base_seed=int(exp.get("base_seed", "0")),
        solver=solver,
        alpha=float(exp.get("alpha", "1.0")),
        delta=float(exp.get("delta", "0.05")),
        c1=float(exp.get("c1", "1.0")),
        got_tol=float(exp.get("got_tol", "1e-8")),
        output_path=exp.get("output_path", "rates.csv"),
    )


def solver_from_section(section) -> SolverConfig:
    return SolverConfig(
        grid_size=int(section.get("grid_size", "400")),
        max_em_iters=int(section.get("max_em_iters", "10000")),
        loglik_tol=float(section.get("loglik_tol", "1e-10")),
        grad_tol=float(section.get("grad_tol", "1e-4")),
        refine_rounds=int(section.get("refine_rounds", "3")),
        prune_floor=float(section.get("prune_floor", "1e-12")),
    )

"""Exhaustive search for the array sizes that minimise outage."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import antenna, montecarlo
from .channel import LinkBudget, LinkType, outage_probability
from .errors import DomainError, UsageError

METHODS = ("analytical", "monte_carlo")


@dataclass(frozen=True)
class OptimizationResult:
    best_nt: int
    best_nr: int
    best_outage: float
    evaluations: list = field(repr=False)
    method: str = "analytical"
    elapsed_seconds: float = 0.0

    def summary(self, include_timing: bool = False) -> dict:
        out = {"best_nt": self.best_nt, "best_nr": self.best_nr,
               "best_outage": self.best_outage, "method": self.method,
               "evaluations": len(self.evaluations)}
        if include_timing:
            out["elapsed_seconds"] = self.elapsed_seconds
        return out


def candidate_sizes(link: LinkBudget, n_max: int) -> tuple[list[int], list[int]]:
    """Admissible (N_t, N_r) ranges; a ground terminal is pinned at n_max."""
    full = list(range(1, n_max + 1))
    if link.link_type is LinkType.G2A:
        return [n_max], full
    if link.link_type is LinkType.A2G:
        return full, [n_max]
    return full, full


def argmin_grid(evaluations) -> tuple[int, int, float]:
    """Smallest outage; ties go to the smallest N_t, then the smallest N_r."""
    nt, nr, p = min(evaluations, key=lambda e: (e[2], e[0], e[1]))
    return nt, nr, p


def optimize_array_sizes(link_template: LinkBudget, n_max: int = 18, method: str = "analytical",
                         mc_spec: montecarlo.SimulationSpec | None = None,
                         workers: int = 1) -> OptimizationResult:
    """Evaluate outage on the whole size grid and return its argmin."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if method not in METHODS:
        raise UsageError(f"method must be one of {METHODS}")
    if method == "monte_carlo" and mc_spec is None:
        raise UsageError("monte_carlo optimisation needs a SimulationSpec")

    start = time.perf_counter()
    nts, nrs = candidate_sizes(link_template, n_max)
    antenna.precompute_normalization(
        [link_template.tx_array.with_n(n) for n in nts]
        + [link_template.rx_array.with_n(n) for n in nrs])

    if method == "analytical":
        pairs = [(nt, nr) for nt in nts for nr in nrs]

        def evaluate(pair):
            nt, nr = pair
            return nt, nr, outage_probability(link_template.with_sizes(nt, nr))

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                evaluations = list(pool.map(evaluate, pairs))
        else:
            evaluations = [evaluate(p) for p in pairs]
    else:
        grid = montecarlo.estimate_outage_grid(link_template, mc_spec, nts, nrs, workers=workers)
        evaluations = [(nt, nr, grid[i][j].p_hat)
                       for i, nt in enumerate(nts) for j, nr in enumerate(nrs)]

    nt, nr, p = argmin_grid(evaluations)
    return OptimizationResult(best_nt=nt, best_nr=nr, best_outage=p, evaluations=evaluations,
                              method=method, elapsed_seconds=time.perf_counter() - start)


def optimize_symmetric(link_template: LinkBudget, n_max: int = 18) -> OptimizationResult:
    """Analytical search restricted to N_t = N_r (A2A links)."""
    if link_template.link_type is not LinkType.A2A:
        raise UsageError("symmetric search applies to A2A links")
    start = time.perf_counter()
    evaluations = [(n, n, outage_probability(link_template.with_sizes(n, n)))
                   for n in range(1, n_max + 1)]
    nt, nr, p = argmin_grid(evaluations)
    return OptimizationResult(nt, nr, p, evaluations, "analytical",
                              time.perf_counter() - start)

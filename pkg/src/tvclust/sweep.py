"""Penalty-weight sweeps tracing the (matching, complexity) trade-off front."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .array_model import ArrayGeometry, ElementPatternSet, RadiationOperator
from .clustering import ClusteredLayout, extract_clusters
from .metrics import MetricsReport, full_report
from .reference import ReferencePattern
from .solver import SolverConfig, solve

__all__ = ["SweepPlan", "ParetoPoint", "SweepError", "run_sweep", "pareto_filter"]

log = logging.getLogger(__name__)


class SweepError(RuntimeError):
    """Raised when every solve in a sweep failed."""


@dataclass(frozen=True)
class SweepPlan:
    """Grid of solver settings to explore; the data-fit weight gamma is the
    primary knob trading fidelity against cluster count."""

    gamma_values: tuple
    beta_values: tuple = ()
    tau_values: tuple = (0.05,)
    fixed: SolverConfig = SolverConfig()

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gamma_values)
        betas = tuple(float(b) for b in self.beta_values) or (self.fixed.beta,)
        taus = tuple(float(t) for t in self.tau_values)
        if not gammas or not taus:
            raise ValueError("sweep value lists must be non-empty")
        if any(g <= 0 for g in gammas) or any(b <= 0 for b in betas):
            raise ValueError("penalty weights must be positive")
        if any(not 0.0 < t < 1.0 for t in taus):
            raise ValueError("tau values must lie strictly between 0 and 1")
        object.__setattr__(self, "gamma_values", gammas)
        object.__setattr__(self, "beta_values", betas)
        object.__setattr__(self, "tau_values", taus)

    def combinations(self):
        return [
            (g, b, t)
            for g in self.gamma_values
            for b in self.beta_values
            for t in self.tau_values
        ]


@dataclass(frozen=True)
class ParetoPoint:
    """One completed solve + extraction + scoring, with full provenance."""

    chi: float
    xi: float
    gamma: float
    beta: float
    tau: float
    layout: ClusteredLayout
    report: MetricsReport

    def sort_key(self):
        return (self.chi, self.xi, self.gamma, self.beta, self.tau)


def run_sweep(
    H: RadiationOperator,
    f_ref: ReferencePattern,
    plan: SweepPlan,
    geom: ArrayGeometry,
    elems: ElementPatternSet,
    threads: int = 1,
    dense_factor: int = 10,
    failures: list | None = None,
) -> list:
    """Solve once per plan combination and score every completed point.

    Failed combinations are logged (and appended to ``failures`` when given)
    and excluded; raises :class:`SweepError` if nothing completed. Results
    are returned in plan order regardless of thread count.
    """
    combos = plan.combinations()

    def run_one(combo):
        gamma, beta, tau = combo
        config = replace(plan.fixed, beta=beta, gamma=gamma)
        result = solve(H, f_ref, config)
        layout = extract_clusters(result.w_hat, tau)
        report = full_report(result.w_hat, layout, H, f_ref, geom, elems,
                             dense_factor=dense_factor)
        return ParetoPoint(chi=report.chi, xi=report.xi, gamma=gamma, beta=beta,
                           tau=tau, layout=layout, report=report)

    outcomes = [None] * len(combos)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, outcome in enumerate(pool.map(_guarded(run_one), combos)):
                outcomes[i] = outcome
    else:
        guarded = _guarded(run_one)
        for i, combo in enumerate(combos):
            outcomes[i] = guarded(combo)

    points = []
    for combo, outcome in zip(combos, outcomes):
        if isinstance(outcome, Exception):
            log.warning("sweep point gamma=%g beta=%g tau=%g failed: %s", *combo, outcome)
            if failures is not None:
                failures.append((combo, outcome))
        else:
            points.append(outcome)
    if not points:
        raise SweepError(f"all {len(combos)} sweep points failed")
    return points


def _guarded(fn):
    def wrapper(combo):
        try:
            return fn(combo)
        except Exception as exc:  # collected by the caller
            return exc

    return wrapper


def pareto_filter(points: list) -> list:
    """Keep the points not dominated in (chi, xi); both-smaller-or-equal with
    one strictly smaller dominates. Output is sorted by chi ascending with xi
    strictly decreasing; exact duplicates collapse to their first occurrence."""
    best = []
    min_xi = np.inf
    for p in sorted(points, key=lambda p: p.sort_key()):
        if p.xi < min_xi:
            best.append(p)
            min_xi = p.xi
    return best

"""Tests for the penalty/threshold sweep and Pareto filtering."""

import numpy as np
import pytest

from tvclust.array_model import (
    ElementPatternSet,
    build_radiation_operator,
    uniform_geometry,
    uniform_u_grid,
)
from tvclust.clustering import extract_clusters
from tvclust.metrics import full_report
from tvclust.reference import ReferencePattern, dolph_excitations, reference_from_excitations
from tvclust.solver import SolverConfig, solve
from tvclust.sweep import ParetoPoint, SweepError, SweepPlan, pareto_filter, run_sweep


def point(chi, xi, gamma=1.0, beta=1.0, tau=0.05):
    return ParetoPoint(chi=chi, xi=xi, gamma=gamma, beta=beta, tau=tau,
                       layout=None, report=None)


def dominates(a, b):
    return a.chi <= b.chi and a.xi <= b.xi and (a.chi < b.chi or a.xi < b.xi)


class TestParetoFilter:
    def test_dominated_point_dropped(self):
        kept = pareto_filter([point(0.1, 1e-3), point(0.2, 1e-3)])
        assert [(p.chi, p.xi) for p in kept] == [(0.1, 1e-3)]

    def test_incomparable_points_kept(self):
        kept = pareto_filter([point(0.1, 1e-2), point(0.2, 1e-3)])
        assert [(p.chi, p.xi) for p in kept] == [(0.1, 1e-2), (0.2, 1e-3)]

    def test_empty(self):
        assert pareto_filter([]) == []

    def test_duplicates_collapse(self):
        kept = pareto_filter([point(0.1, 1e-3, gamma=2.0), point(0.1, 1e-3, gamma=1.0)])
        assert len(kept) == 1
        assert kept[0].gamma == 1.0  # deterministic: smallest provenance first

    def test_output_is_antichain_sorted(self):
        rng = np.random.default_rng(5)
        pts = [point(float(c), float(x))
               for c, x in zip(rng.uniform(0, 1, 50), rng.uniform(0, 1, 50))]
        kept = pareto_filter(pts)
        for i, a in enumerate(kept):
            for j, b in enumerate(kept):
                if i != j:
                    assert not dominates(a, b)
        chis = [p.chi for p in kept]
        xis = [p.xi for p in kept]
        assert chis == sorted(chis)
        assert all(x2 < x1 for x1, x2 in zip(xis, xis[1:]))

    def test_idempotent(self):
        rng = np.random.default_rng(9)
        pts = [point(float(c), float(x))
               for c, x in zip(rng.uniform(0, 1, 30), rng.uniform(0, 1, 30))]
        once = pareto_filter(pts)
        assert pareto_filter(once) == once


def dolph_problem(n=20):
    geom = uniform_geometry(n)
    elems = ElementPatternSet.isotropic(n)
    grid = uniform_u_grid(2 * n)
    H = build_radiation_operator(geom, elems, grid)
    ref = reference_from_excitations(dolph_excitations(n, -20.0), H, grid, "d20")
    return geom, elems, H, ref


class TestRunSweep:
    def test_single_combination_equals_direct_solve(self):
        geom, elems, H, ref = dolph_problem()
        plan = SweepPlan(gamma_values=(1024.0,), tau_values=(0.152,))
        points = run_sweep(H, ref, plan, geom, elems)
        assert len(points) == 1
        result = solve(H, ref, SolverConfig(beta=32.0, gamma=1024.0))
        layout = extract_clusters(result.w_hat, 0.152)
        report = full_report(result.w_hat, layout, H, ref, geom, elems)
        assert points[0].report == report
        assert points[0].layout.boundaries == layout.boundaries

    def test_reproducible_and_thread_invariant(self):
        geom, elems, H, ref = dolph_problem(12)
        plan = SweepPlan(gamma_values=(256.0, 1024.0), tau_values=(0.05, 0.2),
                         fixed=SolverConfig(max_iter=400))
        a = run_sweep(H, ref, plan, geom, elems)
        b = run_sweep(H, ref, plan, geom, elems)
        c = run_sweep(H, ref, plan, geom, elems, threads=3)
        assert [(p.gamma, p.tau, p.xi, p.chi) for p in a] \
            == [(p.gamma, p.tau, p.xi, p.chi) for p in b] \
            == [(p.gamma, p.tau, p.xi, p.chi) for p in c]

    def test_all_failures_raise_sweep_error(self):
        geom, elems, H, _ = dolph_problem(8)
        grid = uniform_u_grid(16)
        diverging = ReferencePattern(np.full(16, 1e300), grid)
        plan = SweepPlan(gamma_values=(8.0, 64.0))
        failures = []
        with pytest.raises(SweepError):
            run_sweep(H, diverging, plan, geom, elems, failures=failures)
        assert len(failures) == 2

    def test_front_spans_complexity_range_n100(self):
        # qualitative front shape on the 100-element reference problem
        geom, elems, H, ref = dolph_problem(100)
        plan = SweepPlan(gamma_values=(1024.0,),
                         tau_values=(0.002, 0.0035, 0.0042, 0.005))
        front = pareto_filter(run_sweep(H, ref, plan, geom, elems))
        chis = [p.chi for p in front]
        xis = [p.xi for p in front]
        assert min(chis) < 0.1 and max(chis) > 0.3
        assert all(x2 < x1 for x1, x2 in zip(xis, xis[1:]))


class TestSweepPlan:
    def test_validation(self):
        with pytest.raises(ValueError):
            SweepPlan(gamma_values=())
        with pytest.raises(ValueError):
            SweepPlan(gamma_values=(-1.0,))
        with pytest.raises(ValueError):
            SweepPlan(gamma_values=(1.0,), tau_values=(1.5,))

    def test_beta_defaults_to_fixed_config(self):
        plan = SweepPlan(gamma_values=(2.0,), fixed=SolverConfig(beta=7.0))
        assert plan.beta_values == (7.0,)
        assert plan.combinations() == [(2.0, 7.0, 0.05)]

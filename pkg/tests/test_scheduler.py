"""Optimal starting times against a brute-force oracle."""

import numpy as np
import pytest

from tdroute.plf import Atf, StepCost
from tdroute.scheduler import (CostModel, PLCost, optimal_start,
                               soft_window_penalty, total_cost)
from oracles import rand_atf, rand_stepcost

RNG = np.random.default_rng(99)


def rand_model(rng):
    nb = int(rng.integers(0, 4))
    xs = np.unique(np.concatenate([[0.0], np.sort(rng.uniform(1, 60, nb))]))
    ys = np.cumsum(np.concatenate([[rng.uniform(0, 5)], rng.uniform(0, 3, len(xs) - 1)]))
    cot = PLCost(list(zip(xs, ys)), final_slope=float(rng.uniform(0, 2)))
    nw = int(rng.integers(0, 4))
    pieces = sorted((float(rng.uniform(0, 140)), float(rng.uniform(0, 1.0)))
                    for _ in range(nw))
    return CostModel(c_ot=cot, c_wt=StepCost(float(rng.uniform(0, 0.5)), pieces))


class TestTotalCost:
    def test_all_zero_model(self):
        a = rand_atf(RNG)
        assert total_cost(a, CostModel(), a.t_min) == 0.0

    def test_paper_window_duration(self):
        a = Atf(((4, 4.1), (5, 5.1)))
        model = CostModel(c_ot=PLCost(((0.0, 0.0),), final_slope=1.0))
        assert total_cost(a, model, 4.0) == pytest.approx(0.1)

    def test_rate_times_duration(self):
        a = Atf(((0.0, 7200.0), (10.0, 7210.0)))
        model = CostModel(c_wt=StepCost(20.0 / 3600.0))
        assert total_cost(a, model, 0.0) == pytest.approx(40.0)


class TestOptimalStart:
    def test_paper_window(self):
        a = Atf(((4, 4.1), (5, 5.1)))
        model = CostModel(c_ot=PLCost(((0.0, 0.0),), final_slope=1.0))
        r = optimal_start(a, model)
        assert r.t0 == 4.0 and r.total_cost == pytest.approx(0.1)

    def test_constant_total_returns_least(self):
        ident = Atf(((0, 0), (10, 10)))
        model = CostModel(c_ot=PLCost(((0.0, 0.0),), final_slope=1.0))
        assert optimal_start(ident, model).t0 == 0.0

    def test_collapsed_domain(self):
        a = Atf(((5.0, 7.0),))
        r = optimal_start(a, CostModel.hourly(20.0))
        assert r.t0 == 5.0 and r.duration == pytest.approx(2.0)

    def test_max_duration_filter(self):
        # waiting before the window makes early starts long
        a = Atf(((100.0, 150.0), (200.0, 250.0)))
        r = optimal_start(a, CostModel(), max_duration=60.0)
        assert r is not None and r.duration <= 60.0 + 1e-9
        assert optimal_start(a, CostModel(), max_duration=10.0) is None

    def test_random_vs_grid_bruteforce(self):
        for _ in range(300):
            a = rand_atf(RNG, b_max=8, span=100.0, dur_max=20.0)
            a = a.with_cost(rand_stepcost(RNG, a.t_min, a.t_max))
            model = rand_model(RNG)
            r = optimal_start(a, model)
            grid = np.linspace(a.t_min, a.t_max, 1500)
            costs = np.array([total_cost(a, model, float(t)) for t in grid])
            assert r.total_cost <= costs.min() + 1e-7
            assert total_cost(a, model, r.t0) == pytest.approx(r.total_cost, abs=1e-9)
            assert sum(r.components) == pytest.approx(r.total_cost, abs=1e-9)
            before = grid[grid < r.t0 - 1e-9]
            if before.size:
                cb = np.array([total_cost(a, model, float(t)) for t in before])
                assert np.all(cb > r.total_cost - 1e-9)

    def test_event_count_bound(self):
        for _ in range(100):
            a = rand_atf(RNG, b_max=10, span=100.0)
            a = a.with_cost(rand_stepcost(RNG, a.t_min, a.t_max))
            model = rand_model(RNG)
            r = optimal_start(a, model)
            b_a, b_ca = a.b, a.cost.discontinuities
            b_ot, b_wt = model.c_ot.b, model.c_wt.discontinuities
            assert r.events_scanned <= b_ot * b_a + b_ca + 2 * b_wt + b_a + 2


class TestSoftWindowPenalty:
    def test_paper_brackets(self):
        end = 18 * 3600.0
        sc = soft_window_penalty(end, ((15, 1.0), (10, 2.0), (5, 4.0)))
        assert sc.eval(end - 20 * 60) == 0.0
        assert sc.eval(end - 13 * 60) == 1.0
        assert sc.eval(end - 8 * 60) == 2.0
        assert sc.eval(end - 2 * 60) == 4.0
        # lower semi-continuity at the bracket edges: the cheaper side wins,
        # matching "at least 10 minutes before" = $1 exactly at the edge
        assert sc.eval(end - 15 * 60) == 0.0
        assert sc.eval(end - 10 * 60) == 1.0
        assert sc.eval(end - 5 * 60) == 2.0

    def test_empty_brackets(self):
        assert soft_window_penalty(100.0, ()).is_zero()

    def test_doubled_penalties(self):
        end = 1000.0
        sc = soft_window_penalty(end, ((15, 2.0), (10, 4.0), (5, 8.0)))
        assert sc.eval(end - 60.0) == 8.0

    def test_malformed(self):
        with pytest.raises(ValueError):
            soft_window_penalty(0.0, ((10, 1.0), (15, 2.0)))
        with pytest.raises(ValueError):
            soft_window_penalty(0.0, ((15, 3.0), (10, 1.0)))

"""Minimum-breakpoint approximation and the polish pass."""

import numpy as np
import pytest

from tdroute.plf import Atf, InvalidEpsilon, polish, simplify
from oracles import corridor_min_breakpoints, rand_atf

RNG = np.random.default_rng(4242)


def _sandwich_ok(g, f, eps, samples=3000):
    xs = np.linspace(f.t_min - 1, f.t_max, samples)
    gv, fv = g.eval_many(xs), f.eval_many(xs)
    return bool(np.all(gv >= fv - 1e-8) and np.all(gv <= fv + eps + 1e-8))


class TestSimplify:
    def test_rejects_bad_epsilon(self):
        f = rand_atf(RNG)
        with pytest.raises(InvalidEpsilon):
            simplify(f, 0.0)

    def test_flat_enough_returns_constant(self):
        f = Atf(((0, 5), (1, 5.2), (2, 5.3)))
        g = simplify(f, 0.5)
        assert g.b == 1
        assert g.eval(-3) == pytest.approx(5.3)
        assert g.t_max == 2.0

    def test_single_segment_stays_minimal(self):
        f = Atf(((0.0, 1.0), (5.0, 9.0)))
        g = simplify(f, 0.5)
        assert g.b == 2
        assert _sandwich_ok(g, f, 0.5)

    def test_cost_carried_over(self):
        from tdroute.plf import StepCost
        f = rand_atf(RNG, b_max=8).with_cost(StepCost(1.0, ((3.0, 2.0),)))
        g = simplify(f, 0.3)
        assert g.cost.init == 1.0 and g.cost.ts == (3.0,)

    def test_optimal_count_on_small_instances(self):
        checked = 0
        while checked < 100:
            f = rand_atf(RNG, b_max=6)
            span = f.vs[-1] - f.vs[0]
            if span <= 1e-9:
                continue
            eps = 0.1 * span + 1e-6
            g = simplify(f, eps)
            assert _sandwich_ok(g, f, eps)
            assert all(b - a >= -1e-12 for a, b in zip(g.vs, g.vs[1:]))
            assert g.b == corridor_min_breakpoints(f, eps)
            checked += 1

    def test_monotone_sandwich_on_larger_instances(self):
        for _ in range(300):
            f = rand_atf(RNG, b_max=50, span=60.0)
            span = f.vs[-1] - f.vs[0]
            eps = max(1e-6, float(RNG.choice([0.02, 0.1, 0.5])) * max(span, 0.1))
            g = simplify(f, eps)
            g.check_invariants()  # monotone with no repair pass
            assert g.b <= f.b
            assert _sandwich_ok(g, f, eps)


class TestPolish:
    def test_tight_unchanged(self):
        f = rand_atf(RNG, b_max=6)
        p = polish(f, f, 0.5)
        assert list(zip(p.ts, p.vs)) == list(zip(f.ts, f.vs))

    def test_constant_drops_to_max_of_f(self):
        f = Atf(((0, 1), (4, 4.0)))
        p = polish(Atf(((4, 4.6),)), f, 1.0)
        assert p.vs[0] == pytest.approx(4.0)

    def test_area_never_increases(self):
        for _ in range(200):
            f = rand_atf(RNG, b_max=20, span=30.0)
            span = f.vs[-1] - f.vs[0]
            eps = max(1e-6, 0.2 * max(span, 0.1))
            g = simplify(f, eps)
            p = polish(g, f, eps)
            assert p.b <= g.b
            assert _sandwich_ok(p, f, eps)
            xs = np.linspace(f.t_min, f.t_max, 2000)
            area_g = np.trapezoid(g.eval_many(xs) - f.eval_many(xs), xs)
            area_p = np.trapezoid(p.eval_many(xs) - f.eval_many(xs), xs)
            assert area_p <= area_g + 1e-7

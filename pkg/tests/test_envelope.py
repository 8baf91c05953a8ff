"""Lower envelopes, multiset sorting, and the n-way pointwise minimum."""

import numpy as np
import pytest

from tdroute.plf import (MismatchedDomain, PiecewiseLinear, atf_min_n,
                         envelope_affine, min2, min_n, multi_sort)
from oracles import rand_atf, rand_pl

RNG = np.random.default_rng(77)


class TestEnvelopeAffine:
    def test_single_line(self):
        env = envelope_affine([(2.0, 1.0)])
        assert env.lines == ((2.0, 1.0),)
        assert env.xs == ()

    def test_three_lines_pointwise(self):
        env = envelope_affine([(-1, 0), (0, 0), (1, 0)])
        for x in np.linspace(-3, 3, 31):
            assert env.eval(x) == pytest.approx(min(-x, 0, x))

    def test_duplicate_slopes_keep_cheapest(self):
        env = envelope_affine([(1.0, 5.0), (1.0, 2.0)])
        assert env.lines == ((1.0, 2.0),)

    def test_random_concavity_and_bound(self):
        for _ in range(200):
            n = int(RNG.integers(1, 40))
            lines = sorted((float(s), float(c)) for s, c in
                           zip(RNG.uniform(-5, 5, n), RNG.uniform(-5, 5, n)))
            env = envelope_affine(lines)
            slopes = [s for s, _ in env.lines]
            assert all(s1 < s0 for s0, s1 in zip(slopes, slopes[1:]))
            assert env.n_breakpoints <= n - 1 if n > 1 else env.n_breakpoints == 0
            xs = np.linspace(-10, 10, 101)
            want = np.min(np.array([[s * x + c for x in xs] for s, c in lines]), axis=0)
            got = np.array([env.eval(x) for x in xs])
            assert np.max(np.abs(got - want)) < 1e-9


class TestMultiSort:
    def test_global_set(self):
        vals = [5.0, 1.0, 3.0, 2.0, 4.0]
        out = multi_sort(vals, [list(range(5))])
        assert [vals[i] for i in out[0]] == sorted(vals)

    def test_singletons(self):
        vals = [3.0, 1.0]
        assert multi_sort(vals, [[0], [1]]) == [[0], [1]]

    def test_random_vs_per_set_sort(self):
        for _ in range(100):
            m = int(RNG.integers(1, 60))
            vals = list(RNG.uniform(-10, 10, m))
            sets = []
            for _ in range(int(RNG.integers(1, 12))):
                size = int(RNG.integers(1, m + 1))
                sets.append(list(RNG.choice(m, size=size, replace=False)))
            out = multi_sort(vals, sets)
            for members, order in zip(sets, out):
                assert sorted(members) == sorted(order)
                assert [vals[i] for i in order] == sorted(vals[i] for i in members)

    def test_rejects_empty_set(self):
        with pytest.raises(ValueError):
            multi_sort([1.0], [[]])


class TestMinN:
    def test_two_lines(self):
        f1 = PiecewiseLinear(((0, 0), (2, 2)))
        f2 = PiecewiseLinear(((0, 2), (2, 0)))
        m = min_n([f1, f2])
        assert list(zip(m.xs, m.ys)) == [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]

    def test_single_function_unchanged(self):
        f = rand_pl(RNG)
        assert min_n([f]) is f

    def test_mismatched_domain(self):
        with pytest.raises(MismatchedDomain):
            min_n([PiecewiseLinear(((0, 0), (2, 2))),
                   PiecewiseLinear(((0, 0), (3, 3)))])

    def test_random_vs_pointwise(self):
        for _ in range(60):
            n = int(RNG.integers(2, 65))
            fs = [rand_pl(RNG) for _ in range(n)]
            m = min_n(fs)
            xs = np.concatenate([np.linspace(0, 10, 400), np.array(m.xs)])
            want = np.min(np.vstack([f.eval_many(xs) for f in fs]), axis=0)
            assert np.max(np.abs(m.eval_many(xs) - want)) < 1e-9

    def test_shared_breakpoint_abscissae(self):
        grid = np.linspace(0, 10, 6)
        for _ in range(20):
            n = int(RNG.integers(2, 33))
            fs = [PiecewiseLinear(list(zip(grid, RNG.uniform(0, 10, 6))))
                  for _ in range(n)]
            m = min_n(fs)
            xs = np.linspace(0, 10, 500)
            want = np.min(np.vstack([f.eval_many(xs) for f in fs]), axis=0)
            assert np.max(np.abs(m.eval_many(xs) - want)) < 1e-9

    def test_assignment_structure(self):
        """Step 1 of the algorithm: set sizes, affinity, leaf partition."""
        fs = [rand_pl(RNG, nseg=6) for _ in range(11)]
        result, chunks = min_n(fs, debug=True)
        n = len(fs)
        for chunk in chunks:
            k = chunk["k"]
            total = n + chunk["n_pad"]
            assert total == 2 ** k - 1
            by_node = chunk["assign"]
            for (level, j), members in by_node.items():
                assert len(members) == 2 ** (k - level)
            # per-leaf partition property
            for leaf in range(2 ** k):
                path = []
                for level in range(1, k + 1):
                    path.extend(by_node[(level, leaf >> (k - level))])
                assert sorted(path) == list(range(total))

    def test_atf_min_n_matches_min2_fold(self):
        for _ in range(50):
            atfs = [rand_atf(RNG, b_max=5) for _ in range(int(RNG.integers(2, 20)))]
            m = atf_min_n(atfs)
            m.check_invariants()
            fold = atfs[0]
            for a in atfs[1:]:
                fold = min2(fold, a)
            xs = np.linspace(m.t_min - 1, m.t_max, 300)
            assert np.max(np.abs(m.eval_many(xs)
                                 - fold.eval_many(xs, strict=False))) < 1e-9

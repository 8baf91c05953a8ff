"""Desk-scale solver quality on instances with a known feasible reference.

Each instance plants reference routes and draws time windows around their
arrival times, so the reference (vehicle count, distance) is an achievable
target.  The solver must stay within the same envelope that the acceptance
suite applies to the classic benchmarks: reference + 2 vehicles and 1.15x
the reference distance, well under 120 s per instance.
"""

import time

import pytest

from tdroute.bench_io import make_planted_instance
from tdroute.solver import SolverConfig, solve, validate


@pytest.mark.parametrize("seed", range(1, 11))
def test_planted_reference_quality(seed):
    inst, ref_vehicles, ref_distance = make_planted_instance(100, seed=seed)
    t0 = time.monotonic()
    sol = solve(inst, SolverConfig(seed=seed, iterations=60))
    wall = time.monotonic() - t0
    rep = validate(sol, inst)
    assert rep.feasible, rep
    assert not sol.unserved
    distance = sum(t.schedule.cost_departure for t in sol.tours)
    assert sol.n_vehicles <= ref_vehicles + 2
    assert distance <= 1.15 * ref_distance
    assert wall <= 120.0

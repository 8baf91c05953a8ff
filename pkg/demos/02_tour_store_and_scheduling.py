"""Pricing tour edits in O(1) composes, then scheduling the start time.

A tour is a chain of actions (serve a stop, drive on).  The segment store
precomputes compositions over a balanced tree so any contiguous range
a_{i,j} needs at most 2k-1 compose calls, and a hypothetical insertion of
a pickup and a delivery at most 4k+3 - without touching the stored state.
"""

import numpy as np

from tdroute.plf import Atf
from tdroute.scheduler import CostModel, PLCost, StepCost, optimal_start
from tdroute.touratf import SegmentStore

rng = np.random.default_rng(1)

def service_action(open_at, horizon=3000.0, work=15.0, drive=40.0):
    """Wait for the window, serve for `work`, drive `drive` to the next stop."""
    close = open_at + 240.0
    return Atf(((open_at, open_at + work + drive),
                (close, close + work + drive),
                (horizon, horizon + work + drive)))

actions = [service_action(200.0 + 150.0 * i) for i in range(12)]
store = SegmentStore(actions, k=2)

before = store.compose_count
a_3_9 = store.query(3, 9)
print("composed actions 4..9 with", store.compose_count - before,
      "compose calls (budget 2k-1 = 3)")
print("depart boundary 3 at t=500 -> reach boundary 9 at", round(a_3_9.eval(500.0), 1))

# Price inserting a pickup after action 4 and a delivery after action 7.
mod4 = service_action(820.0)
pick = service_action(860.0)
mod7 = service_action(1240.0)
drop = service_action(1300.0)
before = store.compose_count
hypothetical = store.eval_insertion(4, 7, mod4, pick, mod7, drop)
print("\ninsertion priced with", store.compose_count - before,
      "compose calls (budget 4k+3 = 11); store untouched")

# Now the Optimal Starting Time Problem: duration costs $20/h, the tour's
# attached cost jumps when a pricier path takes over, and night work pays
# double between t=2000 and the end.
tour_atf = store.full_atf().with_cost(StepCost(5.0, ((900.0, 9.0),)))
model = CostModel(c_ot=PLCost.linear(20.0),
                  c_wt=StepCost(0.0, ((2000.0, 20.0 / 3600.0),)))
sched = optimal_start(tour_atf, model)
print(f"\nbest start t0 = {sched.t0:.0f}, total ${sched.total_cost:.2f} "
      f"(path ${sched.cost_departure:.2f} + duration ${sched.cost_overtime:.2f} "
      f"+ work-time ${sched.cost_worktime:.2f})")
print("tour duration:", round(sched.duration, 1), "seconds;",
      sched.events_scanned, "events scanned")

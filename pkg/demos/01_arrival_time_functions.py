"""Arrival time functions: evaluation, composition, minima, simplification.

An arrival time function (ATF) maps a departure time to an arrival time.
This walk-through builds a few by hand, chains them, takes pointwise
minima over alternative routes, and squeezes breakpoints out of a noisy
function without ever underestimating it.
"""

import numpy as np

from tdroute.plf import Atf, StepCost, compose, compose_chain, min2, simplify

# A delivery that takes 0.1h and must start between t=4 and t=5:
# arrive earlier and you wait, arrive after 5 and the day is lost.
window = Atf(((4.0, 4.1), (5.0, 5.1)))
print("arrive at 3.0 ->", window.eval(3.0), "(wait for the window, then serve)")
print("arrive at 4.8 ->", window.eval(4.8))

# Travel that slows down in a rush hour: 1h base, 1.8h if you leave at 6.
rush = Atf(((5.0, 6.0), (6.0, 7.8), (8.0, 9.0), (12.0, 13.0)))
print("\nrush-hour arc, leave at 5.5 ->", rush.eval(5.5))

# Do the window stop first, then the rush arc: one compose call.
trip = compose(window, rush)
print("window then arc, depart 3.0 ->", trip.eval(3.0))
print("domain ends at", trip.t_max, "(later starts cannot finish)")

# Costs ride along: tolls on the arc, a flat fee at the stop.
tolled = rush.with_cost(StepCost(2.0, ((6.0, 5.0),)))   # $2, $5 after t=6
stop = window.with_cost(StepCost(1.0))
paid = compose(stop, tolled)
print("\ncost leaving at 3.0:", paid.cost.eval(3.0), "dollars")

# Chains compose associatively; the balanced helper keeps breakpoints low.
legs = [Atf(((float(i), i + 0.2), (float(i + 20), i + 20.4)))
        for i in range(0, 8, 2)]
full = compose_chain(legs)
print("\n4-leg chain:", full.b, "breakpoints, arrive from t=0 ->", full.eval(0.0))

# Two alternative routes: the pointwise minimum picks whichever is faster
# at each departure time, keeping the cheaper cost at ties.
route_a = Atf(((0.0, 2.0), (6.0, 8.5), (10.0, 12.0)), cost=StepCost(3.0))
route_b = Atf(((0.0, 3.0), (4.0, 5.0), (10.0, 11.5)), cost=StepCost(2.0))
best = min2(route_a, route_b)
ts = np.linspace(0, 10, 6)
print("\nbest-of-two arrivals:", np.round(best.eval_many(ts), 2))

# Simplification: a wobbly 9-breakpoint function approximated from above
# within eps using as few breakpoints as any valid approximation can have.
wob = Atf(((0, 1.0), (1, 1.4), (2, 2.2), (3, 3.0), (4, 4.1), (5, 5.0),
           (6, 6.4), (7, 7.0), (8, 8.3)))
tight = simplify(wob, 0.35)
xs = np.linspace(-1.0, wob.t_max, 400)
gap = tight.eval_many(xs) - wob.eval_many(xs)
print(f"\nsimplify: {wob.b} -> {tight.b} breakpoints,")
print("above the original everywhere:", bool(np.all(gap >= -1e-12)),
      "| within 0.35 of it:", bool(np.all(gap <= 0.35 + 1e-12)))

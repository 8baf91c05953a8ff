"""Instance and solution model for pickup-and-delivery tours.

Times are seconds, costs dollars.  An instance supplies a full matrix of
arrival time functions between addresses; action ATFs (serve a stop, then
travel onward) are built from it on demand.  Preloaded items (picked up at
the vehicle's start depot before departure) carry only a delivery stop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..plf import Atf, EmptyDomain, ZERO_COST, compose
from ..scheduler import CostModel, PLCost, optimal_start, soft_window_penalty
from ..touratf import SegmentStore

FAR_FUTURE = 5e8  # effectively "no deadline", yet numerically tame


@dataclass(frozen=True)
class Stop:
    kind: str          # 'P' or 'D'
    item_id: int
    address: int
    open: float
    close: float
    duration: float
    demand_delta: float


@dataclass(frozen=True)
class Item:
    id: int
    pickup_address: int
    pickup_open: float
    pickup_close: float
    pickup_duration: float
    delivery_address: int
    delivery_open: float
    delivery_close: float
    delivery_duration: float
    demand: float = 0.0
    penalty: float = 1e6
    depot_pickup: bool = False

    def stops(self):
        out = []
        if not self.depot_pickup:
            out.append(Stop("P", self.id, self.pickup_address, self.pickup_open,
                            self.pickup_close, self.pickup_duration, self.demand))
        out.append(Stop("D", self.id, self.delivery_address, self.delivery_open,
                        self.delivery_close, self.delivery_duration,
                        -self.demand if not self.depot_pickup else 0.0))
        return out


@dataclass(frozen=True)
class Vehicle:
    id: int
    start_address: int
    end_address: int
    avail_lo: float
    avail_hi: float
    fixed_cost: float = 0.0
    time_cost_per_hour: float = 0.0
    max_duration: float = math.inf
    capacity: float = math.inf

    def cost_model(self):
        return CostModel(c_ot=PLCost.linear(self.time_cost_per_hour))


class Instance:
    """Items, vehicles, and the address-pair ATF matrix."""

    def __init__(self, name, matrix, items, vehicles, horizon=None, depot=0):
        self.name = name
        self.matrix = matrix          # matrix[p][q] -> Atf
        self.items = list(items)
        self.vehicles = list(vehicles)
        self.depot = depot
        if horizon is None:
            lo = min((v.avail_lo for v in vehicles), default=0.0)
            hi = max((v.avail_hi for v in vehicles), default=FAR_FUTURE)
            horizon = (lo, min(hi, FAR_FUTURE))
        self.horizon = horizon
        self.n_addresses = len(matrix)
        self._lo = None
        self._hi = None
        self._dist = None
        self._friends = None
        self.item_by_id = {it.id: it for it in self.items}

    def arc(self, p, q):
        return self.matrix[p][q]

    def _fill_bounds(self):
        n = self.n_addresses
        self._lo = [[0.0] * n for _ in range(n)]
        self._hi = [[0.0] * n for _ in range(n)]
        self._dist = [[0.0] * n for _ in range(n)]
        for p in range(n):
            for q in range(n):
                tb = self.matrix[p][q].travel_bounds()
                self._lo[p][q] = tb.lo
                self._hi[p][q] = tb.hi
                self._dist[p][q] = self.matrix[p][q].cost.init

    def lo_travel(self, p, q):
        if self._lo is None:
            self._fill_bounds()
        return self._lo[p][q]

    def hi_travel(self, p, q):
        if self._hi is None:
            self._fill_bounds()
        return self._hi[p][q]

    def arc_dist_cost(self, p, q):
        if self._dist is None:
            self._fill_bounds()
        return self._dist[p][q]


def serve_atf(stop, brackets=()):
    """Wait for the window, serve, not yet traveling anywhere."""
    cost = soft_window_penalty(stop.close, brackets) if brackets else ZERO_COST
    if stop.close - stop.open <= 1e-9:
        return Atf(((stop.close, stop.close + stop.duration),), cost=cost)
    return Atf(((stop.open, stop.open + stop.duration),
                (stop.close, stop.close + stop.duration)), cost=cost)


def build_actions(instance, vehicle, stops, brackets=()):
    """Action ATF list for a tour: START, one action per stop.

    Action 1 departs the depot within the vehicle's availability and drives
    to the first stop; action i+1 serves stop i and drives on; the last
    action also enforces the return deadline.
    """
    end_cap = min(vehicle.avail_hi, FAR_FUTURE)
    start_lo = vehicle.avail_lo
    first_addr = stops[0].address if stops else vehicle.end_address
    start_clamp = Atf(((start_lo, start_lo), (end_cap, end_cap)))
    actions = [compose(start_clamp, instance.arc(vehicle.start_address, first_addr))]
    end_clamp = Atf(((start_lo - 1.0, start_lo - 1.0), (end_cap, end_cap)))
    for idx, s in enumerate(stops):
        nxt = stops[idx + 1].address if idx + 1 < len(stops) else vehicle.end_address
        act = compose(serve_atf(s, brackets), instance.arc(s.address, nxt))
        if idx == len(stops) - 1:
            act = compose(act, end_clamp)
        actions.append(act)
    if not stops:
        actions[0] = compose(actions[0], end_clamp)
    return actions


class Tour:
    """A vehicle's stop sequence plus its composition store and schedule."""

    _uid = 0

    def __init__(self, instance, vehicle, stops, brackets=(), k=2):
        Tour._uid += 1
        self.uid = Tour._uid
        self.revision = 0
        self.instance = instance
        self.vehicle = vehicle
        self.stops = list(stops)
        self.brackets = tuple(brackets)
        self.k = k
        self._rebuild()

    # -- derived state ----------------------------------------------------

    def _rebuild(self):
        inst, veh = self.instance, self.vehicle
        actions = build_actions(inst, veh, self.stops, self.brackets)
        store = SegmentStore(actions, k=self.k)
        schedule = self._schedule_atf(store.full_atf())
        if schedule is None:
            raise EmptyDomain(f"tour of vehicle {veh.id} is infeasible")
        self.store = store
        self.schedule = schedule
        self._refresh_aux()
        self.revision += 1

    def _schedule_atf(self, atf):
        max_dur = self.vehicle.max_duration
        if math.isinf(max_dur):
            max_dur = None
        return optimal_start(atf, self.vehicle.cost_model(), max_duration=max_dur)

    def _refresh_aux(self):
        """Earliest/latest service starts and running loads, for pruning."""
        inst, veh = self.instance, self.vehicle
        stops = self.stops
        m = len(stops)
        eat = [0.0] * m
        t = veh.avail_lo
        prev = veh.start_address
        feasible = True
        for i, s in enumerate(stops):
            try:
                arr = inst.arc(prev, s.address).eval(t)
            except Exception:
                feasible = False
                break
            start = max(arr, s.open)
            eat[i] = start
            t = start + s.duration
            prev = s.address
        self.eat = eat
        self.eat_feasible = feasible
        lst = [0.0] * (m + 1)
        cap = min(veh.avail_hi, FAR_FUTURE)
        lst[m] = cap
        nxt = veh.end_address
        ok = True
        for i in range(m - 1, -1, -1):
            s = stops[i]
            dep = inst.arc(s.address, nxt).latest_departure(lst[i + 1])
            if dep is None:
                ok = False
                lst[i] = -math.inf
            else:
                lst[i] = min(s.close, dep - s.duration)
            nxt = s.address
        self.lst = lst
        self.lst_feasible = ok
        preload = sum(inst.item_by_id[s.item_id].demand
                      for s in stops if s.kind == "D"
                      and inst.item_by_id[s.item_id].depot_pickup)
        loads = [preload]
        for s in stops:
            loads.append(loads[-1] + s.demand_delta)
        self.loads = loads
        self.max_load = max(loads) if loads else 0.0

    @property
    def cost(self):
        return self.vehicle.fixed_cost + self.schedule.total_cost

    @property
    def item_ids(self):
        seen = []
        got = set()
        for s in self.stops:
            if s.item_id not in got:
                got.add(s.item_id)
                seen.append(s.item_id)
        return seen

    # -- mutation -----------------------------------------------------------

    def set_stops(self, stops):
        old = self.stops
        self.stops = list(stops)
        try:
            self._rebuild()
        except EmptyDomain:
            self.stops = old
            raise

    def insert_single(self, position, stop):
        """Insert one stop; the store absorbs it with incremental updates."""
        inst, veh = self.instance, self.vehicle
        new_stops = self.stops[:position] + [stop] + self.stops[position:]
        mod = _action_for(inst, veh, new_stops, position - 1, self.brackets)
        new_act = _action_for(inst, veh, new_stops, position, self.brackets)
        self.stops = new_stops
        self.store.update_action(position + 1, mod)
        self.store.insert_action(position + 2, new_act)
        sched = self._schedule_atf(self.store.full_atf())
        if sched is None:
            raise EmptyDomain("insertion broke the schedule")
        self.schedule = sched
        self._refresh_aux()
        self.revision += 1


def _action_for(instance, vehicle, stops, idx, brackets):
    """The action ATF at position idx+1 of the given stop list (idx = -1
    yields the START action)."""
    m = len(stops)
    end_cap = min(vehicle.avail_hi, FAR_FUTURE)
    if idx < 0:
        first = stops[0].address if stops else vehicle.end_address
        clamp = Atf(((vehicle.avail_lo, vehicle.avail_lo), (end_cap, end_cap)))
        act = compose(clamp, instance.arc(vehicle.start_address, first))
        if not stops:
            act = compose(act, Atf(((vehicle.avail_lo - 1.0, vehicle.avail_lo - 1.0),
                                    (end_cap, end_cap))))
        return act
    s = stops[idx]
    nxt = stops[idx + 1].address if idx + 1 < m else vehicle.end_address
    act = compose(serve_atf(s, brackets), instance.arc(s.address, nxt))
    if idx == m - 1:
        end_clamp = Atf(((vehicle.avail_lo - 1.0, vehicle.avail_lo - 1.0), (end_cap, end_cap)))
        act = compose(act, end_clamp)
    return act


class Solution:
    """A set of tours plus the items nobody serves."""

    def __init__(self, instance, tours=(), unserved=()):
        self.instance = instance
        self.tours = list(tours)
        self.unserved = set(unserved)

    @property
    def total_cost(self):
        pen = sum(self.instance.item_by_id[i].penalty for i in self.unserved)
        return sum(t.cost for t in self.tours) + pen

    @property
    def n_vehicles(self):
        return sum(1 for t in self.tours if t.stops)

    def used_vehicle_ids(self):
        return {t.vehicle.id for t in self.tours}

    def free_vehicles(self):
        used = self.used_vehicle_ids()
        return [v for v in self.instance.vehicles if v.id not in used]

    def drop_empty_tours(self):
        self.tours = [t for t in self.tours if t.stops]

    def clone_state(self):
        """Cheap snapshot: stop lists per vehicle + unserved items."""
        return ([(t.vehicle.id, list(t.stops)) for t in self.tours],
                set(self.unserved))

    def restore_state(self, state, brackets=()):
        veh_by_id = {v.id: v for v in self.instance.vehicles}
        tours = []
        existing = {t.vehicle.id: t for t in self.tours}
        for vid, stops in state[0]:
            old = existing.get(vid)
            if old is not None and old.stops == stops:
                tours.append(old)
            else:
                tours.append(Tour(self.instance, veh_by_id[vid], stops, brackets))
        self.tours = tours
        self.unserved = set(state[1])

"""Parsers for the classic benchmark formats.

Solomon and Gehring-Homberger files describe capacitated time-window
instances with one depot; every customer becomes a preloaded delivery
item.  Li-Lim files describe true pickup-and-delivery pairs.  Travel times
equal exact Euclidean distances (speed 1), and the distance doubles as the
arc's attached cost, so a schedule's departure-cost component is the tour
length.
"""

from __future__ import annotations

import math

from ..plf import Atf, StepCost
from ..solver import Instance, Item, Vehicle
from .native import ParseError

VEHICLE_FIXED_COST = 10000.0  # dominates distance: minimizes fleet first
UNSERVED_PENALTY = 1e6


def _euclid(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _matrix_from_coords(coords, t_max):
    n = len(coords)
    out = []
    for p in range(n):
        row = []
        for q in range(n):
            d = _euclid(coords[p], coords[q])
            row.append(Atf.constant_travel(d, -1.0, t_max, cost=StepCost(d)))
        out.append(row)
    return out


def parse_solomon(path, vehicle_fixed_cost=VEHICLE_FIXED_COST):
    """Solomon / Gehring-Homberger CVRPTW format."""
    with open(path) as f:
        lines = f.read().splitlines()
    name = None
    k_q = None
    rows = []
    section = "head"
    for ln_no, raw in enumerate(lines, start=1):
        ln = raw.strip()
        if not ln:
            continue
        up = ln.upper()
        if name is None:
            name = ln.split()[0]
            continue
        if up.startswith("VEHICLE") or up.startswith("NUMBER") or up.startswith("CUST"):
            section = "veh" if up.startswith(("VEHICLE", "NUMBER")) else "cust"
            continue
        toks = ln.split()
        if k_q is None and len(toks) == 2:
            try:
                k_q = (int(toks[0]), float(toks[1]))
                continue
            except ValueError:
                raise ParseError("expected vehicle count and capacity", ln_no)
        if len(toks) >= 7:
            try:
                rows.append(tuple(float(t) for t in toks[:7]))
            except ValueError:
                raise ParseError(f"bad customer row: {ln}", ln_no)
    if k_q is None:
        raise ParseError("missing vehicle count/capacity header")
    if not rows:
        raise ParseError("no customer rows")
    if len(rows) < 2:
        raise ParseError("empty customer list")
    k, capacity = k_q
    depot = rows[0]
    coords = [(r[1], r[2]) for r in rows]
    depot_due = depot[5]
    matrix = _matrix_from_coords(coords, depot_due + 4 * 86400.0)
    items = []
    for i, r in enumerate(rows[1:], start=1):
        _, _, _, demand, ready, due, service = r
        items.append(Item(
            id=i, pickup_address=0, pickup_open=depot[4], pickup_close=depot_due,
            pickup_duration=0.0, delivery_address=i, delivery_open=ready,
            delivery_close=due, delivery_duration=service, demand=demand,
            penalty=UNSERVED_PENALTY, depot_pickup=True))
    vehicles = [Vehicle(id=v, start_address=0, end_address=0,
                        avail_lo=depot[4], avail_hi=depot_due,
                        fixed_cost=vehicle_fixed_cost, capacity=capacity)
                for v in range(int(k))]
    return Instance(name, matrix, items, vehicles,
                    horizon=(depot[4], depot_due), depot=0)


def parse_homberger(path, vehicle_fixed_cost=VEHICLE_FIXED_COST):
    """Gehring-Homberger files share the Solomon layout."""
    return parse_solomon(path, vehicle_fixed_cost)


def parse_lilim(path, vehicle_fixed_cost=VEHICLE_FIXED_COST):
    """Li-Lim PDPTW format: true pickup and delivery pairs."""
    with open(path) as f:
        lines = [ln.strip() for ln in f.read().splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty file")
    head = lines[0].split()
    if len(head) < 2:
        raise ParseError("expected 'vehicles capacity [speed]' header", 1)
    k, capacity = int(head[0]), float(head[1])
    rows = {}
    for ln_no, ln in enumerate(lines[1:], start=2):
        toks = ln.split()
        if len(toks) < 9:
            raise ParseError(f"bad task row: {ln}", ln_no)
        vals = [float(t) for t in toks[:9]]
        rows[int(vals[0])] = vals
    if 0 not in rows:
        raise ParseError("missing depot row (id 0)")
    if len(rows) < 2:
        raise ParseError("empty customer list")
    max_id = max(rows)
    coords = [(rows[i][1], rows[i][2]) if i in rows else (0.0, 0.0)
              for i in range(max_id + 1)]
    depot = rows[0]
    depot_due = depot[5]
    matrix = _matrix_from_coords(coords, depot_due + 4 * 86400.0)
    items = []
    for rid, r in sorted(rows.items()):
        if rid == 0:
            continue
        pickup_of, delivery_of = int(r[7]), int(r[8])
        if pickup_of == 0 and delivery_of > 0:
            d = rows.get(delivery_of)
            if d is None:
                raise ParseError(f"task {rid} names unknown delivery {delivery_of}")
            items.append(Item(
                id=rid, pickup_address=rid, pickup_open=r[4], pickup_close=r[5],
                pickup_duration=r[6], delivery_address=int(d[0]),
                delivery_open=d[4], delivery_close=d[5], delivery_duration=d[6],
                demand=abs(r[3]), penalty=UNSERVED_PENALTY, depot_pickup=False))
    vehicles = [Vehicle(id=v, start_address=0, end_address=0,
                        avail_lo=depot[4], avail_hi=depot_due,
                        fixed_cost=vehicle_fixed_cost, capacity=capacity)
                for v in range(k)]
    return Instance("lilim", matrix, items, vehicles,
                    horizon=(depot[4], depot_due), depot=0)

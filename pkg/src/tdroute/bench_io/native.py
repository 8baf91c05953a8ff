"""Line-oriented native instance and solution formats.

Floats are written with repr() so parse(serialize(x)) reproduces x bit for
bit.  The arc matrix is stored as explicit breakpoint lists with attached
cost pieces, which keeps files human-diffable and language-agnostic.
"""

from __future__ import annotations

import math

from ..plf import Atf, StepCost
from ..solver import Instance, Item, Solution, Tour, Vehicle


class ParseError(ValueError):
    def __init__(self, msg, line_no=None):
        where = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"{msg}{where}")
        self.line_no = line_no


def _fmt(x):
    if math.isinf(x):
        return "inf"
    return repr(float(x))


def serialize_instance(inst):
    out = ["TDROUTE-INSTANCE 1"]
    out.append(f"name {inst.name.replace(' ', '_')}")
    out.append(f"addresses {inst.n_addresses}")
    out.append(f"depot {inst.depot}")
    out.append(f"horizon {_fmt(inst.horizon[0])} {_fmt(inst.horizon[1])}")
    out.append(f"vehicles {len(inst.vehicles)}")
    for v in inst.vehicles:
        out.append("v {} {} {} {} {} {} {} {} {}".format(
            v.id, v.start_address, v.end_address, _fmt(v.avail_lo), _fmt(v.avail_hi),
            _fmt(v.fixed_cost), _fmt(v.time_cost_per_hour), _fmt(v.max_duration),
            _fmt(v.capacity)))
    out.append(f"items {len(inst.items)}")
    for it in inst.items:
        out.append("i {} {} {} {} {} {} {} {} {} {} {} {}".format(
            it.id, 1 if it.depot_pickup else 0,
            it.pickup_address, _fmt(it.pickup_open), _fmt(it.pickup_close),
            _fmt(it.pickup_duration),
            it.delivery_address, _fmt(it.delivery_open), _fmt(it.delivery_close),
            _fmt(it.delivery_duration), _fmt(it.demand), _fmt(it.penalty)))
    n = inst.n_addresses
    out.append(f"arcs {n * n}")
    for p in range(n):
        for q in range(n):
            a = inst.matrix[p][q]
            parts = [f"a {p} {q} {a.b}"]
            for t, v in zip(a.ts, a.vs):
                parts.append(f"{_fmt(t)} {_fmt(v)}")
            c = a.cost
            parts.append(f"c {_fmt(c.init)} {len(c.ts)}")
            for t, cv in zip(c.ts, c.cs):
                parts.append(f"{_fmt(t)} {_fmt(cv)}")
            out.append(" ".join(parts))
    out.append("end")
    return "\n".join(out) + "\n"


def write_instance(inst, path):
    with open(path, "w") as f:
        f.write(serialize_instance(inst))


def _floats(tokens, line_no):
    try:
        return [float(t) for t in tokens]
    except ValueError as e:
        raise ParseError(str(e), line_no)


def parse_instance_text(text):
    lines = text.splitlines()
    idx = 0

    def next_line():
        nonlocal idx
        while idx < len(lines):
            ln = lines[idx].strip()
            idx += 1
            if ln:
                return ln, idx
        raise ParseError("unexpected end of file", idx)

    header, ln_no = next_line()
    if not header.startswith("TDROUTE-INSTANCE"):
        raise ParseError("not a tdroute instance file", ln_no)
    fields = {}
    for key in ("name", "addresses", "depot", "horizon"):
        ln, ln_no = next_line()
        tok = ln.split()
        if tok[0] != key:
            raise ParseError(f"expected '{key}', got '{tok[0]}'", ln_no)
        fields[key] = tok[1:]
    name = fields["name"][0]
    n = int(fields["addresses"][0])
    depot = int(fields["depot"][0])
    horizon = tuple(_floats(fields["horizon"], ln_no))

    ln, ln_no = next_line()
    if not ln.startswith("vehicles"):
        raise ParseError("expected vehicles section", ln_no)
    n_veh = int(ln.split()[1])
    vehicles = []
    for _ in range(n_veh):
        ln, ln_no = next_line()
        tok = ln.split()
        if tok[0] != "v":
            raise ParseError("expected vehicle line", ln_no)
        vals = _floats(tok[4:], ln_no)
        vehicles.append(Vehicle(
            id=int(tok[1]), start_address=int(tok[2]), end_address=int(tok[3]),
            avail_lo=vals[0], avail_hi=vals[1], fixed_cost=vals[2],
            time_cost_per_hour=vals[3], max_duration=vals[4], capacity=vals[5]))

    ln, ln_no = next_line()
    if not ln.startswith("items"):
        raise ParseError("expected items section", ln_no)
    n_items = int(ln.split()[1])
    items = []
    for _ in range(n_items):
        ln, ln_no = next_line()
        tok = ln.split()
        if tok[0] != "i":
            raise ParseError("expected item line", ln_no)
        vals = _floats(tok[4:5] + tok[5:], ln_no)
        items.append(Item(
            id=int(tok[1]), depot_pickup=tok[2] == "1",
            pickup_address=int(tok[3]), pickup_open=float(tok[4]),
            pickup_close=float(tok[5]), pickup_duration=float(tok[6]),
            delivery_address=int(tok[7]), delivery_open=float(tok[8]),
            delivery_close=float(tok[9]), delivery_duration=float(tok[10]),
            demand=float(tok[11]), penalty=float(tok[12])))

    ln, ln_no = next_line()
    if not ln.startswith("arcs"):
        raise ParseError("expected arcs section", ln_no)
    n_arcs = int(ln.split()[1])
    matrix = [[None] * n for _ in range(n)]
    for _ in range(n_arcs):
        ln, ln_no = next_line()
        tok = ln.split()
        if tok[0] != "a":
            raise ParseError("expected arc line", ln_no)
        p, q, b = int(tok[1]), int(tok[2]), int(tok[3])
        pos = 4
        pts = []
        for _ in range(b):
            pts.append((float(tok[pos]), float(tok[pos + 1])))
            pos += 2
        if tok[pos] != "c":
            raise ParseError("expected cost marker", ln_no)
        init = float(tok[pos + 1])
        k = int(tok[pos + 2])
        pos += 3
        pieces = []
        for _ in range(k):
            pieces.append((float(tok[pos]), float(tok[pos + 1])))
            pos += 2
        atf = Atf(pts, cost=StepCost(init, pieces))
        atf.check_invariants()
        matrix[p][q] = atf
    ln, ln_no = next_line()
    if ln != "end":
        raise ParseError("expected end marker", ln_no)
    for p in range(n):
        for q in range(n):
            if matrix[p][q] is None:
                raise ParseError(f"missing arc {p}->{q}")
    return Instance(name, matrix, items, vehicles, horizon=horizon, depot=depot)


def read_instance(path):
    with open(path) as f:
        return parse_instance_text(f.read())


# -- solutions -------------------------------------------------------------


def serialize_solution(sol):
    out = ["TDROUTE-SOLUTION 1"]
    out.append(f"instance {sol.instance.name.replace(' ', '_')}")
    out.append(f"cost {_fmt(sol.total_cost)}")
    unserved = sorted(sol.unserved)
    out.append("unserved {} {}".format(len(unserved), " ".join(map(str, unserved))).rstrip())
    tours = [t for t in sol.tours if t.stops]
    out.append(f"tours {len(tours)}")
    for t in tours:
        stops = " ".join(f"{s.kind}{s.item_id}" for s in t.stops)
        out.append(f"t {t.vehicle.id} {_fmt(t.schedule.t0)} {len(t.stops)} {stops}")
    out.append("end")
    return "\n".join(out) + "\n"


def write_solution(sol, path):
    with open(path, "w") as f:
        f.write(serialize_solution(sol))


def read_solution(path, instance, brackets=()):
    """Rebuild a Solution against its instance."""
    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    if not lines or not lines[0].startswith("TDROUTE-SOLUTION"):
        raise ParseError("not a tdroute solution file", 1)
    unserved = set()
    tours = []
    veh_by_id = {v.id: v for v in instance.vehicles}
    for ln_no, ln in enumerate(lines[1:], start=2):
        tok = ln.split()
        if tok[0] == "unserved":
            unserved = {int(x) for x in tok[2:]}
        elif tok[0] == "t":
            vid = int(tok[1])
            if vid not in veh_by_id:
                raise ParseError(f"unknown vehicle {vid}", ln_no)
            stops = []
            for st in tok[4:]:
                kind, item_id = st[0], int(st[1:])
                item = instance.item_by_id.get(item_id)
                if item is None:
                    raise ParseError(f"unknown item {item_id}", ln_no)
                for s in item.stops():
                    if s.kind == kind:
                        stops.append(s)
                        break
                else:
                    raise ParseError(f"item {item_id} has no {kind} stop", ln_no)
            tours.append(Tour(instance, veh_by_id[vid], stops, brackets))
    return Solution(instance, tours, unserved)

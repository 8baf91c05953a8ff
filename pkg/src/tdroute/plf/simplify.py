"""Minimum-breakpoint upper approximation of an ATF.

Given f and eps > 0, produce a monotone g with f <= g <= f + eps and the
fewest possible breakpoints.  The corridor between f and f + eps is
traversed left to right; each output breakpoint is placed on the "window"
segment through which every feasible approximation must pass, so no
monotonicity repair pass is needed afterwards.

The feasible sightlines from a window form a wedge bounded by two extreme
lines; both are maintained from the convex hulls of the floor and ceiling
constraint points seen so far.  When the wedge dies, the blocking extreme
line carries the next window.
"""

from __future__ import annotations

from bisect import bisect_right

from .atf import EPS_T, Atf, InvalidEpsilon

_TOL = 1e-12
_BIG_SLOPE = 1e15


class _Wedge:
    """Feasible lines passing above every floor point and below every
    ceiling point collected so far."""

    __slots__ = ("floor", "ceil")

    def __init__(self):
        self.floor = []  # points the line must pass weakly above
        self.ceil = []   # points the line must pass weakly below

    # A line y = s*x + c is feasible iff
    #   A(s) := max over floor of (y - s x)  <=  c  <=  B(s) := min over ceil.
    # F(s) = B(s) - A(s) is concave piecewise linear; the feasible slopes
    # form the interval where F >= 0.

    def _A(self, s):
        best = None
        arg = None
        for x, y in self.floor:
            v = y - s * x
            if best is None or v > best + _TOL or (v > best - _TOL and (arg is None or x > arg[0])):
                best, arg = v, (x, y)
        return best, arg

    def _B(self, s):
        best = None
        arg = None
        for x, y in self.ceil:
            v = y - s * x
            if best is None or v < best - _TOL or (v < best + _TOL and (arg is None or x > arg[0])):
                best, arg = v, (x, y)
        return best, arg

    def max_slope_line(self):
        """The feasible line of maximal slope, or None if unbounded."""
        if not self.floor or not self.ceil:
            return None
        s = _BIG_SLOPE
        for _ in range(4 * (len(self.floor) + len(self.ceil)) + 8):
            a, ra = self._A(s)
            bb, qb = self._B(s)
            if bb - a >= -_TOL * max(1.0, abs(a)):
                if s >= _BIG_SLOPE:
                    return None
                c = ra[1] - s * ra[0]
                return (s, c, ra, qb)
            if abs(qb[0] - ra[0]) <= 1e-12 * max(1.0, abs(qb[0])):
                return None if qb[1] >= ra[1] else ("infeasible",)
            s_new = (qb[1] - ra[1]) / (qb[0] - ra[0])
            if s_new >= s - 1e-12 * max(1.0, abs(s)):
                c = ra[1] - s * ra[0]
                return (s, c, ra, qb)
            s = s_new
        c = ra[1] - s * ra[0]
        return (s, c, ra, qb)

    def min_slope_line(self):
        if not self.floor or not self.ceil:
            return None
        s = -_BIG_SLOPE
        for _ in range(4 * (len(self.floor) + len(self.ceil)) + 8):
            a, ra = self._A(s)
            bb, qb = self._B(s)
            if bb - a >= -_TOL * max(1.0, abs(a)):
                if s <= -_BIG_SLOPE:
                    return None
                c = ra[1] - s * ra[0]
                return (s, c, ra, qb)
            if abs(qb[0] - ra[0]) <= 1e-12 * max(1.0, abs(qb[0])):
                return None if qb[1] >= ra[1] else ("infeasible",)
            s_new = (qb[1] - ra[1]) / (qb[0] - ra[0])
            if s_new <= s + 1e-12 * max(1.0, abs(s)):
                c = ra[1] - s * ra[0]
                return (s, c, ra, qb)
            s = s_new
        c = ra[1] - s * ra[0]
        return (s, c, ra, qb)

    def value_range_at(self, x):
        """(lowest, highest) value a feasible line can take at abscissa x."""
        hi = self.max_slope_line()
        lo = self.min_slope_line()
        hi_v = float("inf") if hi is None else hi[0] * x + hi[1]
        lo_v = float("-inf") if lo is None else lo[0] * x + lo[1]
        return lo_v, hi_v


def _seg_cross(p, q, s, c):
    """Intersection of segment p-q with line y = s x + c, or None."""
    d0 = p[1] - (s * p[0] + c)
    d1 = q[1] - (s * q[0] + c)
    if d0 == d1:
        return None
    lam = d0 / (d0 - d1)
    if lam < -1e-9 or lam > 1 + 1e-9:
        return None
    lam = min(max(lam, 0.0), 1.0)
    return (p[0] + lam * (q[0] - p[0]), p[1] + lam * (q[1] - p[1]))


def simplify(f, eps):
    """Approximate f from above within eps using the fewest breakpoints."""
    if eps <= 0:
        raise InvalidEpsilon("eps must be positive")
    ts, vs = f.ts, f.vs
    if vs[-1] <= vs[0] + eps:
        return Atf(((ts[-1], vs[-1]),), cost=f.cost)

    ceiling = eps  # chain offsets: floor = (t, v), ceiling = (t, v + eps)
    h0 = vs[0] + eps
    # t' = min { t : f(t) = f(t_min) + eps }
    j = 0
    while vs[j + 1] < h0:
        j += 1
    t_first = ts[j] + (h0 - vs[j]) * (ts[j + 1] - ts[j]) / (vs[j + 1] - vs[j])

    # window endpoints: one on the ceiling chain, one on the floor chain
    win_ceil = (ts[0], h0)
    win_floor = (t_first, h0)
    # next chain vertex strictly beyond each window endpoint
    i_ceil = 1
    i_floor = j + 1
    while i_floor < len(ts) and ts[i_floor] <= t_first + EPS_T:
        i_floor += 1

    out = []
    guard = 0
    while True:
        guard += 1
        if guard > len(ts) + 4:
            raise AssertionError("simplify failed to advance")
        res = _sweep_phase(f, eps, win_ceil, win_floor, i_ceil, i_floor)
        if res["closed"]:
            s, c = res["line"]
            q = _window_intersection(win_ceil, win_floor, s, c)
            out.append(q)
            win_ceil, win_floor = res["win_ceil"], res["win_floor"]
            i_ceil, i_floor = res["i_ceil"], res["i_floor"]
        else:
            if res["line"] is None:
                # the window's floor endpoint already sits at the cap; finish
                # with a (possibly degenerate) steepest climb onto it
                q = win_floor
                y_end = min(max(vs[-1], q[1]), vs[-1] + eps)
                out.append(q)
                out.append((ts[-1], y_end))
                break
            s, c = res["line"]
            q = _window_intersection(win_ceil, win_floor, s, c)
            out.append(q)
            y_end = s * ts[-1] + c
            y_end = min(max(y_end, vs[-1]), vs[-1] + eps)
            out.append((ts[-1], y_end))
            break

    g = Atf(out, cost=f.cost)
    return g


def _window_intersection(win_ceil, win_floor, s, c):
    hit = _seg_cross(win_ceil, win_floor, s, c)
    if hit is not None:
        return hit
    # parallel: the critical line coincides with the window line
    return win_floor


def _sweep_phase(f, eps, win_ceil, win_floor, i_ceil, i_floor):
    """Advance from one window until visibility dies or the cap is reached."""
    ts, vs = f.ts, f.vs
    b = len(ts)
    wedge = _Wedge()
    seeds = sorted([("C", win_ceil), ("F", win_floor)], key=lambda kv: kv[1][0])
    for kind, pt in seeds:
        (wedge.ceil if kind == "C" else wedge.floor).append(pt)

    ic, if_ = i_ceil, i_floor
    while ic < b or if_ < b:
        xc = ts[ic] if ic < b else float("inf")
        xf = ts[if_] if if_ < b else float("inf")
        x = min(xc, xf)
        lo_val = vs[if_] if xf <= xc and if_ < b else None
        hi_val = vs[ic] + eps if xc <= xf and ic < b else None

        if lo_val is not None:
            _, hi_reach = wedge.value_range_at(x)
            if hi_reach < lo_val - 1e-9:
                line = wedge.max_slope_line()
                return _closure(f, eps, line, blocked="floor",
                                i_ceil=ic, i_floor=if_)
        if hi_val is not None:
            lo_reach, _ = wedge.value_range_at(x)
            if lo_reach > hi_val + 1e-9:
                line = wedge.min_slope_line()
                return _closure(f, eps, line, blocked="ceil",
                                i_ceil=ic, i_floor=if_)
        if lo_val is not None:
            wedge.floor.append((x, lo_val))
            if_ += 1
        if hi_val is not None:
            wedge.ceil.append((x, hi_val))
            ic += 1

    line = wedge.max_slope_line()
    if line is None or line[0] == "infeasible":
        return {"closed": False, "line": None}
    s, c, _, _ = line
    return {"closed": False, "line": (s, c)}


def _closure(f, eps, line, blocked, i_ceil, i_floor):
    """Build the next window from the critical line at a closure event."""
    ts, vs = f.ts, f.vs
    b = len(ts)
    s, c, ra, qb = line
    # contacts: ra on the floor, qb on the ceiling; the later one starts the
    # next window, and the line exits the corridor through the other chain.
    if blocked == "floor":
        # max-slope line blocked from below: window from its ceiling contact
        # forward and down to the floor chain.
        start = qb
        exit_pt = _chain_exit(ts, vs, 0.0, start, s, c, b)
        win_ceil, win_floor = start, exit_pt
    else:
        # min-slope line blocked from above: window from its floor contact
        # forward and up to the ceiling chain.
        start = ra
        exit_pt = _chain_exit(ts, vs, eps, start, s, c, b)
        win_floor, win_ceil = start, exit_pt
    return {"closed": True, "line": (s, c), "win_ceil": win_ceil,
            "win_floor": win_floor,
            "i_ceil": _advance(ts, 0, win_ceil[0]),
            "i_floor": _advance(ts, 0, win_floor[0])}


def _advance(ts, i, x):
    while i < len(ts) and ts[i] <= x + EPS_T:
        i += 1
    return i


def _chain_exit(ts, vs, offset, start, s, c, b):
    """First crossing of the critical line with the chain f + offset beyond
    the start point."""
    i = 0
    while i < b and ts[i] <= start[0] + EPS_T:
        i += 1
    for k in range(max(i - 1, 0), b - 1):
        if ts[k + 1] <= start[0]:
            continue
        seg_p = (ts[k], vs[k] + offset)
        seg_q = (ts[k + 1], vs[k + 1] + offset)
        hit = _seg_cross(seg_p, seg_q, s, c)
        if hit is not None and hit[0] > start[0] + EPS_T:
            return hit
    # no crossing before the cap: exit on the cap segment
    return (ts[-1], s * ts[-1] + c)


def polish(g, f, eps):
    """Lower g's breakpoints toward f without changing their count.

    One left-to-right sweep; every breakpoint drops to the lowest position
    that keeps both adjacent segments inside the corridor and the function
    monotone.  The integrated error against f never increases.
    """
    pts = [list(p) for p in zip(g.ts, g.vs)]
    n = len(pts)
    fts, fvs = f.ts, f.vs

    def gates_between(a, b):
        i = bisect_right(fts, a)
        while i < len(fts) and fts[i] < b - EPS_T:
            yield fts[i], fvs[i]
            i += 1

    for i in range(n):
        t_i, y_i = pts[i]
        lo = f.eval(min(t_i, fts[-1]))
        if i > 0:
            lo = max(lo, pts[i - 1][1])
            tp, yp = pts[i - 1]
            for tg, fg in gates_between(tp, t_i):
                lam = (tg - tp) / (t_i - tp)
                if lam > 1e-12:
                    # yp*(1-lam) + y*lam >= fg
                    lo = max(lo, (fg - yp * (1 - lam)) / lam)
        if i + 1 < n:
            tn, yn = pts[i + 1]
            for tg, fg in gates_between(t_i, tn):
                lam = (tg - t_i) / (tn - t_i)
                if lam < 1 - 1e-12:
                    # y*(1-lam) + yn*lam >= fg
                    lo = max(lo, (fg - yn * lam) / (1 - lam))
        if lo < y_i:
            pts[i][1] = lo

    return Atf(pts, cost=g.cost)

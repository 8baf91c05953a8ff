"""Per-tour segment-composition store.

Keeps the arrival time functions of a tour's actions in a multi-level
structure of balanced search trees so that the composed ATF of any
contiguous action range a_{i,j} comes out of at most 2k-1 compose
operations (k-1 when the range touches either tour end), and hypothetical
insertions, removals, and swaps can be priced without mutating anything.

Action boundaries run 0..n; a_{i,j} composes actions i+1..j.  Every
compose performed on behalf of the store goes through one instrumented
counter, which the budget tests read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .plf import Atf, compose

_IDENTITY_T_MAX = 1e9  # far beyond any horizon; modest so interpolation stays exact


def identity_action():
    """Placeholder ATF used when an action is removed in place."""
    return Atf.identity(_IDENTITY_T_MAX, t_lo=-_IDENTITY_T_MAX)


@dataclass(frozen=True)
class ActionAtf:
    """An action's ATF: arrival at the next location after performing it."""

    atf: Atf
    action_id: object = None


class _Counter:
    __slots__ = ("n",)

    def __init__(self):
        self.n = 0


class _Bst:
    """Single-level balanced search tree over one block of actions.

    Stores a_{i,h}/a_{h,j} for every ancestor-descendant pair plus the
    block's own prefix and suffix arrays, so any in-block range needs at
    most one compose.
    """

    def __init__(self, atfs, counter):
        self.counter = counter
        self.atfs = list(atfs)
        self._build()

    def _c(self, x, y):
        if x is None:
            return y
        if y is None:
            return x
        self.counter.n += 1
        return compose(x, y)

    def _build(self):
        L = len(self.atfs)
        self.L = L
        self.left = {}   # h -> {i: a_{i,h}} for i < h
        self.right = {}  # h -> {j: a_{h,j}} for j > h
        self._build_node(0, L)
        self.pre = [None] * (L + 1)   # pre[j] = a_{0,j}
        self.suf = [None] * (L + 1)   # suf[i] = a_{i,L}
        for j in range(1, L + 1):
            self.pre[j] = self._c(self.pre[j - 1], self.atfs[j - 1])
        for i in range(L - 1, -1, -1):
            self.suf[i] = self._c(self.atfs[i], self.suf[i + 1])

    def _build_node(self, lo, hi):
        if lo > hi:
            return
        h = (lo + hi) // 2
        lchain = {}
        cur = None
        for i in range(h - 1, lo - 1, -1):
            cur = self._c(self.atfs[i], cur)
            lchain[i] = cur
        rchain = {}
        cur = None
        for j in range(h + 1, hi + 1):
            cur = self._c(cur, self.atfs[j - 1])
            rchain[j] = cur
        self.left[h] = lchain
        self.right[h] = rchain
        if lo < h:
            self._build_node(lo, h - 1)
        if h < hi:
            self._build_node(h + 1, hi)

    def full(self):
        return self.pre[self.L]

    def query(self, i, j):
        """a_{i,j} within the block, 0 <= i < j <= L; at most one compose."""
        if i == 0:
            return self.pre[j]
        if j == self.L:
            return self.suf[i]
        lo, hi = 0, self.L
        while True:
            h = (lo + hi) // 2
            if j < h:
                hi = h - 1
            elif i > h:
                lo = h + 1
            else:
                break  # i <= h <= j: lowest common ancestor
        if i == h:
            return self.right[h][j]
        if j == h:
            return self.left[h][i]
        return self._c(self.left[h][i], self.right[h][j])

    def update(self, pos, atf):
        self.update_many([(pos, atf)])

    def update_many(self, pairs):
        """Replace several actions at once, then recompute exactly the
        stored compositions whose range covers a replaced position.

        All replacements land before any chain is rebuilt, so stored
        compositions never mix old and new ATFs (a transient mix can be
        spuriously infeasible).
        """
        if not pairs:
            return
        for pos, atf in pairs:
            self.atfs[pos - 1] = atf
        positions = sorted({pos for pos, _ in pairs})
        # left chains recompute downward from bases at larger indices, so
        # refresh the rightmost changed position first; right chains dually
        for pos in reversed(positions):
            self._refresh_left(pos)
        for pos in positions:
            self._refresh_right(pos)
        for j in range(positions[0], self.L + 1):
            self.pre[j] = self._c(self.pre[j - 1], self.atfs[j - 1])
        for i in range(positions[-1] - 1, -1, -1):
            self.suf[i] = self._c(self.atfs[i], self.suf[i + 1])

    def _refresh_left(self, pos):
        lo, hi = 0, self.L
        while lo <= hi:
            h = (lo + hi) // 2
            if pos <= h:
                # pairs (i, h) with i < pos cover action pos
                lchain = self.left[h]
                for i in range(pos - 1, lo - 1, -1):
                    base = lchain[i + 1] if i + 1 < h else None
                    lchain[i] = self._c(self.atfs[i], base)
                if pos == h:
                    return
                hi = h - 1
            else:
                lo = h + 1

    def _refresh_right(self, pos):
        lo, hi = 0, self.L
        while lo <= hi:
            h = (lo + hi) // 2
            if pos > h:
                # pairs (h, j) with j >= pos cover action pos
                rchain = self.right[h]
                for j in range(max(pos, h + 1), hi + 1):
                    base = rchain[j - 1] if j - 1 > h else None
                    rchain[j] = self._c(base, self.atfs[j - 1])
                lo = h + 1
            else:
                if pos == h:
                    return
                hi = h - 1


class IndexOutOfRange(IndexError):
    pass


class SegmentStore:
    """Multi-level composition store over a tour's action ATFs."""

    def __init__(self, actions, k=2, _counter=None):
        self.counter = _counter if _counter is not None else _Counter()
        self.k = max(1, int(k))
        self._actions = [a.atf if isinstance(a, ActionAtf) else a for a in actions]
        self._ids = [a.action_id if isinstance(a, ActionAtf) else None for a in actions]
        if not self._actions:
            raise ValueError("a store needs at least one action")
        self._struct_ops = 0
        self._pending = []
        self._build()

    # -- construction -----------------------------------------------------

    @property
    def n(self):
        return len(self._actions)

    @property
    def compose_count(self):
        return self.counter.n

    def _c(self, x, y):
        if x is None:
            return y
        if y is None:
            return x
        self.counter.n += 1
        return compose(x, y)

    def _build(self):
        n = self.n
        self._pending.clear()
        if self.k == 1 or n <= 3:
            self._single = _Bst(self._actions, self.counter)
            self._blocks = None
            self._top = None
            self._pre = self._single.pre
            self._suf = self._single.suf
            return
        self._single = None
        p = max(2, math.ceil(n ** (1.0 / self.k)))
        self._p = p
        starts = list(range(0, n, p))
        self._blocks = []
        for s in starts:
            chunk = self._actions[s:s + p]
            self._blocks.append([s, _Bst(chunk, self.counter)])
        composites = [b.full() for _, b in self._blocks]
        self._top = SegmentStore(composites, k=self.k - 1, _counter=self.counter)
        self._pre = [None] * (n + 1)
        self._suf = [None] * (n + 1)
        for j in range(1, n + 1):
            self._pre[j] = self._c(self._pre[j - 1], self._actions[j - 1])
        for i in range(n - 1, -1, -1):
            self._suf[i] = self._c(self._actions[i], self._suf[i + 1])

    def flush(self):
        """Apply pending lazy updates now."""
        if not self._pending:
            return
        pending, self._pending = self._pending, []
        lo_idx = min(pending)
        hi_idx = max(pending)
        if self._single is not None:
            self._single.update_many(
                [(idx, self._actions[idx - 1]) for idx in set(pending)])
            self._pre = self._single.pre
            self._suf = self._single.suf
            return
        by_block = {}
        for idx in set(pending):
            by_block.setdefault(self._block_of(idx), []).append(idx)
        for bi, idxs in sorted(by_block.items()):
            start, bst = self._blocks[bi]
            bst.update_many([(idx - start, self._actions[idx - 1]) for idx in idxs])
            self._top.update_action(bi + 1, bst.full())
        for j in range(lo_idx, self.n + 1):
            self._pre[j] = self._c(self._pre[j - 1], self._actions[j - 1])
        for i in range(hi_idx - 1, -1, -1):
            self._suf[i] = self._c(self._actions[i], self._suf[i + 1])

    def _block_of(self, action_idx):
        """Block index holding 1-based action action_idx."""
        lo, hi = 0, len(self._blocks) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._blocks[mid][0] < action_idx:
                lo = mid
            else:
                hi = mid - 1
        return lo

    # -- queries -----------------------------------------------------------

    def query(self, i, j):
        """The composed ATF a_{i,j} of actions i+1..j (0 <= i < j <= n)."""
        if not (0 <= i < j <= self.n):
            raise IndexOutOfRange(f"bad range ({i}, {j}) for n={self.n}")
        self.flush()
        return self._query(i, j)

    def _query(self, i, j):
        if i == 0:
            return self._pre[j]
        if j == self.n:
            return self._suf[i]
        if self._single is not None:
            return self._single.query(i, j)
        bi = self._block_of(i + 1)
        bj = self._block_of(j)
        si, bsti = self._blocks[bi]
        sj, bstj = self._blocks[bj]
        if bi == bj:
            return bsti.query(i - si, j - si)
        left = None
        top_lo = bi
        if i > si:
            left = bsti.suf[i - si]
            top_lo = bi + 1
        right = None
        top_hi = bj + 1
        if j < sj + bstj.L:
            right = bstj.pre[j - sj] if j > sj else None
            top_hi = bj
        mid = self._top._query_checked(top_lo, top_hi) if top_lo < top_hi else None
        return self._c(self._c(left, mid), right)

    def _query_checked(self, i, j):
        self.flush()
        return self._query(i, j)

    def full_atf(self):
        return self.query(0, self.n)

    def action_atf(self, idx):
        if not (1 <= idx <= self.n):
            raise IndexOutOfRange(str(idx))
        return self._actions[idx - 1]

    # -- mutation ----------------------------------------------------------

    def update_action(self, idx, new):
        """Replace action idx (1-based); recomputation is deferred."""
        if not (1 <= idx <= self.n):
            raise IndexOutOfRange(str(idx))
        atf = new.atf if isinstance(new, ActionAtf) else new
        self._actions[idx - 1] = atf
        if isinstance(new, ActionAtf):
            self._ids[idx - 1] = new.action_id
        self._pending.append(idx)

    def remove_action(self, idx):
        """Remove by substituting the identity function; triggers the
        structural-update counter."""
        self.update_action(idx, identity_action())
        self._bump_struct()

    def insert_action(self, pos, new):
        """Insert a new action so it becomes action number pos (1-based)."""
        if not (1 <= pos <= self.n + 1):
            raise IndexOutOfRange(str(pos))
        atf = new.atf if isinstance(new, ActionAtf) else new
        aid = new.action_id if isinstance(new, ActionAtf) else None
        self.flush()
        if self._single is not None:
            self._actions.insert(pos - 1, atf)
            self._ids.insert(pos - 1, aid)
            self._single = _Bst(self._actions, self.counter)
            self._pre = self._single.pre
            self._suf = self._single.suf
        else:
            bi = self._block_of(pos) if pos <= self.n else len(self._blocks) - 1
            self._actions.insert(pos - 1, atf)
            self._ids.insert(pos - 1, aid)
            start, old_bst = self._blocks[bi]
            local = self._actions[start:start + old_bst.L + 1]
            self._blocks[bi][1] = _Bst(local, self.counter)
            for later in self._blocks[bi + 1:]:
                later[0] += 1
            self._top.update_action(bi + 1, self._blocks[bi][1].full())
            n = self.n
            self._pre = [None] * (n + 1)
            self._suf = [None] * (n + 1)
            for j in range(1, n + 1):
                self._pre[j] = self._c(self._pre[j - 1], self._actions[j - 1])
            for i in range(n - 1, -1, -1):
                self._suf[i] = self._c(self._actions[i], self._suf[i + 1])
        self._bump_struct()

    def _bump_struct(self):
        self._struct_ops += 1
        if self._struct_ops >= max(1, math.ceil(math.log2(self.n + 1))):
            self._struct_ops = 0
            self.flush()
            self._build()

    # -- hypothetical evaluations -------------------------------------------

    def eval_splice(self, first, last, replacements):
        """Full-tour ATF with actions first..last replaced by the given
        chain; the store is not modified.  EmptyDomain propagates to the
        caller as infeasibility."""
        if not (1 <= first <= last <= self.n):
            raise IndexOutOfRange(f"splice ({first}, {last})")
        self.flush()
        cur = self._query(0, first - 1) if first > 1 else None
        for a in replacements:
            if a is None:
                continue
            cur = self._c(cur, a.atf if isinstance(a, ActionAtf) else a)
        if last < self.n:
            cur = self._c(cur, self._query(last, self.n))
        if cur is None:
            raise ValueError("splice removed every action with no replacement")
        return cur

    def eval_insertion(self, i, j, a_i_mod, a_p, a_j_mod, a_d):
        """Tour ATF after inserting a pickup after action i and a delivery
        after action j (1 <= i <= j <= n-1), without mutating the store.

        a_i_mod/a_j_mod replace actions i and j (their travel now heads to
        the inserted stop); a_p and a_d are the inserted actions' ATFs.
        For j == i the pickup's ATF must already route to the delivery
        location and a_j_mod is ignored.
        """
        n = self.n
        if not (1 <= i <= j <= n - 1):
            raise IndexOutOfRange(f"insertion positions ({i}, {j}) for n={n}")
        self.flush()
        cur = self._query(0, i - 1) if i > 1 else None
        cur = self._c(cur, a_i_mod)
        cur = self._c(cur, a_p)
        if j > i:
            if j - 1 > i:
                cur = self._c(cur, self._query(i, j - 1))
            cur = self._c(cur, a_j_mod)
        cur = self._c(cur, a_d)
        cur = self._c(cur, self._query(j, n))
        return cur

    def eval_removal(self, first, last, bridge):
        """Tour ATF with actions first..last replaced by a caller-supplied
        bridge ATF (serve the predecessor, travel to the successor)."""
        return self.eval_splice(first, last, [bridge])


def eval_swap(store_a, seg_a, store_b, seg_b, repl_a, repl_b):
    """Tour ATFs after exchanging contiguous action ranges between tours.

    seg_a/seg_b are (first, last) action ranges; repl_a is the replacement
    chain spliced into tour A (bridge plus the incoming segment's ATFs,
    usually taken from store_b.query plus a retargeted tail), and repl_b
    likewise.  Neither store is modified.
    """
    atf_a = store_a.eval_splice(seg_a[0], seg_a[1], repl_a)
    atf_b = store_b.eval_splice(seg_b[0], seg_b[1], repl_b)
    return atf_a, atf_b

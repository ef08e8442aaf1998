"""Greedy BPE trainers: the rescan-everything reference and the amortized fast one.

Both trainers pick, at every step, the pair maximizing (count, earliest first
counted occurrence) under overlap-adjusted counting, intern it, and replace
all its occurrences.  The reference trainer recounts the whole stream each
iteration; the fast trainer keeps the stream as a doubly-linked list with a
per-pair set of occurrence positions and a lazily-invalidated max-heap, so a
step only touches the neighborhood of the replacements it performs.

The two are output-equivalent by construction (same tie-break, same counted
occurrence sets) and the test suite holds them to bit-for-bit equality.

Complexity note: the heap indexes every live candidate pair, not just the
top-M, so step cost is O(R_t log P) with P the number of distinct live pairs
(R_t = replacements at step t, and sum of R_t is below the source length).
Capping the heap at M entries would need a maintenance rule for evicted
pairs; measured scaling in the benchmark suite is near-linear without it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from heapq import heappop, heappush

from .core import (
    MergeTable,
    TokenStream,
    lift_string,
    apply_merge,
)
from .pair_stats import NoPairError, pair_frequencies, top_pair


@dataclass
class StepRecord:
    """One greedy step: the interned merge, its replacement count, its gain."""

    merge: int
    replacements: int
    gain: int


@dataclass
class TrainResult:
    table: MergeTable
    sequence: list[int]
    stream: TokenStream
    per_step: list[StepRecord] = field(default_factory=list)

    @property
    def utility(self) -> int:
        return sum(s.gain for s in self.per_step)


def _make_table(text: str, table: MergeTable | None) -> MergeTable:
    if table is not None:
        return table
    if not text:
        raise ValueError("cannot infer an alphabet from empty text; pass a table")
    return MergeTable(set(text))


def _barred_ids(table: MergeTable, barred_symbols) -> frozenset[int]:
    # symbols outside the alphabet cannot occur in the stream; ignore them
    ids = table._symbol_ids
    return frozenset(ids[s] for s in barred_symbols if s in ids)


def train_greedy_slow(
    text: str,
    merge_count: int,
    *,
    table: MergeTable | None = None,
    barred_symbols=(),
) -> TrainResult:
    """Reference trainer: full pair recount and full rescan per iteration.

    Runs at most ``merge_count`` iterations, stopping early when no countable
    pair remains.  Symbols in ``barred_symbols`` never participate in merges
    (word-boundary training bars the boundary symbol).
    """
    if merge_count < 0:
        raise ValueError("merge_count must be >= 0")
    table = _make_table(text, table)
    barred = _barred_ids(table, barred_symbols)
    stream = lift_string(table, text)
    sequence: list[int] = []
    per_step: list[StepRecord] = []
    for _ in range(merge_count):
        stats = pair_frequencies(stream, barred)
        if not stats:
            break
        try:
            pair = top_pair(stats, table)
        except NoPairError:  # pragma: no cover - guarded by the check above
            break
        merge = table.intern(*pair)
        stream, reps = apply_merge(table, stream, merge)
        sequence.append(merge)
        per_step.append(StepRecord(merge, reps, reps))
    return TrainResult(table, sequence, stream, per_step)


class PairIndex:
    """Linked-list stream plus per-pair occurrence sets and a lazy max-heap.

    Nodes live in parallel arrays indexed by their original stream position,
    which doubles as the tie-break key: positions are fixed at creation (a
    merged node keeps the left constituent's slot) so they order nodes
    exactly like current stream indices do.

    ``pos_sets[pair]`` holds the *counted* non-overlapping occurrence
    positions — the same left-to-right greedy selection the reference counter
    makes — so ``len(pos_sets[pair])`` is always the pair's overlap-adjusted
    count and its minimum is the first-occurrence tie-break key.  Equal-member
    pairs need parity repair when another merge consumes the head of a run;
    see ``_repair_run``.

    Heap entries are immutable snapshots ``(-count, first_pos, pair)``.  Pairs
    whose counts grow during a step are marked dirty and get one fresh
    snapshot when the step finishes (no pop happens mid-step); decreases are
    discovered lazily on pop, where a stale entry is discarded and reinserted
    with its current key.  An index belongs to exactly one training run.
    """

    def __init__(self, table: MergeTable, tokens: list[int], barred: frozenset[int] = frozenset()):
        self.table = table
        self.barred = barred
        n = len(tokens)
        self.vals: list[int] = list(tokens)
        self.nxt: list[int] = (list(range(1, n)) + [-1]) if n else []
        self.prv: list[int] = ([-1] + list(range(n - 1))) if n else []
        self.alive = bytearray(b"\x01") * n
        self.pos_sets: dict[tuple[int, int], set[int]] = {}
        self.pos_heaps: dict[tuple[int, int], list[int]] = {}
        self.heap: list[tuple[int, int, tuple[int, int]]] = []
        self.touches = 0  # splice-phase work counter, reset per step by apply()
        self.stale_skips = 0
        self._dirty: set[tuple[int, int]] = set()  # pairs grown mid-step, snapshot pending
        self._build()

    # -- construction ----------------------------------------------------

    def _build(self) -> None:
        vals = self.vals
        barred = self.barred
        sets = self.pos_sets
        prev: tuple[int, int] | None = None
        for i in range(len(vals) - 1):
            a = vals[i]
            b = vals[i + 1]
            if barred and (a in barred or b in barred):
                prev = None
                continue
            pair = (a, b)
            if pair != prev:
                s = sets.get(pair)
                if s is None:
                    sets[pair] = {i}
                else:
                    s.add(i)
                prev = pair
            else:
                prev = None
        for pair, s in sets.items():
            heap = sorted(s)
            self.pos_heaps[pair] = heap  # already a valid min-heap
            heappush(self.heap, (-len(s), heap[0], pair))

    # -- queries ----------------------------------------------------------

    def _first_pos(self, pair: tuple[int, int]) -> int:
        s = self.pos_sets[pair]
        ph = self.pos_heaps[pair]
        while ph[0] not in s:
            heappop(ph)
        return ph[0]

    def pop_best(self) -> tuple[int, int] | None:
        """Best live pair under (count desc, first counted occurrence asc).

        Discards dead entries; reinserts stale ones with their current key.
        Returns None when no countable pair remains.
        """
        heap = self.heap
        while heap:
            negc, first, pair = heappop(heap)
            s = self.pos_sets.get(pair)
            if not s:
                continue
            cur_first = self._first_pos(pair)
            if -negc == len(s) and first == cur_first:
                return pair
            heappush(heap, (-len(s), cur_first, pair))
        return None

    def live_tokens(self) -> list[int]:
        out = []
        i = 0 if self.vals else -1
        nxt = self.nxt
        vals = self.vals
        while i >= 0:
            out.append(vals[i])
            i = nxt[i]
        return out

    # -- mutation ----------------------------------------------------------

    def apply(self, pair: tuple[int, int], merge: int) -> int:
        """Replace every counted occurrence of ``pair`` by ``merge``; return count."""
        self.touches = 0
        left_val, right_val = pair
        s = self.pos_sets.pop(pair, set())
        self.pos_heaps.pop(pair, None)
        vals = self.vals
        nxt = self.nxt
        alive = self.alive
        reps = 0
        for i in sorted(s):
            # liveness check at use time; never fires while the counted-set
            # invariant holds, but a stale position must not corrupt the list
            j = nxt[i]
            if not alive[i] or vals[i] != left_val or j < 0 or vals[j] != right_val:
                self.stale_skips += 1
                continue
            self._splice(i, j, left_val, right_val, merge)
            reps += 1
        # one fresh snapshot per pair whose count grew during this step;
        # no pop happens mid-step, so deferring the pushes is safe
        dirty = self._dirty
        heap = self.heap
        sets = self.pos_sets
        while dirty:
            grown = dirty.pop()
            live = sets.get(grown)
            if live:
                heappush(heap, (-len(live), self._first_pos(grown), grown))
        return reps

    def _splice(self, i: int, j: int, left_val: int, right_val: int, merge: int) -> None:
        vals = self.vals
        nxt = self.nxt
        prv = self.prv
        self.touches += 1
        p = prv[i]
        k = nxt[j]
        # retract the neighbor pairs that are about to disappear
        if p >= 0:
            self._remove_pos((vals[p], left_val), p)
        if k >= 0:
            self._remove_pos((right_val, vals[k]), j)
        # node i absorbs node j
        vals[i] = merge
        nxt[i] = k
        self.alive[j] = 0
        if k >= 0:
            prv[k] = i
        # consuming j beheads a run of the right member: re-derive its parity.
        # (A self-pair consumes whole occurrences, which preserves parity.)
        if left_val != right_val and k >= 0 and vals[k] == right_val:
            self._repair_run(right_val, k)
        # index the pairs the new node forms with its neighbors
        if p >= 0:
            self._add_pos((vals[p], merge), p)
        if k >= 0:
            self._add_pos((merge, vals[k]), i)

    def _remove_pos(self, pair: tuple[int, int], pos: int) -> None:
        self.touches += 1
        s = self.pos_sets.get(pair)
        if s is None or pos not in s:
            return  # raw occurrence that was never counted
        s.remove(pos)
        if not s:
            del self.pos_sets[pair]
            del self.pos_heaps[pair]
        # count decreased: heap entries for this pair go stale and are
        # discarded or refreshed on pop

    def _add_pos(self, pair: tuple[int, int], pos: int) -> None:
        self.touches += 1
        a, b = pair
        barred = self.barred
        if barred and (a in barred or b in barred):
            return
        sets = self.pos_sets
        if a == b:
            # left-to-right counting: skip when pos closes a counted occurrence
            pp = self.prv[pos]
            if pp >= 0 and self.vals[pp] == a:
                s0 = sets.get(pair)
                if s0 is not None and pp in s0:
                    return
        s = sets.get(pair)
        if s is None:
            s = set()
            sets[pair] = s
            self.pos_heaps[pair] = []
        s.add(pos)
        heappush(self.pos_heaps[pair], pos)
        self._dirty.add(pair)

    def _repair_run(self, value: int, start: int) -> None:
        """Recompute counted occurrences for the maximal run of ``value`` at ``start``.

        Beheading a run flips the parity of every remaining occurrence, so the
        greedy left-to-right selection is rebuilt for the whole run.  Cost is
        the run length, which the surrounding text already paid to create.
        """
        vals = self.vals
        nxt = self.nxt
        run = []
        r = start
        while r >= 0 and vals[r] == value:
            run.append(r)
            r = nxt[r]
            self.touches += 1
        pair = (value, value)
        s = self.pos_sets.get(pair)
        if s is not None:
            for node in run:
                s.discard(node)
            if not s:
                del self.pos_sets[pair]
                del self.pos_heaps[pair]
        for t in range(0, len(run) - 1, 2):
            self._add_pos(pair, run[t])

    # -- verification -------------------------------------------------------

    def check_consistency(self) -> None:
        """Full rescan: maintained position sets must equal a fresh count.

        Test hook; raises AssertionError on any divergence.
        """
        tokens = []
        order = []
        i = 0 if self.vals else -1
        while i >= 0:
            tokens.append(self.vals[i])
            order.append(i)
            i = self.nxt[i]
        expected: dict[tuple[int, int], set[int]] = {}
        prev = None
        for t in range(len(tokens) - 1):
            a, b = tokens[t], tokens[t + 1]
            if self.barred and (a in self.barred or b in self.barred):
                prev = None
                continue
            pair = (a, b)
            if pair != prev:
                expected.setdefault(pair, set()).add(order[t])
                prev = pair
            else:
                prev = None
        assert expected == self.pos_sets, (
            f"position sets diverged: expected {expected}, have {self.pos_sets}"
        )


def train_greedy_fast(
    text: str,
    merge_count: int,
    *,
    table: MergeTable | None = None,
    barred_symbols=(),
    step_hook=None,
) -> TrainResult:
    """Amortized trainer; identical output to :func:`train_greedy_slow`.

    ``step_hook(index, record)`` is called after every applied merge —
    the consistency property tests use it to rescan the index.
    """
    if merge_count < 0:
        raise ValueError("merge_count must be >= 0")
    table = _make_table(text, table)
    barred = _barred_ids(table, barred_symbols)
    index = PairIndex(table, lift_string(table, text).tokens, barred)
    sequence: list[int] = []
    per_step: list[StepRecord] = []
    for _ in range(merge_count):
        pair = index.pop_best()
        if pair is None:
            break
        merge = table.intern(*pair)
        reps = index.apply(pair, merge)
        record = StepRecord(merge, reps, reps)
        sequence.append(merge)
        per_step.append(record)
        if step_hook is not None:
            step_hook(index, record)
    stream = TokenStream(index.live_tokens(), len(text))
    return TrainResult(table, sequence, stream, per_step)

"""Exact optimal BPE by depth-first search, with ordering-based pruning.

The search space is the tree of valid merge sequences built from pairs
actually present in the current stream (every explored merge makes at least
one replacement, which loses no achievable stream).  The pruned variant
collapses reorderable sequences onto a canonical representative: when two
consecutive merges provably commute — neither uses the other as a direct
constituent, and no suffix of one yield is a prefix of the other, so their
replacement windows can never share a token — only the (length, lex)-sorted
order of the two is expanded.  Non-commuting neighbors are always expanded:
a constituent-dependent continuation has no valid reordering at all (prune
it and "aaa" loses its optimum), and yield-overlapping merges are genuinely
order-sensitive in both directions.  An optional memo table additionally
deduplicates states the commutation guard misses.

Intended for small instances — the state count grows exponentially in the
merge budget (roughly min(|alphabet|^2M, N^M) sequences exist).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .core import (
    MergeTable,
    TokenStream,
    apply_sequence,
    is_valid_sequence,
    lift_string,
)


def conflicts(table: MergeTable, a: int, b: int) -> bool:
    """True iff yield(a) ends with the symbol yield(b) starts with.

    The relation is directional: conflicts(a, b) and conflicts(b, a) can
    differ.  Conflicting merges cannot be safely reordered across each other.
    """
    ya = table.yield_of(a)
    yb = table.yield_of(b)
    if table.is_trivial(a) or table.is_trivial(b):
        raise ValueError("conflicts is defined for composite merges")
    return ya[-1] == yb[0]


def merge_order(table: MergeTable, a: int, b: int) -> bool:
    """The search ordering a > b: no conflict, not shorter, not lex-smaller."""
    if conflicts(table, a, b):
        return False
    ya = table.yield_of(a)
    yb = table.yield_of(b)
    if len(ya) < len(yb):
        return False
    return not ya < yb


def _yields_overlap(u: str, v: str) -> bool:
    """Some non-empty suffix of ``u`` equals a prefix of ``v``.

    Merges whose yields overlap this way can contend for the same tokens, so
    their application order matters.  The single-symbol case is the conflict
    relation; longer overlaps arise when one merge's right constituent equals
    the other's left constituent.
    """
    for length in range(1, min(len(u), len(v)) + 1):
        if u[-length:] == v[:length]:
            return True
    return False


def _search_prunable(table: MergeTable, new: int, last: int) -> bool:
    """Whether ``<.., last, new>`` may be dropped in favor of its swapped form.

    True only when the two merges provably commute (then exactly the
    (length, lex)-canonical order of the pair is kept).
    """
    nl, nr = table.parts(new)
    if nl == last or nr == last:
        return False  # dependent continuation: the swap is not even valid
    y_new = table.yield_of(new)
    y_last = table.yield_of(last)
    if _yields_overlap(y_last, y_new) or _yields_overlap(y_new, y_last):
        return False  # order-sensitive: both orders must be explored
    if len(y_new) > len(y_last):
        return False
    if len(y_new) < len(y_last):
        return True
    return y_new < y_last


@dataclass
class SearchReport:
    best_sequence: list[int]
    best_utility: int
    states_visited: int
    pruned: int
    table: MergeTable
    optima: list[list[int]] = field(default_factory=list)

    def best_stream(self, text: str) -> TokenStream:
        return apply_sequence(self.table, lift_string(self.table, text), self.best_sequence)


def _apply_pair(tokens: tuple[int, ...], left: int, right: int, merge: int) -> tuple[int, ...]:
    out = []
    i = 0
    n = len(tokens)
    last = n - 1
    while i < n:
        if i < last and tokens[i] == left and tokens[i + 1] == right:
            out.append(merge)
            i += 2
        else:
            out.append(tokens[i])
            i += 1
    return tuple(out)


def train_exact(
    text: str,
    merge_count: int,
    *,
    pruned: bool = True,
    memo: bool = False,
    table: MergeTable | None = None,
    keep_optima: int = 0,
) -> SearchReport:
    """Search all valid merge sequences of length <= ``merge_count`` for maximal utility.

    ``pruned=False`` explores the full tree (brute force); both modes find the
    same best utility.  ``memo=True`` skips states whose stream was already
    reached at the same or smaller depth, which changes visit counts but not
    the optimum — left off by default so brute/pruned visit counts are
    directly comparable.  ``keep_optima`` retains up to that many optimal
    sequences in discovery order.

    Returns the first optimal sequence found in DFS order; the utility is the
    contract, the sequence identity is not.
    """
    if merge_count < 0:
        raise ValueError("merge_count must be >= 0")
    if table is None:
        table = MergeTable(set(text)) if text else None
    if table is None:
        raise ValueError("cannot infer an alphabet from empty text; pass a table")
    intern = table.intern
    start = tuple(lift_string(table, text).tokens)
    n = len(start)

    best_seq: tuple[int, ...] = ()
    best_len = n
    optima: list[tuple[int, ...]] = [()] if keep_optima else []
    visited = 0
    pruned_count = 0
    seen_depth: dict[tuple[int, ...], int] = {start: 0} if memo else {}

    # stack entries: (tokens, sequence, last merge or -1)
    stack: list[tuple[tuple[int, ...], tuple[int, ...], int]] = [(start, (), -1)]
    while stack:
        tokens, seq, last = stack.pop()
        visited += 1
        depth = len(seq)
        if depth == merge_count:
            continue
        children = []
        seen_pairs: dict[tuple[int, int], None] = {}
        for i in range(len(tokens) - 1):
            seen_pairs.setdefault((tokens[i], tokens[i + 1]), None)
        for left, right in seen_pairs:
            merge = intern(left, right)
            if pruned and last >= 0 and _search_prunable(table, merge, last):
                pruned_count += 1
                continue
            child = _apply_pair(tokens, left, right, merge)
            child_seq = seq + (merge,)
            if len(child) < best_len:
                best_len = len(child)
                best_seq = child_seq
                if keep_optima:
                    optima = [child_seq]
            elif keep_optima and len(child) == best_len and len(optima) < keep_optima:
                optima.append(child_seq)
            if memo:
                prior = seen_depth.get(child)
                if prior is not None and prior <= len(child_seq):
                    continue
                seen_depth[child] = len(child_seq)
            children.append((child, child_seq, merge))
        # LIFO stack: push reversed so first-occurrence pairs are explored first
        stack.extend(reversed(children))

    report = SearchReport(
        best_sequence=list(best_seq),
        best_utility=n - best_len,
        states_visited=visited,
        pruned=pruned_count,
        table=table,
        optima=[list(o) for o in optima],
    )
    return report


def is_safe_permutation(table: MergeTable, seq: list[int], perm: list[int]) -> bool:
    """Whether applying ``perm`` to ``seq`` decomposes into safe transpositions.

    ``perm`` maps positions: the permuted sequence is ``[seq[p] for p in
    perm]``.  The permutation is decomposed into transpositions cycle by
    cycle; each transposition (i, j), i < j, is safe on the current sequence
    iff no earlier merge (position < j) conflicts with the merge at j and no
    later merge (position > i) conflicts with the merge at i.  The permuted
    sequence must also remain valid.
    """
    n = len(seq)
    if sorted(perm) != list(range(n)):
        raise ValueError("perm must be a permutation of 0..len(seq)-1")
    work = list(seq)
    target = [seq[p] for p in perm]
    # selection-style decomposition: put the right element at each slot in turn
    for i in range(n):
        if work[i] == target[i]:
            continue
        # bring the wanted merge here from its nearest later slot
        j = min(k for k in range(i + 1, n) if work[k] == target[i])
        if not _transposition_safe(table, work, i, j):
            return False
        work[i], work[j] = work[j], work[i]
        if not is_valid_sequence(table, work):
            return False
    return work == target


def _transposition_safe(table: MergeTable, seq: list[int], i: int, j: int) -> bool:
    if i > j:
        i, j = j, i
    for k in range(j):
        if conflicts(table, seq[k], seq[j]):
            return False
    for k in range(i + 1, len(seq)):
        if conflicts(table, seq[k], seq[i]):
            return False
    return True


class EquivalenceCapError(ValueError):
    """sequences_equivalent was asked for sequences beyond its length cap."""


def sequences_equivalent(
    table: MergeTable,
    a: list[int],
    b: list[int],
    max_len: int = 8,
    spot_check: int = 0,
    rng: random.Random | None = None,
) -> bool:
    """True iff some chain of safe transpositions maps ``a`` to ``b``.

    Searches the reachable orderings of ``a`` (every safe permutation is a
    chain of safe transpositions and vice versa), which is feasible at the
    default cap.  With ``spot_check`` > 0 a positive answer is double-checked
    by applying both sequences to that many random strings; disagreement
    means the safety characterization failed and raises RuntimeError.
    """
    if len(a) != len(b):
        return False
    if len(a) > max_len:
        raise EquivalenceCapError(f"sequences longer than cap {max_len}")
    if not (is_valid_sequence(table, a) and is_valid_sequence(table, b)):
        return False
    target = tuple(b)
    start = tuple(a)
    found = False
    if start == target:
        found = True
    else:
        seen = {start}
        frontier = [start]
        while frontier and not found:
            nxt: list[tuple[int, ...]] = []
            for cur in frontier:
                lst = list(cur)
                for i, j in itertools.combinations(range(len(lst)), 2):
                    if lst[i] == lst[j]:
                        continue
                    if not _transposition_safe(table, lst, i, j):
                        continue
                    lst[i], lst[j] = lst[j], lst[i]
                    cand = tuple(lst)
                    lst[i], lst[j] = lst[j], lst[i]
                    if cand in seen:
                        continue
                    if not is_valid_sequence(table, cand):
                        continue
                    if cand == target:
                        found = True
                        break
                    seen.add(cand)
                    nxt.append(cand)
                if found:
                    break
            frontier = nxt
    if found and spot_check:
        rng = rng or random.Random(0x5AFE)
        alphabet = table.alphabet
        for _ in range(spot_check):
            length = rng.randrange(0, 16)
            text = "".join(rng.choice(alphabet) for _ in range(length))
            sa = apply_sequence(table, lift_string(table, text), a)
            sb = apply_sequence(table, lift_string(table, text), b)
            if sa.tokens != sb.tokens:
                raise RuntimeError(
                    f"equivalent sequences disagree on {text!r}: {sa.tokens} vs {sb.tokens}"
                )
    return found

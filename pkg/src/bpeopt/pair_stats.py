"""Non-overlapping adjacent-pair counts and deterministic top-pair selection.

Counting is overlap-adjusted: scanning left to right, an occurrence is not
counted when it overlaps the immediately preceding counted occurrence of the
same pair.  This makes the count of a pair equal, exactly, to the number of
replacements applying that merge would perform — "aaa" counts ``(a,a)`` once,
"aaaa" counts it twice.

Tie-breaking for the top pair is (count desc, first counted occurrence asc,
concatenated yield asc).  Nothing about the greedy objective forces a
particular tie order, but trained vocabularies depend on whichever one is
chosen, so treat this order as part of the format.  Within a single stream
two distinct pairs can never share a first occurrence index, so the yield
component is a documented formality that keeps the order total.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

from .core import MergeTable, TokenStream


class PairFreq(NamedTuple):
    count: int
    first_pos: int


class NoPairError(ValueError):
    """top_pair was asked for the best entry of an empty table."""


def pair_frequencies(
    stream: TokenStream,
    barred: frozenset[int] | set[int] = frozenset(),
) -> dict[tuple[int, int], PairFreq]:
    """Overlap-adjusted pair counts with the index of the first counted occurrence.

    ``first_pos`` is the stream index of the pair's first *counted*
    occurrence; for equal-member pairs on runs this can differ from the first
    raw occurrence, which keeps the scan single-pass.  Pairs with a member in
    ``barred`` are not counted at all (word-boundary mode).  Streams shorter
    than two tokens produce an empty table.
    """
    toks = stream.tokens
    counts: dict[tuple[int, int], list[int]] = {}
    prev: tuple[int, int] | None = None
    if barred:
        barred = set(barred)
        for i in range(len(toks) - 1):
            a = toks[i]
            b = toks[i + 1]
            if a in barred or b in barred:
                prev = None
                continue
            pair = (a, b)
            if pair != prev:
                entry = counts.get(pair)
                if entry is None:
                    counts[pair] = [1, i]
                else:
                    entry[0] += 1
                prev = pair
            else:
                prev = None
    else:
        i = 0
        for pair in zip(toks, toks[1:]):
            if pair != prev:
                entry = counts.get(pair)
                if entry is None:
                    counts[pair] = [1, i]
                else:
                    entry[0] += 1
                prev = pair
            else:
                prev = None
            i += 1
    return {p: PairFreq(c, f) for p, (c, f) in counts.items()}


def raw_pair_frequencies(stream: TokenStream) -> dict[tuple[int, int], PairFreq]:
    """Overlapping (raw bigram) counts, for comparison against older trainers.

    Never used by the trainers in this package; the overlap-adjusted counts
    are the ones consistent with replacement semantics.
    """
    toks = stream.tokens
    counts: dict[tuple[int, int], list[int]] = {}
    for i in range(len(toks) - 1):
        pair = (toks[i], toks[i + 1])
        entry = counts.get(pair)
        if entry is None:
            counts[pair] = [1, i]
        else:
            entry[0] += 1
    return {p: PairFreq(c, f) for p, (c, f) in counts.items()}


def top_pair(
    stats: dict[tuple[int, int], PairFreq],
    table: MergeTable,
) -> tuple[int, int]:
    """The pair maximizing (count, -first_pos, -yield) — fully deterministic.

    Independent of dict iteration order; raises :class:`NoPairError` on an
    empty table.
    """
    if not stats:
        raise NoPairError("no pairs present")
    best_pair: tuple[int, int] | None = None
    best_count = -1
    best_first = -1
    for pair, (count, first) in stats.items():
        if best_pair is None or count > best_count or (count == best_count and first < best_first):
            best_pair, best_count, best_first = pair, count, first
        elif count == best_count and first == best_first and pair != best_pair:
            # unreachable for well-formed tables (distinct pairs cannot share a
            # first occurrence) but keeps the documented order total
            if _pair_yield(table, pair) < _pair_yield(table, best_pair):
                best_pair = pair
    return best_pair


def sorted_pairs(
    stats: dict[tuple[int, int], PairFreq],
    table: MergeTable,
) -> list[tuple[tuple[int, int], PairFreq]]:
    """Entries sorted by the top_pair ordering (best first)."""
    return sorted(
        stats.items(),
        key=lambda kv: (-kv[1].count, kv[1].first_pos, _pair_yield(table, kv[0])),
    )


def _pair_yield(table: MergeTable, pair: Iterable[int]) -> str:
    a, b = pair
    return table.yield_of(a) + table.yield_of(b)

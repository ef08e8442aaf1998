"""Executable verification of the optimization-theoretic properties.

This module turns the claimed properties of compression utility —
monotonicity, sequence submodularity (on valid sequences), hierarchical
sequence submodularity, the average-gain lemma, and the curvature-based
approximation bound for the greedy trainer — into checkable instances over
exhaustively enumerated small strings.

Strings are enumerated up to alphabet renaming (canonical form: symbols in
first-appearance order); utility, gains, curvature and ratios are all
invariant under renaming, and the reduction cuts the grid size by orders of
magnitude.  Candidate prefix sequences are enumerated as *effective*
sequences (every merge makes at least one replacement): any valid sequence's
stream is reproduced by its effective subsequence, so restricting to them
loses no reachable stream, no utility value, and no curvature value, while
keeping every denominator positive.
"""

from __future__ import annotations

import math
import random
import zlib
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .core import (
    MergeTable,
    apply_sequence,
    is_valid_sequence,
    lift_string,
)
from .exact import _apply_pair
from .greedy import TrainResult, train_greedy_slow


class _Skipped:
    """Marker for property-check instances whose preconditions fail."""

    def __repr__(self) -> str:  # pragma: no cover
        return "SKIPPED"


SKIPPED = _Skipped()


@dataclass
class PropertyViolation:
    """A strict failure of a claimed inequality, with the instance that broke it."""

    prop: str
    text: str
    detail: dict
    lhs: int
    rhs: int


@dataclass
class GridSpec:
    alphabet_size: int
    max_len: int
    max_merges: int
    state_budget: int = 5_000_000

    def as_dict(self) -> dict:
        return {
            "alphabet_size": self.alphabet_size,
            "max_len": self.max_len,
            "max_merges": self.max_merges,
        }


@dataclass
class CurvatureReport:
    sigma: float
    sigma_prime: float | None
    bound: float
    grid: GridSpec
    witness: dict
    partial: bool = False


_SYMBOLS = "abcdefghij"


def grid_strings(alphabet_size: int, max_len: int) -> Iterator[str]:
    """Canonical representatives (first-appearance symbol order) of all strings.

    Every string over an alphabet of the given size is a renaming of exactly
    one emitted string.
    """
    if alphabet_size > len(_SYMBOLS):
        raise ValueError("alphabet_size too large")

    def rec(prefix: list[str], used: int):
        if prefix:
            yield "".join(prefix)
        if len(prefix) == max_len:
            return
        for s in range(min(used + 1, alphabet_size)):
            prefix.append(_SYMBOLS[s])
            yield from rec(prefix, max(used, s + 1))
            prefix.pop()

    yield from rec([], 0)


# ---------------------------------------------------------------------------
# effective-sequence enumeration
# ---------------------------------------------------------------------------


@dataclass
class EffectiveState:
    """One node of the all-effective valid-sequence tree."""

    sequence: tuple[int, ...]
    stream: tuple[int, ...]
    reps: tuple[int, ...]  # replacements made by each step of ``sequence``
    parent: int  # index into the enumeration, -1 for the root


def enumerate_effective_states(
    table: MergeTable,
    tokens: tuple[int, ...],
    max_depth: int,
) -> list[EffectiveState]:
    """All valid sequences of length <= max_depth whose merges all replace something.

    Walks the same tree as the brute-force exact search, in the same order.
    """
    states = [EffectiveState((), tokens, (), -1)]
    stack: list[int] = [0]
    intern = table.intern
    while stack:
        idx = stack.pop()
        state = states[idx]
        if len(state.sequence) == max_depth:
            continue
        toks = state.stream
        pairs: dict[tuple[int, int], None] = {}
        for i in range(len(toks) - 1):
            pairs.setdefault((toks[i], toks[i + 1]), None)
        children = []
        for left, right in pairs:
            merge = intern(left, right)
            child = _apply_pair(toks, left, right, merge)
            states.append(
                EffectiveState(
                    state.sequence + (merge,),
                    child,
                    state.reps + (len(toks) - len(child),),
                    idx,
                )
            )
            children.append(len(states) - 1)
        stack.extend(reversed(children))
    return states


def _stream_pair_counts(tokens: tuple[int, ...]) -> dict[tuple[int, int], int]:
    """Overlap-adjusted pair counts of a raw token tuple."""
    counts: dict[tuple[int, int], int] = {}
    prev = None
    for i in range(len(tokens) - 1):
        pair = (tokens[i], tokens[i + 1])
        if pair != prev:
            counts[pair] = counts.get(pair, 0) + 1
            prev = pair
        else:
            prev = None
    return counts


# ---------------------------------------------------------------------------
# property checks (public instance-level operations)
# ---------------------------------------------------------------------------


def check_submodularity(
    table: MergeTable,
    text: str,
    prefix: Sequence[int],
    full: Sequence[int],
    nu: int,
) -> PropertyViolation | None | _Skipped:
    """Gain of ``nu`` after ``prefix`` must be at least its gain after ``full``.

    Preconditions: ``prefix`` is a prefix of ``full`` and both extensions
    ``prefix + [nu]`` and ``full + [nu]`` are valid.  Instances violating the
    preconditions return :data:`SKIPPED` — the validity restriction is the
    point: without it the inequality genuinely fails.
    """
    prefix = list(prefix)
    full = list(full)
    if full[: len(prefix)] != prefix:
        return SKIPPED
    if not is_valid_sequence(table, full + [nu]) or not is_valid_sequence(table, prefix + [nu]):
        return SKIPPED
    lifted = lift_string(table, text)
    s_prefix = apply_sequence(table, lifted, prefix)
    s_full = apply_sequence(table, lifted, full)
    gain_prefix = s_prefix.utility
    gain_full = s_full.utility
    g1 = apply_sequence(table, s_prefix, [nu], strict=False).utility - gain_prefix
    g2 = apply_sequence(table, s_full, [nu], strict=False).utility - gain_full
    if g1 >= g2:
        return None
    return PropertyViolation(
        "submodularity",
        text,
        {
            "prefix": [table.yield_of(m) for m in prefix],
            "full": [table.yield_of(m) for m in full],
            "nu": table.yield_of(nu),
        },
        g1,
        g2,
    )


def is_submerge(table: MergeTable, inner: int, outer: int) -> bool:
    """Strict submerge partial order: ``inner`` is a proper descendant of ``outer``."""
    if table.is_trivial(outer):
        return False
    left, right = table.parts(outer)
    if inner in (left, right):
        return True
    return (not table.is_trivial(left) and is_submerge(table, inner, left)) or (
        not table.is_trivial(right) and is_submerge(table, inner, right)
    )


def check_hierarchical(
    table: MergeTable,
    text: str,
    m1: Sequence[int],
    nu1: int,
    m2: Sequence[int],
    nu2: int,
) -> PropertyViolation | None | _Skipped:
    """Gain of a submerge earlier in a valid sequence bounds its supermerge later.

    For a valid sequence of the form ``m1 + [nu1] + m2 + [nu2]`` with ``nu1``
    a strict submerge of ``nu2``, the gain of ``nu1`` after ``m1`` must be at
    least the gain of ``nu2`` after everything before it.
    """
    m1 = list(m1)
    m2 = list(m2)
    whole = m1 + [nu1] + m2 + [nu2]
    if not is_submerge(table, nu1, nu2):
        return SKIPPED
    if not is_valid_sequence(table, whole):
        return SKIPPED
    lifted = lift_string(table, text)
    s1 = apply_sequence(table, lifted, m1)
    g1 = apply_sequence(table, s1, [nu1], strict=False).utility - s1.utility
    s2 = apply_sequence(table, lifted, whole[:-1])
    g2 = apply_sequence(table, s2, [nu2], strict=False).utility - s2.utility
    if g1 >= g2:
        return None
    return PropertyViolation(
        "hierarchical",
        text,
        {
            "m1": [table.yield_of(m) for m in m1],
            "nu1": table.yield_of(nu1),
            "m2": [table.yield_of(m) for m in m2],
            "nu2": table.yield_of(nu2),
        },
        g1,
        g2,
    )


def check_avg_gain_lemma(
    table: MergeTable,
    text: str,
    m_prime: Sequence[int],
    m: Sequence[int],
) -> PropertyViolation | None | _Skipped:
    """Some merge of ``m`` must achieve at least the average gain of ``m`` after ``m_prime``.

    Compares integers cross-multiplied (best single gain times ``len(m)``
    against the total gain) to avoid rationals.  ``len(m) == 0`` is skipped.
    """
    m_prime = list(m_prime)
    m = list(m)
    if not m:
        return SKIPPED
    if not is_valid_sequence(table, m_prime) or not is_valid_sequence(table, m):
        return SKIPPED
    lifted = lift_string(table, text)
    base = apply_sequence(table, lifted, m_prime)
    total_gain = apply_sequence(table, base, m, strict=False).utility - base.utility
    best = None
    for nu in m:
        if not is_valid_sequence(table, m_prime + [nu]):
            continue
        g = apply_sequence(table, base, [nu], strict=False).utility - base.utility
        if best is None or g > best:
            best = g
    if best is not None and best * len(m) >= total_gain:
        return None
    return PropertyViolation(
        "avg_gain",
        text,
        {
            "m_prime": [table.yield_of(x) for x in m_prime],
            "m": [table.yield_of(x) for x in m],
        },
        (best if best is not None else 0) * len(m),
        total_gain,
    )


# ---------------------------------------------------------------------------
# curvature and the approximation bound
# ---------------------------------------------------------------------------


def bound_from_sigma(sigma: float) -> float:
    """The greedy guarantee (1/sigma)(1 - e^-sigma); strictly decreasing in sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return (1.0 - math.exp(-sigma)) / sigma


@dataclass
class _InstanceAnalysis:
    """Everything the audit needs about one (string, merge budget) instance."""

    text: str
    merges: int
    kappa_opt: int
    kappa_greedy: int
    sigma: float | None  # None when kappa_opt == 0
    sigma_witness: dict | None
    sigma_prime: float | None
    optima_count: int


_OPTIMA_CAP = 8


def _analyze_string(
    text: str,
    max_merges: int,
    greedy_result: TrainResult | None = None,
) -> tuple[list[_InstanceAnalysis], list[EffectiveState], MergeTable]:
    """Per-budget analyses for one string, sharing a single state enumeration."""
    table = MergeTable(set(text))
    if greedy_result is None:
        greedy_result = train_greedy_slow(text, max_merges, table=table)
    tokens = tuple(lift_string(table, text).tokens)
    states = enumerate_effective_states(table, tokens, max_merges)
    n = len(text)

    greedy_prefix_kappa = [0]
    for step in greedy_result.per_step:
        greedy_prefix_kappa.append(greedy_prefix_kappa[-1] + step.gain)

    out = []
    apply_memo: dict[tuple[tuple[int, ...], int], int] = {}
    for m_budget in range(1, max_merges + 1):
        usable = [s for s in states if 0 < len(s.sequence) <= m_budget]
        kappa_opt = max((n - len(s.stream) for s in usable), default=0)
        optima = [s for s in usable if n - len(s.stream) == kappa_opt][:_OPTIMA_CAP]
        kappa_greedy = greedy_prefix_kappa[min(m_budget, len(greedy_result.per_step))]
        if kappa_opt == 0:
            out.append(_InstanceAnalysis(text, m_budget, 0, kappa_greedy, None, None, None, 0))
            continue

        sigma = None
        witness = None
        for opt_idx, opt in enumerate(optima):
            for s in usable:
                key = (s.stream, id(opt))
                val = apply_memo.get(key)
                if val is None:
                    toks = s.stream
                    for merge in opt.sequence:
                        left, right = table.parts(merge)
                        toks = _apply_pair(toks, left, right, merge)
                    val = n - len(toks)
                    apply_memo[key] = val
                kappa_prefix = n - len(s.stream)
                value = 1.0 - (val - kappa_opt) / kappa_prefix
                if sigma is None or value > sigma:
                    sigma = value
                    witness = {
                        "text": text,
                        "prefix": [table.yield_of(m) for m in s.sequence],
                        "optimum": [table.yield_of(m) for m in opt.sequence],
                    }

        # greedy-prefix-only variant: prefix the length M-1 greedy sequence
        sigma_prime = None
        g_prefix_len = min(m_budget - 1, len(greedy_result.sequence))
        g_prefix_kappa = greedy_prefix_kappa[g_prefix_len]
        if g_prefix_kappa > 0:
            g_tokens = tokens
            for merge in greedy_result.sequence[:g_prefix_len]:
                left, right = table.parts(merge)
                g_tokens = _apply_pair(g_tokens, left, right, merge)
            for opt in optima:
                toks = g_tokens
                for merge in opt.sequence:
                    left, right = table.parts(merge)
                    toks = _apply_pair(toks, left, right, merge)
                value = 1.0 - ((n - len(toks)) - kappa_opt) / g_prefix_kappa
                if sigma_prime is None or value > sigma_prime:
                    sigma_prime = value

        out.append(
            _InstanceAnalysis(
                text, m_budget, kappa_opt, kappa_greedy, sigma, witness, sigma_prime, len(optima)
            )
        )
    return out, states, table


def estimate_sigma(grid: GridSpec) -> CurvatureReport:
    """Total backward curvature, maximized over an exhaustively enumerated grid.

    For every canonical string and every optimal sequence (up to eight per
    instance, in search-discovery order), maximizes
    ``1 - (kappa(prefix + opt) - kappa(opt)) / kappa(prefix)`` over valid
    effective prefix sequences of length up to the merge budget.  Exceeding
    the state budget stops enumeration early and flags the report as a lower
    bound.
    """
    best = None
    witness: dict = {}
    spent = 0
    partial = False
    for text in grid_strings(grid.alphabet_size, grid.max_len):
        analyses, states, _ = _analyze_string(text, grid.max_merges)
        spent += len(states)
        for a in analyses:
            if a.sigma is not None and (best is None or a.sigma > best):
                best = a.sigma
                witness = a.sigma_witness or {}
        if spent > grid.state_budget:
            partial = True
            break
    if best is None:
        raise ValueError("grid contains no instance with positive optimal utility")
    return CurvatureReport(
        sigma=best,
        sigma_prime=None,
        bound=bound_from_sigma(best),
        grid=grid,
        witness=witness,
        partial=partial,
    )


def estimate_sigma_prime(text: str, merge_count: int) -> float | None:
    """Curvature restricted to prefixing the greedy sequence; None when undefined.

    Undefined when the greedy prefix of length ``merge_count - 1`` has zero
    utility (the denominator vanishes).
    """
    if merge_count < 1:
        return None
    analyses, _, _ = _analyze_string(text, merge_count)
    return analyses[merge_count - 1].sigma_prime


# ---------------------------------------------------------------------------
# grid audit
# ---------------------------------------------------------------------------


@dataclass
class AuditRow:
    text: str
    merges: int
    kappa_greedy: int
    kappa_opt: int
    ratio: float
    instance_sigma: float
    instance_bound: float
    ok: bool


@dataclass
class GridAuditReport:
    grid: GridSpec
    rows: list[AuditRow]
    violations: list[PropertyViolation]
    sigma: float
    sigma_prime: float | None
    bound: float
    worst_ratio: float
    checks: dict[str, int] = field(default_factory=dict)
    sigma_witness: dict = field(default_factory=dict)
    partial: bool = False

    def as_dict(self) -> dict:
        return {
            "grid": self.grid.as_dict(),
            "instances": len(self.rows),
            "violations": [
                {
                    "property": v.prop,
                    "text": v.text,
                    "detail": v.detail,
                    "lhs": v.lhs,
                    "rhs": v.rhs,
                }
                for v in self.violations
            ],
            "sigma": self.sigma,
            "sigma_prime": self.sigma_prime,
            "bound": self.bound,
            "worst_ratio": self.worst_ratio,
            "failed_rows": [r.__dict__ for r in self.rows if not r.ok],
            "checks": self.checks,
            "sigma_witness": self.sigma_witness,
            "partial": self.partial,
        }


_AVG_GAIN_SAMPLES = 60


def _grid_property_checks(
    table: MergeTable,
    text: str,
    states: list[EffectiveState],
    rng: random.Random,
    counters: dict[str, int],
) -> list[PropertyViolation]:
    """Property violations over one string's effective-state tree.

    Gains are read from cached overlap-adjusted pair counts: the gain of a
    single merge after a sequence equals its pair's count in that sequence's
    stream.  A unit test pins this harness to the instance-level check
    operations.
    """
    violations: list[PropertyViolation] = []
    counts_memo: dict[tuple[int, ...], dict[tuple[int, int], int]] = {}

    def counts_of(stream: tuple[int, ...]) -> dict[tuple[int, int], int]:
        c = counts_memo.get(stream)
        if c is None:
            c = _stream_pair_counts(stream)
            counts_memo[stream] = c
        return c

    ntriv = table.alphabet_size

    def extension_valid(seq: tuple[int, ...], pair: tuple[int, int]) -> bool:
        left, right = pair
        return (left < ntriv or left in seq) and (right < ntriv or right in seq)

    for state in states:
        if not state.sequence:
            continue
        full_counts = counts_of(state.stream)
        # submodularity: compare against every proper ancestor
        anc = state.parent
        while anc >= 0:
            ancestor = states[anc]
            anc_counts = counts_of(ancestor.stream)
            for pair, gain_full in full_counts.items():
                if not extension_valid(state.sequence, pair):
                    continue
                if not extension_valid(ancestor.sequence, pair):
                    counters["submodularity_skipped"] += 1
                    continue
                counters["submodularity"] += 1
                gain_prefix = anc_counts.get(pair, 0)
                if gain_prefix < gain_full:
                    violations.append(
                        PropertyViolation(
                            "submodularity",
                            text,
                            {
                                "prefix": [table.yield_of(m) for m in ancestor.sequence],
                                "full": [table.yield_of(m) for m in state.sequence],
                                "nu": table.yield_of(table.intern(*pair)),
                            },
                            gain_prefix,
                            gain_full,
                        )
                    )
            anc = states[anc].parent
        # hierarchical: last element against each earlier submerge of it
        seq = state.sequence
        nu2 = seq[-1]
        for j in range(len(seq) - 1):
            if not is_submerge(table, seq[j], nu2):
                continue
            counters["hierarchical"] += 1
            if state.reps[j] < state.reps[-1]:
                violations.append(
                    PropertyViolation(
                        "hierarchical",
                        text,
                        {
                            "sequence": [table.yield_of(m) for m in seq],
                            "nu1_index": j,
                        },
                        state.reps[j],
                        state.reps[-1],
                    )
                )
        # monotonicity: every prefix extension gains a non-negative amount
        counters["monotonicity"] += 1
        if any(r < 0 for r in state.reps):
            violations.append(
                PropertyViolation(
                    "monotonicity",
                    text,
                    {"sequence": [table.yield_of(m) for m in seq]},
                    min(state.reps),
                    0,
                )
            )

    # average-gain lemma on sampled (m_prime, m) state pairs
    if len(states) > 1:
        for _ in range(min(_AVG_GAIN_SAMPLES, len(states))):
            sp = states[rng.randrange(len(states))]
            sm = states[rng.randrange(1, len(states))]
            counters["avg_gain"] += 1
            base_counts = counts_of(sp.stream)
            total = 0
            toks = sp.stream
            for merge in sm.sequence:
                left, right = table.parts(merge)
                nxt = _apply_pair(toks, left, right, merge)
                total += len(toks) - len(nxt)
                toks = nxt
            best = None
            for merge in sm.sequence:
                pair = table.parts(merge)
                if not extension_valid(sp.sequence, pair):
                    continue
                g = base_counts.get(pair, 0)
                if best is None or g > best:
                    best = g
            if best is None or best * len(sm.sequence) < total:
                violations.append(
                    PropertyViolation(
                        "avg_gain",
                        text,
                        {
                            "m_prime": [table.yield_of(m) for m in sp.sequence],
                            "m": [table.yield_of(m) for m in sm.sequence],
                        },
                        (best or 0) * len(sm.sequence),
                        total,
                    )
                )
    return violations


def run_grid_audit(
    grid: GridSpec,
    strings: Iterator[str] | None = None,
    check_properties: bool = True,
) -> GridAuditReport:
    """Audit the greedy guarantee and the utility properties over a grid.

    ``strings`` overrides the canonical enumeration (the English mode feeds
    substrings of a text file).  Instances are (string, merge budget) pairs
    for every budget up to the grid's maximum; rows exclude instances with
    zero optimal utility.
    """
    rows: list[AuditRow] = []
    violations: list[PropertyViolation] = []
    counters = {
        "submodularity": 0,
        "submodularity_skipped": 0,
        "hierarchical": 0,
        "monotonicity": 0,
        "avg_gain": 0,
        "strings": 0,
        "states": 0,
    }
    sigma_best: float | None = None
    sigma_witness: dict = {}
    sigma_prime_best: float | None = None
    worst_ratio = 1.0
    spent = 0
    partial = False

    source = strings if strings is not None else grid_strings(grid.alphabet_size, grid.max_len)
    for text in source:
        counters["strings"] += 1
        analyses, states, table = _analyze_string(text, grid.max_merges)
        spent += len(states)
        counters["states"] += len(states)
        if check_properties:
            rng = random.Random(zlib.crc32(text.encode("utf-8")))
            violations.extend(_grid_property_checks(table, text, states, rng, counters))
        for a in analyses:
            if a.sigma is not None and (sigma_best is None or a.sigma > sigma_best):
                sigma_best = a.sigma
                sigma_witness = a.sigma_witness or {}
            if a.sigma_prime is not None and (
                sigma_prime_best is None or a.sigma_prime > sigma_prime_best
            ):
                sigma_prime_best = a.sigma_prime
            if a.kappa_opt == 0:
                continue
            ratio = a.kappa_greedy / a.kappa_opt
            inst_bound = bound_from_sigma(a.sigma)
            ok = ratio >= inst_bound - 1e-9
            worst_ratio = min(worst_ratio, ratio)
            rows.append(
                AuditRow(text, a.merges, a.kappa_greedy, a.kappa_opt, ratio, a.sigma, inst_bound, ok)
            )
        if spent > grid.state_budget:
            partial = True
            break

    if sigma_best is None:
        raise ValueError("grid contains no instance with positive optimal utility")
    return GridAuditReport(
        grid=grid,
        rows=rows,
        violations=violations,
        sigma=sigma_best,
        sigma_prime=sigma_prime_best,
        bound=bound_from_sigma(sigma_best),
        worst_ratio=worst_ratio,
        checks=dict(counters),
        sigma_witness=sigma_witness,
        partial=partial,
    )


def greedy_ratio_audit(grid: GridSpec) -> list[AuditRow]:
    """Per-instance greedy/optimal ratios with their curvature-derived bounds.

    Rows exclude instances whose optimal utility is zero; an ``ok=False`` row
    is a falsification of the approximation guarantee as implemented.
    """
    return run_grid_audit(grid, check_properties=False).rows


def english_substrings(text: str, max_len: int, limit: int = 2000) -> list[str]:
    """Distinct substrings of a natural-language sample, shortest first."""
    seen: dict[str, None] = {}
    words = text.split()
    cleaned = " ".join(words)
    for length in range(1, max_len + 1):
        for start in range(0, max(0, len(cleaned) - length + 1)):
            seen.setdefault(cleaned[start : start + length], None)
            if len(seen) >= limit:
                return list(seen)
    return list(seen)

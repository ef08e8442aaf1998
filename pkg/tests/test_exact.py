"""Exact search, conflicts, safe permutations, and sequence equivalence."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from bpeopt.core import MergeTable, apply_sequence, lift_string, stream_yields
from bpeopt.exact import (
    EquivalenceCapError,
    conflicts,
    is_safe_permutation,
    merge_order,
    sequences_equivalent,
    train_exact,
    _yields_overlap,
)
from bpeopt.greedy import train_greedy_slow


@pytest.fixture
def abcd():
    return MergeTable("abcd")


def merges(table, *shorthands):
    """Intern shorthands: a yield string (left-nested) or an (l, r) handle pair."""
    out = []
    for item in shorthands:
        if isinstance(item, tuple):
            out.append(table.intern(*item))
        else:
            handle = table.symbol_id(item[0])
            for ch in item[1:]:
                handle = table.intern(handle, table.symbol_id(ch))
            out.append(handle)
    return out


class TestConflicts:
    def test_boundary_symbol_shared(self, abcd):
        ab, ba = merges(abcd, "ab", "ba")
        assert conflicts(abcd, ab, ba) is True

    def test_disjoint_symbols(self, abcd):
        ab, dd = merges(abcd, "ab", "dd")
        assert conflicts(abcd, ab, dd) is False

    def test_direction_matters(self, abcd):
        ca, ab = merges(abcd, "ca", "ab")
        assert conflicts(abcd, ca, ab) is True
        assert conflicts(abcd, ab, ca) is False

    def test_trivial_rejected(self, abcd):
        ab = merges(abcd, "ab")[0]
        with pytest.raises(ValueError):
            conflicts(abcd, ab, 0)


class TestMergeOrder:
    def test_equal_length_lex(self, abcd):
        dd, ca = merges(abcd, "dd", "ca")
        assert merge_order(abcd, dd, ca) is True

    def test_shorter_never_above(self, abcd):
        ab, abc = merges(abcd, "ab", "abc")
        assert merge_order(abcd, ab, abc) is False

    def test_conflict_blocks(self, abcd):
        ab, ba = merges(abcd, "ab", "ba")
        assert merge_order(abcd, ab, ba) is False

    def test_overlap_detection(self):
        assert _yields_overlap("xab", "abz") is True
        assert _yields_overlap("abz", "xab") is False
        assert _yields_overlap("ab", "cd") is False
        assert _yields_overlap("aa", "aa") is True


class TestTrainExact:
    def test_beats_greedy_on_suboptimality_instance(self):
        rep = train_exact("abaabbaa", 2)
        assert rep.best_utility == 4
        greedy = train_greedy_slow("abaabbaa", 2)
        assert greedy.utility == 3

    def test_unary_run(self):
        assert train_exact("aaaa", 1).best_utility == 2

    def test_zero_merges(self):
        rep = train_exact("abab", 0)
        assert rep.best_utility == 0 and rep.best_sequence == []

    def test_hierarchical_continuations_survive_pruning(self):
        # the optimum chains a merge into its successor; pruning must keep it
        assert train_exact("aaa", 2, pruned=True).best_utility == 2
        assert train_exact("aaaaaaaa", 3, pruned=True).best_utility == 7

    def test_conflicting_pair_orders_both_searched(self):
        # both orders of {[b,a],[b,b]} matter here; only one is optimal
        rep = train_exact("babbbbba", 2, pruned=True)
        assert rep.best_utility == train_exact("babbbbba", 2, pruned=False).best_utility == 4

    def test_memo_preserves_utility(self):
        plain = train_exact("abcabcabc", 3, pruned=False)
        memo = train_exact("abcabcabc", 3, pruned=False, memo=True)
        assert plain.best_utility == memo.best_utility
        assert memo.states_visited <= plain.states_visited

    def test_optima_collection(self):
        rep = train_exact("abab", 1, keep_optima=8)
        assert rep.optima, "at least one optimal sequence tracked"
        for seq in rep.optima:
            stream = apply_sequence(rep.table, lift_string(rep.table, "abab"), seq)
            assert 4 - len(stream) == rep.best_utility

    @given(st.text(alphabet="abc", min_size=1, max_size=10), st.integers(0, 3))
    @settings(max_examples=200, deadline=None)
    def test_pruned_matches_brute_force(self, text, merges_count):
        pruned = train_exact(text, merges_count, pruned=True)
        brute = train_exact(text, merges_count, pruned=False)
        assert pruned.best_utility == brute.best_utility
        assert pruned.states_visited <= brute.states_visited
        greedy = train_greedy_slow(text, merges_count)
        assert pruned.best_utility >= greedy.utility


class TestSafePermutations:
    def test_adjacent_swap_safe(self, abcd):
        seq = merges(abcd, "ab", "dd", "ca")
        assert is_safe_permutation(abcd, seq, [0, 2, 1]) is True

    def test_cross_conflict_unsafe(self, abcd):
        seq = merges(abcd, "ab", "dd", "ca")
        assert is_safe_permutation(abcd, seq, [2, 1, 0]) is False

    def test_identity(self, abcd):
        seq = merges(abcd, "ab", "dd", "ca")
        assert is_safe_permutation(abcd, seq, [0, 1, 2]) is True

    def test_malformed_permutation(self, abcd):
        seq = merges(abcd, "ab", "dd", "ca")
        with pytest.raises(ValueError):
            is_safe_permutation(abcd, seq, [0, 0, 1])


class TestEquivalence:
    def test_safe_reordering(self, abcd):
        a = merges(abcd, "ab", "dd", "ca")
        b = [a[0], a[2], a[1]]
        assert sequences_equivalent(abcd, a, b, spot_check=100) is True

    def test_unsafe_reordering_with_witness(self, abcd):
        a = merges(abcd, "ab", "dd", "ca")
        b = [a[2], a[1], a[0]]
        assert sequences_equivalent(abcd, a, b) is False
        x = "ddabcacab"
        sa = apply_sequence(abcd, lift_string(abcd, x), a)
        sb = apply_sequence(abcd, lift_string(abcd, x), b)
        assert stream_yields(abcd, sa) != stream_yields(abcd, sb)

    def test_reflexive(self, abcd):
        a = merges(abcd, "ab", "dd")
        assert sequences_equivalent(abcd, a, list(a), spot_check=50) is True

    def test_length_cap(self, abcd):
        a = merges(abcd, "ab", "dd", "ca", "cb", (0, 0), (1, 1), (2, 2), (3, 3), (0, 1))
        with pytest.raises(EquivalenceCapError):
            sequences_equivalent(abcd, a, a, max_len=8)

    def test_different_lengths_never_equivalent(self, abcd):
        a = merges(abcd, "ab")
        b = merges(abcd, "ab", "dd")
        assert sequences_equivalent(abcd, a, b) is False


def test_equivalence_implies_apply_agreement_with_known_gap():
    """Randomized: positive equivalence answers must agree under application.

    The conflict relation inspects single boundary symbols only, so merges
    whose yields overlap by two or more symbols — e.g. [c,AC] and [AC,b],
    which compete for the same AC token — can be reordered "safely" by the
    definition while producing different bracketings.  Discovered instances
    are printed as flags and must all be of that known shape; a disagreement
    between merges with no multi-symbol overlap would be an implementation
    bug and fails the test.
    """
    from bpeopt.core import is_valid_sequence

    rng = random.Random(42)
    flagged = []
    checked = 0
    for _ in range(300):
        table = MergeTable("abc")
        handles = list(range(table.alphabet_size))
        seq = []
        for _ in range(rng.randrange(2, 5)):
            left = rng.choice(handles)
            right = rng.choice(handles)
            m = table.intern(left, right)
            handles.append(m)
            seq.append(m)
        perm = list(range(len(seq)))
        rng.shuffle(perm)
        other = [seq[p] for p in perm]
        if not is_valid_sequence(table, seq) or not is_valid_sequence(table, other):
            continue
        checked += 1
        try:
            sequences_equivalent(table, seq, other, spot_check=100)
        except RuntimeError as err:
            flagged.append((table, seq, other, str(err)))
    assert checked > 50
    unexplained = []
    for table, seq, other, err in flagged:
        gap = any(
            not conflicts(table, p, q)
            and not conflicts(table, q, p)
            and (_yields_overlap(table.yield_of(p), table.yield_of(q))
                 or _yields_overlap(table.yield_of(q), table.yield_of(p)))
            for p in set(seq)
            for q in set(seq)
            if p != q
        )
        yields = [table.yield_of(m) for m in seq]
        print(f"FLAG single-symbol conflict misses reorder sensitivity: {yields}: {err}")
        if not gap:
            unexplained.append((yields, err))
    assert not unexplained, f"disagreements beyond the known overlap gap: {unexplained}"

"""Corpus ingestion, weighted training, and the non-iterative trainer."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from bpeopt.core import MergeTable, apply_sequence, is_valid_sequence, lift_string
from bpeopt.corpus import (
    canonical_text,
    ingest,
    train_greedy_weighted,
    train_non_iterative,
    tree_signature,
)
from bpeopt.exact import train_exact
from bpeopt.greedy import train_greedy_slow


class TestIngest:
    def test_word_counts(self):
        c = ingest("not that they watch the watch", "words")
        assert c.words == {"not": 1, "that": 1, "they": 1, "watch": 2, "the": 1}
        assert c.total_tokens == 6

    def test_repeated_word(self):
        assert ingest("a a a", "words").words == {"a": 3}

    def test_raw_single_pseudo_word(self):
        c = ingest("anything at all", "raw")
        assert c.words == {"anything at all": 1}
        assert c.total_tokens == 1

    def test_empty(self):
        assert ingest("", "words").words == {}
        assert ingest("", "raw").words == {}

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            ingest("x", "sentences")

    def test_whitespace_runs_collapse(self):
        c = ingest("a  b\t\nc", "words")
        assert list(c.words) == ["a", "b", "c"]


class TestWeightedTraining:
    def test_boundary_never_merged_but_raw_mode_merges_it(self):
        text = "not that they watch the watch"
        weighted = train_greedy_weighted(ingest(text, "words"), 3)
        for merge in weighted.sequence:
            assert " " not in weighted.table.yield_of(merge)
        raw = train_greedy_slow(text, 1)
        assert raw.table.yield_of(raw.sequence[0]) == " t"

    def test_trivial_weighted_count(self):
        c = ingest("ab ab ab", "words")
        res = train_greedy_weighted(c, 1)
        assert res.table.yield_of(res.sequence[0]) == "ab"
        assert res.per_step[0].gain == 3

    def test_stream_tokenizes_canonical_expansion(self):
        c = ingest("ab ab cd", "words")
        res = train_greedy_weighted(c, 2)
        assert res.stream.source_len == len(canonical_text(c))
        assert res.utility == res.stream.utility

    @given(
        st.lists(st.text(alphabet="abc", min_size=1, max_size=5), min_size=1, max_size=7),
        st.integers(0, 5),
    )
    @settings(max_examples=150, deadline=None)
    def test_equals_boundary_barred_full_text_training(self, words, merges):
        text = " ".join(words)
        weighted = train_greedy_weighted(ingest(text, "words"), merges)
        barred = train_greedy_slow(text, merges, barred_symbols=" ")
        assert [weighted.table.yield_of(m) for m in weighted.sequence] == [
            barred.table.yield_of(m) for m in barred.sequence
        ]
        assert weighted.utility == barred.utility


class TestNonIterative:
    def test_window_candidates(self):
        table, seq = train_non_iterative(ingest("abcabcd", "raw"), 8, max_width=3)
        yields = [table.yield_of(m) for m in seq]
        assert {"ab", "bc", "abc"} <= set(yields)
        # both bracketings of abc are collected
        signatures = {tree_signature(table, m) for m in seq}
        assert "[[ab]c]" in signatures and "[a[bc]]" in signatures

    def test_zero_budget(self):
        table, seq = train_non_iterative(ingest("abab", "raw"), 0)
        assert seq == []

    def test_width_floor(self):
        with pytest.raises(ValueError):
            train_non_iterative(ingest("ab", "raw"), 1, max_width=1)

    @given(st.text(alphabet="abc", min_size=2, max_size=30), st.integers(1, 10))
    @settings(max_examples=100, deadline=None)
    def test_vocabulary_is_valid_in_rank_order(self, text, merges):
        table, seq = train_non_iterative(ingest(text, "raw"), merges, max_width=4)
        assert is_valid_sequence(table, seq)

    def test_width_cap_forfeits_over_half_of_exact_utility(self):
        """Cyclic text starves the windowed trainer: its second and third
        picks are dead after the first, while chained merges compound."""
        text = "xyz" * 6 + "x"
        table, vocab = train_non_iterative(ingest(text, "raw"), 3, max_width=2)
        achieved = apply_sequence(table, lift_string(table, text), vocab).utility
        exact = train_exact(text, 3)
        assert exact.best_utility == 15
        assert achieved / exact.best_utility < 0.5


class TestCanonicalText:
    def test_multiplicity_and_order(self):
        c = ingest("b a b", "words")
        assert canonical_text(c) == "b b a"

    def test_roundtrip_word_counts(self):
        text = "x yy x zz yy x"
        c = ingest(text, "words")
        c2 = ingest(canonical_text(c), "words")
        assert c2.words == c.words


class TestCorpusCache:
    def test_tsv_round_trip(self, tmp_path):
        from bpeopt.corpus import load_corpus, save_corpus

        c = ingest("watch the watch that they watch", "words")
        path = tmp_path / "corpus.tsv"
        save_corpus(path, c)
        assert path.read_text() == "watch\t3\nthe\t1\nthat\t1\nthey\t1\n"
        back = load_corpus(path)
        assert back.words == c.words
        assert back.total_tokens == c.total_tokens

    def test_bad_line_reported(self, tmp_path):
        from bpeopt.corpus import load_corpus

        path = tmp_path / "corpus.tsv"
        path.write_text("watch\tnotanumber\n")
        with pytest.raises(ValueError, match="line 1"):
            load_corpus(path)

    def test_raw_mode_not_cacheable(self, tmp_path):
        from bpeopt.corpus import save_corpus

        with pytest.raises(ValueError):
            save_corpus(tmp_path / "c.tsv", ingest("whole text", "raw"))

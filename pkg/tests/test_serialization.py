"""Merge file round-trips and the yield-pair import path."""

import pytest
from hypothesis import given, settings, strategies as st

from bpeopt.core import InvalidSequenceError, MergeTable
from bpeopt.greedy import train_greedy_fast, train_greedy_slow
from bpeopt.serialization import (
    MergeFileError,
    load_merges,
    load_merges_auto,
    load_yield_pairs,
    save_merges,
)


class TestNativeFormat:
    def test_round_trip_identity(self, tmp_path):
        res = train_greedy_slow("picked pickled pickles", 5, barred_symbols=" ")
        path = tmp_path / "m.bpe"
        save_merges(path, res.table, res.sequence)
        table, seq = load_merges(path)
        assert table.alphabet == res.table.alphabet
        assert seq == res.sequence  # handles dense and in order for trained tables
        assert [table.yield_of(m) for m in seq] == [res.table.yield_of(m) for m in res.sequence]

    def test_round_trip_survives_junk_interning(self, tmp_path):
        res = train_greedy_fast("abaabbaa", 2)
        res.table.intern(0, 0)  # pollute the table after training
        path = tmp_path / "m.bpe"
        save_merges(path, res.table, res.sequence)
        _, seq = load_merges(path)
        assert len(seq) == len(res.sequence)

    def test_header_shape(self, tmp_path):
        res = train_greedy_slow("abab", 1)
        path = tmp_path / "m.bpe"
        save_merges(path, res.table, res.sequence)
        lines = path.read_text().splitlines()
        assert lines[0] == "bpe-merges v1"
        assert lines[1] == '["a", "b"]'
        assert lines[2] == "0 1"

    def test_invalid_sequence_refused(self, tmp_path):
        t = MergeTable("ab")
        ab = t.intern(0, 1)
        bad = t.intern(ab, ab)
        with pytest.raises(InvalidSequenceError):
            save_merges(tmp_path / "m.bpe", t, [bad])

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "m.bpe"
        p.write_text("something else\n")
        with pytest.raises(MergeFileError, match="line 1"):
            load_merges(p)

    def test_undefined_id(self, tmp_path):
        p = tmp_path / "m.bpe"
        p.write_text('bpe-merges v1\n["a", "b"]\n0 7\n')
        with pytest.raises(MergeFileError, match="line 3"):
            load_merges(p)

    def test_malformed_line_number_reported(self, tmp_path):
        p = tmp_path / "m.bpe"
        p.write_text('bpe-merges v1\n["a", "b"]\n0 1\n0 one\n')
        with pytest.raises(MergeFileError, match="line 4"):
            load_merges(p)


class TestYieldPairImport:
    def test_left_nested_chain(self, tmp_path):
        p = tmp_path / "y.txt"
        p.write_text("a b\nab c\nabc d\n")
        table, seq = load_yield_pairs(p)
        assert [table.yield_of(m) for m in seq] == ["ab", "abc", "abcd"]
        from bpeopt.corpus import tree_signature

        assert tree_signature(table, seq[-1]) == "[[[ab]c]d]"

    def test_unresolvable_yield(self, tmp_path):
        p = tmp_path / "y.txt"
        p.write_text("a b\nbc d\n")
        with pytest.raises(MergeFileError, match="no valid reconstruction"):
            load_yield_pairs(p)

    def test_most_recent_construction_wins(self, tmp_path):
        # lines 3 and 4 both construct a unit yielding "abc";
        # line 5's reference resolves to the later one
        p = tmp_path / "y.txt"
        p.write_text("a b\nb c\na bc\nab c\nabc d\n")
        table, seq = load_yield_pairs(p, alphabet="abcd")
        from bpeopt.corpus import tree_signature

        assert tree_signature(table, seq[-1]) == "[[[ab]c]d]"

    def test_auto_detection(self, tmp_path):
        res = train_greedy_slow("abab", 1)
        native = tmp_path / "m.bpe"
        save_merges(native, res.table, res.sequence)
        t1, s1 = load_merges_auto(native)
        assert [t1.yield_of(m) for m in s1] == ["ab"]
        yp = tmp_path / "y.txt"
        yp.write_text("a b\n")
        t2, s2 = load_merges_auto(yp)
        assert [t2.yield_of(m) for m in s2] == ["ab"]


@given(st.text(alphabet="abc ", min_size=1, max_size=50), st.integers(0, 8))
@settings(max_examples=80, deadline=None)
def test_round_trip_any_trained_result(tmp_path_factory, text, merges):
    res = train_greedy_fast(text, merges)
    path = tmp_path_factory.mktemp("rt") / "m.bpe"
    save_merges(path, res.table, res.sequence)
    table, seq = load_merges(path)
    assert [table.yield_of(m) for m in seq] == [res.table.yield_of(m) for m in res.sequence]
    assert table.alphabet == res.table.alphabet

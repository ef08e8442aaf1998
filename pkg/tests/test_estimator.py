"""Scikit-learn estimator surface."""

import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from bpeopt.core import UnknownSymbolError
from bpeopt.estimator import BpeTokenizer


class TestFitTransform:
    def test_word_mode_subwords(self):
        tok = BpeTokenizer(merges=5, mode="words").fit("picked pickled pickles")
        assert tok.transform(["picked pickled pickles"]) == [
            ["pick", "ed", " ", "pickl", "ed", " ", "pickl", "e", "s"]
        ]
        assert tok.n_merges_ == 5
        assert tok.training_utility_ == 13

    def test_single_string_input(self):
        tok = BpeTokenizer(merges=2).fit("abab abab")
        assert tok.transform("abab")[0] == ["abab"]

    def test_algorithms_agree(self):
        text = "the cat and the hat and the bat"
        fast = BpeTokenizer(merges=6, algorithm="fast").fit(text)
        slow = BpeTokenizer(merges=6, algorithm="slow").fit(text)
        assert fast.sequence_ == slow.sequence_
        assert fast.transform([text]) == slow.transform([text])

    def test_nonit_algorithm(self):
        tok = BpeTokenizer(merges=4, algorithm="nonit", mode="raw", max_width=3)
        tok.fit("abcabcabc")
        assert tok.n_merges_ == 4
        assert all(isinstance(t, str) for t in tok.transform(["abc"])[0])

    def test_raw_mode_can_merge_whitespace(self):
        tok = BpeTokenizer(merges=1, mode="raw").fit("not that they watch the watch")
        assert tok.table_.yield_of(tok.sequence_[0]) == " t"

    def test_encode_decode_roundtrip(self):
        tok = BpeTokenizer(merges=4).fit("encode decode encode")
        assert tok.decode(tok.encode("decode")) == "decode"

    def test_fit_transform_shortcut(self):
        out = BpeTokenizer(merges=3).fit_transform(["aa bb aa bb"])
        assert isinstance(out, list) and isinstance(out[0], list)


class TestValidation:
    def test_unfitted(self):
        with pytest.raises(NotFittedError):
            BpeTokenizer().transform(["x"])
        with pytest.raises(NotFittedError):
            BpeTokenizer().encode("x")

    def test_bad_inputs(self):
        with pytest.raises(TypeError):
            BpeTokenizer().fit(42)
        with pytest.raises(TypeError):
            BpeTokenizer().fit([1, 2])
        with pytest.raises(ValueError):
            BpeTokenizer(merges=-1).fit("ab")
        with pytest.raises(ValueError):
            BpeTokenizer(algorithm="magic").fit("ab")
        with pytest.raises(ValueError):
            BpeTokenizer(mode="lines").fit("ab")
        with pytest.raises(ValueError):
            BpeTokenizer().fit("")

    def test_transform_outside_alphabet(self):
        tok = BpeTokenizer(merges=1).fit("abab")
        with pytest.raises(UnknownSymbolError):
            tok.transform(["xyz"])


class TestSklearnProtocol:
    def test_get_params_round_trip(self):
        tok = BpeTokenizer(merges=7, algorithm="slow", mode="raw", max_width=4)
        params = tok.get_params()
        assert params == {"merges": 7, "algorithm": "slow", "mode": "raw", "max_width": 4}
        tok2 = BpeTokenizer().set_params(**params)
        assert tok2.get_params() == params

    def test_clone_before_and_after_fit(self):
        tok = BpeTokenizer(merges=3).fit("aa bb cc aa")
        cloned = clone(tok)
        assert cloned.get_params() == tok.get_params()
        assert not hasattr(cloned, "sequence_")

    def test_composes_in_pipeline(self):
        pipe = Pipeline([("bpe", BpeTokenizer(merges=3))])
        out = pipe.fit_transform(["abc abc abc"])
        assert out and isinstance(out[0], list)

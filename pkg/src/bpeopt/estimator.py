"""Scikit-learn style wrapper: fit learns a merge sequence, transform encodes."""

from __future__ import annotations

from typing import Iterable

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .core import apply_sequence, lift_string, stream_yields
from .corpus import ingest, train_non_iterative
from .greedy import train_greedy_fast, train_greedy_slow

_ALGORITHMS = ("fast", "slow", "nonit")
_MODES = ("raw", "words")


def _check_documents(X) -> list[str]:
    """Accept one string or an iterable of strings; reject anything else."""
    if isinstance(X, str):
        return [X]
    if isinstance(X, Iterable):
        docs = list(X)
        if docs and all(isinstance(d, str) for d in docs):
            return docs
    raise TypeError("X must be a string or an iterable of strings")


class BpeTokenizer(TransformerMixin, BaseEstimator):
    """Subword tokenizer trained by merge-count-bounded compression.

    Parameters
    ----------
    merges : int, default=200
        Number of merges to learn (the vocabulary adds this many subwords on
        top of the alphabet).
    algorithm : {"fast", "slow", "nonit"}, default="fast"
        "fast" and "slow" are the two output-equivalent greedy trainers;
        "nonit" is the single-pass windowed approximation.
    mode : {"words", "raw"}, default="words"
        "words" keeps whitespace out of merges so subwords never cross word
        boundaries; "raw" treats whitespace as ordinary symbols.
    max_width : int, default=5
        Widest subword the "nonit" algorithm may collect.

    Attributes
    ----------
    table_ : MergeTable
        Interned merge store; its alphabet is the training text's symbols.
    sequence_ : list of int
        Learned merge handles in application order.
    n_merges_ : int
        Merges actually learned (can fall short on tiny inputs).
    """

    def __init__(self, merges: int = 200, algorithm: str = "fast", mode: str = "words",
                 max_width: int = 5):
        self.merges = merges
        self.algorithm = algorithm
        self.mode = mode
        self.max_width = max_width

    def fit(self, X, y=None):
        docs = _check_documents(X)
        if not isinstance(self.merges, int) or self.merges < 0:
            raise ValueError(f"merges must be a non-negative int, got {self.merges!r}")
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(f"algorithm must be one of {_ALGORITHMS}, got {self.algorithm!r}")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        text = "\n".join(docs)
        if not text:
            raise ValueError("training text is empty")
        barred = sorted({ch for ch in text if ch.isspace()}) if self.mode == "words" else ()
        if self.algorithm == "nonit":
            corpus = ingest(text, "words" if self.mode == "words" else "raw")
            table, sequence = train_non_iterative(corpus, self.merges, self.max_width)
            self.table_, self.sequence_ = table, sequence
            self.training_utility_ = None
        else:
            trainer = train_greedy_fast if self.algorithm == "fast" else train_greedy_slow
            result = trainer(text, self.merges, barred_symbols=barred)
            self.table_, self.sequence_ = result.table, result.sequence
            self.training_utility_ = result.utility
        self.n_merges_ = len(self.sequence_)
        return self

    def transform(self, X) -> list[list[str]]:
        """Subword strings for each document.

        Every symbol of the input must be in the training alphabet.
        """
        self._check_fitted()
        return [
            stream_yields(self.table_, self._encode_stream(doc)) for doc in _check_documents(X)
        ]

    def encode(self, doc: str) -> list[int]:
        """Merge handles for one document."""
        self._check_fitted()
        return self._encode_stream(doc).tokens

    def decode(self, tokens: list[int]) -> str:
        """Concatenated yields; inverse of encode."""
        self._check_fitted()
        return "".join(self.table_.yield_of(t) for t in tokens)

    def _encode_stream(self, doc: str):
        return apply_sequence(self.table_, lift_string(self.table_, doc), self.sequence_)

    def _check_fitted(self):
        if not hasattr(self, "sequence_"):
            raise NotFittedError("BpeTokenizer is not fitted; call fit first")

"""Merge calculus: interned merge trees, token streams, apply, and utility.

A *merge* is either a single alphabet symbol (trivial) or an ordered pair of
previously created merges.  Merges are interned into a :class:`MergeTable`
and referred to by dense integer handles; handles below the alphabet size
denote trivial merges, everything above is composite.  A token stream is a
flat list of handles whose concatenated yields reproduce the source string
exactly, so the compression utility of a merge sequence is recoverable from
the stream length alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class UnknownSymbolError(ValueError):
    """A symbol outside the table's alphabet was used."""


class InvalidHandleError(ValueError):
    """A merge handle does not exist in the table."""


class InvalidSequenceError(ValueError):
    """A merge sequence references constituents that do not precede them."""


class MergeTable:
    """Append-only interned store of merge trees over a fixed alphabet.

    Handles ``0 .. len(alphabet)-1`` are the trivial merges (one per symbol,
    in sorted symbol order).  Composite handles are assigned in interning
    order, so a constituent handle is always smaller than the handle of any
    merge built from it.  Interning the same ``(left, right)`` pair twice
    returns the same handle.

    Instances are safe to share between threads once no more interning
    happens; a training run owns its table while it appends.
    """

    def __init__(self, alphabet: Iterable[str]):
        symbols = sorted(set(alphabet))
        if not symbols:
            raise ValueError("alphabet must be non-empty")
        for s in symbols:
            if len(s) != 1:
                raise ValueError(f"alphabet entries must be single symbols, got {s!r}")
        self._symbols: list[str] = symbols
        self._symbol_ids: dict[str, int] = {s: i for i, s in enumerate(symbols)}
        # parallel arrays over all handles; trivial entries have parts (-1, -1)
        self._left: list[int] = [-1] * len(symbols)
        self._right: list[int] = [-1] * len(symbols)
        self._yields: list[str] = list(symbols)
        self._pair_ids: dict[tuple[int, int], int] = {}

    # -- introspection -------------------------------------------------

    @property
    def alphabet(self) -> list[str]:
        return list(self._symbols)

    @property
    def alphabet_size(self) -> int:
        return len(self._symbols)

    def __len__(self) -> int:
        return len(self._yields)

    def is_trivial(self, merge: int) -> bool:
        self._check(merge)
        return merge < len(self._symbols)

    def parts(self, merge: int) -> tuple[int, int]:
        """Constituents ``(left, right)`` of a composite merge."""
        self._check(merge)
        if merge < len(self._symbols):
            raise InvalidHandleError(f"merge {merge} is trivial and has no parts")
        return self._left[merge], self._right[merge]

    def yield_of(self, merge: int) -> str:
        """Flat symbol string produced by recursively concatenating parts."""
        self._check(merge)
        return self._yields[merge]

    def yield_len(self, merge: int) -> int:
        self._check(merge)
        return len(self._yields[merge])

    def symbol_id(self, symbol: str) -> int:
        try:
            return self._symbol_ids[symbol]
        except KeyError:
            raise UnknownSymbolError(f"symbol {symbol!r} not in alphabet") from None

    def _check(self, merge: int) -> None:
        if not 0 <= merge < len(self._yields):
            raise InvalidHandleError(f"unknown merge handle {merge}")

    # -- construction ---------------------------------------------------

    def intern(self, left: int, right: int) -> int:
        """Intern the composite merge ``[left, right]`` and return its handle.

        Idempotent: the same pair always maps to the same handle, and the
        cached yield is the concatenation of the constituent yields.
        """
        self._check(left)
        self._check(right)
        key = (left, right)
        found = self._pair_ids.get(key)
        if found is not None:
            return found
        handle = len(self._yields)
        self._left.append(left)
        self._right.append(right)
        self._yields.append(self._yields[left] + self._yields[right])
        self._pair_ids[key] = handle
        return handle

    def composites(self) -> list[int]:
        """All composite handles in interning order."""
        return list(range(len(self._symbols), len(self._yields)))


@dataclass
class TokenStream:
    """A partial bracketing of a source string.

    ``tokens`` are merge handles in order; concatenating their yields gives
    back the source string, so ``source_len - len(tokens)`` is the
    compression utility of whatever sequence produced the stream.
    """

    tokens: list[int]
    source_len: int

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def utility(self) -> int:
        return self.source_len - len(self.tokens)


def lift_string(table: MergeTable, text: str) -> TokenStream:
    """Lift a string to the stream of its trivial merges.

    Raises :class:`UnknownSymbolError` if any symbol is outside the table's
    alphabet.  The lifted stream has utility 0.
    """
    ids = table._symbol_ids
    try:
        tokens = [ids[ch] for ch in text]
    except KeyError:
        for ch in text:
            if ch not in ids:
                raise UnknownSymbolError(f"symbol {ch!r} not in alphabet") from None
        raise  # pragma: no cover
    return TokenStream(tokens, len(text))


def apply_merge(table: MergeTable, stream: TokenStream, merge: int) -> tuple[TokenStream, int]:
    """Replace adjacent ``(left, right)`` token pairs by ``merge``, left to right.

    The scan resumes after each replacement, so occurrences never overlap
    ("aaa" admits a single application of ``[a,a]``).  A merge absent from
    the stream is a no-op with zero replacements.

    Returns the new stream and the number of replacements made.
    """
    left, right = table.parts(merge)
    toks = stream.tokens
    out: list[int] = []
    append = out.append
    reps = 0
    i = 0
    n = len(toks)
    last = n - 1
    while i < n:
        if i < last and toks[i] == left and toks[i + 1] == right:
            append(merge)
            reps += 1
            i += 2
        else:
            append(toks[i])
            i += 1
    return TokenStream(out, stream.source_len), reps


def is_valid_sequence(table: MergeTable, seq: Sequence[int]) -> bool:
    """True iff every item is composite and its constituents are trivial or occur earlier."""
    seen: set[int] = set()
    ntriv = table.alphabet_size
    for m in seq:
        table._check(m)
        if m < ntriv:
            return False
        left, right = table._left[m], table._right[m]
        if (left >= ntriv and left not in seen) or (right >= ntriv and right not in seen):
            return False
        seen.add(m)
    return True


def apply_sequence(
    table: MergeTable,
    stream: TokenStream,
    seq: Sequence[int],
    *,
    strict: bool = True,
) -> TokenStream:
    """Fold :func:`apply_merge` over ``seq`` in order.

    With ``strict`` (the default) the sequence must be valid.  ``strict=False``
    applies the merges operationally anyway — items whose constituents never
    appear simply make no replacements — which is what the analysis module
    needs when probing deliberately invalid extensions.
    """
    if strict and not is_valid_sequence(table, seq):
        raise InvalidSequenceError("merge sequence is not valid")
    for m in seq:
        stream, _ = apply_merge(table, stream, m)
    return stream


def stream_yields(table: MergeTable, stream: TokenStream) -> list[str]:
    """Yield string of each token, in order."""
    return [table._yields[t] for t in stream.tokens]


def compression_utility(
    table: MergeTable,
    text: str,
    seq: Sequence[int],
    *,
    strict: bool = True,
) -> int:
    """Source length minus represented length after applying ``seq``."""
    stream = apply_sequence(table, lift_string(table, text), seq, strict=strict)
    return stream.utility


def compression_gain(
    table: MergeTable,
    text: str,
    addition: Sequence[int],
    base: Sequence[int],
    *,
    strict: bool = True,
) -> int:
    """Utility increase from appending ``addition`` after ``base``.

    The single-merge gain is the special case ``len(addition) == 1``.  With
    ``strict``, ``base + addition`` must be a valid sequence.
    """
    combined = list(base) + list(addition)
    if strict and not is_valid_sequence(table, combined):
        raise InvalidSequenceError("base ++ addition is not a valid sequence")
    base_stream = apply_sequence(table, lift_string(table, text), base, strict=strict)
    full_stream = apply_sequence(table, base_stream, addition, strict=False)
    return full_stream.utility - base_stream.utility

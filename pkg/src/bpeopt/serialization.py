"""Merge-table persistence.

Native format (versioned, unambiguous handles)::

    bpe-merges v1
    ["a", "b", "c"]
    0 1
    3 2

Line one is the magic string, line two the alphabet as a JSON string array,
then one composite merge per line as ``left right`` handles.  Handles are
compact: the alphabet occupies 0..K-1 and the k-th merge line is handle K+k,
so constituents always reference earlier lines — ids are unambiguous where
yield pairs are not (two bracketings can share a yield).

A yield-pair import (``yieldL yieldR`` per line, the classic merges.txt
layout) is provided for interoperability: each side is resolved against the
units constructed so far, most recent construction first, which is exactly
the replay order that makes greedy-produced files unambiguous.  Yields
containing the separator are not representable in that format.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from .core import InvalidSequenceError, MergeTable, is_valid_sequence

MAGIC = "bpe-merges v1"


class MergeFileError(ValueError):
    """A merge file failed to parse; the message carries the line number."""


def save_merges(path: str | Path, table: MergeTable, sequence: Sequence[int]) -> None:
    """Write alphabet and sequence in the native format.

    The sequence must be valid; handles are re-indexed densely in sequence
    order so the file is self-contained regardless of what else the table
    holds.
    """
    if not is_valid_sequence(table, sequence):
        raise InvalidSequenceError("refusing to save an invalid merge sequence")
    ntriv = table.alphabet_size
    remap: dict[int, int] = {}
    lines = [MAGIC, json.dumps(table.alphabet, ensure_ascii=False)]
    for i, merge in enumerate(sequence):
        left, right = table.parts(merge)
        lines.append(f"{_remapped(left, remap, ntriv)} {_remapped(right, remap, ntriv)}")
        remap.setdefault(merge, ntriv + i)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _remapped(handle: int, remap: dict[int, int], ntriv: int) -> int:
    if handle < ntriv:
        return handle
    return remap[handle]


def load_merges(path: str | Path) -> tuple[MergeTable, list[int]]:
    """Read the native format back into a fresh table plus the merge sequence."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != MAGIC:
        raise MergeFileError(f"line 1: expected {MAGIC!r}")
    try:
        alphabet = json.loads(lines[1])
    except (IndexError, json.JSONDecodeError) as err:
        raise MergeFileError(f"line 2: bad alphabet JSON ({err})") from None
    if not isinstance(alphabet, list) or not all(isinstance(s, str) for s in alphabet):
        raise MergeFileError("line 2: alphabet must be a JSON array of strings")
    table = MergeTable(alphabet)
    handles = list(range(table.alphabet_size))
    sequence = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 2:
            raise MergeFileError(f"line {lineno}: expected two ids, got {line!r}")
        try:
            left, right = int(fields[0]), int(fields[1])
        except ValueError:
            raise MergeFileError(f"line {lineno}: non-integer id in {line!r}") from None
        if not (0 <= left < len(handles)) or not (0 <= right < len(handles)):
            raise MergeFileError(f"line {lineno}: id out of range in {line!r}")
        merge = table.intern(handles[left], handles[right])
        handles.append(merge)
        sequence.append(merge)
    return table, sequence


def load_yield_pairs(path: str | Path, alphabet: Sequence[str] | None = None) -> tuple[MergeTable, list[int]]:
    """Import a ``yieldL yieldR`` file by replaying construction order.

    Each side must be the yield of a unit already constructed (a symbol or an
    earlier line's result); when several units share a yield the most recent
    wins, matching how a producing trainer would have used its own output.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    pairs: list[tuple[str, str, int]] = []
    symbols = set(alphabet) if alphabet is not None else set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = line.split(" ")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise MergeFileError(f"line {lineno}: expected 'yieldL yieldR', got {line!r}")
        pairs.append((fields[0], fields[1], lineno))
        if alphabet is None:
            symbols.update(fields[0])
            symbols.update(fields[1])
    if not symbols:
        raise MergeFileError("empty yield-pair file and no alphabet given")
    table = MergeTable(symbols)
    by_yield: dict[str, int] = {s: table.symbol_id(s) for s in table.alphabet}
    sequence = []
    for yl, yr, lineno in pairs:
        left = by_yield.get(yl)
        right = by_yield.get(yr)
        if left is None or right is None:
            missing = yl if left is None else yr
            raise MergeFileError(
                f"line {lineno}: no constructed unit yields {missing!r} — no valid reconstruction"
            )
        merge = table.intern(left, right)
        by_yield[yl + yr] = merge
        sequence.append(merge)
    return table, sequence


def load_merges_auto(
    path: str | Path,
    extra_symbols: Sequence[str] = (),
) -> tuple[MergeTable, list[int]]:
    """Native format when the magic line matches, yield-pair import otherwise.

    Yield-pair files carry no alphabet declaration, so ``extra_symbols``
    (typically the symbols of the text about to be encoded) widen the
    inferred alphabet; native files declare theirs and ignore the hint.
    """
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
    if first == MAGIC:
        return load_merges(path)
    symbols = set(extra_symbols)
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        for field in line.split(" "):
            symbols.update(field)
    return load_yield_pairs(path, alphabet=sorted(symbols) if symbols else None)

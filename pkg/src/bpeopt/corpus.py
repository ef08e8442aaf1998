"""Text ingestion, word-boundary training, and the non-iterative trainer.

Word-boundary mode splits text on whitespace runs and aggregates unique word
counts; merges never span (or contain) the boundary symbol, which stays in
the stream as an ordinary unit, so raw-mode comparisons remain meaningful.
Training over unique words with multiplicities is exactly equivalent to
boundary-barred training over the full text — the property suite holds the
two to sequence-level equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    MergeTable,
    TokenStream,
    lift_string,
)
from .exact import _apply_pair
from .greedy import StepRecord, TrainResult


@dataclass
class Corpus:
    """Unique words with counts, in first-appearance order."""

    words: dict[str, int] = field(default_factory=dict)
    total_tokens: int = 0
    mode: str = "word_boundary"
    boundary: str = " "


def ingest(text: str, mode: str = "words") -> Corpus:
    """Build a corpus: ``raw`` keeps the whole text as one pseudo-word.

    ``words`` splits on any unicode whitespace run and aggregates counts.
    Empty input gives an empty corpus in either mode.
    """
    if mode not in ("raw", "words"):
        raise ValueError(f"unknown mode {mode!r}")
    corpus = Corpus(mode="raw" if mode == "raw" else "word_boundary")
    if mode == "raw":
        if text:
            corpus.words[text] = 1
            corpus.total_tokens = 1
        return corpus
    for word in text.split():
        corpus.words[word] = corpus.words.get(word, 0) + 1
        corpus.total_tokens += 1
    return corpus


def save_corpus(path: str | Path, corpus: Corpus) -> None:
    """Cache a word-boundary corpus as TSV lines ``word<TAB>count``."""
    if corpus.mode != "word_boundary":
        raise ValueError("only word_boundary corpora are cacheable as TSV")
    lines = [f"{word}\t{count}" for word, count in corpus.words.items()]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def load_corpus(path: str | Path) -> Corpus:
    """Read a TSV corpus cache back, preserving word order."""
    corpus = Corpus(mode="word_boundary")
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line:
            continue
        try:
            word, count_text = line.split("\t")
            count = int(count_text)
        except ValueError:
            raise ValueError(f"line {lineno}: expected 'word<TAB>count', got {line!r}") from None
        if count <= 0 or not word:
            raise ValueError(f"line {lineno}: bad entry {line!r}")
        corpus.words[word] = corpus.words.get(word, 0) + count
        corpus.total_tokens += count
    return corpus


def canonical_text(corpus: Corpus) -> str:
    """Boundary-joined expansion of the corpus (words with multiplicity, insertion order)."""
    parts: list[str] = []
    for word, count in corpus.words.items():
        parts.extend([word] * count)
    return corpus.boundary.join(parts)


def _corpus_table(corpus: Corpus) -> MergeTable:
    symbols = set(corpus.boundary)
    for word in corpus.words:
        symbols.update(word)
    if not symbols:
        raise ValueError("corpus is empty")
    return MergeTable(symbols)


def train_greedy_weighted(corpus: Corpus, merge_count: int) -> TrainResult:
    """Greedy training over unique words, pair counts weighted by word counts.

    Equivalent to boundary-barred training on the expanded text: insertion
    order of unique words matches the order of their first instances, so the
    weighted tie-break (count, first word, in-word position, yield)
    reproduces the full-text first-occurrence tie-break exactly.  The
    returned stream tokenizes the corpus's canonical expansion.
    """
    if merge_count < 0:
        raise ValueError("merge_count must be >= 0")
    if corpus.mode != "word_boundary":
        raise ValueError("weighted training requires a word_boundary corpus")
    table = _corpus_table(corpus)
    streams: list[tuple[tuple[int, ...], int]] = [
        (tuple(lift_string(table, word).tokens), count) for word, count in corpus.words.items()
    ]
    sequence: list[int] = []
    per_step: list[StepRecord] = []
    for _ in range(merge_count):
        counts: dict[tuple[int, int], list] = {}
        for w_idx, (tokens, weight) in enumerate(streams):
            prev = None
            for i in range(len(tokens) - 1):
                pair = (tokens[i], tokens[i + 1])
                if pair != prev:
                    entry = counts.get(pair)
                    if entry is None:
                        counts[pair] = [weight, w_idx, i]
                    else:
                        entry[0] += weight
                    prev = pair
                else:
                    prev = None
        if not counts:
            break
        best_pair = None
        best_key = None
        for pair, (count, w_idx, pos) in counts.items():
            key = (-count, w_idx, pos, table.yield_of(pair[0]) + table.yield_of(pair[1]))
            if best_key is None or key < best_key:
                best_key = key
                best_pair = pair
        merge = table.intern(*best_pair)
        left, right = best_pair
        gain = 0
        new_streams = []
        for tokens, weight in streams:
            out = _apply_pair(tokens, left, right, merge)
            gain += (len(tokens) - len(out)) * weight
            new_streams.append((out, weight))
        streams = new_streams
        sequence.append(merge)
        per_step.append(StepRecord(merge, gain, gain))

    boundary_id = table.symbol_id(corpus.boundary)
    flat: list[int] = []
    source_len = 0
    for (word, count), (tokens, _) in zip(corpus.words.items(), streams):
        for _ in range(count):
            if flat:
                flat.append(boundary_id)
                source_len += 1
            flat.extend(tokens)
            source_len += len(word)
    return TrainResult(table, sequence, TokenStream(flat, source_len), per_step)


def _all_trees(table: MergeTable, text: str, memo: dict[str, list[int]]) -> list[int]:
    """Every merge whose yield is ``text``, by recursive bracketing."""
    found = memo.get(text)
    if found is not None:
        return found
    if len(text) == 1:
        found = [table.symbol_id(text)]
    else:
        found = []
        for cut in range(1, len(text)):
            for left in _all_trees(table, text[:cut], memo):
                for right in _all_trees(table, text[cut:], memo):
                    found.append(table.intern(left, right))
        # distinct trees can repeat across cuts only via interning identity
        found = list(dict.fromkeys(found))
    memo[text] = found
    return found


def tree_signature(table: MergeTable, merge: int) -> str:
    """Deterministic bracketing string, e.g. ``[[ab]c]`` vs ``[a[bc]]``."""
    if table.is_trivial(merge):
        return table.yield_of(merge)
    left, right = table.parts(merge)
    return f"[{tree_signature(table, left)}{tree_signature(table, right)}]"


def train_non_iterative(
    corpus: Corpus,
    merge_count: int,
    max_width: int = 5,
) -> tuple[MergeTable, list[int]]:
    """Single-pass trainer: collect windowed substrings, keep the top-M merges.

    Candidates are every bracketing of every substring up to ``max_width``
    symbols wide, counted non-overlapping and weighted by word counts.
    Ranking is (count desc, yield length asc, yield asc, bracketing asc);
    a constituent always outranks its composite (it is strictly shorter at
    equal-or-higher count), so any top-M prefix is a valid merge sequence.

    The width cap makes this arbitrarily suboptimal on adversarial inputs;
    the test suite constructs an instance where it forfeits more than half
    of the exactly-optimal utility.
    """
    if max_width < 2:
        raise ValueError("max_width must be >= 2")
    if merge_count < 0:
        raise ValueError("merge_count must be >= 0")
    table = _corpus_table(corpus)
    counts: dict[str, int] = {}
    for word, weight in corpus.words.items():
        last_end: dict[str, int] = {}
        for width in range(2, min(max_width, len(word)) + 1):
            for start in range(0, len(word) - width + 1):
                sub = word[start : start + width]
                if last_end.get(sub, -1) > start:
                    continue  # overlaps the previous counted occurrence
                last_end[sub] = start + width - 1
                counts[sub] = counts.get(sub, 0) + weight

    candidates: list[tuple[int, int, str, str, int]] = []
    memo: dict[str, list[int]] = {}
    for sub, count in counts.items():
        for merge in _all_trees(table, sub, memo):
            candidates.append((-count, len(sub), sub, tree_signature(table, merge), merge))
    candidates.sort()
    return table, [merge for *_rank, merge in candidates[:merge_count]]

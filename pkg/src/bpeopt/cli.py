"""Command line interface: stats, train, encode, exact, audit."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .analysis import GridSpec, english_substrings, run_grid_audit
from .core import MergeTable, apply_sequence, lift_string, stream_yields
from .corpus import ingest, train_greedy_weighted, train_non_iterative
from .exact import train_exact
from .greedy import train_greedy_fast, train_greedy_slow
from .pair_stats import pair_frequencies, raw_pair_frequencies, sorted_pairs
from .serialization import load_merges_auto, save_merges


def _read_text(path: str) -> str:
    text = Path(path).read_text(encoding="utf-8")
    # editors append a final newline; drop exactly one
    if text.endswith("\n"):
        text = text[:-1]
    return text


def _cmd_stats(args) -> int:
    text = _read_text(args.file)
    table = MergeTable(set(text)) if text else None
    if table is None:
        return 0
    stream = lift_string(table, text)
    stats = raw_pair_frequencies(stream) if args.raw_counts else pair_frequencies(stream)
    for pair, freq in sorted_pairs(stats, table):
        left, right = pair
        print(f"{table.yield_of(left)}\t{table.yield_of(right)}\t{freq.count}")
    return 0


def _cmd_train(args) -> int:
    text = _read_text(args.input)
    if args.algo == "nonit":
        corpus = ingest(text, "words" if args.mode == "words" else "raw")
        table, sequence = train_non_iterative(corpus, args.merges, args.max_width)
        result = None
    elif args.mode == "words" and args.weighted:
        result = train_greedy_weighted(ingest(text, "words"), args.merges)
        table, sequence = result.table, result.sequence
    else:
        barred = sorted({ch for ch in text if ch.isspace()}) if args.mode == "words" else ()
        trainer = train_greedy_fast if args.algo == "fast" else train_greedy_slow
        result = trainer(text, args.merges, barred_symbols=barred)
        table, sequence = result.table, result.sequence
    save_merges(args.output, table, sequence)
    if args.stats and result is not None:
        kappa = 0
        for step, record in enumerate(result.per_step, start=1):
            kappa += record.gain
            print(f"{step}\t{table.yield_of(record.merge)}\t{record.replacements}\t{kappa}")
    print(f"trained {len(sequence)} merges -> {args.output}", file=sys.stderr)
    return 0


def _cmd_encode(args) -> int:
    text = _read_text(args.input)
    table, sequence = load_merges_auto(args.merges, extra_symbols=set(text))
    stream = apply_sequence(table, lift_string(table, text), sequence)
    json.dump(stream_yields(table, stream), sys.stdout, ensure_ascii=False)
    print()
    print(
        f"{len(text)} symbols -> {len(stream)} tokens (utility {stream.utility})",
        file=sys.stderr,
    )
    return 0


def _cmd_exact(args) -> int:
    text = _read_text(args.input)
    started = time.perf_counter()
    report = train_exact(text, args.merges, pruned=not args.brute, memo=args.memo)
    elapsed = time.perf_counter() - started
    table = report.table
    pairs = [
        f"{table.yield_of(table.parts(m)[0])} {table.yield_of(table.parts(m)[1])}"
        for m in report.best_sequence
    ]
    print(f"best utility: {report.best_utility}")
    print(f"best sequence: {pairs}")
    print(f"states visited: {report.states_visited} (pruned {report.pruned})")
    print(f"wall time: {elapsed:.3f}s")
    return 0


def _cmd_audit(args) -> int:
    grid = GridSpec(args.alphabet, args.max_len, args.max_merges)
    strings = None
    if args.english:
        strings = iter(english_substrings(_read_text(args.english), args.max_len))
    report = run_grid_audit(grid, strings=strings)
    json.dump(report.as_dict(), sys.stdout, indent=2, ensure_ascii=False)
    print()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bpe", description="BPE training as optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="overlap-adjusted pair counts of a file")
    p.add_argument("file")
    p.add_argument("--raw-counts", action="store_true",
                   help="overlapping bigram counts (comparison only)")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("train", help="train a merge sequence")
    p.add_argument("--algo", choices=["slow", "fast", "nonit"], default="fast")
    p.add_argument("--merges", type=int, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--mode", choices=["raw", "words"], default="raw")
    p.add_argument("--weighted", action="store_true",
                   help="words mode: train over unique words with counts")
    p.add_argument("--max-width", type=int, default=5, help="nonit window cap")
    p.add_argument("--stats", action="store_true", help="print per-step TSV")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("encode", help="apply a trained merge file")
    p.add_argument("--merges", required=True)
    p.add_argument("--input", required=True)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("exact", help="optimal merge sequence by pruned search")
    p.add_argument("--merges", type=int, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--brute", action="store_true", help="disable pruning")
    p.add_argument("--memo", action="store_true", help="deduplicate repeated streams")
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("audit", help="verify properties and the greedy bound on a grid")
    p.add_argument("--alphabet", type=int, default=3)
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--max-merges", type=int, default=3)
    p.add_argument("--english", help="restrict the grid to substrings of this file")
    p.set_defaults(func=_cmd_audit)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""BPE training as combinatorial optimization.

Greedy trainers (reference and amortized), an exact pruned search, property
and curvature audits, corpus utilities, and a scikit-learn style tokenizer.
"""

from .core import (
    InvalidHandleError,
    InvalidSequenceError,
    MergeTable,
    TokenStream,
    UnknownSymbolError,
    apply_merge,
    apply_sequence,
    compression_gain,
    compression_utility,
    is_valid_sequence,
    lift_string,
    stream_yields,
)
from .pair_stats import NoPairError, PairFreq, pair_frequencies, raw_pair_frequencies, top_pair
from .greedy import PairIndex, StepRecord, TrainResult, train_greedy_fast, train_greedy_slow
from .exact import (
    SearchReport,
    conflicts,
    is_safe_permutation,
    merge_order,
    sequences_equivalent,
    train_exact,
)
from .analysis import (
    CurvatureReport,
    GridSpec,
    PropertyViolation,
    SKIPPED,
    bound_from_sigma,
    check_avg_gain_lemma,
    check_hierarchical,
    check_submodularity,
    estimate_sigma,
    estimate_sigma_prime,
    greedy_ratio_audit,
    grid_strings,
    run_grid_audit,
)
from .corpus import (
    Corpus,
    canonical_text,
    ingest,
    load_corpus,
    save_corpus,
    train_greedy_weighted,
    train_non_iterative,
)
from .serialization import MergeFileError, load_merges, load_merges_auto, load_yield_pairs, save_merges
from .estimator import BpeTokenizer

__all__ = [
    "BpeTokenizer",
    "Corpus",
    "CurvatureReport",
    "GridSpec",
    "InvalidHandleError",
    "InvalidSequenceError",
    "MergeFileError",
    "MergeTable",
    "NoPairError",
    "PairFreq",
    "PairIndex",
    "PropertyViolation",
    "SKIPPED",
    "SearchReport",
    "StepRecord",
    "TokenStream",
    "TrainResult",
    "UnknownSymbolError",
    "apply_merge",
    "apply_sequence",
    "bound_from_sigma",
    "canonical_text",
    "check_avg_gain_lemma",
    "check_hierarchical",
    "check_submodularity",
    "compression_gain",
    "compression_utility",
    "conflicts",
    "estimate_sigma",
    "estimate_sigma_prime",
    "greedy_ratio_audit",
    "grid_strings",
    "ingest",
    "is_safe_permutation",
    "is_valid_sequence",
    "lift_string",
    "load_corpus",
    "load_merges",
    "load_merges_auto",
    "load_yield_pairs",
    "merge_order",
    "pair_frequencies",
    "raw_pair_frequencies",
    "run_grid_audit",
    "save_corpus",
    "save_merges",
    "sequences_equivalent",
    "stream_yields",
    "top_pair",
    "train_exact",
    "train_greedy_fast",
    "train_greedy_slow",
    "train_greedy_weighted",
    "train_non_iterative",
]

__version__ = "0.1.0"

"""Silver training data and evaluation tooling for multilingual AMR-to-text generation."""

from .amr import AmrGraph, ParseDiagnostic, PenmanError, parse_penman, serialize_penman, validate
from .analysis import GammaBinner, SubsetFilter, bin_by_gamma, compute_gamma, filter_subset, score_by_bin
from .dataset import (
    DatasetManifest,
    ExampleRecord,
    ParallelPair,
    build_silver_amr,
    build_silver_sent,
    ingest_gold_amr,
    mix,
)
from .linearize import (
    AmrLinearizer,
    EdgeLabelVocab,
    LinearizedInput,
    delinearize,
    extract_edge_label_vocab,
    linearize,
    make_task_input,
)
from .metrics import MetricResult, ScoredPair, bleu_corpus, chrf_corpus, meteor_lite, paired_bootstrap
from .report import ScoreReport, build_report, render
from .segment import SubwordModel, SubwordSegmenter, load_piece_file, segment

__version__ = "0.1.0"

__all__ = [
    "AmrGraph",
    "AmrLinearizer",
    "bin_by_gamma",
    "bleu_corpus",
    "build_report",
    "build_silver_amr",
    "build_silver_sent",
    "chrf_corpus",
    "compute_gamma",
    "DatasetManifest",
    "delinearize",
    "EdgeLabelVocab",
    "ExampleRecord",
    "extract_edge_label_vocab",
    "filter_subset",
    "GammaBinner",
    "ingest_gold_amr",
    "linearize",
    "LinearizedInput",
    "load_piece_file",
    "make_task_input",
    "meteor_lite",
    "MetricResult",
    "mix",
    "paired_bootstrap",
    "ParallelPair",
    "parse_penman",
    "ParseDiagnostic",
    "PenmanError",
    "render",
    "score_by_bin",
    "ScoredPair",
    "ScoreReport",
    "segment",
    "serialize_penman",
    "SubsetFilter",
    "SubwordModel",
    "SubwordSegmenter",
    "validate",
]


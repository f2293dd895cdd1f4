"""Toolkit for building and evaluating graded search-relevance data.

The pieces fit together as a pipeline: segment text (textseg), build
budgeted extractive summaries (summarizer), expand training data with
LLM rewrites (augment), and measure ranking quality (metrics, scorer).
The cli module exposes all of it as subcommands.
"""

__version__ = "0.1.0"

# Version of the JSONL record layout the CLI reads and writes.
SCHEMA_VERSION = 1

from .corpus import (
    DatasetError,
    DatasetStats,
    LabeledPair,
    RelevanceLabel,
    load_dataset,
    stats,
    write_dataset,
)
from .metrics import (
    GsbCounts,
    ScoredPrediction,
    delta_gsb,
    indicator,
    multiclass_auc,
    multiclass_auc_reference,
)
from .summarizer import (
    MixSummary,
    SummaryBudget,
    document_summary,
    mix_summary,
    query_focused_summary,
)
from .textseg import SegmentedDocument, Sentence, Token, segment, token_count, tokenize

__all__ = [
    "DatasetError",
    "DatasetStats",
    "GsbCounts",
    "LabeledPair",
    "MixSummary",
    "RelevanceLabel",
    "ScoredPrediction",
    "SegmentedDocument",
    "Sentence",
    "SummaryBudget",
    "Token",
    "delta_gsb",
    "document_summary",
    "indicator",
    "load_dataset",
    "mix_summary",
    "multiclass_auc",
    "multiclass_auc_reference",
    "query_focused_summary",
    "segment",
    "stats",
    "token_count",
    "tokenize",
    "write_dataset",
    "__version__",
    "SCHEMA_VERSION",
]

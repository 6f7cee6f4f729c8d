"""Streaming document organization.

Two incremental similarity pipelines (TF-IDF cosine over a document-term
structure, and TextRank keywords contextualized by word embeddings) feed
complete-linkage clustering and a fifteen-metric external validation harness
over checkpointed document streams.
"""

from .cluster import Dendrogram, DistanceMatrix, complete_linkage, cut, to_distance
from .embed import EmbeddingTable, contextual_similarity, keyword_set_vector, load_vec_file
from .errors import (
    ConfigError,
    CorpusError,
    DataError,
    DuplicateDocumentError,
    UnknownDocumentError,
    VectorFileError,
)
from .harness import (
    PIPELINES,
    CheckpointRecord,
    ComparisonRow,
    ExperimentConfig,
    compare_runs,
    read_checkpoints_csv,
    run_experiment,
)
from .istfidf import IncrementalTfIdf
from .itr import IncrementalTextRank, RankTable, TokenGraph, TopKList, pagerank, select_keywords
from .metrics import (
    METRIC_NAMES,
    ContingencyTable,
    MetricReport,
    PairCounts,
    RankTestResult,
    contingency,
    evaluate_all,
    mann_whitney_u,
    wilcoxon_paired,
)
from .preprocess import FilterConfig, apply_filters, default_stopwords, load_stopwords, tokenize
from .stream import (
    CheckpointPlan,
    Document,
    EventKind,
    StreamEvent,
    ingest_corpus,
    ods_events,
    sds_events,
)

__version__ = "0.1.0"

__all__ = [
    "CheckpointPlan",
    "CheckpointRecord",
    "ComparisonRow",
    "ConfigError",
    "ContingencyTable",
    "CorpusError",
    "DataError",
    "Dendrogram",
    "DistanceMatrix",
    "Document",
    "DuplicateDocumentError",
    "EmbeddingTable",
    "EventKind",
    "ExperimentConfig",
    "FilterConfig",
    "IncrementalTextRank",
    "IncrementalTfIdf",
    "METRIC_NAMES",
    "MetricReport",
    "PIPELINES",
    "PairCounts",
    "RankTable",
    "RankTestResult",
    "StreamEvent",
    "TokenGraph",
    "TopKList",
    "UnknownDocumentError",
    "VectorFileError",
    "apply_filters",
    "compare_runs",
    "complete_linkage",
    "contextual_similarity",
    "contingency",
    "cut",
    "default_stopwords",
    "evaluate_all",
    "ingest_corpus",
    "keyword_set_vector",
    "load_stopwords",
    "load_vec_file",
    "mann_whitney_u",
    "ods_events",
    "pagerank",
    "read_checkpoints_csv",
    "run_experiment",
    "sds_events",
    "select_keywords",
    "to_distance",
    "tokenize",
    "wilcoxon_paired",
]

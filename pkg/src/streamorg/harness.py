"""End-to-end experiment runner.

Streams a labeled corpus through one of three similarity pipelines, clusters
the similarity snapshot at every checkpoint, scores the flat clusters against
the ground-truth labels, and writes delimited artifacts. A second entry point
compares two finished runs metric by metric with a paired rank test.

Pipelines:
  istfidf      incremental TF-IDF cosine similarity, thresholded
  istfidf-w2v  embedding similarity over each document's top TF-IDF keywords,
               falling back to the TF-IDF cosine when keywords are out of
               vocabulary
  itr-w2v      embedding similarity over TextRank keywords, falling back to 0

The contextual pipelines pair each arriving document against every previously
seen document at arrival time, with keyword sets frozen as extracted then.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Sequence

from .cluster import complete_linkage, cut, to_distance
from .embed import EmbeddingTable, contextual_similarity, load_vec_file
from .errors import ConfigError, DataError
from .istfidf import IncrementalTfIdf
from .itr import IncrementalTextRank
from .metrics import (
    METRIC_NAMES,
    MetricReport,
    RankTestResult,
    contingency,
    evaluate_all,
    mann_whitney_u,
    wilcoxon_paired,
)
from .preprocess import FilterConfig, apply_filters, default_stopwords, load_stopwords, load_tag_lexicon, tokenize
from .stream import CheckpointPlan, Document, ingest_corpus, ods_events

PIPELINES = ("istfidf", "istfidf-w2v", "itr-w2v")


@dataclass
class ExperimentConfig:
    input_path: str | Path
    out_dir: str | Path
    pipeline: str = "istfidf"
    corpus_format: str = "jsonl"
    embeddings_path: str | Path | None = None
    sim_threshold: float = 0.12
    embed_threshold: float = 0.6
    keywords_per_doc: int = 8
    checkpoint_interval: int = 25
    checkpoint_count: int = 30
    class_counts: Sequence[int] | None = None
    compound_mode: str = "mean"
    window: int = 2
    full_refresh_at_checkpoint: bool = True
    collapse_adjacent: bool = False
    stemming: bool = True
    stopwords_path: str | Path | None = None
    tag_lexicon_path: str | Path | None = None
    keep_tags: Sequence[str] | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.pipeline not in PIPELINES:
            raise ConfigError(f"unknown pipeline {self.pipeline!r} (expected one of {PIPELINES})")
        if self.pipeline.endswith("-w2v") and self.embeddings_path is None:
            raise ConfigError(f"pipeline {self.pipeline!r} requires an embeddings file")
        if self.keywords_per_doc < 1:
            raise ConfigError("keywords_per_doc must be >= 1")
        if not 0.0 <= self.sim_threshold <= 1.0:
            raise ConfigError("sim_threshold must be in [0, 1]")
        if not 0.0 <= self.embed_threshold <= 1.0:
            raise ConfigError("embed_threshold must be in [0, 1]")
        if self.compound_mode not in ("mean", "pairwise"):
            raise ConfigError(f"unknown compound mode {self.compound_mode!r}")
        if self.keep_tags is not None and self.tag_lexicon_path is None:
            raise ConfigError("keep_tags requires a tag lexicon file")


@dataclass
class CheckpointRecord:
    index: int            # 1-based checkpoint ordinal
    documents_seen: int
    k: int
    metrics: MetricReport


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


class _TfIdfPipeline:
    uses_embeddings = False

    def __init__(self, config: ExperimentConfig):
        self.engine = IncrementalTfIdf(config.sim_threshold)
        self.full_refresh = config.full_refresh_at_checkpoint
        self.vocabulary_hits = 0

    def add(self, doc_id: str, tokens: list[str]) -> None:
        self.engine.add_document(doc_id, tokens)

    def snapshot(self) -> dict[tuple[str, str], float]:
        if self.full_refresh:
            self.engine.full_refresh()
        return self.engine.similarity_snapshot()

    def snapshot_meta(self) -> dict:
        return {
            "documents": self.engine.document_count,
            "terms": self.engine.term_count,
            "similarity_threshold": self.engine.threshold,
        }

    def write_extras(self, out_dir: Path, checkpoint: int) -> None:
        pass


class _ContextualPipeline:
    """Embedding similarity over per-document keyword sets.

    Keywords come either from the incremental TF-IDF weights or from the
    TextRank extractor; each arrival is paired against all previously seen
    documents and only nonzero similarities are stored.
    """

    uses_embeddings = True

    def __init__(self, config: ExperimentConfig, table: EmbeddingTable):
        self.table = table
        self.threshold = config.embed_threshold
        self.mode = config.compound_mode
        self.keywords_per_doc = config.keywords_per_doc
        self.similarities: dict[tuple[str, str], float] = {}
        self.doc_keywords: dict[str, list[str]] = {}
        self.order: list[str] = []
        self.vocabulary_hits = 0
        if config.pipeline == "istfidf-w2v":
            self.tfidf: IncrementalTfIdf | None = IncrementalTfIdf(config.sim_threshold)
            self.itr: IncrementalTextRank | None = None
        else:
            self.tfidf = None
            self.itr = IncrementalTextRank(
                window=config.window,
                keywords_per_doc=config.keywords_per_doc,
                collapse_adjacent=config.collapse_adjacent,
            )

    def add(self, doc_id: str, tokens: list[str]) -> None:
        if self.tfidf is not None:
            self.tfidf.add_document(doc_id, tokens)
            keywords = [t for t, _ in self.tfidf.top_keywords(doc_id, self.keywords_per_doc)]
        else:
            keywords = self.itr.process_new(doc_id, tokens)
        self.doc_keywords[doc_id] = keywords
        self.vocabulary_hits += sum(1 for kw in keywords if kw in self.table.vectors)
        for prev in self.order:
            if self.tfidf is not None:
                fallback = self.tfidf.similarity(doc_id, prev)
            else:
                fallback = 0.0
            s = contextual_similarity(
                keywords,
                self.doc_keywords[prev],
                self.table,
                threshold=self.threshold,
                fallback=fallback,
                mode=self.mode,
            )
            if s > 0.0:
                self.similarities[_pair(doc_id, prev)] = s
        self.order.append(doc_id)

    def snapshot(self) -> dict[tuple[str, str], float]:
        return dict(self.similarities)

    def snapshot_meta(self) -> dict:
        meta = {
            "documents": len(self.order),
            "terms": self.tfidf.term_count if self.tfidf is not None else None,
            "similarity_threshold": self.threshold,
        }
        return meta

    def write_extras(self, out_dir: Path, checkpoint: int) -> None:
        if self.itr is not None:
            self.itr.export_stream_topk(out_dir / f"topk_{checkpoint}.csv")
            self.itr.export_keywords(out_dir / f"keywords_{checkpoint}.csv")


def _build_pipeline(config: ExperimentConfig):
    if config.pipeline == "istfidf":
        return _TfIdfPipeline(config)
    table = load_vec_file(config.embeddings_path)
    return _ContextualPipeline(config, table)


def _build_filter_config(config: ExperimentConfig) -> FilterConfig:
    stopwords = (
        load_stopwords(config.stopwords_path)
        if config.stopwords_path is not None
        else default_stopwords()
    )
    lexicon = (
        load_tag_lexicon(config.tag_lexicon_path)
        if config.tag_lexicon_path is not None
        else None
    )
    keep = set(config.keep_tags) if config.keep_tags is not None else None
    return FilterConfig(
        stopwords=stopwords,
        stemming=config.stemming,
        keep_tags=keep,
        tag_lexicon=lexicon,
    )


def _cluster_snapshot(snapshot, doc_ids: list[str], k: int) -> dict[str, int]:
    if len(doc_ids) == 1:
        if k != 1:
            raise ConfigError(f"k={k} with a single document seen")
        return {doc_ids[0]: 1}
    try:
        dendrogram = complete_linkage(to_distance(snapshot, doc_ids))
        return cut(dendrogram, k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _write_similarity_csv(path: Path, snapshot, meta: dict) -> None:
    lines = ["doc_a,doc_b,similarity"]
    for (a, b), s in sorted(snapshot.items()):
        lines.append(f"{a},{b},{s!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    path.with_suffix(".meta.json").write_text(
        json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8"
    )


def _write_assignment_csv(path: Path, doc_ids: list[str], assignment: dict[str, int]) -> None:
    lines = ["doc_id,cluster"]
    for doc_id in doc_ids:
        lines.append(f"{doc_id},{assignment[doc_id]}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_checkpoints_csv(path: Path, records: list[CheckpointRecord]) -> None:
    header = "checkpoint,documents_seen,k," + ",".join(METRIC_NAMES)
    lines = [header]
    for rec in records:
        values = rec.metrics.as_dict()
        row = [str(rec.index), str(rec.documents_seen), str(rec.k)]
        row += [repr(values[name]) for name in METRIC_NAMES]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_summary_csv(path: Path, pipeline: str, records: list[CheckpointRecord]) -> None:
    header = "pipeline," + ",".join(METRIC_NAMES)
    lines = [header]
    if records:
        means = {
            name: fmean(getattr(r.metrics, name) for r in records)
            for name in METRIC_NAMES
        }
        lines.append(pipeline + "," + ",".join(repr(means[name]) for name in METRIC_NAMES))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_checkpoints_csv(path: str | Path) -> list[CheckpointRecord]:
    """Load the per-checkpoint metric rows written by `run_experiment`."""
    records: list[CheckpointRecord] = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"checkpoint", "documents_seen", "k", *METRIC_NAMES}
        if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
            raise DataError(f"{path}: not a checkpoints file (missing columns)")
        for row in reader:
            report = MetricReport(**{name: float(row[name]) for name in METRIC_NAMES})
            records.append(
                CheckpointRecord(
                    index=int(row["checkpoint"]),
                    documents_seen=int(row["documents_seen"]),
                    k=int(row["k"]),
                    metrics=report,
                )
            )
    return records


def run_experiment(config: ExperimentConfig) -> list[CheckpointRecord]:
    """Stream the corpus, checkpoint, cluster, evaluate; write artifacts.

    Writes checkpoints.csv, summary.csv, and per-checkpoint similarity and
    assignment files under `config.out_dir`. Returns the checkpoint records.
    """
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    corpus = ingest_corpus(config.input_path, config.corpus_format)
    plan = CheckpointPlan(
        interval=config.checkpoint_interval,
        count=config.checkpoint_count,
        class_counts=tuple(config.class_counts) if config.class_counts is not None else None,
    )
    evaluated = corpus[: plan.interval * plan.count]
    unlabeled = [doc.id for doc in evaluated if doc.label is None]
    if unlabeled:
        raise DataError(
            f"{len(unlabeled)} documents reach a checkpoint without a label "
            f"(first: {unlabeled[0]!r})"
        )
    if len(corpus) < plan.interval:
        warnings.warn(
            f"corpus has {len(corpus)} documents, shorter than one checkpoint "
            f"interval ({plan.interval}); no checkpoint will fire",
            stacklevel=2,
        )

    filter_config = _build_filter_config(config)
    pipeline = _build_pipeline(config)
    labels = {doc.id: doc.label for doc in corpus}

    records: list[CheckpointRecord] = []
    seen_ids: list[str] = []
    seen_labels: list[str] = []
    for index, event in enumerate(ods_events(corpus), 1):
        tokens = apply_filters(tokenize(event.text), filter_config)
        pipeline.add(event.doc_id, tokens)
        seen_ids.append(event.doc_id)
        seen_labels.append(labels[event.doc_id])
        if not plan.fires(index):
            continue
        number = plan.checkpoint_number(index)
        snapshot = pipeline.snapshot()
        if plan.class_counts is not None:
            k = plan.class_counts[number - 1]
        else:
            k = len(set(seen_labels))
        if k > len(seen_ids):
            raise ConfigError(
                f"checkpoint {number}: k={k} exceeds the {len(seen_ids)} documents seen"
            )
        assignment = _cluster_snapshot(snapshot, seen_ids, k)
        report = evaluate_all(
            contingency(seen_labels, [assignment[d] for d in seen_ids])
        )
        records.append(CheckpointRecord(number, index, k, report))
        _write_similarity_csv(
            out_dir / f"similarity_{number}.csv", snapshot, pipeline.snapshot_meta()
        )
        _write_assignment_csv(out_dir / f"assignment_{number}.csv", seen_ids, assignment)
        pipeline.write_extras(out_dir, number)

    _write_checkpoints_csv(out_dir / "checkpoints.csv", records)
    _write_summary_csv(out_dir / "summary.csv", config.pipeline, records)
    if pipeline.uses_embeddings and pipeline.vocabulary_hits == 0:
        warnings.warn(
            "no extracted keyword ever matched the embedding vocabulary; "
            "fallback similarities were used throughout",
            stacklevel=2,
        )
    return records


@dataclass(frozen=True)
class ComparisonRow:
    metric: str
    verdict: str
    p_value: float
    mean_a: float
    mean_b: float
    higher: str  # "a", "b", or "tie"


def compare_runs(
    records_a: Sequence[CheckpointRecord],
    records_b: Sequence[CheckpointRecord],
    alpha: float = 0.05,
    *,
    paired: bool = True,
) -> list[ComparisonRow]:
    """Per-metric DIFF/EQUAL verdicts between two runs over the same checkpoints."""
    if len(records_a) != len(records_b):
        raise DataError(
            f"checkpoint counts differ: {len(records_a)} vs {len(records_b)}"
        )
    if not records_a:
        raise DataError("no checkpoints to compare")
    rows: list[ComparisonRow] = []
    for name in METRIC_NAMES:
        xs = [getattr(r.metrics, name) for r in records_a]
        ys = [getattr(r.metrics, name) for r in records_b]
        if paired:
            result: RankTestResult = wilcoxon_paired(xs, ys, alpha)
        else:
            result = mann_whitney_u(xs, ys, alpha)
        mean_a, mean_b = fmean(xs), fmean(ys)
        if mean_a > mean_b:
            higher = "a"
        elif mean_b > mean_a:
            higher = "b"
        else:
            higher = "tie"
        rows.append(ComparisonRow(name, result.verdict, result.p_value, mean_a, mean_b, higher))
    return rows


def write_verdicts_csv(path: str | Path, rows: Sequence[ComparisonRow]) -> None:
    lines = ["metric,verdict,p_value"]
    for row in rows:
        lines.append(f"{row.metric},{row.verdict},{row.p_value!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_means_csv(path: str | Path, rows: Sequence[ComparisonRow]) -> None:
    lines = ["metric,mean_a,mean_b,higher"]
    for row in rows:
        lines.append(f"{row.metric},{row.mean_a!r},{row.mean_b!r},{row.higher}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

"""Corpus ingestion, stream event construction, and checkpoint scheduling.

File order defines stream order; two ingestions of the same file always yield
the same event sequence. ODS streams present every document as new; SDS
streams may also extend documents that were seen earlier.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Sequence

from .errors import ConfigError, CorpusError, DuplicateDocumentError


@dataclass(frozen=True)
class Document:
    """One corpus entry: unique id, raw text, optional ground-truth label."""

    id: str
    text: str
    label: str | None = None


class EventKind(Enum):
    NEW = "new"
    EXTEND = "extend"


@dataclass(frozen=True)
class StreamEvent:
    kind: EventKind
    doc_id: str
    text: str


@dataclass(frozen=True)
class CheckpointPlan:
    """Fires after every `interval` stream events, `count` times in total.

    `class_counts`, when given, supplies an explicit ground-truth cluster
    count per checkpoint and must have exactly `count` entries.
    """

    interval: int = 25
    count: int = 30
    class_counts: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.interval < 1:
            raise ConfigError(f"checkpoint interval must be >= 1, got {self.interval}")
        if self.count < 1:
            raise ConfigError(f"checkpoint count must be >= 1, got {self.count}")
        if self.class_counts is not None:
            counts = tuple(int(c) for c in self.class_counts)
            if len(counts) != self.count:
                raise ConfigError(
                    f"class_counts has {len(counts)} entries for {self.count} checkpoints"
                )
            if any(c < 1 for c in counts):
                raise ConfigError("class_counts entries must be >= 1")
            object.__setattr__(self, "class_counts", counts)

    def fires(self, event_index: int) -> bool:
        """True when the 1-based event index lands on a scheduled checkpoint."""
        if event_index < 1:
            raise ValueError(f"event_index must be >= 1, got {event_index}")
        return event_index % self.interval == 0 and event_index // self.interval <= self.count

    def checkpoint_number(self, event_index: int) -> int:
        """1-based checkpoint ordinal for a firing index."""
        if not self.fires(event_index):
            raise ValueError(f"event index {event_index} is not a checkpoint")
        return event_index // self.interval


def _make_document(record: dict, source: str, lineno: int, seen: set[str]) -> Document:
    doc_id = record.get("id")
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusError(f"{source}: line {lineno}: 'id' must be a non-empty string")
    if doc_id in seen:
        raise DuplicateDocumentError(f"{source}: line {lineno}: duplicate document id {doc_id!r}")
    seen.add(doc_id)
    text = record.get("text")
    if text is None:
        text = ""
    if not isinstance(text, str):
        raise CorpusError(f"{source}: line {lineno}: 'text' must be a string")
    label = record.get("label")
    if label is not None and not isinstance(label, str):
        raise CorpusError(f"{source}: line {lineno}: 'label' must be a string")
    if label == "":
        label = None
    return Document(id=doc_id, text=text, label=label)


def _read_jsonl(path: Path) -> list[Document]:
    docs: list[Document] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(record, dict):
                raise CorpusError(f"{path}: line {lineno}: expected a JSON object")
            docs.append(_make_document(record, str(path), lineno, seen))
    return docs


def _read_csv(path: Path) -> list[Document]:
    docs: list[Document] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "id" not in reader.fieldnames or "text" not in reader.fieldnames:
            raise CorpusError(f"{path}: header must include 'id' and 'text' columns")
        for row in reader:
            if row.get(None):
                raise CorpusError(f"{path}: line {reader.line_num}: too many fields")
            record = {
                "id": row.get("id"),
                "text": row.get("text") or "",
                "label": row.get("label") or None,
            }
            docs.append(_make_document(record, str(path), reader.line_num, seen))
    return docs


def ingest_corpus(path: str | Path, corpus_format: str = "jsonl") -> list[Document]:
    """Read a JSONL or CSV corpus; document order is the returned list order."""
    path = Path(path)
    fmt = corpus_format.lower()
    if fmt == "jsonl":
        return _read_jsonl(path)
    if fmt == "csv":
        return _read_csv(path)
    raise ConfigError(f"unknown corpus format {corpus_format!r} (expected jsonl or csv)")


def ods_events(corpus: Sequence[Document]) -> Iterator[StreamEvent]:
    """One-document streaming: a NEW event per document, in corpus order."""
    for doc in corpus:
        yield StreamEvent(EventKind.NEW, doc.id, doc.text)


def sds_events(corpus: Sequence[Document], parts: int = 2) -> Iterator[StreamEvent]:
    """Several-document streaming built from a static corpus.

    Each document's text is split on whitespace into `parts` near-equal chunks:
    the first arrives as NEW and the rest as EXTEND events, document by
    document. Useful for exercising extend semantics deterministically.
    """
    if parts < 1:
        raise ConfigError(f"parts must be >= 1, got {parts}")
    for doc in corpus:
        words = doc.text.split()
        if not words or parts == 1:
            yield StreamEvent(EventKind.NEW, doc.id, doc.text)
            continue
        size = max(1, len(words) // parts)
        chunks = [words[i : i + size] for i in range(0, len(words), size)]
        if len(chunks) > parts:
            chunks[parts - 1 :] = [sum(chunks[parts - 1 :], [])]
        yield StreamEvent(EventKind.NEW, doc.id, " ".join(chunks[0]))
        for chunk in chunks[1:]:
            yield StreamEvent(EventKind.EXTEND, doc.id, " ".join(chunk))

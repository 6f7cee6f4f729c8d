"""Incremental TF-IDF and pairwise document similarity over a bipartite
document-term structure.

The engine consumes a stream in view-once fashion. Each arrival updates term
and document frequencies, then recomputes TF-IDF vectors and cosine
similarities only for documents that share at least one term with the arriving
document. Inverse document frequency depends on the total document count, so
pairs of untouched documents go stale between refreshes; `full_refresh`
recomputes every term-sharing pair from current counts, and the experiment
harness calls it at each checkpoint by default so that evaluated snapshots
match a from-scratch computation exactly.

Weighting is raw term frequency times ln(documents / document_frequency).
Similarities below the threshold are dropped from the store and read back
as 0, as are pairs with no shared term.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from pathlib import Path
from typing import Iterable

from .errors import DuplicateDocumentError, UnknownDocumentError

Pair = tuple[str, str]

DEFAULT_SIMILARITY_THRESHOLD = 0.12


def _pair(a: str, b: str) -> Pair:
    return (a, b) if a <= b else (b, a)


class IncrementalTfIdf:
    def __init__(self, similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD):
        if not 0.0 <= similarity_threshold <= 1.0:
            raise ValueError(f"similarity threshold must be in [0, 1], got {similarity_threshold}")
        self.threshold = float(similarity_threshold)
        self._tf: dict[str, dict[str, int]] = {}
        self._postings: dict[str, set[str]] = {}
        self._vectors: dict[str, dict[str, float]] = {}
        self._norms: dict[str, float] = {}
        self._similarities: dict[Pair, float] = {}
        # documents whose vectors were recomputed by the latest event
        self.last_touched: frozenset[str] = frozenset()

    @property
    def document_count(self) -> int:
        return len(self._tf)

    @property
    def term_count(self) -> int:
        return len(self._postings)

    @property
    def edge_count(self) -> int:
        return sum(len(tf) for tf in self._tf.values())

    def document_ids(self) -> list[str]:
        return list(self._tf)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._tf

    def document_frequency(self, term: str) -> int:
        return len(self._postings.get(term, ()))

    def term_frequency(self, doc_id: str, term: str) -> int:
        self._require(doc_id)
        return self._tf[doc_id].get(term, 0)

    def add_document(self, doc_id: str, tokens: Iterable[str]) -> set[str]:
        """Process a new document; returns the ids whose similarities changed.

        The returned set is exactly the previously seen documents sharing a
        term with the arrival (the locality contract of the engine).
        """
        if doc_id in self._tf:
            raise DuplicateDocumentError(f"document {doc_id!r} was already streamed")
        counts = Counter(tokens)
        self._tf[doc_id] = dict(counts)
        for term in counts:
            self._postings.setdefault(term, set()).add(doc_id)
        sharers = self._sharers(doc_id)
        self._refresh(sharers | {doc_id})
        return sharers

    def extend_document(self, doc_id: str, tokens: Iterable[str]) -> set[str]:
        """Append tokens to a seen document; returns ids whose similarities changed."""
        self._require(doc_id)
        counts = Counter(tokens)
        if not counts:
            self.last_touched = frozenset()
            return set()
        tf = self._tf[doc_id]
        for term, n in counts.items():
            tf[term] = tf.get(term, 0) + n
            self._postings.setdefault(term, set()).add(doc_id)
        sharers = self._sharers(doc_id)
        self._refresh(sharers | {doc_id})
        return sharers

    def weight(self, doc_id: str, term: str) -> float:
        """Current tf * ln(p / df) for the pair; 0 when the doc lacks the term."""
        self._require(doc_id)
        tf = self._tf[doc_id].get(term)
        if not tf:
            return 0.0
        return tf * math.log(len(self._tf) / len(self._postings[term]))

    def similarity(self, doc_a: str, doc_b: str) -> float:
        """Stored pair similarity; 0 when sub-threshold or no term is shared."""
        self._require(doc_a)
        self._require(doc_b)
        if doc_a == doc_b:
            return 1.0 if self._norms.get(doc_a, 0.0) > 0.0 else 0.0
        return self._similarities.get(_pair(doc_a, doc_b), 0.0)

    def top_keywords(self, doc_id: str, n: int = 8) -> list[tuple[str, float]]:
        """The document's terms by descending weight, ties alphabetical."""
        self._require(doc_id)
        ranked = sorted(
            ((term, self.weight(doc_id, term)) for term in self._tf[doc_id]),
            key=lambda kv: (-kv[1], kv[0]),
        )
        return ranked[:n]

    def similarity_snapshot(self) -> dict[Pair, float]:
        return dict(self._similarities)

    def full_refresh(self) -> None:
        """Recompute every vector and every term-sharing pair from current counts.

        Restores exact agreement with a from-scratch TF-IDF + cosine pass,
        including pairs that crossed the threshold while untouched.
        """
        for doc_id in self._tf:
            self._recompute_vector(doc_id)
        candidates: set[Pair] = set()
        for docs in self._postings.values():
            if len(docs) < 2:
                continue
            members = sorted(docs)
            for i, a in enumerate(members):
                for b in members[i + 1 :]:
                    candidates.add((a, b))
        self._similarities = {}
        for a, b in candidates:
            self._refresh_pair(a, b)

    def export_snapshot(self, path: str | Path) -> None:
        """Write stored pairs as CSV (doc_a,doc_b,similarity) plus a .meta.json
        sidecar recording document count, term count, and the threshold."""
        path = Path(path)
        lines = ["doc_a,doc_b,similarity"]
        for (a, b), s in sorted(self._similarities.items()):
            lines.append(f"{a},{b},{s!r}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        meta = {
            "documents": self.document_count,
            "terms": self.term_count,
            "similarity_threshold": self.threshold,
        }
        path.with_suffix(".meta.json").write_text(
            json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8"
        )

    # internals

    def _require(self, doc_id: str) -> None:
        if doc_id not in self._tf:
            raise UnknownDocumentError(f"unknown document {doc_id!r}")

    def _sharers(self, doc_id: str) -> set[str]:
        out: set[str] = set()
        for term in self._tf[doc_id]:
            out |= self._postings[term]
        out.discard(doc_id)
        return out

    def _refresh(self, docs: set[str]) -> None:
        for doc_id in docs:
            self._recompute_vector(doc_id)
        self.last_touched = frozenset(docs)
        members = sorted(docs)
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                self._refresh_pair(a, b)

    def _recompute_vector(self, doc_id: str) -> None:
        p = len(self._tf)
        vec: dict[str, float] = {}
        sq = 0.0
        for term, tf in self._tf[doc_id].items():
            w = tf * math.log(p / len(self._postings[term]))
            vec[term] = w
            sq += w * w
        self._vectors[doc_id] = vec
        self._norms[doc_id] = math.sqrt(sq)

    def _refresh_pair(self, a: str, b: str) -> None:
        key = _pair(a, b)
        shared, s = self._cosine(a, b)
        if shared and s >= self.threshold:
            self._similarities[key] = min(s, 1.0)
        else:
            self._similarities.pop(key, None)

    def _cosine(self, a: str, b: str) -> tuple[bool, float]:
        va, vb = self._vectors[a], self._vectors[b]
        if len(va) > len(vb):
            va, vb = vb, va
        shared = False
        dot = 0.0
        for term, wa in va.items():
            wb = vb.get(term)
            if wb is not None:
                shared = True
                dot += wa * wb
        na, nb = self._norms[a], self._norms[b]
        if na <= 0.0 or nb <= 0.0:
            return shared, 0.0
        return shared, dot / (na * nb)

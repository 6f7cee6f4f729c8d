"""Incremental TextRank keyword extraction.

Each document owns an undirected token co-occurrence graph; weighted PageRank
over that graph scores tokens and the top-k become the document's keywords.
New documents are ranked cold; updates to an existing document extend the
graph and re-rank warm-started from the previous scores. Extracted keywords
also feed bounded space-saving counters: one per document and one stream-wide
list that realizes the landmark-window behaviour.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DuplicateDocumentError, UnknownDocumentError

DEFAULT_DAMPING = 0.85
DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITERATIONS = 100
DEFAULT_WINDOW = 2
DEFAULT_TOPK_CAPACITY = 100
DEFAULT_KEYWORDS_PER_DOC = 8


class TokenGraph:
    """Undirected, weighted token co-occurrence graph for one document."""

    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        self.adj: dict[str, dict[str, int]] = {}

    def add_sequence(self, tokens: Sequence[str], window: int = DEFAULT_WINDOW) -> None:
        """Link every token pair within `window` positions of each other.

        Repeated pairs add weight; self-loops are skipped. Each call treats
        `tokens` as its own sequence, so extending a document never links
        tokens across update boundaries.
        """
        if window < 2:
            raise ValueError(f"window must be >= 2, got {window}")
        for tok in tokens:
            self.adj.setdefault(tok, {})
        n = len(tokens)
        for i in range(n):
            a = tokens[i]
            for j in range(i + 1, min(i + window, n)):
                b = tokens[j]
                if a == b:
                    continue
                self.adj[a][b] = self.adj[a].get(b, 0) + 1
                self.adj[b][a] = self.adj[b].get(a, 0) + 1

    @property
    def node_count(self) -> int:
        return len(self.adj)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adj.values()) // 2

    def nodes(self) -> set[str]:
        return set(self.adj)

    def edge_weight(self, a: str, b: str) -> int:
        return self.adj.get(a, {}).get(b, 0)


@dataclass
class RankTable:
    """PageRank scores for one document's tokens; scores sum to 1."""

    doc_id: str
    scores: dict[str, float]
    damping: float = DEFAULT_DAMPING
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    iterations: int = 0


def pagerank(
    graph: TokenGraph,
    *,
    damping: float = DEFAULT_DAMPING,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    warm_start: RankTable | Mapping[str, float] | None = None,
) -> RankTable:
    """Weighted PageRank over an undirected token graph.

    score(v) = (1-d)/N + d * sum over neighbours u of w(u,v)/W(u) * score(u),
    with W(u) the total weight incident to u. Iteration starts from
    `warm_start` (uniform when absent) and stops when the largest per-node
    change drops below `tolerance` or `max_iterations` is reached; the result
    is normalized to sum to 1. Neighbour sums run in sorted token order so
    structurally identical nodes receive bit-identical scores.
    """
    nodes = sorted(graph.adj)
    if not nodes:
        raise ValueError(f"cannot rank an empty graph (doc {graph.doc_id!r})")
    n = len(nodes)
    total_weight = {u: float(sum(nbrs.values())) for u, nbrs in graph.adj.items()}
    incoming = {v: sorted(graph.adj[v].items()) for v in nodes}

    if warm_start is None:
        scores = {v: 1.0 / n for v in nodes}
    else:
        prev = warm_start.scores if isinstance(warm_start, RankTable) else warm_start
        scores = {v: float(prev.get(v, 1.0 / n)) for v in nodes}
        start_total = sum(scores.values())
        scores = {v: s / start_total for v, s in scores.items()}

    base = (1.0 - damping) / n
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        nxt: dict[str, float] = {}
        delta = 0.0
        for v in nodes:
            acc = 0.0
            for u, w in incoming[v]:
                acc += w / total_weight[u] * scores[u]
            val = base + damping * acc
            nxt[v] = val
            diff = abs(val - scores[v])
            if diff > delta:
                delta = diff
        scores = nxt
        if delta < tolerance:
            break
    total = sum(scores.values())
    scores = {v: s / total for v, s in scores.items()}
    return RankTable(graph.doc_id, scores, damping, tolerance, max_iterations, iterations)


def select_keywords(
    table: RankTable,
    k: int,
    *,
    sequence: Sequence[str] | None = None,
    collapse: bool = False,
) -> list[tuple[str, float]]:
    """Top-k tokens by score, ties broken alphabetically.

    With `collapse`, selected tokens that appear consecutively in `sequence`
    are joined into multiword keywords scored by their best member.
    """
    ranked = sorted(table.scores.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    if not collapse or sequence is None:
        return ranked
    chosen = dict(ranked)
    phrases: dict[str, float] = {}
    i = 0
    while i < len(sequence):
        if sequence[i] not in chosen:
            i += 1
            continue
        j = i
        while j + 1 < len(sequence) and sequence[j + 1] in chosen:
            j += 1
        run = sequence[i : j + 1]
        phrase = " ".join(run)
        score = max(chosen[t] for t in run)
        if phrases.get(phrase, -1.0) < score:
            phrases[phrase] = score
        i = j + 1
    merged = sorted(phrases.items(), key=lambda kv: (-kv[1], kv[0]))
    return merged[:k]


class TopKList:
    """Space-saving counters: at most `capacity` monitored keywords.

    When the list is full, the keyword with the smallest count is evicted and
    the newcomer inherits count+1, recording the inherited count as its
    overestimation error. A lazy min-heap keeps eviction O(log capacity).
    """

    def __init__(self, capacity: int = DEFAULT_TOPK_CAPACITY):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.counts: dict[str, int] = {}
        self.errors: dict[str, int] = {}
        self.insertions = 0
        self._heap: list[tuple[int, int, str]] = []
        self._seq = 0

    def __len__(self) -> int:
        return len(self.counts)

    def __contains__(self, keyword: str) -> bool:
        return keyword in self.counts

    def update(self, keyword: str) -> None:
        self.insertions += 1
        if keyword in self.counts:
            self.counts[keyword] += 1
            self._push(keyword)
            return
        if len(self.counts) < self.capacity:
            self.counts[keyword] = 1
            self.errors[keyword] = 0
            self._push(keyword)
            return
        evicted, floor = self._pop_min()
        del self.counts[evicted]
        del self.errors[evicted]
        self.counts[keyword] = floor + 1
        self.errors[keyword] = floor
        self._push(keyword)

    def report(self, k: int) -> list[tuple[str, int]]:
        """Monitored keywords by descending count, ties alphabetical, top k."""
        if k > self.capacity:
            raise ValueError(f"cannot report {k} keywords from a capacity-{self.capacity} list")
        ranked = sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:k]

    def _push(self, keyword: str) -> None:
        self._seq += 1
        heapq.heappush(self._heap, (self.counts[keyword], self._seq, keyword))

    def _pop_min(self) -> tuple[str, int]:
        # stale entries (outdated counts or evicted keywords) are discarded
        while True:
            count, _, keyword = heapq.heappop(self._heap)
            if self.counts.get(keyword) == count:
                return keyword, count


class IncrementalTextRank:
    """Streaming keyword extractor over per-document graphs.

    `process_new` enforces the one-document-streaming contract (ids must be
    unseen); `process_update` creates on first sight and extends afterwards,
    warm-starting PageRank from the document's previous scores. Both return
    the document's current keyword list and feed the per-document and
    stream-level top-K counters.
    """

    def __init__(
        self,
        *,
        window: int = DEFAULT_WINDOW,
        damping: float = DEFAULT_DAMPING,
        tolerance: float = DEFAULT_TOLERANCE,
        max_iterations: int = DEFAULT_MAX_ITERATIONS,
        topk_capacity: int = DEFAULT_TOPK_CAPACITY,
        keywords_per_doc: int = DEFAULT_KEYWORDS_PER_DOC,
        collapse_adjacent: bool = False,
    ):
        self.window = window
        self.damping = damping
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.topk_capacity = topk_capacity
        self.keywords_per_doc = keywords_per_doc
        self.collapse_adjacent = collapse_adjacent
        self.stream_topk = TopKList(topk_capacity)
        self.last_changed_nodes: frozenset[str] = frozenset()
        self._graphs: dict[str, TokenGraph] = {}
        self._ranks: dict[str, RankTable] = {}
        self._doc_topk: dict[str, TopKList] = {}
        self._keywords: dict[str, list[tuple[str, float]]] = {}
        self._sequences: dict[str, list[str]] = {}

    @property
    def document_count(self) -> int:
        return len(self._graphs)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._graphs

    def process_new(self, doc_id: str, tokens: Iterable[str]) -> list[str]:
        if doc_id in self._graphs:
            raise DuplicateDocumentError(f"document {doc_id!r} was already streamed")
        return self._process(doc_id, list(tokens))

    def process_update(self, doc_id: str, tokens: Iterable[str]) -> list[str]:
        return self._process(doc_id, list(tokens))

    def graph(self, doc_id: str) -> TokenGraph:
        self._require(doc_id)
        return self._graphs[doc_id]

    def rank_table(self, doc_id: str) -> RankTable | None:
        self._require(doc_id)
        return self._ranks.get(doc_id)

    def keywords(self, doc_id: str) -> list[tuple[str, float]]:
        """The document's latest extracted keywords with their scores."""
        self._require(doc_id)
        return list(self._keywords[doc_id])

    def document_topk(self, doc_id: str) -> TopKList:
        self._require(doc_id)
        return self._doc_topk[doc_id]

    def export_keywords(self, path: str | Path) -> None:
        """CSV doc_id,rank,keyword,score for every document's current keywords."""
        lines = ["doc_id,rank,keyword,score"]
        for doc_id in sorted(self._keywords):
            for rank, (kw, score) in enumerate(self._keywords[doc_id], 1):
                lines.append(f"{doc_id},{rank},{kw},{score!r}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def export_stream_topk(self, path: str | Path) -> None:
        """CSV keyword,count,error for the stream-level top-K list."""
        lines = ["keyword,count,error"]
        ranked = sorted(self.stream_topk.counts.items(), key=lambda kv: (-kv[1], kv[0]))
        for kw, count in ranked:
            lines.append(f"{kw},{count},{self.stream_topk.errors[kw]}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    # internals

    def _require(self, doc_id: str) -> None:
        if doc_id not in self._graphs:
            raise UnknownDocumentError(f"unknown document {doc_id!r}")

    def _process(self, doc_id: str, tokens: list[str]) -> list[str]:
        warm = self._ranks.get(doc_id)
        graph = self._graphs.setdefault(doc_id, TokenGraph(doc_id))
        doc_topk = self._doc_topk.setdefault(doc_id, TopKList(self.topk_capacity))
        graph.add_sequence(tokens, self.window)
        self.last_changed_nodes = frozenset(tokens)
        if self.collapse_adjacent:
            self._sequences.setdefault(doc_id, []).extend(tokens)
        if not graph.adj:
            self._keywords[doc_id] = []
            return []
        table = pagerank(
            graph,
            damping=self.damping,
            tolerance=self.tolerance,
            max_iterations=self.max_iterations,
            warm_start=warm,
        )
        self._ranks[doc_id] = table
        ranked = select_keywords(
            table,
            self.keywords_per_doc,
            sequence=self._sequences.get(doc_id),
            collapse=self.collapse_adjacent,
        )
        self._keywords[doc_id] = ranked
        for kw, _ in ranked:
            doc_topk.update(kw)
            self.stream_topk.update(kw)
        return [kw for kw, _ in ranked]

"""Complete-linkage agglomerative clustering of similarity snapshots.

Distances are 1 - similarity with missing pairs at distance 1. Each round
merges the pair of clusters whose maximum cross-pair distance is smallest;
ties pick the pair whose (smallest leaf index, partner's smallest leaf index)
is lexicographically lowest, which makes merge order reproducible even on the
heavily tied matrices sparse similarity snapshots produce.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


@dataclass
class DistanceMatrix:
    doc_ids: list[str]
    values: np.ndarray  # (n, n) float64, symmetric, zero diagonal


@dataclass
class Dendrogram:
    """Merge history: leaves are 0..n-1, merge i creates cluster id n+i."""

    leaf_ids: list[str]
    merges: list[tuple[int, int, float]]

    @property
    def leaf_count(self) -> int:
        return len(self.leaf_ids)

    @property
    def heights(self) -> list[float]:
        return [h for _, _, h in self.merges]


def to_distance(
    similarities: Mapping[tuple[str, str], float],
    doc_ids: Sequence[str],
) -> DistanceMatrix:
    """Distance = 1 - similarity; absent pairs count as similarity 0.

    Pairs mentioning ids outside `doc_ids` are ignored so snapshots can be
    clustered over any document subset.
    """
    ids = list(doc_ids)
    index = {d: i for i, d in enumerate(ids)}
    if len(index) != len(ids):
        raise ValueError("doc_ids contains duplicates")
    n = len(ids)
    values = np.ones((n, n), dtype=np.float64)
    np.fill_diagonal(values, 0.0)
    for (a, b), s in similarities.items():
        ia = index.get(a)
        ib = index.get(b)
        if ia is None or ib is None or ia == ib:
            continue
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"similarity for pair ({a!r}, {b!r}) out of [0, 1]: {s}")
        values[ia, ib] = values[ib, ia] = 1.0 - s
    return DistanceMatrix(ids, values)


def complete_linkage(dist: DistanceMatrix) -> Dendrogram:
    n = len(dist.doc_ids)
    if n < 2:
        raise ValueError(f"clustering needs at least 2 documents, got {n}")
    values = np.asarray(dist.values, dtype=np.float64)
    if values.shape != (n, n):
        raise ValueError(f"distance matrix shape {values.shape} does not match {n} ids")

    work = values.copy()
    np.fill_diagonal(work, np.inf)
    active = [True] * n
    cluster_id = list(range(n))
    rep = np.arange(n)  # smallest contained leaf index per slot
    merges: list[tuple[int, int, float]] = []
    next_id = n

    for _ in range(n - 1):
        height = float(work.min())
        # lexicographically smallest (rep_i, rep_j) among minimal pairs: scan
        # rows in rep order; the first row containing the minimum settles rep_i
        slot_i = slot_j = -1
        for i in sorted((s for s in range(n) if active[s]), key=lambda s: rep[s]):
            hits = np.nonzero(work[i] == height)[0]
            if hits.size:
                slot_i = i
                slot_j = int(hits[np.argmin(rep[hits])])
                break
        a, b = cluster_id[slot_i], cluster_id[slot_j]
        merges.append((min(a, b), max(a, b), height))

        merged = np.maximum(work[slot_i], work[slot_j])
        work[slot_i, :] = merged
        work[:, slot_i] = merged
        work[slot_i, slot_i] = np.inf
        work[slot_j, :] = np.inf
        work[:, slot_j] = np.inf
        active[slot_j] = False
        rep[slot_i] = min(rep[slot_i], rep[slot_j])
        cluster_id[slot_i] = next_id
        next_id += 1

    return Dendrogram(list(dist.doc_ids), merges)


def cut(dendrogram: Dendrogram, k: int) -> dict[str, int]:
    """Flat assignment with k clusters: undo the last k-1 merges.

    Clusters are numbered 1..k in order of their smallest leaf index.
    """
    n = dendrogram.leaf_count
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")

    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    id_leaf = {i: i for i in range(n)}
    for t, (a, b, _) in enumerate(dendrogram.merges[: n - k]):
        la, lb = find(id_leaf[a]), find(id_leaf[b])
        parent[lb] = la
        id_leaf[n + t] = la

    groups: dict[int, list[int]] = {}
    for leaf in range(n):
        groups.setdefault(find(leaf), []).append(leaf)
    ordered = sorted(groups.values(), key=min)
    assignment: dict[str, int] = {}
    for label, leaves in enumerate(ordered, 1):
        for leaf in leaves:
            assignment[dendrogram.leaf_ids[leaf]] = label
    return assignment

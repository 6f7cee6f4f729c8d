"""Word-vector tables and compound keyword-set similarity between documents.

Only whole-word lookups are performed; out-of-vocabulary keywords simply do
not contribute, and when a document's entire keyword set is unknown the
calling pipeline's fallback value is used instead (its own TF-IDF cosine, or
plain 0). Similarities below the zeroing threshold are reported as 0, so the
output always lies in {0} union [threshold, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, VectorFileError

DEFAULT_EMBED_THRESHOLD = 0.6


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimensionality must be >= 1, got {self.dim}")

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, word: str) -> np.ndarray | None:
        return self.vectors.get(word)


def _is_int(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


def load_vec_file(path: str | Path) -> EmbeddingTable:
    """Parse the plain text vector format.

    An optional first line "count dim" declares the dimensionality; otherwise
    it is inferred from the first data row. Every following line is
    "word v1 v2 ... v_dim", space separated. Duplicate words keep the last
    occurrence. Dimension mismatches and unparseable values raise
    VectorFileError naming the line.
    """
    path = Path(path)
    dim: int | None = None
    vectors: dict[str, np.ndarray] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            parts = raw.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and _is_int(parts[0]) and _is_int(parts[1]):
                dim = int(parts[1])
                if dim < 1:
                    raise VectorFileError(f"{path}: line 1: dimensionality must be >= 1")
                continue
            word, values = parts[0], parts[1:]
            if dim is None:
                if not values:
                    raise VectorFileError(f"{path}: line {lineno}: no vector components")
                dim = len(values)
            if len(values) != dim:
                raise VectorFileError(
                    f"{path}: line {lineno}: expected {dim} components, got {len(values)}"
                )
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise VectorFileError(
                    f"{path}: line {lineno}: non-numeric vector component"
                ) from None
            vectors[word] = vec
    if not vectors:
        raise VectorFileError(f"{path}: no vectors found")
    return EmbeddingTable(dim=dim, vectors=vectors)


def keyword_set_vector(keywords: Iterable[str], table: EmbeddingTable) -> np.ndarray | None:
    """Mean vector of the distinct in-vocabulary keywords; None when all are unknown."""
    seen: set[str] = set()
    found: list[np.ndarray] = []
    for kw in keywords:
        if kw in seen:
            continue
        seen.add(kw)
        vec = table.vectors.get(kw)
        if vec is not None:
            found.append(vec)
    if not found:
        return None
    return np.mean(found, axis=0)


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu <= 0.0 or nv <= 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def contextual_similarity(
    keywords_a: Sequence[str],
    keywords_b: Sequence[str],
    table: EmbeddingTable,
    *,
    threshold: float = DEFAULT_EMBED_THRESHOLD,
    fallback: float = 0.0,
    mode: str = "mean",
) -> float:
    """Compound similarity of two documents from their extracted keywords.

    mode "mean" takes the cosine of the mean keyword vectors; "pairwise"
    averages the cosine over all in-vocabulary keyword pairs. Negative cosines
    clamp to 0. When either side is fully out of vocabulary the `fallback`
    value stands in. Anything below `threshold` is reported as 0.
    """
    if mode == "mean":
        va = keyword_set_vector(keywords_a, table)
        vb = keyword_set_vector(keywords_b, table)
        if va is None or vb is None:
            s = float(fallback)
        else:
            s = max(0.0, _cosine(va, vb))
    elif mode == "pairwise":
        vecs_a = [table.vectors[k] for k in dict.fromkeys(keywords_a) if k in table.vectors]
        vecs_b = [table.vectors[k] for k in dict.fromkeys(keywords_b) if k in table.vectors]
        if not vecs_a or not vecs_b:
            s = float(fallback)
        else:
            total = sum(_cosine(u, v) for u in vecs_a for v in vecs_b)
            s = max(0.0, total / (len(vecs_a) * len(vecs_b)))
    else:
        raise ConfigError(f"unknown compound mode {mode!r} (expected mean or pairwise)")
    s = min(1.0, s)
    return s if s >= threshold else 0.0

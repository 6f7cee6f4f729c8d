"""External cluster validation and rank-based series comparison.

All fifteen validation metrics derive from the class-by-cluster contingency
table. Entropies use natural logarithms with 0 * ln 0 = 0. Ratio metrics with
a zero denominator report 0, except the adjusted Rand index whose denominator
vanishes only when the two partitions are pair-identical, in which case it
reports 1. With fewer than two items the pair-based metrics are undefined and
reported as NaN.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, fields
from typing import Mapping, Sequence

import numpy as np

METRIC_NAMES = (
    "PUR", "E", "NMI", "VI", "NVI", "SPE", "SENS", "P", "R", "F1",
    "RI", "ARI", "JI", "FMI", "MM",
)

PAIR_METRIC_NAMES = ("SPE", "SENS", "P", "R", "F1", "RI", "ARI", "JI", "FMI", "MM")


@dataclass
class ContingencyTable:
    """Class x cluster co-occurrence counts."""

    counts: np.ndarray  # (classes, clusters) int64
    class_labels: list
    cluster_labels: list

    @property
    def class_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def cluster_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class PairCounts:
    """Unordered document-pair agreement counts."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @classmethod
    def from_table(cls, table: ContingencyTable) -> "PairCounts":
        def pairs(x: np.ndarray) -> int:
            x = x.astype(np.int64)
            return int((x * (x - 1) // 2).sum())

        n = table.total
        tp = pairs(table.counts)
        same_cluster = pairs(table.cluster_sizes)
        same_class = pairs(table.class_sizes)
        total = n * (n - 1) // 2
        fp = same_cluster - tp
        fn = same_class - tp
        tn = total - tp - fp - fn
        return cls(tp=tp, fp=fp, fn=fn, tn=tn)


@dataclass
class MetricReport:
    PUR: float
    E: float
    NMI: float
    VI: float
    NVI: float
    SPE: float
    SENS: float
    P: float
    R: float
    F1: float
    RI: float
    ARI: float
    JI: float
    FMI: float
    MM: float

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def contingency(truth, predicted) -> ContingencyTable:
    """Build the contingency table from two labelings.

    Accepts two parallel sequences, or two mappings over the same doc ids
    (iterated in the truth mapping's order). Classes and clusters are indexed
    in first-appearance order.
    """
    if isinstance(truth, Mapping) or isinstance(predicted, Mapping):
        if not (isinstance(truth, Mapping) and isinstance(predicted, Mapping)):
            raise ValueError("truth and prediction must both be mappings or both sequences")
        if set(truth) != set(predicted):
            raise ValueError("truth and prediction cover different doc ids")
        keys = list(truth)
        t_seq = [truth[k] for k in keys]
        p_seq = [predicted[k] for k in keys]
    else:
        t_seq = list(truth)
        p_seq = list(predicted)
        if len(t_seq) != len(p_seq):
            raise ValueError(f"length mismatch: {len(t_seq)} truth vs {len(p_seq)} predicted")
    if not t_seq:
        raise ValueError("cannot build a contingency table from zero items")

    class_index: dict = {}
    cluster_index: dict = {}
    for label in t_seq:
        class_index.setdefault(label, len(class_index))
    for label in p_seq:
        cluster_index.setdefault(label, len(cluster_index))
    counts = np.zeros((len(class_index), len(cluster_index)), dtype=np.int64)
    for t, p in zip(t_seq, p_seq):
        counts[class_index[t], cluster_index[p]] += 1
    return ContingencyTable(counts, list(class_index), list(cluster_index))


def _entropy(probabilities: np.ndarray) -> float:
    p = probabilities[probabilities > 0]
    return float(-(p * np.log(p)).sum())


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def evaluate_all(table: ContingencyTable) -> MetricReport:
    """Compute all fifteen validation metrics from one contingency table."""
    n = table.counts.astype(np.float64)
    total = table.total
    if total < 1:
        raise ValueError("contingency table is empty")
    a = table.class_sizes.astype(np.float64)
    b = table.cluster_sizes.astype(np.float64)

    pur = float(n.max(axis=0).sum()) / total

    # per-cluster class entropy, averaged by cluster mass, normalized by ln(#classes)
    n_classes = n.shape[0]
    if n_classes > 1:
        cluster_entropy = 0.0
        for j in range(n.shape[1]):
            if b[j] > 0:
                cluster_entropy += (b[j] / total) * _entropy(n[:, j] / b[j])
        entropy_norm = cluster_entropy / math.log(n_classes)
    else:
        entropy_norm = 0.0

    h_class = _entropy(a / total)
    h_cluster = _entropy(b / total)
    nz = n > 0
    mi = float(
        ((n[nz] / total) * np.log(total * n[nz] / np.outer(a, b)[nz])).sum()
    )
    nmi = _ratio(mi, math.sqrt(h_class * h_cluster)) if h_class * h_cluster > 0 else 0.0
    vi = max(0.0, h_class + h_cluster - 2.0 * mi)
    h_joint = _entropy(n[nz].ravel() / total)
    nvi = _ratio(vi, h_joint) if h_joint > 0 else 0.0

    if total < 2:
        nan = float("nan")
        return MetricReport(
            PUR=pur, E=entropy_norm, NMI=nmi, VI=vi, NVI=nvi,
            SPE=nan, SENS=nan, P=nan, R=nan, F1=nan,
            RI=nan, ARI=nan, JI=nan, FMI=nan, MM=nan,
        )

    pc = PairCounts.from_table(table)
    precision = _ratio(pc.tp, pc.tp + pc.fp)
    recall = _ratio(pc.tp, pc.tp + pc.fn)
    specificity = _ratio(pc.tn, pc.tn + pc.fp)
    f1 = _ratio(2.0 * precision * recall, precision + recall)
    ri = (pc.tp + pc.tn) / pc.total
    ji = _ratio(pc.tp, pc.tp + pc.fp + pc.fn)
    fmi = math.sqrt(precision * recall)

    same_class = pc.tp + pc.fn
    same_cluster = pc.tp + pc.fp
    expected = same_class * same_cluster / pc.total
    ari_den = 0.5 * (same_class + same_cluster) - expected
    ari = 1.0 if ari_den == 0.0 else (pc.tp - expected) / ari_den

    mm = float((a * a).sum() + (b * b).sum() - 2.0 * (n * n).sum())

    return MetricReport(
        PUR=pur, E=entropy_norm, NMI=nmi, VI=vi, NVI=nvi,
        SPE=specificity, SENS=recall, P=precision, R=recall, F1=f1,
        RI=ri, ARI=ari, JI=ji, FMI=fmi, MM=mm,
    )


@dataclass(frozen=True)
class RankTestResult:
    statistic: float
    p_value: float
    verdict: str  # "DIFF" or "EQUAL"
    method: str


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j + 2) / 2.0  # 1-based positions i+1 .. j+1
        for t in range(i, j + 1):
            ranks[order[t]] = mid
        i = j + 1
    return ranks


def _normal_tail_p(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def _exact_min_rank_sum_p(ranks: Sequence[float], statistic: float) -> float:
    """P(min(W+, W-) <= statistic) over all equally likely sign patterns.

    Mid-ranks are half-integers, so doubling makes the subset-sum distribution
    integral; the count is exact in big-int arithmetic.
    """
    doubled = [int(round(2 * r)) for r in ranks]
    total = sum(doubled)
    dist = [0] * (total + 1)
    dist[0] = 1
    for r in doubled:
        for s in range(total, r - 1, -1):
            dist[s] += dist[s - r]
    bound = int(round(2 * statistic))
    favorable = sum(c for s, c in enumerate(dist) if min(s, total - s) <= bound)
    return favorable / (1 << len(ranks))


def wilcoxon_paired(
    series_a: Sequence[float],
    series_b: Sequence[float],
    alpha: float = 0.05,
    *,
    method: str = "auto",
    exact_limit: int = 25,
) -> RankTestResult:
    """Two-sided Wilcoxon signed-rank test on paired series.

    Zero differences are dropped, absolute differences get mid-ranks, and the
    statistic is min(W+, W-). Up to `exact_limit` non-zero pairs the p-value
    is exact (subset-sum distribution of the observed ranks over all sign
    patterns); beyond that a tie-corrected, continuity-corrected normal
    approximation is used. Verdict is DIFF when p < alpha; all-zero
    differences give EQUAL with p = 1.
    """
    xs = [float(v) for v in series_a]
    ys = [float(v) for v in series_b]
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 6:
        raise ValueError(f"need at least 6 paired samples, got {len(xs)}")
    if method not in ("auto", "exact", "approx"):
        raise ValueError(f"unknown method {method!r}")

    diffs = [y - x for x, y in zip(xs, ys) if y != x]
    if not diffs:
        return RankTestResult(0.0, 1.0, "EQUAL", "exact")
    ranks = _midranks([abs(d) for d in diffs])
    w_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)
    w_minus = sum(r for r, d in zip(ranks, diffs) if d < 0)
    statistic = min(w_plus, w_minus)
    count = len(diffs)

    if method == "exact" or (method == "auto" and count <= exact_limit):
        p = _exact_min_rank_sum_p(ranks, statistic)
        used = "exact"
    else:
        mean = count * (count + 1) / 4.0
        var = count * (count + 1) * (2 * count + 1) / 24.0
        var -= sum(t**3 - t for t in Counter(ranks).values()) / 48.0
        if var <= 0.0:
            p = 1.0
        else:
            z = (statistic - mean + 0.5) / math.sqrt(var)
            p = min(1.0, 2.0 * _normal_tail_p(z))
        used = "approx"

    verdict = "DIFF" if p < alpha else "EQUAL"
    return RankTestResult(float(statistic), float(p), verdict, used)


def mann_whitney_u(
    series_a: Sequence[float],
    series_b: Sequence[float],
    alpha: float = 0.05,
) -> RankTestResult:
    """Two-sided Mann-Whitney U with tie-corrected normal approximation."""
    xs = [float(v) for v in series_a]
    ys = [float(v) for v in series_b]
    if not xs or not ys:
        raise ValueError("both series must be non-empty")
    na, nb = len(xs), len(ys)
    ranks = _midranks(xs + ys)
    r_a = sum(ranks[:na])
    u_a = r_a - na * (na + 1) / 2.0
    u_b = na * nb - u_a
    statistic = min(u_a, u_b)

    mean = na * nb / 2.0
    total = na + nb
    tie_term = sum(t**3 - t for t in Counter(ranks).values())
    var = na * nb / 12.0 * ((total + 1) - tie_term / (total * (total - 1)))
    if var <= 0.0:
        p = 1.0
    else:
        z = (statistic - mean + 0.5) / math.sqrt(var)
        p = min(1.0, 2.0 * _normal_tail_p(z))
    verdict = "DIFF" if p < alpha else "EQUAL"
    return RankTestResult(float(statistic), float(p), verdict, "approx")

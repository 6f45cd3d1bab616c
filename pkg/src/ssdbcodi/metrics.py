"""Evaluation metrics: ranking AUC, Rand index, and normalized mutual information.

Partition metrics treat every distinct value as its own category, so an
OUTLIER sentinel simply acts as one extra cluster id.
"""

import numpy as np


def _average_ranks(values: np.ndarray) -> np.ndarray:
    # 1-based ranks with ties sharing their group's average rank
    _, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
    high = np.cumsum(counts)
    return (high - (counts - 1) / 2.0)[inverse]


def auc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative; ties count 1/2."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    if s.ndim != 1 or s.shape != y.shape:
        raise ValueError("scores and labels must be equal-length vectors")
    pos = int(y.sum())
    neg = int(y.size - pos)
    if pos == 0 or neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    ranks = _average_ranks(s)
    u = ranks[y].sum() - pos * (pos + 1) / 2.0
    return float(u / (pos * neg))


def _contingency(a, b) -> np.ndarray:
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((int(ai.max()) + 1, int(bi.max()) + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


def _check_partitions(predicted, truth):
    a = np.asarray(predicted)
    b = np.asarray(truth)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError("partitions must be equal-length vectors")
    return a, b


def rand_index(predicted, truth) -> float:
    """Share of point pairs on which the two partitions agree."""
    a, b = _check_partitions(predicted, truth)
    if a.size < 2:
        raise ValueError("rand_index needs at least 2 points")
    t = _contingency(a, b).astype(float)
    n = t.sum()

    def comb2(x):
        return (x * (x - 1) / 2.0).sum()

    same_both = comb2(t)
    total = n * (n - 1) / 2.0
    diff_both = total - comb2(t.sum(axis=1)) - comb2(t.sum(axis=0)) + same_both
    return float((same_both + diff_both) / total)


def nmi(predicted, truth) -> float:
    """2 I(Y;C) / (H(Y) + H(C)) with natural logs; 1.0 when both partitions
    are constant (zero entropy on both sides)."""
    a, b = _check_partitions(predicted, truth)
    if a.size < 1:
        raise ValueError("nmi needs at least 1 point")
    p = _contingency(a, b).astype(float)
    p /= p.sum()
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    ha = float(-(pa[pa > 0] * np.log(pa[pa > 0])).sum())
    hb = float(-(pb[pb > 0] * np.log(pb[pb > 0])).sum())
    if ha + hb == 0.0:
        return 1.0
    outer = np.outer(pa, pb)
    nz = p > 0
    info = float((p[nz] * np.log(p[nz] / outer[nz])).sum())
    return float(min(1.0, max(0.0, 2.0 * info / (ha + hb))))

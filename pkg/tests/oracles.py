"""Independent reference computations used to pin expected test values.

Everything here deliberately takes a different route from the library:
closure-based minimax paths instead of expansion prefixes, threshold-swept
ROC curves instead of rank sums, pair enumeration and Counter-based
contingencies instead of vectorized tables.
"""

from collections import Counter
import math

import numpy as np

from ssdbcodi import Dataset, LabelSet, OUTLIER


def minimax_closure(weights: np.ndarray) -> np.ndarray:
    """All-pairs minimax path values over a complete weighted graph."""
    w = np.array(weights, dtype=float)
    n = w.shape[0]
    np.fill_diagonal(w, 0.0)
    for k in range(n):
        w = np.minimum(w, np.maximum(w[:, k:k + 1], w[k:k + 1, :]))
    return w


def auc_by_threshold_sweep(scores, labels) -> float:
    """Trapezoidal area under the ROC curve swept over score thresholds."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    pos = y.sum()
    neg = (~y).sum()
    thresholds = np.concatenate([[np.inf], np.unique(s)[::-1]])
    points = []
    for t in thresholds:
        predicted = s >= t
        points.append((
            (predicted & ~y).sum() / neg,
            (predicted & y).sum() / pos,
        ))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return float(area)


def rand_by_pair_enumeration(a, b) -> float:
    """Agreement rate over all point pairs, computed from pair masks."""
    ai = np.asarray(a)
    bi = np.asarray(b)
    same_a = ai[:, None] == ai[None, :]
    same_b = bi[:, None] == bi[None, :]
    upper = np.triu_indices(ai.size, k=1)
    return float((same_a[upper] == same_b[upper]).mean())


def nmi_by_counter(a, b) -> float:
    """Normalized mutual information from Counter-based contingencies."""
    a = [int(v) for v in a]
    b = [int(v) for v in b]
    n = len(a)
    ca = Counter(a)
    cb = Counter(b)
    cab = Counter(zip(a, b))
    h_a = -sum((c / n) * math.log(c / n) for c in ca.values())
    h_b = -sum((c / n) * math.log(c / n) for c in cb.values())
    if h_a + h_b == 0.0:
        return 1.0
    info = sum((c / n) * math.log((c / n) / ((ca[x] / n) * (cb[y] / n)))
               for (x, y), c in cab.items())
    return 2.0 * info / (h_a + h_b)


def random_points(rng, n=None, d=None) -> np.ndarray:
    """Loosely clustered random points so expansions see real structure."""
    n = int(rng.integers(5, 40)) if n is None else n
    d = int(rng.integers(1, 4)) if d is None else d
    centers = rng.normal(scale=4.0, size=(int(rng.integers(1, 4)), d))
    assign = rng.integers(centers.shape[0], size=n)
    return centers[assign] + rng.normal(scale=1.0, size=(n, d))


def random_labelset(rng, n, n_clusters=3, outlier_rate=0.3) -> LabelSet:
    """A random label assignment over a random subset of points."""
    count = int(rng.integers(1, max(2, n // 2)))
    chosen = rng.choice(n, size=count, replace=False)
    normal = {}
    outliers = set()
    for i in chosen:
        if rng.random() < outlier_rate and normal:
            outliers.add(int(i))
        else:
            normal[int(i)] = int(rng.integers(n_clusters))
    if not normal:
        normal[int(chosen[0])] = 0
    return LabelSet(normal=normal, outliers=frozenset(outliers))


def make_moons(n: int, noise: float, rng) -> tuple:
    """Two interleaved half-circle clusters with Gaussian jitter."""
    half = n // 2
    t1 = rng.uniform(0.0, math.pi, size=half)
    t2 = rng.uniform(0.0, math.pi, size=n - half)
    upper = np.column_stack([np.cos(t1), np.sin(t1)])
    lower = np.column_stack([1.0 - np.cos(t2), 0.5 - np.sin(t2)])
    pts = np.vstack([upper, lower]) + rng.normal(scale=noise, size=(n, 2))
    truth = np.concatenate([np.zeros(half, dtype=int), np.ones(n - half, dtype=int)])
    return pts, truth


def moons_with_outliers(n: int = 400, outlier_rate: float = 0.05,
                        noise: float = 0.08, seed: int = 411) -> Dataset:
    """Two-moons data plus uniformly scattered background outliers."""
    rng = np.random.default_rng(seed)
    pts, truth = make_moons(n, noise, rng)
    n_out = round(n * outlier_rate)
    lo = pts.min(axis=0) - 0.5
    hi = pts.max(axis=0) + 0.5
    background = rng.uniform(lo, hi, size=(n_out, 2))
    points = np.vstack([pts, background])
    labels = np.concatenate([truth, np.full(n_out, OUTLIER, dtype=int)])
    order = rng.permutation(points.shape[0])
    return Dataset(points=points[order], truth=labels[order], name="moons")

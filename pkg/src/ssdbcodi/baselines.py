"""Reference algorithms for comparison: DBSCAN, k-means, LOF, and the
terminating-expansion clusterer with a nearest-neighbour fallback.

All of them are deterministic given their inputs (and seed, for k-means).
"""

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .expansion import UNCLUSTERED, ssdbscan
from .metricspace import NeighborhoodIndex

# Cluster id for points no cluster claimed.
NOISE = -1


@dataclass(frozen=True)
class BaselineResult:
    """Either a hard assignment (clusterers) or a per-point score (LOF)."""

    assignment: np.ndarray | None = None
    scores: np.ndarray | None = None


def _distances_of(idx) -> np.ndarray:
    if isinstance(idx, NeighborhoodIndex):
        return idx.dist
    d = np.asarray(idx, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("expected a NeighborhoodIndex or a square distance matrix")
    return d


def dbscan(idx, epsilon: float, min_pts: int) -> BaselineResult:
    """Density clustering with the self-excluding core test.

    A point is core when at least min_pts other points sit within epsilon.
    Clusters are the connected components of core points under the epsilon
    graph, numbered by ascending smallest member; a non-core point joins
    the cluster of its lowest-indexed core neighbour, if any, else NOISE.
    """
    dist = _distances_of(idx)
    n = dist.shape[0]
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if min_pts < 1:
        raise ValueError("min_pts must be >= 1")
    within = dist <= epsilon
    core = (within.sum(axis=1) - 1) >= min_pts  # the diagonal counts self
    assign = np.full(n, NOISE, dtype=int)
    cluster = 0
    for p in range(n):
        if not core[p] or assign[p] != NOISE:
            continue
        frontier = np.array([p])
        assign[p] = cluster
        while frontier.size:
            reach = within[frontier].any(axis=0) & core & (assign == NOISE)
            frontier = np.flatnonzero(reach)
            assign[frontier] = cluster
        cluster += 1
    for p in range(n):
        if core[p]:
            continue
        neighbours = np.flatnonzero(within[p] & core)
        if neighbours.size:
            assign[p] = assign[neighbours[0]]
    return BaselineResult(assignment=assign)


def _kmeanspp(pts: np.ndarray, k: int, rng) -> np.ndarray:
    n = pts.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((pts - pts[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(k - 1):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            nxt = int(min(set(range(n)) - set(chosen)))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((pts - pts[nxt]) ** 2).sum(axis=1))
    return pts[chosen].copy()


def kmeans(ds, k: int, seed: int, max_iter: int = 100) -> BaselineResult:
    """Lloyd iterations from seeded k-means++ starting centroids.

    Stops at an assignment fixed point or after max_iter updates. Distance
    ties go to the lowest centroid index; a cluster that empties keeps its
    previous centroid.
    """
    pts = ds.points if isinstance(ds, Dataset) else np.asarray(ds, dtype=float)
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp(pts, k, rng)
    labels = _nearest_centroid(pts, centroids)
    for _ in range(max_iter):
        for c in range(k):
            members = pts[labels == c]
            if members.shape[0]:
                centroids[c] = members.mean(axis=0)
        new_labels = _nearest_centroid(pts, centroids)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return BaselineResult(assignment=labels)


def _nearest_centroid(pts: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = ((pts[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def lof(idx, k: int) -> BaselineResult:
    """Local outlier factor over exactly k nearest other points.

    Neighbour ties resolve to the smaller index. Scores near 1 mean the
    point is as dense as its neighbours; well above 1 means outlying.
    """
    dist = _distances_of(idx)
    n = dist.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")
    d = dist.copy()
    np.fill_diagonal(d, np.inf)
    nbrs = np.argsort(d, axis=1, kind="stable")[:, :k]
    kdist = np.partition(d, k - 1, axis=1)[:, k - 1]
    rows = np.arange(n)[:, None]
    reach = np.maximum(kdist[nbrs], d[rows, nbrs])
    with np.errstate(divide="ignore", invalid="ignore"):
        lrd = k / reach.sum(axis=1)
        scores = lrd[nbrs].mean(axis=1) / lrd
    # duplicated points can drive both densities to infinity; call that 1
    scores = np.where(np.isnan(scores), 1.0, scores)
    return BaselineResult(scores=scores)


def ssdbscan_with_fallback(idx: NeighborhoodIndex, labels) -> BaselineResult:
    """Terminating-expansion clustering with leftovers joined to the
    cluster of their nearest clustered point (ties to the smaller index)."""
    ca = ssdbscan(idx, labels)
    assign = ca.assign.copy()
    unclustered = np.flatnonzero(assign == UNCLUSTERED)
    clustered = np.flatnonzero(assign != UNCLUSTERED)
    if unclustered.size and clustered.size:
        sub = idx.dist[np.ix_(unclustered, clustered)]
        nearest = clustered[np.argmin(sub, axis=1)]
        assign[unclustered] = assign[nearest]
    return BaselineResult(assignment=assign)

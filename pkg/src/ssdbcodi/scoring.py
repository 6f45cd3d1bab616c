"""Per-point outlier scores and their weighted blend.

Three ingredients, each mapped through exp(-x) so that 1 means firmly
normal and values near 0 mean suspicious:

* r_score: how cheaply a point is reached from the labeled normal roots,
* l_score: how dense the point's own reachability neighbourhood is,
* sim_score: proximity to the labeled outliers (0 when there are none).

The blended t_score weights the complements of the first two against the
third; higher t_score means more outlier-like.
"""

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, LabelSet
from .metricspace import NeighborhoodIndex, knn_by_rdist, rdist_matrix, rdist_row


@dataclass(frozen=True)
class ScoreParams:
    """Blend weights for the combined score plus the shared min_pts."""

    alpha: float
    beta: float
    min_pts: int = 3

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")
        if self.alpha + self.beta > 1.0 + 1e-9:
            raise ValueError(f"alpha + beta must not exceed 1, got {self.alpha + self.beta}")
        if self.min_pts < 1:
            raise ValueError(f"min_pts must be >= 1, got {self.min_pts}")


@dataclass(frozen=True)
class ScoreTable:
    """Per-point score columns; t_score is None until a blend is applied."""

    r_score: np.ndarray
    l_score: np.ndarray
    sim_score: np.ndarray
    t_score: np.ndarray | None = None


def r_score(emax) -> np.ndarray:
    """exp(-emax): 1 exactly at the labeled normal roots, decaying with
    the cost of the cheapest expansion path."""
    e = np.asarray(emax, dtype=float)
    if np.any(e < 0):
        raise ValueError("emax values must be non-negative")
    return np.exp(-e)


def local_density(idx: NeighborhoodIndex, q: int) -> float:
    """Mean reachability to q's min_pts reachability-nearest other points."""
    nbrs = knn_by_rdist(idx, q, idx.min_pts)
    return float(rdist_row(idx, q)[nbrs].mean())


def local_densities(idx: NeighborhoodIndex) -> np.ndarray:
    """Vectorized local_density for every point."""
    rd = rdist_matrix(idx)
    np.fill_diagonal(rd, np.inf)
    smallest = np.partition(rd, idx.min_pts - 1, axis=1)[:, :idx.min_pts]
    return smallest.mean(axis=1)


def l_score(ld) -> np.ndarray:
    """exp(-local density): near 1 in tight neighbourhoods."""
    v = np.asarray(ld, dtype=float)
    if np.any(v < 0):
        raise ValueError("local densities must be non-negative")
    return np.exp(-v)


def sim_score(ds: Dataset, labels: LabelSet, q: int) -> float:
    """exp(-distance to the nearest labeled outlier); 0 when none are labeled."""
    if not labels.outliers:
        return 0.0
    outs = ds.points[sorted(labels.outliers)]
    d = np.sqrt(((ds.points[q] - outs) ** 2).sum(axis=1))
    return float(np.exp(-d.min()))


def sim_scores(ds: Dataset, labels: LabelSet) -> np.ndarray:
    """Vectorized sim_score for every point."""
    if not labels.outliers:
        return np.zeros(ds.n)
    outs = ds.points[sorted(labels.outliers)]
    d2 = ((ds.points[:, None, :] - outs[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-np.sqrt(d2.min(axis=1)))


def t_score(table: ScoreTable, params: ScoreParams) -> np.ndarray:
    """alpha * (1 - r) + beta * (1 - l) + (1 - alpha - beta) * sim, in [0, 1]."""
    w3 = max(0.0, 1.0 - params.alpha - params.beta)
    return (params.alpha * (1.0 - table.r_score)
            + params.beta * (1.0 - table.l_score)
            + w3 * table.sim_score)


def score_table(idx: NeighborhoodIndex, ds: Dataset, labels: LabelSet,
                emax, params: ScoreParams) -> ScoreTable:
    """Assemble the full four-column table for a prepared expansion."""
    partial = ScoreTable(
        r_score=r_score(emax),
        l_score=l_score(local_densities(idx)),
        sim_score=sim_scores(ds, labels),
    )
    return ScoreTable(
        r_score=partial.r_score,
        l_score=partial.l_score,
        sim_score=partial.sim_score,
        t_score=t_score(partial, params),
    )

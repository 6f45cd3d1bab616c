"""Reliable-set selection and the instance-weighted nearest-neighbour classifier."""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, OUTLIER
from .expansion import ClusterAssignment, UNCLUSTERED
from .scoring import ScoreTable


def _cross_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    sa = np.einsum("ij,ij->i", a, a)
    sb = np.einsum("ij,ij->i", b, b)
    d2 = sa[:, None] + sb[None, :] - 2.0 * (a @ b.T)
    np.maximum(d2, 0.0, out=d2)
    return np.sqrt(d2)


@dataclass(frozen=True)
class TrainingSet:
    """Classifier training rows: dataset indices, a class each, and a weight each.

    Reliable normals carry their cluster id weighted by r_score; reliable
    outliers carry OUTLIER weighted by t_score. Indices never repeat.
    """

    indices: np.ndarray
    classes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=int)
        classes = np.asarray(self.classes, dtype=int)
        weights = np.asarray(self.weights, dtype=float)
        if not indices.shape == classes.shape == weights.shape:
            raise ValueError("indices, classes, and weights must have equal length")
        if indices.size != np.unique(indices).size:
            raise ValueError("training indices must be unique")
        if np.any(classes < OUTLIER):
            raise ValueError("classes must be cluster ids or OUTLIER")
        if np.any(weights < 0) or np.any(weights > 1):
            raise ValueError("weights must lie in [0, 1]")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return int(self.indices.size)

    @property
    def entries(self) -> list:
        return [(int(i), int(c), float(w))
                for i, c, w in zip(self.indices, self.classes, self.weights)]


def select_reliable(assignment: ClusterAssignment, scores: ScoreTable, k: int) -> TrainingSet:
    """All clustered points as reliable normals plus the k most outlier-like
    unclustered points (highest t_score, ties to the smaller index)."""
    if scores.t_score is None:
        raise ValueError("score table must include t_score")
    assign = assignment.assign
    clustered = np.flatnonzero(assign != UNCLUSTERED)
    unclustered = np.flatnonzero(assign == UNCLUSTERED)
    if not 0 <= k <= unclustered.size:
        raise ValueError(f"k must be in [0, {unclustered.size}], got {k}")
    t = scores.t_score[unclustered]
    order = np.lexsort((unclustered, -t))
    chosen = unclustered[order[:k]]
    return TrainingSet(
        indices=np.concatenate([clustered, chosen]),
        classes=np.concatenate([assign[clustered], np.full(k, OUTLIER, dtype=int)]),
        weights=np.concatenate([scores.r_score[clustered], scores.t_score[chosen]]),
    )


class Classifier(ABC):
    """Interface for instance-weighted classifiers over feature vectors."""

    @abstractmethod
    def predict_points(self, points: np.ndarray) -> tuple:
        """Return (classes, outlier_score) arrays for the query rows."""


@dataclass(frozen=True)
class WeightedKnnClassifier(Classifier):
    """Deterministic weighted-vote k-nearest-neighbour classifier.

    Each query collects its k_c nearest training rows (Euclidean, ties by
    training-row position) and sums their weights per class. The heaviest
    class wins; on a tied vote a cluster beats OUTLIER and lower cluster
    ids beat higher ones. outlier_score is OUTLIER's share of the summed
    weight.
    """

    features: np.ndarray
    classes: np.ndarray
    weights: np.ndarray
    k_c: int

    def predict_points(self, points: np.ndarray) -> tuple:
        queries = np.asarray(points, dtype=float)
        if queries.ndim != 2 or queries.shape[1] != self.features.shape[1]:
            raise ValueError(
                f"queries must be 2-D with {self.features.shape[1]} columns"
            )
        d = _cross_distances(queries, self.features)
        nbrs = np.argsort(d, axis=1, kind="stable")[:, :self.k_c]
        out_class = np.empty(queries.shape[0], dtype=int)
        out_score = np.empty(queries.shape[0], dtype=float)
        for row in range(queries.shape[0]):
            votes = {}
            for j in nbrs[row]:
                c = int(self.classes[j])
                votes[c] = votes.get(c, 0.0) + float(self.weights[j])
            total = sum(votes.values())
            top = max(votes.values())
            winners = sorted(c for c, v in votes.items() if v == top and c != OUTLIER)
            out_class[row] = winners[0] if winners else OUTLIER
            out_score[row] = votes.get(OUTLIER, 0.0) / total if total > 0 else 0.0
        return out_class, out_score


def train(ts: TrainingSet, features, k_c: int) -> WeightedKnnClassifier:
    """Materialize the classifier from a training set over dataset features."""
    if len(ts) == 0:
        raise ValueError("training set is empty")
    if not 1 <= k_c <= len(ts):
        raise ValueError(f"k_c must be in [1, {len(ts)}], got {k_c}")
    pts = features.points if isinstance(features, Dataset) else np.asarray(features, dtype=float)
    return WeightedKnnClassifier(
        features=pts[ts.indices],
        classes=np.asarray(ts.classes, dtype=int),
        weights=np.asarray(ts.weights, dtype=float),
        k_c=int(k_c),
    )


def predict(classifier: Classifier, ds) -> tuple:
    """Classify every dataset point.

    Returns (classes, outliers, outlier_score): predicted class per point
    (cluster id or OUTLIER), the boolean outlier mask, and OUTLIER's vote
    share per point.
    """
    pts = ds.points if isinstance(ds, Dataset) else np.asarray(ds, dtype=float)
    classes, outlier_score = classifier.predict_points(pts)
    return classes, classes == OUTLIER, outlier_score


@dataclass(frozen=True)
class PipelineResult:
    """End-to-end output: predictions plus the artifacts that produced them."""

    clusters: np.ndarray
    outliers: np.ndarray
    outlier_score: np.ndarray
    score_table: ScoreTable
    assignment: ClusterAssignment
    training: TrainingSet
    k_c: int

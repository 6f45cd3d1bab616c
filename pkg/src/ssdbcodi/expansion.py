"""Prim-order density expansion from labeled roots, back-tracing, and clustering.

An expansion grows a tree over the complete reachability graph starting at
a labeled normal point, always attaching the cheapest unclaimed point next
(ties go to the smaller index). The running maximum of attachment keys at
the moment a point joins equals the minimax reachability path value from
the root to that point, which is what downstream scoring consumes.
"""

from dataclasses import dataclass

import numpy as np

from .dataset import LabelSet
from .metricspace import NeighborhoodIndex

# Assignment value for points no back-trace claimed.
UNCLUSTERED = -1

_NO_LABEL = -2
_OUTLIER_LABEL = -1


def _user_labels(labels: LabelSet, n: int) -> np.ndarray:
    lab = np.full(n, _NO_LABEL, dtype=int)
    for i, c in labels.normal.items():
        lab[i] = c
    for i in labels.outliers:
        lab[i] = _OUTLIER_LABEL
    return lab


@dataclass(frozen=True)
class ExpansionRecord:
    """One expansion: insertion order with attachment keys and running maxima.

    prefix_max[q] is the largest attachment key seen up to and including
    q's insertion (NaN for points a terminated expansion never reached).
    boundary_pos is the position in `order` of the first inserted point
    whose user label differs from the root's; labeled outliers always
    count as different.
    """

    root: int
    order: tuple
    prefix_max: np.ndarray
    boundary_pos: int | None

    @property
    def boundary(self) -> int | None:
        """Point index of the first differently-labeled point, if any."""
        if self.boundary_pos is None:
            return None
        return self.order[self.boundary_pos][0]


@dataclass(frozen=True)
class ClusterAssignment:
    """Per-point cluster id, or UNCLUSTERED where no back-trace claimed the point."""

    assign: np.ndarray

    @property
    def clustered(self) -> np.ndarray:
        return self.assign != UNCLUSTERED

    @property
    def n_unclustered(self) -> int:
        return int((self.assign == UNCLUSTERED).sum())


def prim_expand(idx: NeighborhoodIndex, root: int, labels: LabelSet,
                terminate: bool) -> ExpansionRecord:
    """Expand from a labeled normal root in cheapest-attachment order.

    With terminate=True the expansion stops right after inserting the
    first differently-labeled point (original semantics); otherwise it
    runs until every point is inserted while still recording where that
    boundary occurred.
    """
    n = idx.n
    if root not in labels.normal:
        raise ValueError(f"expansion root {root} must be a labeled normal point")
    lab = _user_labels(labels, n)
    root_label = lab[root]

    keys = np.full(n, np.inf)
    keys[root] = 0.0
    in_tree = np.zeros(n, dtype=bool)
    order = []
    prefix = np.full(n, np.nan)
    boundary_pos = None
    running = 0.0

    for step in range(n):
        q = int(np.argmin(keys))  # ties resolve to the smallest index
        key = float(keys[q])
        in_tree[q] = True
        keys[q] = np.inf
        running = key if step == 0 else max(running, key)
        order.append((q, key))
        prefix[q] = running
        if boundary_pos is None and lab[q] != _NO_LABEL and lab[q] != root_label:
            boundary_pos = step
            if terminate:
                break
        rd = np.maximum(np.maximum(idx.core, idx.core[q]), idx.dist[q])
        np.minimum(keys, rd, out=keys, where=~in_tree)

    prefix.flags.writeable = False
    return ExpansionRecord(root=int(root), order=tuple(order),
                           prefix_max=prefix, boundary_pos=boundary_pos)


def back_trace(rec: ExpansionRecord) -> set:
    """Points the root keeps after cutting the expansion at its largest key.

    Without a boundary the whole insertion sequence belongs to the root.
    Otherwise the earliest maximum key at or before the boundary marks the
    cut: the point carrying it and everything after are dropped.
    """
    if rec.boundary_pos is None:
        return {p for p, _ in rec.order}
    keys = [k for _, k in rec.order[1:rec.boundary_pos + 1]]
    cut = 1 + int(np.argmax(keys))
    return {rec.order[i][0] for i in range(cut)}


def expand_all(idx: NeighborhoodIndex, labels: LabelSet, terminate: bool) -> list:
    """One expansion per labeled normal root, in ascending root order."""
    labels.validate_for(idx.n)
    roots = sorted(labels.normal)
    if not roots:
        raise ValueError("at least one labeled normal point is required")
    return [prim_expand(idx, r, labels, terminate=terminate) for r in roots]


def combine_backtraces(records, labels: LabelSet, n: int) -> ClusterAssignment:
    """Merge per-root back-traces into a single assignment.

    A point claimed by roots carrying different labels goes to the root
    with the smallest prefix_max there, ties to the smaller root index.
    Claims from same-label roots simply union.
    """
    best_key = np.full(n, np.inf)
    best_root = np.full(n, n, dtype=int)
    assign = np.full(n, UNCLUSTERED, dtype=int)
    for rec in records:
        cluster = labels.normal[rec.root]
        for q in sorted(back_trace(rec)):
            v = float(rec.prefix_max[q])
            if v < best_key[q] or (v == best_key[q] and rec.root < best_root[q]):
                best_key[q] = v
                best_root[q] = rec.root
                assign[q] = cluster
    assign.flags.writeable = False
    return ClusterAssignment(assign=assign)


def ssdbscan(idx: NeighborhoodIndex, labels: LabelSet) -> ClusterAssignment:
    """Terminating-expansion clustering: expand from every labeled normal
    root, back-trace each, and merge the traced clusters."""
    records = expand_all(idx, labels, terminate=True)
    return combine_backtraces(records, labels, idx.n)


def emax_over_roots(records) -> np.ndarray:
    """Per point, the smallest prefix_max over all root expansions.

    Requires at least one record and full coverage (non-terminating
    expansions), so every labeled normal root scores exactly 0.
    """
    if not records:
        raise ValueError("at least one expansion record is required")
    stack = np.vstack([rec.prefix_max for rec in records])
    if np.isnan(stack).any():
        raise ValueError("emax needs non-terminating expansions covering every point")
    return stack.min(axis=0)

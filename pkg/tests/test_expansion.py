"""Expansion order, back-tracing, combined clustering, and minimax prefixes."""

import numpy as np
import pytest

from ssdbcodi import (Dataset, ExpansionRecord, LabelSet, UNCLUSTERED, back_trace,
                      build_index, emax_over_roots, expand_all, prim_expand,
                      rdist_matrix, ssdbscan)
from oracles import minimax_closure, random_labelset, random_points


def line_dataset(values):
    return Dataset(points=[[float(v)] for v in values], truth=[0] * len(values))


def only_normals(mapping):
    return LabelSet(normal=mapping, outliers=frozenset())


def test_prim_expand_worked_example():
    idx = build_index(line_dataset([0, 1, 3]), 1)
    rec = prim_expand(idx, 0, only_normals({0: 0}), terminate=False)
    assert rec.order == ((0, 0.0), (1, 1.0), (2, 2.0))
    assert rec.prefix_max.tolist() == [0.0, 1.0, 2.0]
    assert rec.boundary_pos is None


def test_prim_expand_root_key_is_zero_and_coverage_is_total():
    rng = np.random.default_rng(2)
    for _ in range(20):
        pts = random_points(rng)
        idx = build_index(pts, int(rng.integers(1, 3)))
        labels = random_labelset(rng, idx.n)
        root = sorted(labels.normal)[0]
        rec = prim_expand(idx, root, labels, terminate=False)
        assert rec.order[0] == (root, 0.0)
        inserted = [p for p, _ in rec.order]
        assert sorted(inserted) == list(range(idx.n))
        assert len(set(inserted)) == idx.n
        # prefix_max is the running max of keys in insertion order
        running = 0.0
        for p, key in rec.order:
            running = max(running, key)
            assert rec.prefix_max[p] == running


def test_prim_expand_rejects_non_normal_roots():
    idx = build_index(line_dataset([0, 1, 3]), 1)
    labels = LabelSet(normal={0: 0}, outliers=frozenset([2]))
    with pytest.raises(ValueError, match="root"):
        prim_expand(idx, 2, labels, terminate=True)
    with pytest.raises(ValueError, match="root"):
        prim_expand(idx, 1, labels, terminate=True)


def test_prim_expand_terminating_stops_at_boundary():
    idx = build_index(line_dataset([0, 0.1, 10, 10.1]), 1)
    labels = only_normals({0: 0, 2: 1})
    rec = prim_expand(idx, 0, labels, terminate=True)
    assert rec.boundary == 2
    assert [p for p, _ in rec.order] == [0, 1, 2]
    full = prim_expand(idx, 0, labels, terminate=False)
    assert full.boundary == 2
    assert len(full.order) == 4
    # the shared prefix of insertion order is identical either way
    assert full.order[:len(rec.order)] == rec.order


def test_prefix_max_matches_minimax_oracle():
    rng = np.random.default_rng(9)
    for _ in range(30):
        pts = random_points(rng)
        idx = build_index(pts, int(rng.integers(1, 4)))
        labels = random_labelset(rng, idx.n)
        oracle = minimax_closure(rdist_matrix(idx))
        for root in sorted(labels.normal):
            rec = prim_expand(idx, root, labels, terminate=False)
            assert np.allclose(rec.prefix_max, oracle[root], atol=1e-12)


def synthetic_record(keys, boundary_pos):
    order = tuple((i, k) for i, k in enumerate(keys))
    prefix = np.maximum.accumulate(np.asarray(keys, dtype=float))
    return ExpansionRecord(root=0, order=order, prefix_max=prefix,
                           boundary_pos=boundary_pos)


def test_back_trace_cuts_at_earliest_maximum():
    rec = synthetic_record([0.0, 1.0, 1.2, 5.0, 1.1], boundary_pos=4)
    assert back_trace(rec) == {0, 1, 2}


def test_back_trace_immediate_boundary_keeps_only_root():
    rec = synthetic_record([0.0, 2.0], boundary_pos=1)
    assert back_trace(rec) == {0}


def test_back_trace_without_boundary_keeps_everything():
    rec = synthetic_record([0.0, 1.0, 0.5, 2.0], boundary_pos=None)
    assert back_trace(rec) == {0, 1, 2, 3}


def test_back_trace_tie_uses_earliest_maximum():
    rec = synthetic_record([0.0, 3.0, 1.0, 3.0, 0.5], boundary_pos=4)
    assert back_trace(rec) == {0}


def test_ssdbscan_two_tight_groups():
    idx = build_index(line_dataset([0, 0.1, 10, 10.1]), 1)
    ca = ssdbscan(idx, only_normals({0: 0, 2: 1}))
    assert ca.assign.tolist() == [0, 0, 1, 1]


def test_ssdbscan_single_label_claims_everything():
    idx = build_index(line_dataset([0, 1, 2, 3]), 1)
    ca = ssdbscan(idx, only_normals({0: 0}))
    assert ca.assign.tolist() == [0, 0, 0, 0]


def test_ssdbscan_labeled_outlier_between_same_class_roots():
    idx = build_index(line_dataset([0, 1, 2, 3, 4]), 1)
    labels = LabelSet(normal={0: 0, 4: 0}, outliers=frozenset([2]))
    ca = ssdbscan(idx, labels)
    assert ca.assign[2] == UNCLUSTERED
    assert ca.assign[0] == 0 and ca.assign[4] == 0


def test_ssdbscan_never_violates_labels():
    rng = np.random.default_rng(17)
    for _ in range(200):
        pts = random_points(rng)
        idx = build_index(pts, int(rng.integers(1, 4)))
        labels = random_labelset(rng, idx.n)
        ca = ssdbscan(idx, labels)
        # labeled normals keep their own label; labeled outliers stay out
        for i, c in labels.normal.items():
            assert ca.assign[i] == c
        for i in labels.outliers:
            assert ca.assign[i] == UNCLUSTERED
        # no cluster mixes two different user labels
        for i, ci in labels.normal.items():
            for j, cj in labels.normal.items():
                if ci != cj:
                    assert not (ca.assign[i] == ca.assign[j])


def test_adding_labeled_outlier_never_grows_a_backtrace():
    rng = np.random.default_rng(23)
    for _ in range(50):
        pts = random_points(rng)
        idx = build_index(pts, int(rng.integers(1, 3)))
        labels = random_labelset(rng, idx.n)
        unlabeled = [i for i in range(idx.n) if i not in labels.normal
                     and i not in labels.outliers]
        if not unlabeled:
            continue
        extra = LabelSet(normal=labels.normal,
                         outliers=labels.outliers | {int(rng.choice(unlabeled))})
        for root in sorted(labels.normal):
            before = back_trace(prim_expand(idx, root, labels, terminate=True))
            after = back_trace(prim_expand(idx, root, extra, terminate=True))
            assert after <= before


def test_conflicting_claims_go_to_the_cheaper_root():
    # a midpoint clump reachable from both sides: whichever root reaches it
    # with the smaller running maximum wins
    values = [0, 1, 2, 3.0, 3.5, 4.0, 7, 8, 9]
    idx = build_index(line_dataset(values), 1)
    labels = only_normals({0: 0, 8: 1})
    records = expand_all(idx, labels, terminate=False)
    ca = ssdbscan(idx, labels)
    by_root = {rec.root: rec for rec in records}
    for q in range(idx.n):
        if ca.assign[q] == UNCLUSTERED:
            continue
        claims = []
        for root, rec in by_root.items():
            if q in back_trace(prim_expand(idx, root, labels, terminate=True)):
                claims.append((float(rec.prefix_max[q]), root))
        if claims:
            best = min(claims)
            assert ca.assign[q] == labels.normal[best[1]]


def test_emax_is_zero_exactly_at_roots_and_min_over_records():
    rng = np.random.default_rng(31)
    for _ in range(20):
        pts = random_points(rng)
        idx = build_index(pts, 2)
        labels = random_labelset(rng, idx.n)
        records = expand_all(idx, labels, terminate=False)
        emax = emax_over_roots(records)
        stacked = np.vstack([r.prefix_max for r in records])
        assert np.array_equal(emax, stacked.min(axis=0))
        for root in labels.normal:
            assert emax[root] == 0.0


def test_emax_rejects_empty_and_partial_records():
    idx = build_index(line_dataset([0, 0.1, 10, 10.1]), 1)
    labels = only_normals({0: 0, 2: 1})
    with pytest.raises(ValueError, match="at least one"):
        emax_over_roots([])
    partial = [prim_expand(idx, 0, labels, terminate=True)]
    with pytest.raises(ValueError, match="cover"):
        emax_over_roots(partial)

"""CART-style classification trees on sparse features.

Splits are axis-aligned ``x[f] <= t`` with ``t`` the midpoint between two
consecutive distinct values of feature ``f`` inside the node. The split
search works on the node's non-zero entries plus one pseudo-entry per
feature carrying the weight of all its zeros, so cost scales with the
number of stored entries rather than with ``n_samples * n_features``.

Ties between candidate splits (improvements within ``TIE_TOL`` of the best)
go to the lowest feature index, then the lowest threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

TIE_TOL = 1e-12
CRITERIA = ("gini", "info_gain")


def impurity(weights: np.ndarray, criterion: str) -> np.ndarray:
    """Row-wise impurity of class-weight vectors (last axis = classes)."""
    weights = np.asarray(weights, dtype=np.float64)
    total = weights.sum(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(total > 0, weights / total, 0.0)
    if criterion == "gini":
        return 1.0 - np.sum(p * p, axis=-1)
    if criterion == "info_gain":
        with np.errstate(invalid="ignore", divide="ignore"):
            logs = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
        return -np.sum(p * logs, axis=-1)
    raise ValueError(f"unknown criterion {criterion!r}")


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    improvement: float


def _midpoint(a: float, b: float) -> float:
    mid = a + (b - a) / 2.0
    return a if mid >= b else mid


def gather_rows(X: sp.csr_matrix, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(local row, column, value) of every stored entry in rows ``idx``."""
    starts = X.indptr[idx]
    lens = X.indptr[idx + 1] - starts
    total = int(lens.sum())
    shift = np.repeat(starts - (np.cumsum(lens) - lens), lens)
    pos = shift + np.arange(total)
    return np.repeat(np.arange(idx.size), lens), X.indices[pos].astype(np.int64), X.data[pos]


def find_split(X: sp.csr_matrix, y: np.ndarray, w: np.ndarray, idx: np.ndarray, n_classes: int,
               criterion: str = "gini", min_leaf: int = 1, max_features: int | None = None,
               rng: np.random.Generator | None = None) -> Split | None:
    """Best split of the samples ``idx``, or None when nothing improves impurity.

    With ``max_features`` set, that many features are drawn (without
    replacement) from the features that are non-constant within the node,
    and the search is restricted to them.
    """
    n, d, K = idx.size, X.shape[1], n_classes
    yn, wn = y[idx], w[idx]
    totals = np.bincount(yn, weights=wn, minlength=K)
    r, c, v = gather_rows(X, idx)
    if c.size == 0:
        return None
    nnz = np.bincount(c, minlength=d)
    zero_count = n - nnz
    live = (nnz > 0) & (zero_count > 0)
    full = np.flatnonzero(nnz == n)
    if full.size:
        lo = np.full(d, np.inf)
        hi = np.full(d, -np.inf)
        np.minimum.at(lo, c, v)
        np.maximum.at(hi, c, v)
        live[full] = lo[full] < hi[full]
    live_feats = np.flatnonzero(live)
    if live_feats.size == 0:
        return None
    if max_features is not None and max_features < live_feats.size:
        rng = rng if rng is not None else np.random.default_rng()
        live_feats = np.sort(rng.choice(live_feats, size=max_features, replace=False))
        chosen = np.zeros(d, dtype=bool)
        chosen[live_feats] = True
        keep = chosen[c]
        c, r, v = c[keep], r[keep], v[keep]

    nz_weight = np.bincount(c * K + yn[r], weights=wn[r], minlength=d * K).reshape(d, K)
    zfeats = live_feats[zero_count[live_feats] > 0]
    zero_weight = np.maximum(totals - nz_weight[zfeats], 0.0)

    ent_feat = np.concatenate([c, zfeats])
    ent_val = np.concatenate([v, np.zeros(zfeats.size)])
    ent_cnt = np.concatenate([np.ones(c.size, dtype=np.int64), zero_count[zfeats]])
    ent_w = np.zeros((ent_feat.size, K))
    ent_w[np.arange(c.size), yn[r]] = wn[r]
    ent_w[c.size:] = zero_weight

    order = np.lexsort((ent_val, ent_feat))
    ent_feat, ent_val, ent_cnt, ent_w = ent_feat[order], ent_val[order], ent_cnt[order], ent_w[order]

    cand = np.flatnonzero((ent_feat[:-1] == ent_feat[1:]) & (ent_val[:-1] < ent_val[1:]))
    if cand.size == 0:
        return None
    starts = np.flatnonzero(np.r_[True, ent_feat[1:] != ent_feat[:-1]])
    group_start = starts[np.searchsorted(starts, cand, side="right") - 1]
    cum_w = np.vstack([np.zeros((1, K)), np.cumsum(ent_w, axis=0)])
    cum_c = np.r_[0, np.cumsum(ent_cnt)]
    left_w = cum_w[cand + 1] - cum_w[group_start]
    left_c = cum_c[cand + 1] - cum_c[group_start]
    ok = (left_c >= min_leaf) & (n - left_c >= min_leaf)
    if not ok.any():
        return None
    cand, left_w = cand[ok], np.maximum(left_w[ok], 0.0)
    right_w = np.maximum(totals - left_w, 0.0)
    s_left, s_right = left_w.sum(axis=1), right_w.sum(axis=1)
    children = (s_left * impurity(left_w, criterion) + s_right * impurity(right_w, criterion)) / totals.sum()
    gain = impurity(totals, criterion) - children
    best = gain.max()
    if best <= TIE_TOL:
        return None
    j = int(np.flatnonzero(gain >= best - TIE_TOL)[0])
    i = cand[j]
    return Split(int(ent_feat[i]), _midpoint(float(ent_val[i]), float(ent_val[i + 1])), float(gain[j]))


@dataclass(frozen=True)
class TreeArrays:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # (n_nodes, n_classes) class-weight fractions

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):  # children always follow parents
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[self.right[node]] = depths[node] + 1
        return int(depths.max())


def build_tree(X, y: np.ndarray, n_classes: int, sample_weight: np.ndarray | None = None,
               criterion: str = "gini", max_depth: int | None = None, min_leaf: int = 1,
               max_features: int | None = None, rng: np.random.Generator | None = None,
               rows: np.ndarray | None = None) -> TreeArrays:
    """Greedy top-down induction, depth-first, left child first."""
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}")
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    X = X if sp.isspmatrix_csr(X) else sp.csr_matrix(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    w = np.ones(y.size) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    rows = np.arange(y.size) if rows is None else np.asarray(rows, dtype=np.int64)
    Xc = X.tocsc()
    column = np.zeros(X.shape[0])

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        totals = np.bincount(y[idx], weights=w[idx], minlength=n_classes)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(totals / totals.sum())
        return len(feature) - 1, totals

    root, root_totals = new_node(rows)
    stack = [(root, rows, 0, root_totals)]
    while stack:
        node, idx, depth, totals = stack.pop()
        if (max_depth is not None and depth >= max_depth) or idx.size < 2 * min_leaf \
                or np.count_nonzero(totals) < 2:
            continue
        split = find_split(X, y, w, idx, n_classes, criterion, min_leaf, max_features, rng)
        if split is None:
            continue
        lo, hi = Xc.indptr[split.feature], Xc.indptr[split.feature + 1]
        column[Xc.indices[lo:hi]] = Xc.data[lo:hi]
        go_left = column[idx] <= split.threshold
        column[Xc.indices[lo:hi]] = 0.0
        feature[node] = split.feature
        threshold[node] = split.threshold
        left_idx, right_idx = idx[go_left], idx[~go_left]
        left_node, left_totals = new_node(left_idx)
        right_node, right_totals = new_node(right_idx)
        left[node], right[node] = left_node, right_node
        # right pushed first so the left subtree is expanded first
        stack.append((right_node, right_idx, depth + 1, right_totals))
        stack.append((left_node, left_idx, depth + 1, left_totals))

    return TreeArrays(
        np.array(feature, dtype=np.int64), np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64).reshape(len(feature), n_classes),
    )


def apply(tree: TreeArrays, X) -> np.ndarray:
    """Leaf index reached by each row of X."""
    X = X if sp.isspmatrix_csr(X) else sp.csr_matrix(X, dtype=np.float64)
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    while active.size:
        feat = tree.feature[node[active]]
        internal = feat >= 0
        active, feat = active[internal], feat[internal]
        if active.size == 0:
            break
        x = np.asarray(X[active, feat]).ravel()
        cur = node[active]
        node[active] = np.where(x <= tree.threshold[cur], tree.left[cur], tree.right[cur])
    return node


def tree_proba(tree: TreeArrays, X) -> np.ndarray:
    return tree.value[apply(tree, X)]


def leaf_labels(values: np.ndarray) -> np.ndarray:
    """Row-wise argmax treating values within TIE_TOL of the max as tied (lowest index wins).

    Leaf fractions come from float sums, so classes with equal weight can
    differ in the last bits; this keeps the tie-break rule exact anyway.
    """
    values = np.atleast_2d(values)
    return np.argmax(values >= values.max(axis=1, keepdims=True) - TIE_TOL, axis=1)


def tree_predict(tree: TreeArrays, X) -> np.ndarray:
    return leaf_labels(tree_proba(tree, X))


def tree_to_arrays(tree: TreeArrays, prefix: str = "") -> dict[str, np.ndarray]:
    return {f"{prefix}{name}": getattr(tree, name) for name in ("feature", "threshold", "left", "right", "value")}


def tree_from_arrays(arrays: dict[str, np.ndarray], prefix: str = "") -> TreeArrays:
    return TreeArrays(*(arrays[f"{prefix}{name}"] for name in ("feature", "threshold", "left", "right", "value")))

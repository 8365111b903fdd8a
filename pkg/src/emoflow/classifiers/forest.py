"""Random forest: bootstrap-resampled trees with per-node feature sampling."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .tree import TreeArrays, build_tree, tree_predict


def resolve_max_features(max_features, n_features: int) -> int | None:
    if max_features is None or max_features == "all":
        return None
    if max_features == "sqrt":
        return max(1, int(math.isqrt(n_features)))
    return max(1, min(int(max_features), n_features))


def _grow(X, y, n_classes, seed_seq, bootstrap, criterion, max_depth, min_leaf, max_features):
    rng = np.random.default_rng(seed_seq)
    n = y.size
    if bootstrap:
        counts = np.bincount(rng.integers(0, n, n), minlength=n).astype(np.float64)
        rows = np.flatnonzero(counts)
        weight = counts
    else:
        rows, weight = np.arange(n), np.ones(n)
    return build_tree(X, y, n_classes, sample_weight=weight, criterion=criterion,
                      max_depth=max_depth, min_leaf=min_leaf, max_features=max_features,
                      rng=rng, rows=rows)


def grow_forest(X, y: np.ndarray, n_classes: int, n_trees: int = 100, max_depth: int | None = None,
                seed: int = 0, bootstrap: bool = True, max_features="sqrt", criterion: str = "gini",
                min_leaf: int = 1, jobs: int = 1) -> list[TreeArrays]:
    """Trees get independent seeds spawned from ``seed``, so the result does not
    depend on ``jobs``."""
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    y = np.asarray(y, dtype=np.int64)
    m = resolve_max_features(max_features, X.shape[1])
    seeds = np.random.SeedSequence(seed).spawn(n_trees)
    args = (bootstrap, criterion, max_depth, min_leaf, m)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda s: _grow(X, y, n_classes, s, *args), seeds))
    return [_grow(X, y, n_classes, s, *args) for s in seeds]


def forest_votes(trees: list[TreeArrays], X, n_classes: int) -> np.ndarray:
    votes = np.zeros((X.shape[0], n_classes))
    rows = np.arange(X.shape[0])
    for tree in trees:
        votes[rows, tree_predict(tree, X)] += 1.0
    return votes


def forest_proba(trees: list[TreeArrays], X, n_classes: int) -> np.ndarray:
    """Fraction of trees voting for each class."""
    return forest_votes(trees, X, n_classes) / len(trees)

"""Multiclass AdaBoost (SAMME) over depth-1 decision stumps."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .tree import TreeArrays, build_tree, tree_predict

log = logging.getLogger(__name__)

# error used in place of zero when a stump is perfect on the weighted sample
MIN_ERROR = 1e-10


@dataclass
class BoostTrace:
    stumps: list[TreeArrays] = field(default_factory=list)
    alphas: list[float] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)
    weights: list[np.ndarray] = field(default_factory=list)  # sample weights after each round


def boost(X, y: np.ndarray, n_classes: int, n_rounds: int) -> BoostTrace:
    """Run the boosting recurrence.

    Per round: fit a stump on the weighted sample, take its weighted error
    ``err``, set ``alpha = log((1 - err) / err) + log(K - 1)``, multiply the
    weights of misclassified samples by ``exp(alpha)`` and renormalise.
    Stops early once a stump is no better than chance (``err >= 1 - 1/K``),
    or right after a perfect stump.
    """
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    y = np.asarray(y, dtype=np.int64)
    n = y.size
    w = np.full(n, 1.0 / n)
    trace = BoostTrace()
    chance = 1.0 - 1.0 / n_classes
    for rnd in range(n_rounds):
        stump = build_tree(X, y, n_classes, sample_weight=w, max_depth=1)
        pred = tree_predict(stump, X)
        wrong = pred != y
        err = float(w[wrong].sum() / w.sum())
        if err >= chance:
            log.info("round %d: stump error %.4f is no better than chance, stopping", rnd + 1, err)
            break
        perfect = err <= 0.0
        err = max(err, MIN_ERROR)
        alpha = np.log((1.0 - err) / err) + np.log(n_classes - 1.0)
        w = w * np.exp(alpha * wrong)
        w = w / w.sum()
        trace.stumps.append(stump)
        trace.alphas.append(float(alpha))
        trace.errors.append(err)
        trace.weights.append(w.copy())
        if perfect:
            break
    return trace


def adaboost_votes(stumps: list[TreeArrays], alphas: np.ndarray, X, n_classes: int) -> np.ndarray:
    votes = np.zeros((X.shape[0], n_classes))
    rows = np.arange(X.shape[0])
    for stump, alpha in zip(stumps, alphas):
        votes[rows, tree_predict(stump, X)] += alpha
    return votes


def adaboost_proba(stumps: list[TreeArrays], alphas: np.ndarray, X, n_classes: int,
                   prior: np.ndarray) -> np.ndarray:
    """Normalised weighted votes; the class prior when no stump was kept."""
    if not stumps:
        return np.tile(prior, (X.shape[0], 1))
    votes = adaboost_votes(stumps, alphas, X, n_classes)
    return votes / votes.sum(axis=1, keepdims=True)

"""Linear SVM trained by stochastic subgradient descent on the primal.

Each one-vs-rest problem minimises

    0.5 * ||w||^2 + C * sum_i max(0, 1 - y_i (w . x_i + b))

which is ``C * m`` times the regularised mean hinge loss with
``lam = 1 / (C * m)``. Steps follow ``eta_t = 1 / (lam * (t + t0))`` with the
bias left unregularised. The returned weights are the running average of the
iterates, which is what the per-epoch objective history tracks.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp


def primal_objective(w: np.ndarray, b: float, X, y_pm: np.ndarray, C: float) -> float:
    margins = y_pm * (np.asarray(X @ w).ravel() + b)
    return 0.5 * float(w @ w) + C * float(np.maximum(0.0, 1.0 - margins).sum())


def fit_svm(X: sp.csr_matrix, y: np.ndarray, n_classes: int, C: float = 1.0, epochs: int = 10,
            seed: int = 0, t0: float | None = None) -> dict[str, np.ndarray]:
    """One-vs-rest: all ``n_classes`` binary problems advance together, sample by sample."""
    if C <= 0:
        raise ValueError("C must be > 0")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    X = sp.csr_matrix(X, dtype=np.float64)
    m, d = X.shape
    lam = 1.0 / (C * m)
    # start with steps no larger than ~1 / max ||x||^2 to keep early updates bounded
    sq_norm = float(np.asarray(X.multiply(X).sum(axis=1)).max(initial=0.0)) + 1.0
    t0 = max(1.0, sq_norm / lam) if t0 is None else t0
    Y = np.where(np.arange(n_classes)[None, :] == np.asarray(y)[:, None], 1.0, -1.0)

    # w is stored as scale * V so the shrink step is O(1)
    V = np.zeros((n_classes, d))
    scale = 1.0
    b = np.zeros(n_classes)
    avg_w = np.zeros((n_classes, d))
    avg_b = np.zeros(n_classes)
    n_avg = 0
    history = []
    rng = np.random.default_rng(seed)
    indptr, indices, data = X.indptr, X.indices, X.data
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(m):
            t += 1
            eta = 1.0 / (lam * (t + t0))
            cols = indices[indptr[i]:indptr[i + 1]]
            vals = data[indptr[i]:indptr[i + 1]]
            margin = Y[i] * (scale * (V[:, cols] @ vals) + b)
            scale *= 1.0 - eta * lam
            if scale < 1e-9:
                V *= scale
                scale = 1.0
            viol = margin < 1.0
            if viol.any():
                step = eta * Y[i, viol]
                V[np.ix_(viol, cols)] += (step[:, None] / scale) * vals[None, :]
                b[viol] += step
        # running average over epoch-end iterates
        n_avg += 1
        avg_w += (scale * V - avg_w) / n_avg
        avg_b += (b - avg_b) / n_avg
        history.append([primal_objective(avg_w[c], avg_b[c], X, Y[:, c], C) for c in range(n_classes)])
    return {"W": avg_w, "b": avg_b, "objective": np.array(history)}


def svm_decision(params: dict[str, np.ndarray], X) -> np.ndarray:
    return np.asarray(X @ params["W"].T) + params["b"][None, :]


def svm_proba(params: dict[str, np.ndarray], X) -> np.ndarray:
    """Softmax over one-vs-rest decision values (argmax-preserving)."""
    z = svm_decision(params, X)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)

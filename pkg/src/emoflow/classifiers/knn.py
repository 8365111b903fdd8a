"""k-nearest neighbours with Minkowski distances and majority vote."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

CHUNK = 256
# relative slack when shortlisting neighbours before exact re-ranking
_SLACK = 1e-9


def _minkowski_rows(diff: np.ndarray, p: float) -> np.ndarray:
    diff = np.abs(diff)
    if p == 1:
        return diff.sum(axis=-1)
    if p == 2:
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if np.isinf(p):
        return diff.max(axis=-1, initial=0.0)
    return np.sum(diff ** p, axis=-1) ** (1.0 / p)


def minkowski(a, b, p: float) -> float:
    """(sum |a_i - b_i|^p)^(1/p); p=1 and p=2 reduce to Manhattan and Euclidean."""
    return float(_minkowski_rows(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64), p))


def euclidean(a, b) -> float:
    diff = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return float(np.sqrt(np.sum(diff * diff)))


def manhattan(a, b) -> float:
    return float(np.sum(np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))))


def _powered_distances(Q: sp.csr_matrix, X: sp.csr_matrix, Xc: sp.csc_matrix,
                       q_pow: np.ndarray, x_pow: np.ndarray, p: float) -> np.ndarray:
    """Approximate sum |q - x|^p for every (query, train) pair.

    Expands over the union of supports: sum|q|^p + sum|x|^p plus a correction
    on coordinates where both are non-zero.
    """
    out = q_pow[:, None] + x_pow[None, :]
    if p == 2:
        out -= 2.0 * (Q @ X.T).toarray()
        return out
    for i in range(Q.shape[0]):
        lo, hi = Q.indptr[i], Q.indptr[i + 1]
        for col, qv in zip(Q.indices[lo:hi], Q.data[lo:hi]):
            clo, chi = Xc.indptr[col], Xc.indptr[col + 1]
            rows, xv = Xc.indices[clo:chi], Xc.data[clo:chi]
            out[i, rows] += np.abs(qv - xv) ** p - abs(qv) ** p - np.abs(xv) ** p
    return out


def _exact_distances(q: sp.csr_matrix, rows: sp.csr_matrix, p: float) -> np.ndarray:
    cols = np.union1d(q.indices, rows.indices)
    if cols.size == 0:
        return np.zeros(rows.shape[0])
    diff = rows[:, cols].toarray() - q[:, cols].toarray()
    return _minkowski_rows(diff, p)


def knn_neighbors(X: sp.csr_matrix, Q: sp.csr_matrix, k: int, p: float) -> np.ndarray:
    """Indices of the k nearest training rows for every query row.

    Distances are shortlisted with the fast expansion, then the shortlist is
    re-ranked with exact distances; ties go to the lower training index.
    """
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside [1, {n}]")
    if np.isinf(p):
        raise ValueError("p must be finite")
    Xc = X.tocsc()
    x_pow = np.asarray(abs(X).power(p).sum(axis=1)).ravel()
    x_pow_max = float(x_pow.max(initial=0.0))
    out = np.empty((Q.shape[0], k), dtype=np.int64)
    for start in range(0, Q.shape[0], CHUNK):
        block = Q[start:start + CHUNK]
        q_pow = np.asarray(abs(block).power(p).sum(axis=1)).ravel()
        approx = _powered_distances(block, X, Xc, q_pow, x_pow, p)
        for i in range(block.shape[0]):
            row = approx[i]
            kth = np.partition(row, k - 1)[k - 1]
            slack = _SLACK * (q_pow[i] + x_pow_max + 1.0)
            short = np.flatnonzero(row <= kth + slack)
            exact = _exact_distances(block[i], X[short], p)
            order = np.lexsort((short, exact))[:k]
            out[start + i] = short[order]
    return out


def fit_knn(X: sp.csr_matrix, y: np.ndarray, k: int, p: float) -> dict:
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"k={k} outside [1, {X.shape[0]}]")
    if p < 1:
        raise ValueError("Minkowski order p must be >= 1")
    return {"X": X, "y": np.asarray(y, dtype=np.int64), "k": int(k), "p": float(p)}


def knn_proba(params: dict, Q: sp.csr_matrix, n_classes: int) -> np.ndarray:
    """Vote fractions among the k neighbours (argmax ties resolve to the lowest label index)."""
    neigh = knn_neighbors(params["X"], Q, params["k"], params["p"])
    labels = params["y"][neigh]
    votes = np.zeros((Q.shape[0], n_classes))
    for c in range(n_classes):
        votes[:, c] = np.sum(labels == c, axis=1)
    return votes / params["k"]

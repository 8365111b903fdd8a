"""Tokenizing, corpora and term-frequency features."""
from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

# letters and digits of any script; underscore, punctuation and symbols are separators
TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    return TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class LabeledCorpus:
    texts: tuple[str, ...]
    labels: tuple[str, ...]
    label_set: tuple[str, ...]

    def __post_init__(self):
        if len(self.texts) != len(self.labels):
            raise ValueError("texts and labels differ in length")
        if len(self.label_set) < 2:
            raise ValueError("need at least two labels")
        if len(set(self.label_set)) != len(self.label_set):
            raise ValueError("duplicate labels in label_set")
        unknown = set(self.labels) - set(self.label_set)
        if unknown:
            raise ValueError(f"labels not in label_set: {sorted(unknown)}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]],
                   label_set: Sequence[str] | None = None) -> "LabeledCorpus":
        pairs = list(pairs)
        texts = tuple(t for t, _ in pairs)
        labels = tuple(lab for _, lab in pairs)
        if label_set is None:
            label_set = sorted(set(labels))
        return cls(texts, labels, tuple(label_set))

    def __len__(self) -> int:
        return len(self.texts)

    def label_indices(self) -> np.ndarray:
        index = {lab: i for i, lab in enumerate(self.label_set)}
        return np.array([index[lab] for lab in self.labels], dtype=np.int64)

    def subset(self, indices: Sequence[int]) -> "LabeledCorpus":
        return LabeledCorpus(
            tuple(self.texts[i] for i in indices),
            tuple(self.labels[i] for i in indices),
            self.label_set,
        )


def load_corpus(path: str | Path, label_set: Sequence[str] | None = None) -> LabeledCorpus:
    """Read a ``text,label`` CSV (header required)."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = [f.strip().lower() for f in (reader.fieldnames or [])]
        if "text" not in fields or "label" not in fields:
            raise ValueError(f"{path}: header must contain text and label columns")
        reader.fieldnames = fields
        pairs = []
        for lineno, row in enumerate(reader, start=2):
            text, label = row.get("text"), row.get("label")
            if text is None or not label:
                raise ValueError(f"{path}:{lineno}: malformed row")
            pairs.append((text, label.strip()))
    if not pairs:
        raise ValueError(f"{path}: empty corpus")
    return LabeledCorpus.from_pairs(pairs, label_set)


def save_corpus(corpus: LabeledCorpus, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["text", "label"])
        writer.writerows(zip(corpus.texts, corpus.labels))


def build_vocabulary(texts: Iterable[str], min_count: int = 1) -> tuple[str, ...]:
    counts = Counter(tok for text in texts for tok in tokenize(text))
    vocab = tuple(sorted(tok for tok, c in counts.items() if c >= min_count))
    if not vocab:
        raise ValueError(f"empty vocabulary after pruning at min_count={min_count}")
    return vocab


def vectorize(texts: Sequence[str], vocabulary: Sequence[str]) -> sp.csr_matrix:
    """Term-frequency matrix; tokens outside the vocabulary are ignored."""
    index = {tok: i for i, tok in enumerate(vocabulary)}
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for text in texts:
        counts = Counter(index[tok] for tok in tokenize(text) if tok in index)
        for col in sorted(counts):
            indices.append(col)
            data.append(float(counts[col]))
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(texts), len(vocabulary)),
    )


def featurize(corpus: LabeledCorpus, min_count: int = 1) -> tuple[tuple[str, ...], sp.csr_matrix]:
    vocab = build_vocabulary(corpus.texts, min_count)
    return vocab, vectorize(corpus.texts, vocab)


def as_csr(X) -> sp.csr_matrix:
    """Accept dense or sparse input; store explicit zeros nowhere."""
    if sp.issparse(X):
        out = sp.csr_matrix(X, dtype=np.float64, copy=True)
    else:
        arr = np.asarray(X, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        out = sp.csr_matrix(arr)
    out.eliminate_zeros()
    out.sort_indices()
    if not np.all(np.isfinite(out.data)):
        raise ValueError("features must be finite")
    return out

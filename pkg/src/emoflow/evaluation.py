"""Stratified splitting, multiclass metrics and side-by-side model comparison."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .classifiers.features import LabeledCorpus, build_vocabulary, vectorize
from .classifiers.model import train

AVERAGINGS = ("macro", "weighted")
REPORT_COLUMNS = ("model", "accuracy", "precision_macro", "recall_macro", "f1_macro",
                  "precision_weighted", "recall_weighted", "f1_weighted")


def split(corpus: LabeledCorpus, test_fraction: float = 0.2, seed: int = 42
          ) -> tuple[LabeledCorpus, LabeledCorpus]:
    """Stratified train/test split.

    Per-class test sizes are the largest-remainder apportionment of
    ``round(test_fraction * n)`` across classes, with every class keeping at
    least one sample on each side. Within a class, test rows are a seeded
    random subset; both halves keep the original corpus order.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    y = corpus.label_indices()
    K = len(corpus.label_set)
    counts = np.bincount(y, minlength=K)
    present = np.flatnonzero(counts)
    small = [corpus.label_set[k] for k in present if counts[k] < 2]
    if small:
        raise ValueError(f"classes too small to stratify (need >= 2 samples): {small}")
    n_test = int(round(test_fraction * y.size))
    quota = counts * n_test / y.size
    take = np.floor(quota).astype(np.int64)
    remainder = quota - take
    # hand out the leftover slots by largest remainder, ties to the lower class index
    for k in np.lexsort((np.arange(K), -remainder))[: n_test - int(take.sum())]:
        take[k] += 1
    take = np.where(counts > 0, np.clip(take, 1, counts - 1), 0)
    rng = np.random.default_rng(seed)
    test_mask = np.zeros(y.size, dtype=bool)
    for k in present:
        members = np.flatnonzero(y == k)
        test_mask[rng.choice(members, size=take[k], replace=False)] = True
    return corpus.subset(np.flatnonzero(~test_mask)), corpus.subset(np.flatnonzero(test_mask))


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # rows = true label, columns = predicted label
    label_set: tuple[str, ...]

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        K = len(self.label_set)
        if counts.shape != (K, K):
            raise ValueError(f"confusion matrix must be {K}x{K}, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("confusion counts must be >= 0")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_predictions(cls, true: Sequence[int], pred: Sequence[int], label_set: Sequence[str]
                         ) -> "ConfusionMatrix":
        K = len(label_set)
        flat = np.asarray(true, dtype=np.int64) * K + np.asarray(pred, dtype=np.int64)
        return cls(np.bincount(flat, minlength=K * K).reshape(K, K), tuple(label_set))

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    zero_division: int = 0  # per-class precision/recall denominators that were 0


def metrics(cm: ConfusionMatrix, averaging: str = "macro") -> Metrics:
    if averaging not in AVERAGINGS:
        raise ValueError(f"averaging must be one of {AVERAGINGS}")
    c = cm.counts.astype(np.float64)
    total = c.sum()
    if total <= 0:
        raise ValueError("confusion matrix is empty")
    tp = np.diag(c)
    pred_pos, support = c.sum(axis=0), c.sum(axis=1)
    zero_div = int((pred_pos == 0).sum() + (support == 0).sum())
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(pred_pos > 0, tp / pred_pos, 0.0)
        recall = np.where(support > 0, tp / support, 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2 * precision * recall / pr, 0.0)
    weights = np.full(tp.size, 1.0 / tp.size) if averaging == "macro" else support / total
    return Metrics(float(tp.sum() / total), float(weights @ precision), float(weights @ recall),
                   float(weights @ f1), zero_div)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    kind: str
    hyperparameters: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ModelResult:
    name: str
    confusion: ConfusionMatrix | None
    macro: Metrics | None
    weighted: Metrics | None
    train_seconds: float = 0.0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class EvalReport:
    dataset: str
    seed: int
    test_fraction: float
    n_train: int
    n_test: int
    results: tuple[ModelResult, ...]

    def rows(self) -> list[list]:
        return [[r.name, r.macro.accuracy, r.macro.precision, r.macro.recall, r.macro.f1,
                 r.weighted.precision, r.weighted.recall, r.weighted.f1] for r in self.results if r.ok]

    def failures(self) -> list[ModelResult]:
        return [r for r in self.results if not r.ok]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for row in self.rows():
            writer.writerow([row[0], *(f"{v:.6f}" for v in row[1:])])
        return buf.getvalue()

    def to_text(self) -> str:
        header = list(REPORT_COLUMNS)
        body = [[row[0], *(f"{v:.4f}" for v in row[1:])] for row in self.rows()]
        widths = [max(len(str(x)) for x in col) for col in zip(header, *body)]
        lines = [f"dataset={self.dataset} seed={self.seed} train={self.n_train} test={self.n_test}"]
        for row in [header, *body]:
            cells = [str(x).ljust(w) if i == 0 else str(x).rjust(w) for i, (x, w) in enumerate(zip(row, widths))]
            lines.append("  ".join(cells).rstrip())
        for r in self.failures():
            lines.append(f"{r.name}: FAILED ({r.error})")
        return "\n".join(lines) + "\n"


def evaluate_model(spec: ModelSpec, X_train, y_train, X_test, y_test, label_set, vocabulary) -> ModelResult:
    t0 = time.perf_counter()
    try:
        model = train(spec.kind, X_train, y_train, label_set=label_set, vocabulary=vocabulary,
                      **spec.hyperparameters)
        seconds = time.perf_counter() - t0
        pred = model.predict_indices(X_test)
    except Exception as exc:  # recorded as a missing row, the comparison carries on
        return ModelResult(spec.name, None, None, None, time.perf_counter() - t0, f"{type(exc).__name__}: {exc}")
    index = {lab: i for i, lab in enumerate(label_set)}
    cm = ConfusionMatrix.from_predictions([index[v] for v in y_test], pred, label_set)
    return ModelResult(spec.name, cm, metrics(cm, "macro"), metrics(cm, "weighted"), seconds)


def compare_models(corpus: LabeledCorpus, specs: Sequence[ModelSpec], seed: int = 42, test_fraction: float = 0.2,
                   min_count: int = 1, dataset: str = "", progress=None) -> EvalReport:
    """Train and score every spec on one shared split; vocabulary comes from the training half."""
    if not specs:
        raise ValueError("need at least one model spec")
    train_c, test_c = split(corpus, test_fraction, seed)
    vocab = build_vocabulary(train_c.texts, min_count)
    X_train, X_test = vectorize(train_c.texts, vocab), vectorize(test_c.texts, vocab)
    results = []
    for spec in specs:
        res = evaluate_model(spec, X_train, train_c.labels, X_test, test_c.labels, corpus.label_set, vocab)
        if progress is not None:
            progress(res)
        results.append(res)
    return EvalReport(dataset, seed, test_fraction, len(train_c), len(test_c), tuple(results))

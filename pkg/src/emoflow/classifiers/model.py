"""Trained model container, per-kind training entry points and persistence."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from ..artifacts import read_container, write_container
from ..fusion import EmotionDistribution
from . import boosting, forest, knn, naive_bayes, svm, tree
from .features import LabeledCorpus, as_csr, featurize, vectorize

KINDS = ("svm", "gaussian_nb", "adaboost", "decision_tree", "knn", "random_forest", "majority")
# kinds that fall back to a uniform distribution (rather than the prior) on out-of-vocabulary text
UNIFORM_FALLBACK = {"svm", "knn"}
FORMAT = "emoflow-model/1"


@dataclass(frozen=True)
class TrainedModel:
    kind: str
    label_set: tuple[str, ...]
    params: Mapping[str, np.ndarray]
    hyperparameters: Mapping[str, Any]
    vocabulary: tuple[str, ...] | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        frozen = {}
        for name, arr in self.params.items():
            arr = np.array(arr)
            arr.setflags(write=False)
            frozen[name] = arr
        object.__setattr__(self, "params", frozen)
        object.__setattr__(self, "hyperparameters", dict(self.hyperparameters))

    @property
    def n_classes(self) -> int:
        return len(self.label_set)

    def _trees(self, prefix: str, count: int) -> list[tree.TreeArrays]:
        key = ("trees", prefix)
        if key not in self._cache:
            self._cache[key] = [tree.tree_from_arrays(self.params, f"{prefix}{i}.") for i in range(count)]
        return self._cache[key]

    def _knn_params(self) -> dict:
        if "knn" not in self._cache:
            p = self.params
            X = sp.csr_matrix((p["X_data"], p["X_indices"], p["X_indptr"]), shape=tuple(p["X_shape"]))
            self._cache["knn"] = {"X": X, "y": p["y"], "k": self.hyperparameters["k"],
                                  "p": self.hyperparameters["p"]}
        return self._cache["knn"]

    def _raw_proba(self, X: sp.csr_matrix) -> np.ndarray:
        K, p = self.n_classes, self.params
        if self.kind == "gaussian_nb":
            return naive_bayes.gaussian_nb_proba(p, X)
        if self.kind == "knn":
            return knn.knn_proba(self._knn_params(), X, K)
        if self.kind == "decision_tree":
            return tree.tree_proba(tree.tree_from_arrays(p), X)
        if self.kind == "random_forest":
            return forest.forest_proba(self._trees("tree", int(self.hyperparameters["n_trees_built"])), X, K)
        if self.kind == "adaboost":
            stumps = self._trees("stump", int(p["alphas"].size))
            return boosting.adaboost_proba(stumps, p["alphas"], X, K, p["class_prior"])
        if self.kind == "svm":
            return svm.svm_proba(p, X)
        return np.tile(p["class_prior"], (X.shape[0], 1))

    def predict_proba_matrix(self, X, fallback: bool = True) -> np.ndarray:
        """Class probabilities for feature rows.

        For text models, rows with no in-vocabulary token get the class prior
        (or a uniform distribution for svm and knn).
        """
        X = as_csr(X)
        out = np.zeros((X.shape[0], self.n_classes))
        empty = np.diff(X.indptr) == 0 if (fallback and self.vocabulary is not None) else np.zeros(X.shape[0], bool)
        if (~empty).any():
            out[~empty] = self._raw_proba(X[np.flatnonzero(~empty)])
        if empty.any():
            out[empty] = self.fallback_distribution()
        return out

    def fallback_distribution(self) -> np.ndarray:
        if self.kind in UNIFORM_FALLBACK:
            return np.full(self.n_classes, 1.0 / self.n_classes)
        return np.asarray(self.params["class_prior"])

    def features(self, texts: Sequence[str]) -> sp.csr_matrix:
        if self.vocabulary is None:
            raise ValueError("model was trained on raw features, not text")
        return vectorize(texts, self.vocabulary)

    def predict_proba(self, text: str) -> EmotionDistribution:
        row = self.predict_proba_matrix(self.features([text]))[0]
        return EmotionDistribution.from_values(self.label_set, row)

    def __call__(self, text: str) -> EmotionDistribution:
        return self.predict_proba(text)

    def predict_indices(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba_matrix(X), axis=1)

    def predict(self, texts: Sequence[str]) -> list[str]:
        return [self.label_set[i] for i in self.predict_indices(self.features(texts))]


def _prepare(features, labels, label_set):
    X = as_csr(features)
    labels = list(labels)
    if X.shape[0] != len(labels):
        raise ValueError("features and labels differ in length")
    if label_set is None:
        label_set = sorted(set(labels))
    index = {lab: i for i, lab in enumerate(label_set)}
    try:
        y = np.array([index[lab] for lab in labels], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"label {exc.args[0]!r} not in label_set") from None
    label_set = tuple(str(lab) for lab in label_set)
    prior = np.bincount(y, minlength=len(label_set)) / max(y.size, 1)
    return X, y, label_set, prior


def _model(kind, label_set, params, hyper, vocabulary, prior):
    return TrainedModel(kind, label_set, {**params, "class_prior": prior}, hyper,
                        tuple(vocabulary) if vocabulary is not None else None)


def train_gaussian_nb(features, labels, *, label_set=None, vocabulary=None) -> TrainedModel:
    X, y, label_set, prior = _prepare(features, labels, label_set)
    params = naive_bayes.fit_gaussian_nb(X, y, len(label_set))
    return _model("gaussian_nb", label_set, params, {}, vocabulary, prior)


def train_knn(features, labels, k: int = 5, p: float = 2.0, *, label_set=None, vocabulary=None) -> TrainedModel:
    X, y, label_set, prior = _prepare(features, labels, label_set)
    fitted = knn.fit_knn(X, y, k, p)
    Xs = fitted["X"]
    params = {"X_data": Xs.data, "X_indices": Xs.indices, "X_indptr": Xs.indptr,
              "X_shape": np.array(Xs.shape), "y": y}
    return _model("knn", label_set, params, {"k": int(k), "p": float(p)}, vocabulary, prior)


def train_decision_tree(features, labels, criterion: str = "gini", max_depth: int | None = None,
                        min_leaf: int = 1, *, label_set=None, vocabulary=None) -> TrainedModel:
    X, y, label_set, prior = _prepare(features, labels, label_set)
    t = tree.build_tree(X, y, len(label_set), criterion=criterion, max_depth=max_depth, min_leaf=min_leaf)
    hyper = {"criterion": criterion, "max_depth": max_depth, "min_leaf": int(min_leaf)}
    return _model("decision_tree", label_set, tree.tree_to_arrays(t), hyper, vocabulary, prior)


def train_random_forest(features, labels, n_trees: int = 100, max_depth: int | None = None, seed: int = 0,
                        *, bootstrap: bool = True, max_features="sqrt", criterion: str = "gini",
                        min_leaf: int = 1, jobs: int = 1, label_set=None, vocabulary=None) -> TrainedModel:
    X, y, label_set, prior = _prepare(features, labels, label_set)
    trees = forest.grow_forest(X, y, len(label_set), n_trees=n_trees, max_depth=max_depth, seed=seed,
                               bootstrap=bootstrap, max_features=max_features, criterion=criterion,
                               min_leaf=min_leaf, jobs=jobs)
    params = {}
    for i, t in enumerate(trees):
        params.update(tree.tree_to_arrays(t, f"tree{i}."))
    hyper = {"n_trees": int(n_trees), "n_trees_built": len(trees), "max_depth": max_depth, "seed": int(seed),
             "bootstrap": bool(bootstrap), "max_features": max_features, "criterion": criterion,
             "min_leaf": int(min_leaf)}
    return _model("random_forest", label_set, params, hyper, vocabulary, prior)


def train_adaboost(features, labels, n_rounds: int = 50, *, label_set=None, vocabulary=None) -> TrainedModel:
    X, y, label_set, prior = _prepare(features, labels, label_set)
    trace = boosting.boost(X, y, len(label_set), n_rounds)
    params = {"alphas": np.array(trace.alphas, dtype=np.float64), "errors": np.array(trace.errors, dtype=np.float64)}
    for i, stump in enumerate(trace.stumps):
        params.update(tree.tree_to_arrays(stump, f"stump{i}."))
    return _model("adaboost", label_set, params, {"n_rounds": int(n_rounds)}, vocabulary, prior)


def train_svm(features, labels, C: float = 1.0, epochs: int = 10, seed: int = 0,
              *, label_set=None, vocabulary=None) -> TrainedModel:
    X, y, label_set, prior = _prepare(features, labels, label_set)
    params = svm.fit_svm(X, y, len(label_set), C=C, epochs=epochs, seed=seed)
    hyper = {"C": float(C), "epochs": int(epochs), "seed": int(seed)}
    return _model("svm", label_set, params, hyper, vocabulary, prior)


def train_majority(features, labels, *, label_set=None, vocabulary=None) -> TrainedModel:
    """Baseline that always returns the training class prior."""
    X, y, label_set, prior = _prepare(features, labels, label_set)
    return _model("majority", label_set, {}, {}, vocabulary, prior)


TRAINERS = {
    "svm": train_svm,
    "gaussian_nb": train_gaussian_nb,
    "adaboost": train_adaboost,
    "decision_tree": train_decision_tree,
    "knn": train_knn,
    "random_forest": train_random_forest,
    "majority": train_majority,
}


def train(kind: str, features, labels, **hyper) -> TrainedModel:
    if kind not in TRAINERS:
        raise ValueError(f"unknown model kind {kind!r}; choose from {', '.join(KINDS)}")
    return TRAINERS[kind](features, labels, **hyper)


def train_on_corpus(kind: str, corpus: LabeledCorpus, min_count: int = 1, **hyper) -> TrainedModel:
    vocab, X = featurize(corpus, min_count)
    return train(kind, X, corpus.labels, label_set=corpus.label_set, vocabulary=vocab, **hyper)


def save_model(model: TrainedModel, path: str | Path) -> None:
    header = {
        "format": FORMAT,
        "kind": model.kind,
        "label_set": list(model.label_set),
        "vocabulary": list(model.vocabulary) if model.vocabulary is not None else None,
        "hyperparameters": model.hyperparameters,
    }
    write_container(path, header, dict(sorted(model.params.items())))


def load_model(path: str | Path) -> TrainedModel:
    header, arrays = read_container(path)
    if header.get("format") != FORMAT:
        raise ValueError(f"{path}: unsupported model format {header.get('format')!r}")
    vocab = header["vocabulary"]
    return TrainedModel(header["kind"], tuple(header["label_set"]), arrays, header["hyperparameters"],
                        tuple(vocab) if vocab is not None else None)

from .features import LabeledCorpus, featurize, load_corpus, save_corpus, tokenize, vectorize
from .model import (
    KINDS,
    TrainedModel,
    load_model,
    save_model,
    train,
    train_adaboost,
    train_decision_tree,
    train_gaussian_nb,
    train_knn,
    train_majority,
    train_on_corpus,
    train_random_forest,
    train_svm,
)

__all__ = [
    "KINDS", "LabeledCorpus", "TrainedModel", "featurize", "load_corpus", "load_model", "save_corpus",
    "save_model", "tokenize", "train", "train_adaboost", "train_decision_tree", "train_gaussian_nb",
    "train_knn", "train_majority", "train_on_corpus", "train_random_forest", "train_svm", "vectorize",
]

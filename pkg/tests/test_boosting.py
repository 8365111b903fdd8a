import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from emoflow.classifiers import train_adaboost
from emoflow.classifiers.boosting import adaboost_votes, boost
from oracles import boost_ref, boost_votes_ref


def test_separable_one_round():
    X = np.array([[0.0], [1.0], [2.0], [5.0], [6.0]])
    y = np.array([0, 0, 0, 1, 1])
    trace = boost(sp.csr_matrix(X), y, 2, 1)
    assert len(trace.stumps) == 1 and trace.alphas[0] > 0
    m = train_adaboost(X, y, n_rounds=1)
    assert (m.predict_indices(X) == y).all()


def test_ten_sample_three_rounds_matches_recurrence():
    X = np.array([[1.0, 0.0], [2.0, 1.0], [3.0, 0.0], [4.0, 1.0], [5.0, 0.0],
                  [6.0, 1.0], [7.0, 0.0], [8.0, 1.0], [9.0, 0.0], [10.0, 1.0]])
    y = np.array([0, 0, 1, 0, 1, 1, 0, 1, 1, 1])
    trace = boost(sp.csr_matrix(X), y, 2, 3)
    ref = boost_ref(X.tolist(), y.tolist(), 2, 3)
    assert len(trace.alphas) == len(ref) == 3
    for got_a, got_w, r in zip(trace.alphas, trace.weights, ref):
        assert got_a == pytest.approx(r["alpha"], abs=1e-12)
        assert np.max(np.abs(got_w - r["weights"])) <= 1e-12
        assert got_w.sum() == pytest.approx(1.0, abs=1e-9)
    votes = adaboost_votes(trace.stumps, np.array(trace.alphas), sp.csr_matrix(X), 2)
    for x, v in zip(X.tolist(), votes):
        assert v.tolist() == pytest.approx(boost_votes_ref(ref, x, 2), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 4))
def test_random_recurrence(seed, n_classes):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 4, size=(18, 3)).astype(float)
    y = rng.integers(0, n_classes, size=18)
    trace = boost(sp.csr_matrix(X), y, n_classes, 5)
    ref = boost_ref(X.tolist(), y.tolist(), n_classes, 5)
    assert len(trace.alphas) == len(ref)
    for a, w, r in zip(trace.alphas, trace.weights, ref):
        assert a == pytest.approx(r["alpha"], rel=1e-9, abs=1e-9)
        assert np.max(np.abs(w - r["weights"])) <= 1e-9
        assert w.sum() == pytest.approx(1.0, abs=1e-9)


def test_stops_when_no_better_than_chance():
    # identical inputs, balanced labels: every stump has error 1/2 = chance for K=2
    X = np.ones((4, 1))
    trace = boost(sp.csr_matrix(X), np.array([0, 1, 0, 1]), 2, 5)
    assert trace.alphas == []
    m = train_adaboost(X, [0, 1, 0, 1])
    assert m.predict_proba_matrix(X)[0].tolist() == [0.5, 0.5]

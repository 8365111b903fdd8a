import unicodedata

import pytest
from hypothesis import given
from hypothesis import strategies as st

from emoflow.classifiers.features import (
    LabeledCorpus,
    build_vocabulary,
    featurize,
    load_corpus,
    save_corpus,
    tokenize,
    vectorize,
)


def char_class_tokens(text):
    """Split on every scalar that is not a letter or digit."""
    tokens, cur = [], []
    for ch in text.lower():
        if unicodedata.category(ch)[0] in "LN":
            cur.append(ch)
        elif cur:
            tokens.append("".join(cur))
            cur = []
    if cur:
        tokens.append("".join(cur))
    return tokens


def test_tokenize_examples():
    assert tokenize("I am SO happy!") == ["i", "am", "so", "happy"]
    assert tokenize("") == []
    assert tokenize("great… 😀 great") == ["great", "great"]


@given(st.text(alphabet=st.characters(max_codepoint=0x2FFF, blacklist_categories=("Cs",)), max_size=40))
def test_tokenize_matches_character_class_oracle(text):
    assert tokenize(text) == char_class_tokens(text)


def test_featurize_examples():
    corpus = LabeledCorpus.from_pairs([("a b", "x"), ("a c", "y")])
    vocab, X = featurize(corpus, 1)
    assert vocab == ("a", "b", "c")
    assert X.toarray().tolist() == [[1, 1, 0], [1, 0, 1]]
    vocab, X = featurize(corpus, 2)
    assert vocab == ("a",) and X.toarray().tolist() == [[1], [1]]
    with pytest.raises(ValueError):
        featurize(corpus, 3)


def test_vectorize_counts_repeats_and_drops_unknown():
    X = vectorize(["b b zz a"], ("a", "b"))
    assert X.toarray().tolist() == [[1, 2]]


def test_corpus_validation(tmp_path):
    with pytest.raises(ValueError):
        LabeledCorpus.from_pairs([("a", "x"), ("b", "x")])
    with pytest.raises(ValueError):
        LabeledCorpus.from_pairs([("a", "x"), ("b", "z")], ["x", "y"])
    corpus = LabeledCorpus.from_pairs([("hi, there", "x"), ("yo \"q\"", "y")], ["x", "y", "w"])
    save_corpus(corpus, tmp_path / "c.csv")
    again = load_corpus(tmp_path / "c.csv", ["x", "y", "w"])
    assert again.texts == corpus.texts and again.labels == corpus.labels


def test_synthetic_corpus_vocabulary_band():
    from emoflow.synth import make_emotion_corpus

    corpus = make_emotion_corpus(seed=0)
    vocab = build_vocabulary(corpus.texts, 5)
    assert 500 < len(vocab) < 50000
    assert len(corpus) == 20000 and len(corpus.label_set) == 6

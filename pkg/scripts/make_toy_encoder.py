"""Write a randomly initialised toy encoder (manifest + blob) for wiring demos.

The weights are untrained, so predictions are arbitrary; the point is a
loadable artifact for ``emoflow classify --model toy_encoder.json``.

    python scripts/make_toy_encoder.py --out results/toy_encoder/toy_encoder.json
"""
from __future__ import annotations

import argparse
from collections import Counter
from pathlib import Path

from emoflow.classifiers.features import tokenize
from emoflow.encoder import UNK, EncoderConfig, init_weights, save_weights
from emoflow.synth import make_emotion_corpus

LABELS = ("anger", "fear", "joy", "love", "sadness", "surprise")


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/toy_encoder/toy_encoder.json")
    ap.add_argument("--vocab-size", type=int, default=2000)
    ap.add_argument("--d-model", type=int, default=32)
    ap.add_argument("--heads", type=int, default=4)
    ap.add_argument("--layers", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    corpus = make_emotion_corpus(seed=args.seed)
    counts = Counter(tok for text in corpus.texts for tok in tokenize(text))
    vocab = [UNK] + [tok for tok, _ in counts.most_common(args.vocab_size - 1)]
    config = EncoderConfig(vocab_size=len(vocab), d_model=args.d_model, n_heads=args.heads,
                           d_ff=4 * args.d_model, n_layers=args.layers, n_labels=len(LABELS))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_weights(init_weights(config, args.seed), out, LABELS, vocab)
    print(f"wrote {out} and {out.with_suffix('.bin')} ({config})")


if __name__ == "__main__":
    main()

"""Write the synthetic six-emotion stand-in corpus as a text,label CSV.

    python scripts/make_emotion_corpus.py --out data/emotion_synth.csv --seed 0
"""
from __future__ import annotations

import argparse
from collections import Counter

from emoflow.classifiers import save_corpus
from emoflow.synth import make_emotion_corpus


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data/emotion_synth.csv")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    corpus = make_emotion_corpus(seed=args.seed)
    save_corpus(corpus, args.out)
    counts = Counter(corpus.labels)
    print(f"wrote {len(corpus)} rows to {args.out}: " + ", ".join(f"{k}={counts[k]}" for k in corpus.label_set))


if __name__ == "__main__":
    main()

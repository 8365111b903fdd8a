"""Six-model comparison on a six-emotion corpus (80/20 stratified split).

Uses the CSV given by --corpus (or $EMOFLOW_CORPUS); without one, the
synthetic stand-in from ``emoflow.synth`` is generated in memory.

    python scripts/run_benchmark.py --out-dir results/benchmark
"""
from __future__ import annotations

import argparse
import json
import os
import time
from pathlib import Path

from emoflow.classifiers import load_corpus
from emoflow.evaluation import ModelSpec, compare_models
from emoflow.synth import make_emotion_corpus

DEFAULT_SPECS = (
    ModelSpec("svm", "svm", {"C": 1.0, "epochs": 10}),
    ModelSpec("gaussian_nb", "gaussian_nb"),
    ModelSpec("adaboost", "adaboost", {"n_rounds": 50}),
    ModelSpec("decision_tree", "decision_tree"),
    ModelSpec("knn", "knn", {"k": 5}),
    ModelSpec("random_forest", "random_forest", {"n_trees": 100}),
)


def load_benchmark_corpus(path: str | None):
    path = path or os.environ.get("EMOFLOW_CORPUS")
    if path:
        return load_corpus(path), Path(path).name
    return make_emotion_corpus(seed=0), "synthetic-six-emotion(seed=0)"


def run(corpus_path=None, seed: int = 42, min_count: int = 1, specs=DEFAULT_SPECS, verbose: bool = True):
    corpus, name = load_benchmark_corpus(corpus_path)
    specs = [ModelSpec(s.name, s.kind, {**s.hyperparameters, **({"seed": seed} if s.kind in ("svm", "random_forest")
                                                                 else {})}) for s in specs]

    def progress(res):
        if verbose:
            acc = f"{res.macro.accuracy:.4f}" if res.ok else res.error
            print(f"  {res.name:<14} {acc}  ({res.train_seconds:.1f}s train)", flush=True)

    t0 = time.perf_counter()
    report = compare_models(corpus, specs, seed=seed, min_count=min_count, dataset=name, progress=progress)
    return report, time.perf_counter() - t0


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--corpus")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--min-count", type=int, default=1)
    ap.add_argument("--out-dir", default="results/benchmark")
    args = ap.parse_args(argv)
    report, seconds = run(args.corpus, args.seed, args.min_count)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "evaluation.csv").write_text(report.to_csv(), encoding="utf-8")
    (out / "evaluation.txt").write_text(report.to_text(), encoding="utf-8")
    timings = {r.name: round(r.train_seconds, 2) for r in report.results}
    (out / "timing.json").write_text(json.dumps({"total_seconds": round(seconds, 1), "train_seconds": timings},
                                                indent=2) + "\n", encoding="utf-8")
    print(report.to_text(), end="")
    print(f"total {seconds:.1f}s")


if __name__ == "__main__":
    main()

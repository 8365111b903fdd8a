"""emoflow command line: lexicon, train, classify, analyze, evaluate.

Settings resolve as flags > environment (EMOFLOW_LEXICON, EMOFLOW_ENDPOINT)
> ``--config`` JSON file > built-in defaults. Exit status is 0 on success,
1 on data or runtime failure and 2 on usage errors (including missing
input paths).
"""
from __future__ import annotations

import argparse
import inspect
import json
import logging
import os
import sys
from dataclasses import dataclass
from datetime import timedelta
from pathlib import Path
from typing import Any

from . import __version__
from .chat import ChatFormatError, build_report, bucket_timeline, export_report, load_chat, score_chat
from .classifiers import KINDS, load_corpus, load_model, save_model, train_on_corpus
from .classifiers.model import TRAINERS
from .encoder import EncoderClassifier
from .evaluation import ModelSpec, compare_models
from .fusion import ScoringError, score_message
from .lexicon import LexiconError, intensity_factor, load_lexicon
from .remote import RemoteClassifier, RemoteError

log = logging.getLogger("emoflow")

EMOTIONS = ("anger", "fear", "joy", "love", "sadness", "surprise")
COMPARISON_KINDS = ("svm", "gaussian_nb", "adaboost", "decision_tree", "knn", "random_forest")
DEFAULTS: dict[str, Any] = {
    "seed": 42,
    "jobs": 1,
    "strict": True,
    "lexicon": None,
    "endpoint": None,
    "timeout": 10.0,
    "retries": 2,
    "max_in_flight": 4,
    "labels": ",".join(EMOTIONS),
    "bucket_minutes": 60,
    "min_count": 1,
    "test_fraction": 0.2,
    "params": {},
}
ENVIRONMENT = {"lexicon": "EMOFLOW_LEXICON", "endpoint": "EMOFLOW_ENDPOINT"}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    values: dict[str, Any]
    sources: dict[str, str]

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "func")}
    file_values: dict[str, Any] = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        try:
            file_values = json.loads(path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise UsageError(f"{path}: invalid JSON config: {exc}") from None
        if not isinstance(file_values, dict):
            raise UsageError(f"{path}: config must be a JSON object")
        file_values = {k.replace("-", "_"): v for k, v in file_values.items()}
    values, sources = {}, {}
    for key in sorted(set(DEFAULTS) | set(flags) | set(file_values)):
        if key in flags:
            values[key], sources[key] = flags[key], "flag"
        elif key in ENVIRONMENT and environ.get(ENVIRONMENT[key]):
            values[key], sources[key] = environ[ENVIRONMENT[key]], f"env {ENVIRONMENT[key]}"
        elif key in file_values:
            values[key], sources[key] = file_values[key], "config"
        else:
            values[key], sources[key] = DEFAULTS.get(key), "default"
    return RunConfig(args.command, values, sources)


def _existing(path, what: str) -> Path:
    if path is None:
        raise UsageError(f"{what} path is required")
    path = Path(path)
    if not path.exists():
        raise UsageError(f"{what} not found: {path}")
    return path


def _labels(cfg: RunConfig) -> tuple[str, ...]:
    labels = cfg.labels
    labels = labels.split(",") if isinstance(labels, str) else list(labels)
    labels = tuple(lab.strip() for lab in labels if lab.strip())
    if len(labels) < 2 or len(set(labels)) != len(labels):
        raise UsageError(f"label set must list at least two distinct labels, got {labels}")
    return labels


def _parse_params(items) -> dict[str, Any]:
    out = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            out[key] = json.loads(raw)
        except ValueError:
            out[key] = raw
    return out


def _hyperparameters(kind: str, cfg: RunConfig, params: dict[str, Any]) -> dict[str, Any]:
    accepted = inspect.signature(TRAINERS[kind]).parameters
    hyper = {k: v for k, v in params.items()}
    unknown = sorted(set(hyper) - set(accepted) - {"features", "labels"})
    if unknown:
        raise UsageError(f"{kind} does not take parameter(s) {unknown}")
    if "seed" in accepted:
        hyper.setdefault("seed", cfg.seed)
    if "jobs" in accepted:
        hyper.setdefault("jobs", cfg.jobs)
    return hyper


def _lexicon(cfg: RunConfig, required: bool):
    if getattr(cfg, "no_lexicon", False):
        return None
    if cfg.lexicon is None:
        if required:
            raise UsageError("lexicon path is required (--lexicon or EMOFLOW_LEXICON)")
        return None
    path = _existing(cfg.lexicon, "lexicon")
    lex = load_lexicon(path, strict=cfg.strict)
    log.info("lexicon %s: %d entries", path, len(lex))
    return lex


def _classifier(cfg: RunConfig):
    model_path = cfg.values.get("model")
    if model_path is not None:
        path = _existing(model_path, "model")
        if path.suffix == ".json":
            return EncoderClassifier.load(path)
        return load_model(path)
    if cfg.endpoint:
        return RemoteClassifier(cfg.endpoint, _labels(cfg), timeout=float(cfg.timeout), retries=int(cfg.retries),
                                max_in_flight=int(cfg.max_in_flight))
    raise UsageError("need --model or an endpoint (--endpoint or EMOFLOW_ENDPOINT)")


def _parse_query(raw: str) -> int:
    s = raw.strip()
    for prefix in ("0x", "0X", "U+", "u+"):
        if s.startswith(prefix):
            return int(s[len(prefix):], 16)
    if len(s) == 1:
        return ord(s)
    try:
        return int(s, 16)
    except ValueError:
        raise UsageError(f"cannot read {raw!r} as an emoji or hex codepoint") from None


def cmd_lexicon(cfg: RunConfig) -> int:
    lex = _lexicon(cfg, required=True)
    print(f"entries: {len(lex)}")
    print(f"{'column':<9}{'count':>7}{'mean':>8}{'max':>8}{'min':>8}")
    for col, st in lex.column_stats().items():
        print(f"{col:<9}{st['count']:>7d}{st['mean']:>8.3f}{st['max']:>8.3f}{st['min']:>8.3f}")
    status = 0
    for raw in cfg.query or ():
        cp = _parse_query(raw)
        entry = lex.get(cp)
        if entry is None:
            print(f"U+{cp:04X}: not in lexicon")
            status = 1
        else:
            print(f"U+{cp:04X} {entry.name}: neg={entry.neg} neut={entry.neut} pos={entry.pos} "
                  f"phi={intensity_factor(entry)!r}")
    return status


def cmd_train(cfg: RunConfig) -> int:
    corpus = load_corpus(_existing(cfg.corpus, "corpus"), _labels(cfg) if cfg.sources["labels"] != "default" else None)
    hyper = _hyperparameters(cfg.kind, cfg, {**cfg.params, **_parse_params(cfg.param)})
    log.info("training %s on %d rows with %s", cfg.kind, len(corpus), hyper)
    model = train_on_corpus(cfg.kind, corpus, int(cfg.min_count), **hyper)
    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(model, out)
    print(f"trained {cfg.kind} on {len(corpus)} rows, {len(model.label_set)} labels, "
          f"vocabulary {len(model.vocabulary)}; wrote {out}")
    return 0


def _read_messages(cfg: RunConfig) -> list[str]:
    texts = list(cfg.text or ())
    if cfg.input is not None:
        path = _existing(cfg.input, "input")
        texts += [line.rstrip("\r\n") for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not texts:
        raise UsageError("nothing to classify: pass --text or --input")
    return texts


def cmd_classify(cfg: RunConfig) -> int:
    texts = _read_messages(cfg)
    classifier = _classifier(cfg)
    lex = _lexicon(cfg, required=False)
    lines, failed = [], 0
    for i, text in enumerate(texts):
        try:
            lines.append(score_message(text, classifier, lex).to_json())
        except ScoringError as exc:
            failed += 1
            log.error("message %d: %s", i + 1, exc)
    out = "".join(line + "\n" for line in lines)
    if cfg.out:
        Path(cfg.out).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    if failed:
        log.error("%d of %d messages failed", failed, len(texts))
        return 1
    return 0


def cmd_analyze(cfg: RunConfig) -> int:
    path = _existing(cfg.chat, "chat file")
    classifier = _classifier(cfg)
    lex = _lexicon(cfg, required=False)
    skipped: list[str] = []
    messages = load_chat(path, cfg.format, strict=bool(cfg.strict), skipped=skipped)
    for msg in skipped:
        log.warning("skipped %s", msg)
    if not messages:
        raise DataError(f"{path}: no messages")
    failures = []
    scored = score_chat(messages, classifier, lex, jobs=int(cfg.jobs), failures=failures)
    for f in failures:
        log.error("message %d (%s): %s", f.index + 1, f.message.sender, f.error)
    labels = getattr(classifier, "labels", None) or classifier.label_set
    width = timedelta(minutes=float(cfg.bucket_minutes))
    buckets = bucket_timeline(scored, width, labels)
    report = build_report(scored, buckets, labels)
    written = export_report(report, scored, cfg.out_dir)
    peak = report.peak_bucket
    print(f"messages: {len(messages)} scored, {len(failures)} failed")
    print(f"most prevalent emotion: {report.dominant} ({report.totals[report.dominant]} of {report.n_messages})")
    if peak is not None:
        print(f"peak intensity bucket: {peak.start.strftime('%Y-%m-%d %H:%M')}-{peak.end.strftime('%H:%M')} "
              f"(summed score {sum(peak.score_sum):.4f})")
    for p in written:
        print(f"wrote {p}")
    return 1 if failures and cfg.strict else 0


def cmd_evaluate(cfg: RunConfig) -> int:
    corpus = load_corpus(_existing(cfg.corpus, "corpus"), _labels(cfg) if cfg.sources["labels"] != "default" else None)
    kinds = [k.strip() for k in cfg.models.split(",") if k.strip()]
    bad = [k for k in kinds if k not in KINDS]
    if bad or not kinds:
        raise UsageError(f"unknown model kind(s) {bad}; choose from {', '.join(KINDS)}")
    params = {**cfg.params, **_parse_params(cfg.param)}
    specs = []
    for kind in kinds:
        own = {k.split(".", 1)[1]: v for k, v in params.items() if k.startswith(kind + ".")}
        specs.append(ModelSpec(kind, kind, _hyperparameters(kind, cfg, own)))

    def progress(res):
        log.info("%s: %s in %.1fs", res.name, f"accuracy {res.macro.accuracy:.4f}" if res.ok else res.error,
                 res.train_seconds)

    report = compare_models(corpus, specs, seed=int(cfg.seed), test_fraction=float(cfg.test_fraction),
                            min_count=int(cfg.min_count), dataset=Path(cfg.corpus).name, progress=progress)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "evaluation.csv").write_text(report.to_csv(), encoding="utf-8")
    (out / "evaluation.txt").write_text(report.to_text(), encoding="utf-8")
    sys.stdout.write(report.to_text())
    return 1 if report.failures() else 0


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("shared options")
    g.add_argument("--seed", type=int, default=S, help="random seed (default 42)")
    g.add_argument("--jobs", type=int, default=S, help="worker threads (default 1)")
    g.add_argument("--verbose", "-v", action="store_true", help="log progress and the effective config")
    g.add_argument("--strict", action=argparse.BooleanOptionalAction, default=S,
                   help="fail on malformed input rows instead of skipping them (default on)")
    g.add_argument("--config", help="JSON file of option defaults")

    model_src = argparse.ArgumentParser(add_help=False)
    m = model_src.add_argument_group("model source")
    m.add_argument("--model", default=S, help="trained model file, or an encoder weight manifest (.json)")
    m.add_argument("--endpoint", default=S, help="remote classifier base URL")
    m.add_argument("--labels", default=S, help="comma-separated label set for remote replies")
    m.add_argument("--timeout", type=float, default=S)
    m.add_argument("--retries", type=int, default=S)
    m.add_argument("--max-in-flight", type=int, default=S)
    m.add_argument("--lexicon", default=S, help="emoji sentiment lexicon CSV")
    m.add_argument("--no-lexicon", action="store_true", help="score text only, even if EMOFLOW_LEXICON is set")

    ap = argparse.ArgumentParser(prog="emoflow", description="Emotion detection and chat emotion analytics.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lexicon", parents=[shared], help="inspect an emoji sentiment lexicon")
    p.add_argument("--lexicon", default=S)
    p.add_argument("--query", "-q", action="append", help="emoji or hex codepoint (repeatable)")
    p.set_defaults(func=cmd_lexicon)

    p = sub.add_parser("train", parents=[shared], help="train a classifier on a text,label CSV")
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--out", required=True)
    p.add_argument("--labels", default=S, help="comma-separated label set (default: labels in the corpus)")
    p.add_argument("--min-count", type=int, default=S)
    p.add_argument("--param", action="append", help="hyperparameter key=value (JSON value), repeatable")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", parents=[shared, model_src], help="score messages")
    p.add_argument("--text", "-t", action="append", help="message text (repeatable)")
    p.add_argument("--input", "-i", help="file with one message per line")
    p.add_argument("--out", "-o", help="write JSON lines here instead of stdout")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("analyze", parents=[shared, model_src], help="score and aggregate a chat log")
    p.add_argument("--chat", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"))
    p.add_argument("--bucket-minutes", type=float, default=S)
    p.add_argument("--out-dir", default="emoflow_report")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("evaluate", parents=[shared], help="compare classifiers on one stratified split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--models", default=",".join(COMPARISON_KINDS), help="comma-separated model kinds")
    p.add_argument("--labels", default=S)
    p.add_argument("--test-fraction", type=float, default=S)
    p.add_argument("--min-count", type=int, default=S)
    p.add_argument("--param", action="append", help="per-model hyperparameter kind.key=value, repeatable")
    p.add_argument("--out-dir", default="emoflow_eval")
    p.set_defaults(func=cmd_evaluate)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        if args.verbose:
            for key in sorted(cfg.values):
                log.info("config %s = %r (%s)", key, cfg.values[key], cfg.sources[key])
        return args.func(cfg)
    except UsageError as exc:
        print(f"emoflow {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (DataError, LexiconError, ChatFormatError, ScoringError, RemoteError, ValueError, OSError) as exc:
        print(f"emoflow {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

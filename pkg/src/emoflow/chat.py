"""Chat log ingestion, scoring and time-bucketed aggregation.

Each message contributes its fused score only to the series of its
dominant emotion. Buckets are aligned on local wall-clock time in the
timezone of the earliest message and cover the half-open interval
``[start, start + width)``; empty buckets between the first and last
message are kept so timelines have no gaps.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Sequence

import numpy as np

from .fusion import Classifier, ScoredMessage, ScoringError, score_message
from .lexicon import SentimentLexicon

FORMATS = ("jsonl", "csv")
_WALL_EPOCH = datetime(1970, 1, 1)


class ChatFormatError(ValueError):
    pass


def parse_timestamp(raw: str) -> datetime:
    """ISO-8601 with a UTC offset (a trailing ``Z`` is accepted)."""
    raw = raw.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None or ts.utcoffset() is None:
        raise ValueError(f"timestamp {raw!r} has no UTC offset")
    return ts


@dataclass(frozen=True)
class ChatMessage:
    sender: str
    timestamp: datetime
    text: str

    def __post_init__(self):
        if not isinstance(self.sender, str) or not self.sender.strip():
            raise ValueError("sender must be a non-empty string")
        if not isinstance(self.text, str):
            raise ValueError("text must be a string")
        if self.timestamp.tzinfo is None:
            raise ValueError("timestamp must carry a timezone")


def _message_from_record(rec) -> ChatMessage:
    if not isinstance(rec, dict):
        raise ValueError("record is not an object")
    for key in ("sender", "timestamp", "text"):
        if rec.get(key) is None:
            raise ValueError(f"missing field {key!r}")
        if not isinstance(rec[key], str):
            raise ValueError(f"field {key!r} must be a string")
    return ChatMessage(rec["sender"], parse_timestamp(rec["timestamp"]), rec["text"])


def detect_format(path: str | Path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix in (".jsonl", ".ndjson", ".json"):
        return "jsonl"
    raise ChatFormatError(f"{path}: cannot infer chat format from suffix {suffix!r}; pass one of {FORMATS}")


def load_chat(path: str | Path, fmt: str | None = None, strict: bool = True,
              skipped: list[str] | None = None) -> list[ChatMessage]:
    """Parse a chat log and return its messages sorted by time (stable).

    With ``strict=False`` malformed rows are skipped; their diagnostics are
    appended to ``skipped`` when given.
    """
    path = Path(path)
    fmt = fmt or detect_format(path)
    if fmt not in FORMATS:
        raise ChatFormatError(f"unknown chat format {fmt!r}; choose from {FORMATS}")
    messages = []

    def bad(lineno, exc):
        msg = f"{path}:{lineno}: {exc}"
        if strict:
            raise ChatFormatError(msg)
        if skipped is not None:
            skipped.append(msg)

    with path.open(encoding="utf-8", newline="") as fh:
        if fmt == "jsonl":
            rows = ((n, line) for n, line in enumerate(fh, 1) if line.strip())
            for lineno, line in rows:
                try:
                    messages.append(_message_from_record(json.loads(line)))
                except ValueError as exc:
                    bad(lineno, exc)
        else:
            reader = csv.DictReader(fh)
            missing = {"sender", "timestamp", "text"} - set(reader.fieldnames or ())
            if missing:
                raise ChatFormatError(f"{path}:1: missing columns {sorted(missing)}")
            for rec in reader:
                try:
                    messages.append(_message_from_record({k: rec.get(k) for k in ("sender", "timestamp", "text")}))
                except ValueError as exc:
                    bad(reader.line_num, exc)
    return sorted(messages, key=lambda m: m.timestamp)


def save_chat_jsonl(messages: Sequence[ChatMessage], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for m in messages:
            fh.write(json.dumps({"sender": m.sender, "timestamp": m.timestamp.isoformat(), "text": m.text},
                                ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class ScoringFailure:
    index: int
    message: ChatMessage
    error: str


def score_chat(messages: Sequence[ChatMessage], classifier: Classifier, lexicon: SentimentLexicon | None = None,
               jobs: int = 1, failures: list[ScoringFailure] | None = None) -> list[ScoredMessage]:
    """Score every message, keeping input order.

    Messages whose classification fails are skipped and recorded in
    ``failures`` (when given). Raises ScoringError only if every message fails.
    """
    def one(m):
        try:
            return score_message(m, classifier, lexicon), None
        except ScoringError as exc:
            return None, str(exc)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, messages))
    else:
        results = [one(m) for m in messages]
    scored, failed = [], []
    for i, (res, err) in enumerate(results):
        if err is None:
            scored.append(res)
        else:
            failed.append(ScoringFailure(i, messages[i], err))
    if failures is not None:
        failures.extend(failed)
    if messages and not scored:
        raise ScoringError(f"all {len(messages)} messages failed; first error: {failed[0].error}")
    return scored


@dataclass(frozen=True)
class TimelineBucket:
    start: datetime
    width: timedelta
    labels: tuple[str, ...]
    score_sum: tuple[float, ...]
    score_mean: tuple[float, ...]
    count: tuple[int, ...]

    @property
    def end(self) -> datetime:
        return self.start + self.width

    @property
    def total(self) -> int:
        return sum(self.count)

    def contains(self, ts: datetime) -> bool:
        return self.start <= ts < self.end


def _labels_of(scored: Sequence[ScoredMessage], labels: Sequence[str] | None) -> tuple[str, ...]:
    if labels is not None:
        return tuple(labels)
    return scored[0].distribution.labels if scored else ()


def _bucket_index(ts: datetime, tz, width: timedelta) -> int:
    wall = ts.astimezone(tz).replace(tzinfo=None)
    return (wall - _WALL_EPOCH) // width


def bucket_timeline(scored: Sequence[ScoredMessage], width: timedelta = timedelta(hours=1),
                    labels: Sequence[str] | None = None) -> list[TimelineBucket]:
    if width <= timedelta(0):
        raise ValueError("bucket width must be positive")
    labels = _labels_of(scored, labels)
    timed = [s for s in scored if s.timestamp is not None]
    if not timed:
        return []
    tz = min(timed, key=lambda s: s.timestamp).timestamp.tzinfo
    position = {lab: j for j, lab in enumerate(labels)}
    keys = [_bucket_index(s.timestamp, tz, width) for s in timed]
    first, last = min(keys), max(keys)
    groups: dict[int, list[list[float]]] = {k: [[] for _ in labels] for k in range(first, last + 1)}
    for key, s in zip(keys, timed):
        groups[key][position[s.dominant]].append(s.fused_score)
    buckets = []
    for key in range(first, last + 1):
        sums = tuple(math.fsum(v) for v in groups[key])
        counts = tuple(len(v) for v in groups[key])
        means = tuple(s / c if c else 0.0 for s, c in zip(sums, counts))
        start = (_WALL_EPOCH + key * width).replace(tzinfo=tz)
        buckets.append(TimelineBucket(start, width, labels, sums, means, counts))
    return buckets


@dataclass(frozen=True)
class ScoreStats:
    count: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float


def score_stats(values: Sequence[float]) -> ScoreStats | None:
    """Five-number summary; quartiles by linear interpolation between order statistics."""
    if not values:
        return None
    arr = np.sort(np.asarray(values, dtype=np.float64))
    q1, med, q3 = (float(q) for q in np.quantile(arr, [0.25, 0.5, 0.75]))
    return ScoreStats(int(arr.size), float(arr[0]), q1, med, q3, float(arr[-1]), math.fsum(arr) / arr.size)


@dataclass(frozen=True)
class SenderProfile:
    sender: str
    count: dict[str, int]
    mean_score: dict[str, float]

    @property
    def total(self) -> int:
        return sum(self.count.values())


@dataclass(frozen=True)
class ChatReport:
    labels: tuple[str, ...]
    n_messages: int
    totals: dict[str, int]
    buckets: tuple[TimelineBucket, ...]
    senders: tuple[SenderProfile, ...]
    stats: dict[str, ScoreStats | None]

    @property
    def dominant(self) -> str | None:
        """Most frequent dominant emotion (label order breaks ties)."""
        if not self.n_messages:
            return None
        return max(self.labels, key=lambda lab: (self.totals[lab], -self.labels.index(lab)))

    @property
    def peak_bucket(self) -> TimelineBucket | None:
        """Bucket with the largest summed fused score (earliest on ties)."""
        best = None
        for b in self.buckets:
            if best is None or math.fsum(b.score_sum) > math.fsum(best.score_sum):
                best = b
        return best

    def to_dict(self) -> dict:
        peak = self.peak_bucket
        return {
            "labels": list(self.labels),
            "n_messages": self.n_messages,
            "dominant_emotion": self.dominant,
            "peak_bucket": peak.start.isoformat() if peak else None,
            "totals": dict(self.totals),
            "score_stats": {lab: (st.__dict__ if st else None) for lab, st in self.stats.items()},
            "senders": [{"sender": p.sender, "total": p.total, "count": p.count, "mean_score": p.mean_score}
                        for p in self.senders],
            "buckets": [{"start": b.start.isoformat(), "end": b.end.isoformat(),
                         "count": dict(zip(b.labels, b.count)), "score_sum": dict(zip(b.labels, b.score_sum)),
                         "score_mean": dict(zip(b.labels, b.score_mean))} for b in self.buckets],
        }


def build_report(scored: Sequence[ScoredMessage], buckets: Sequence[TimelineBucket] | None = None,
                 labels: Sequence[str] | None = None, width: timedelta = timedelta(hours=1)) -> ChatReport:
    labels = _labels_of(scored, labels)
    if buckets is None:
        buckets = bucket_timeline(scored, width, labels)
    totals = {lab: 0 for lab in labels}
    by_emotion: dict[str, list[float]] = {lab: [] for lab in labels}
    by_sender: dict[str, dict[str, list[float]]] = {}
    for s in scored:
        totals[s.dominant] += 1
        by_emotion[s.dominant].append(s.fused_score)
        by_sender.setdefault(s.sender, {lab: [] for lab in labels})[s.dominant].append(s.fused_score)
    senders = tuple(
        SenderProfile(name, {lab: len(v) for lab, v in groups.items()},
                      {lab: (math.fsum(v) / len(v) if v else 0.0) for lab, v in groups.items()})
        for name, groups in sorted(by_sender.items())
    )
    stats = {lab: score_stats(by_emotion[lab]) for lab in labels}
    return ChatReport(labels, len(scored), totals, tuple(buckets), senders, stats)


EXPORT_FILES = ("report.json", "stacked_scores.csv", "stacked_counts.csv", "mean_timeline.csv",
                "scored_messages.jsonl")


def _table(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _num(x: float) -> str:
    return repr(float(x))


def export_report(report: ChatReport, scored: Sequence[ScoredMessage], out_dir: str | Path) -> list[Path]:
    """Write the report, three per-bucket tables and the per-message records."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    labels = list(report.labels)
    contents = {
        "report.json": json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n",
        "stacked_scores.csv": _table(["bucket_start", *labels],
                                     ([b.start.isoformat(), *map(_num, b.score_sum)] for b in report.buckets)),
        "stacked_counts.csv": _table(["bucket_start", *labels, "total"],
                                     ([b.start.isoformat(), *b.count, b.total] for b in report.buckets)),
        "mean_timeline.csv": _table(["bucket_start", *labels],
                                    ([b.start.isoformat(), *map(_num, b.score_mean)] for b in report.buckets)),
        "scored_messages.jsonl": "".join(s.to_json() + "\n" for s in scored),
    }
    written = []
    for name in EXPORT_FILES:
        path = out / name
        path.write_bytes(contents[name].encode("utf-8"))
        written.append(path)
    return written

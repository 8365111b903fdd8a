"""Hybrid text + emoji scoring.

A text classifier yields a distribution over emotions; its argmax is the
dominant emotion and its max probability the text score psi. Emoji intensity
factors (each in [1, 2)) scale psi by their mean, giving the fused score
omega. With no known emoji in the message omega equals psi.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime
from typing import Callable, Mapping, Sequence

import numpy as np

from .lexicon import SentimentLexicon, message_intensities, strip_emojis

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EmotionDistribution:
    labels: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.probs):
            raise ValueError("labels and probs differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate labels")
        if any(not (0.0 <= p <= 1.0) for p in self.probs):
            raise ValueError(f"probabilities outside [0, 1]: {self.probs}")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > DEFAULT_TOLERANCE:
            raise ValueError(f"probabilities sum to {total!r}")

    @classmethod
    def from_values(cls, labels: Sequence[str], values: Sequence[float],
                    tolerance: float = DEFAULT_TOLERANCE) -> "EmotionDistribution":
        """Validate and, when the sum is off by at most ``tolerance``, renormalize."""
        values = [float(v) for v in values]
        if any(not math.isfinite(v) or v < 0.0 for v in values):
            raise ValueError(f"invalid probabilities: {values}")
        total = math.fsum(values)
        if abs(total - 1.0) > tolerance:
            raise ValueError(f"probabilities sum to {total!r}, outside tolerance {tolerance}")
        if total != 1.0:
            values = [v / total for v in values]
        return cls(tuple(labels), tuple(min(v, 1.0) for v in values))

    @classmethod
    def from_mapping(cls, probs: Mapping[str, float], labels: Sequence[str] | None = None,
                     tolerance: float = DEFAULT_TOLERANCE) -> "EmotionDistribution":
        if labels is None:
            labels = sorted(probs)
        elif set(probs) != set(labels):
            raise ValueError(f"label set mismatch: got {sorted(probs)}, expected {sorted(labels)}")
        return cls.from_values(labels, [probs[label] for label in labels], tolerance)

    def __getitem__(self, label: str) -> float:
        return self.probs[self.labels.index(label)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.probs))


Classifier = Callable[[str], EmotionDistribution]


def softmax(logits: Sequence[float], labels: Sequence[str] | None = None) -> EmotionDistribution:
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 1 or z.size == 0:
        raise ValueError("logits must be a non-empty vector")
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite logits")
    if labels is None:
        labels = [str(i) for i in range(z.size)]
    if len(labels) != z.size:
        raise ValueError("one label per logit required")
    e = np.exp(z - z.max())
    return EmotionDistribution.from_values(labels, e / e.sum())


def dominant_emotion(dist: EmotionDistribution) -> tuple[str, float]:
    """Argmax label and its probability; ties go to the lexicographically first label."""
    best = max(dist.probs)
    label = min(lab for lab, p in zip(dist.labels, dist.probs) if p == best)
    return label, best


def fuse(psi: float, phis: Sequence[float]) -> float:
    if not 0.0 <= psi <= 1.0:
        raise ValueError(f"text score {psi} outside [0, 1]")
    for phi in phis:
        if not 1.0 <= phi < 2.0:
            raise ValueError(f"intensity factor {phi} outside [1, 2)")
    if not phis:
        return psi
    return psi * (math.fsum(phis) / len(phis))


class ScoringError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScoredMessage:
    text: str
    sender: str
    timestamp: datetime | None
    dominant: str
    text_score: float
    intensities: tuple[float, ...]
    fused_score: float
    distribution: EmotionDistribution

    def to_record(self) -> dict:
        # key order is part of the output format
        return {
            "text": self.text,
            "sender": self.sender,
            "timestamp": self.timestamp.isoformat() if self.timestamp else None,
            "dominant": self.dominant,
            "text_score": self.text_score,
            "intensities": list(self.intensities),
            "fused_score": self.fused_score,
            "probs": self.distribution.as_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), ensure_ascii=False)


def score_message(message, classifier: Classifier,
                  lexicon: SentimentLexicon | None = None) -> ScoredMessage:
    """Score one message (a ChatMessage-like object or a bare string).

    Emojis are removed before the classifier sees the text, so they only
    enter through the intensity factors.
    """
    if isinstance(message, str):
        text, sender, timestamp = message, "", None
    else:
        text, sender, timestamp = message.text, message.sender, message.timestamp
    try:
        dist = classifier(strip_emojis(text))
    except Exception as exc:
        raise ScoringError(f"classifier failed on message from {sender!r} at {timestamp}: {exc}") from exc
    label, psi = dominant_emotion(dist)
    phis = tuple(message_intensities(text, lexicon)) if lexicon is not None else ()
    return ScoredMessage(
        text=text,
        sender=sender,
        timestamp=timestamp,
        dominant=label,
        text_score=psi,
        intensities=phis,
        fused_score=fuse(psi, phis),
        distribution=dist,
    )

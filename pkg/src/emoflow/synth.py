"""Deterministic synthetic fixtures.

``make_emotion_corpus`` builds a stand-in with the shape of the six-emotion
Twitter corpus (20,000 rows, same class counts) for benchmarking when the
real file is not at hand. Rows mimic that corpus's construction: an
"i feel <emotion word>" clause inside Zipf-drawn filler. The anchoring
emotion word comes from a wrong class with probability ``anchor_noise``;
filler tokens are swapped for extra emotion words at ``cue_rate``, a
``cross_rate`` share of them from a random class.

``make_workday_chat`` builds a 113-message, four-person work chat between
09:00 and 18:00 with emojis, together with the emotion each message was
written to express.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .classifiers.features import LabeledCorpus

# class counts of the public six-emotion Twitter corpus (train+validation+test)
EMOTION_COUNTS = {"anger": 2709, "fear": 2373, "joy": 6761, "love": 1641, "sadness": 5797, "surprise": 719}

CUES = {
    "anger": "angry furious mad annoyed irritated rage resentful bitter outraged hostile cranky grumpy "
             "offended agitated frustrated hateful violent stubborn insulted dissatisfied rude heartless "
             "jealous cold greedy".split(),
    "fear": "afraid scared anxious nervous terrified worried frightened shaky uneasy paranoid panicky "
            "insecure reluctant hesitant vulnerable restless tense alarmed threatened intimidated "
            "helpless overwhelmed unsure fearful".split(),
    "joy": "happy glad cheerful excited delighted content pleased thrilled joyful proud grateful "
           "optimistic peaceful relaxed confident successful energetic satisfied fantastic amazing "
           "wonderful great hopeful fun".split(),
    "love": "loving caring tender affectionate passionate romantic sweet devoted fond adoring "
            "sympathetic compassionate supportive nostalgic gentle loved beloved longing hot naughty "
            "horny faithful warm liked".split(),
    "sadness": "sad unhappy depressed lonely miserable gloomy hopeless heartbroken crushed hurt "
               "disappointed ashamed guilty regretful empty lost useless pathetic awful exhausted "
               "devastated stupid low tearful".split(),
    "surprise": "surprised amazed astonished shocked stunned curious impressed overwhelmed dazed "
                "startled speechless funny weird strange bewildered awed unexpected sudden "
                "mindblown wow puzzled bizarre odd unreal".split(),
}

_SYLLABLES = "ba be bi bo bu da de di do du ka ke ki ko ku la le li lo lu ma me mi mo mu na ne ni no nu " \
             "ra re ri ro ru sa se si so su ta te ti to tu va ve vi vo vu".split()


def _filler_words(n: int, rng: np.random.Generator) -> list[str]:
    words: list[str] = []
    seen = set()
    while len(words) < n:
        w = "".join(rng.choice(_SYLLABLES, size=rng.integers(1, 4)))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def _zipf(n: int, s: float) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** s
    return w / w.sum()


_ANCHORS = (("i", "feel"), ("im", "feeling"), ("i", "am", "feeling"), ("i", "feel", "so"), ("i", "was", "feeling"))


def make_emotion_corpus(seed: int = 0, counts: dict[str, int] | None = None, n_filler: int = 3000,
                        prefix_length: float = 4.0, suffix_length: float = 10.0, anchor_noise: float = 0.1,
                        cue_rate: float = 0.04, cross_rate: float = 0.25) -> LabeledCorpus:
    rng = np.random.default_rng(seed)
    counts = counts or EMOTION_COUNTS
    labels = sorted(counts)
    filler = _filler_words(n_filler, rng)
    filler_p = _zipf(n_filler, 1.07)
    cue_p = {lab: _zipf(len(CUES[lab]), 0.8) for lab in labels}

    def cue(lab, noise):
        if rng.random() < noise:
            lab = labels[rng.integers(len(labels))]
        return CUES[lab][rng.choice(len(CUES[lab]), p=cue_p[lab])]

    def fill(length, lab):
        return [cue(lab, cross_rate) if rng.random() < cue_rate else filler[rng.choice(n_filler, p=filler_p)]
                for _ in range(length)]

    rows = []
    for lab in labels:
        for _ in range(counts[lab]):
            toks = fill(rng.poisson(prefix_length), lab)
            toks += _ANCHORS[rng.integers(len(_ANCHORS))]
            toks.append(cue(lab, anchor_noise))
            toks += fill(rng.poisson(suffix_length), lab)
            rows.append((" ".join(toks), lab))
    order = rng.permutation(len(rows))
    return LabeledCorpus.from_pairs([rows[i] for i in order], labels)


@dataclass(frozen=True)
class ChatLine:
    sender: str
    timestamp: datetime
    text: str
    intended: str


_CHAT_TEMPLATES = {
    "joy": ["great job team, the demo went really well", "happy to report the build is green",
            "awesome progress today everyone", "love how this release turned out, thanks all"],
    "sadness": ["sad news, the client pushed back on the design", "i am disappointed we missed the milestone",
                "feeling down about the failing tests", "unfortunately the feature got cut"],
    "fear": ["worried we will not make the deadline", "nervous about the production deploy tonight",
             "scared the migration will break something", "anxious about the review tomorrow"],
    "anger": ["annoyed that the server crashed again", "frustrated with these flaky tests",
              "angry that nobody updated the ticket", "irritated by the constant scope changes"],
    "surprise": ["wow, did not expect the benchmark to be that fast", "surprised the client approved it already",
                 "whoa, the bug fixed itself after the restart"],
    "love": ["really appreciate you all, best team ever", "thank you so much for covering for me",
             "so grateful for this team"],
}
_CHAT_EMOJI = {
    "joy": ["\U0001F600", "\U0001F389", "\U0001F44D", "\U0001F60A", ""],
    "sadness": ["\U0001F622", "\U0001F61E", "\U0001F614", ""],
    "fear": ["\U0001F630", "\U0001F628", "\U0001F62C", ""],
    "anger": ["\U0001F620", "\U0001F621", "\U0001F624", ""],
    "surprise": ["\U0001F62E", "\U0001F632", "\U0001F62F", ""],
    "love": ["❤", "\U0001F60D", "\U0001F618", ""],
}


def _mood_weights(hour: float) -> dict[str, float]:
    # joy dominates; fear and sadness grow toward the end of the day
    late = max(0.0, hour - 14.0) / 4.0
    return {"joy": 0.45 - 0.15 * late, "sadness": 0.10 + 0.12 * late, "fear": 0.08 + 0.12 * late,
            "anger": 0.10, "surprise": 0.12 - 0.04 * late, "love": 0.15 - 0.05 * late}


def make_workday_chat(seed: int = 0, n_messages: int = 113, day: str = "2024-03-04",
                      utc_offset_hours: int = 5) -> list[ChatLine]:
    rng = np.random.default_rng(seed)
    tz = timezone(timedelta(hours=utc_offset_hours))
    start = datetime.fromisoformat(f"{day}T09:00:00").replace(tzinfo=tz)
    seconds = np.sort(rng.choice(9 * 3600, size=n_messages, replace=False))
    senders = [f"Person {i}" for i in range(1, 5)]
    lines = []
    for sec in seconds:
        ts = start + timedelta(seconds=int(sec))
        weights = _mood_weights(9 + sec / 3600.0)
        labels = sorted(weights)
        p = np.array([weights[lab] for lab in labels])
        label = labels[rng.choice(len(labels), p=p / p.sum())]
        text = _CHAT_TEMPLATES[label][rng.integers(len(_CHAT_TEMPLATES[label]))]
        emoji = _CHAT_EMOJI[label][rng.integers(len(_CHAT_EMOJI[label]))]
        lines.append(ChatLine(senders[rng.integers(4)], ts, f"{text} {emoji}".strip(), label))
    return lines


def write_chat_jsonl(lines: list[ChatLine], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for line in lines:
            rec = {"sender": line.sender, "timestamp": line.timestamp.isoformat(), "text": line.text}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

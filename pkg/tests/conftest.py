from __future__ import annotations

import sys
from pathlib import Path

import pytest

from emoflow.fusion import EmotionDistribution
from emoflow.lexicon import load_lexicon

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"
LEXICON_PATH = DATA / "esr_lexicon.csv"
EMOTIONS = ("anger", "fear", "joy", "love", "sadness", "surprise")

sys.path.insert(0, str(Path(__file__).parent))


class FixedClassifier:
    """Always returns the same distribution."""

    def __init__(self, probs, labels=EMOTIONS):
        self.labels = tuple(labels)
        self.dist = EmotionDistribution.from_mapping(probs, self.labels)

    def __call__(self, text):
        return self.dist


class KeywordClassifier:
    """Deterministic stub: the first label whose name occurs in the text gets 0.9."""

    def __init__(self, labels=EMOTIONS, hit=0.9):
        self.labels = tuple(labels)
        self.hit = hit

    def __call__(self, text):
        lowered = text.lower()
        for lab in self.labels:
            if lab in lowered:
                rest = (1.0 - self.hit) / (len(self.labels) - 1)
                return EmotionDistribution.from_values(
                    self.labels, [self.hit if l == lab else rest for l in self.labels])
        return EmotionDistribution.from_values(self.labels, [1.0 / len(self.labels)] * len(self.labels))


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(LEXICON_PATH)


@pytest.fixture
def joy_classifier():
    return FixedClassifier({"anger": 0.02, "fear": 0.02, "joy": 0.9, "love": 0.02, "sadness": 0.02,
                            "surprise": 0.02})


class LookupClassifier:
    """Deterministic stub: exact-text lookup into a table, 0.9 on the listed label."""

    def __init__(self, table, labels=EMOTIONS, hit=0.9):
        self.labels = tuple(labels)
        self.table = {k.strip(): v for k, v in table.items()}
        self.hit = hit

    def __call__(self, text):
        label = self.table[text.strip()]
        rest = (1.0 - self.hit) / (len(self.labels) - 1)
        return EmotionDistribution.from_values(self.labels, [self.hit if l == label else rest for l in self.labels])


def workday_fixture():
    """(messages as raw dicts, intended label per message) for the 113-message workday chat."""
    import csv
    import json

    records = [json.loads(line) for line in (DATA / "workday_chat.jsonl").read_text(encoding="utf-8").splitlines()]
    with (DATA / "workday_chat.intended.csv").open(encoding="utf-8", newline="") as fh:
        intended = [row["intended"] for row in csv.DictReader(fh)]
    return records, intended


def workday_classifier():
    from emoflow.lexicon import strip_emojis

    records, intended = workday_fixture()
    return LookupClassifier({strip_emojis(r["text"]): lab for r, lab in zip(records, intended)})


# filled by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

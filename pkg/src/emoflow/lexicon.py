"""Emoji sentiment lexicon: loading, emoji extraction and intensity factors.

The lexicon stores, per emoji codepoint, the share of negative, neutral and
positive usages observed in annotated tweets. An emoji's intensity factor is
``1 + max(neg, neut, pos)``; it scales the text score in the fusion step.
"""
from __future__ import annotations

import csv
import logging
import re
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

log = logging.getLogger(__name__)

SUM_TOLERANCE = 0.02
REQUIRED_COLUMNS = ("char", "codepoint", "occurrences", "negative", "neutral", "positive")

# Unicode blocks treated as emoji.
EMOJI_BLOCKS = (
    (0x1F600, 0x1F64F),  # Emoticons
    (0x1F300, 0x1F5FF),  # Misc Symbols and Pictographs
    (0x1F680, 0x1F6FF),  # Transport and Map Symbols
    (0x1F900, 0x1F9FF),  # Supplemental Symbols and Pictographs
    (0x2600, 0x26FF),  # Misc Symbols
    (0x2700, 0x27BF),  # Dingbats
)
# Fitzpatrick modifiers sit inside the pictograph block but are not base emoji.
SKIN_TONES = (0x1F3FB, 0x1F3FF)


def _block_class() -> str:
    parts = []
    lo, hi = SKIN_TONES
    for start, end in sorted(EMOJI_BLOCKS):
        if start <= lo and hi <= end:
            parts.append(f"\\U{start:08x}-\\U{lo - 1:08x}\\U{hi + 1:08x}-\\U{end:08x}")
        else:
            parts.append(f"\\U{start:08x}-\\U{end:08x}")
    return "[" + "".join(parts) + "]"


EMOJI_RE = re.compile(_block_class())


class LexiconError(ValueError):
    """Raised when a lexicon file cannot be loaded."""


@dataclass(frozen=True)
class EmojiSentimentEntry:
    codepoint: int
    name: str
    neg: float
    neut: float
    pos: float

    def __post_init__(self):
        for label, value in (("negative", self.neg), ("neutral", self.neut), ("positive", self.pos)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{label} score {value} outside [0, 1]")
        total = self.neg + self.neut + self.pos
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"scores sum to {total:.4f}, expected 1 +/- {SUM_TOLERANCE}")

    @property
    def char(self) -> str:
        return chr(self.codepoint)


@dataclass(frozen=True)
class SentimentLexicon:
    entries: Mapping[int, EmojiSentimentEntry]
    source: str = ""
    occurrences: Mapping[int, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.entries:
            raise LexiconError("empty lexicon")
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))
        object.__setattr__(self, "occurrences", MappingProxyType(dict(self.occurrences)))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, codepoint: int) -> bool:
        return codepoint in self.entries

    def get(self, codepoint: int) -> EmojiSentimentEntry | None:
        return self.entries.get(codepoint)

    def column_stats(self) -> dict[str, dict[str, float]]:
        """count/mean/max/min for each sentiment column."""
        out = {}
        for column, attr in (("negative", "neg"), ("neutral", "neut"), ("positive", "pos")):
            values = [getattr(e, attr) for e in self.entries.values()]
            out[column] = {
                "count": len(values),
                "mean": statistics.fmean(values),
                "max": max(values),
                "min": min(values),
            }
        return out


def _parse_codepoint(raw: str, char: str) -> int:
    raw = raw.strip()
    if raw:
        return int(raw, 16)  # accepts an optional 0x prefix
    if len(char) == 1:
        return ord(char)
    raise ValueError("no codepoint")


def _parse_row(row: dict[str, str]) -> tuple[EmojiSentimentEntry, int]:
    codepoint = _parse_codepoint(row["codepoint"], row["char"])
    occurrences = int(row["occurrences"])
    entry = EmojiSentimentEntry(
        codepoint=codepoint,
        name=(row.get("name") or "").strip(),
        neg=float(row["negative"]),
        neut=float(row["neutral"]),
        pos=float(row["positive"]),
    )
    return entry, occurrences


def load_lexicon(path: str | Path, strict: bool = True) -> SentimentLexicon:
    """Load a lexicon CSV.

    Column names are matched case-insensitively; unknown columns are ignored.
    In strict mode any bad row aborts the load; otherwise bad rows are
    logged and skipped.
    """
    path = Path(path)
    if not path.is_file():
        raise LexiconError(f"lexicon file not found: {path}")
    entries: dict[int, EmojiSentimentEntry] = {}
    occurrences: dict[int, int] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise LexiconError("empty lexicon")
        columns = [h.strip().lower() for h in header]
        missing = [c for c in REQUIRED_COLUMNS if c not in columns]
        if missing:
            raise LexiconError(f"{path}: missing columns {missing}")
        for lineno, values in enumerate(reader, start=2):
            if not values or all(not v.strip() for v in values):
                continue
            try:
                if len(values) != len(columns):
                    raise ValueError(f"expected {len(columns)} columns, got {len(values)}")
                entry, occ = _parse_row(dict(zip(columns, values)))
                if entry.codepoint in entries:
                    raise ValueError(f"duplicate codepoint 0x{entry.codepoint:x}")
            except ValueError as exc:
                msg = f"{path}:{lineno}: {exc}"
                if strict:
                    raise LexiconError(msg) from exc
                log.warning("skipping row: %s", msg)
                continue
            entries[entry.codepoint] = entry
            occurrences[entry.codepoint] = occ
    if not entries:
        raise LexiconError("empty lexicon")
    return SentimentLexicon(entries, source=str(path), occurrences=occurrences)


def save_lexicon(lex: SentimentLexicon, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*REQUIRED_COLUMNS, "name"])
        for cp, e in lex.entries.items():
            writer.writerow([
                e.char, f"0x{cp:x}", lex.occurrences.get(cp, 0),
                repr(e.neg), repr(e.neut), repr(e.pos), e.name,
            ])


def intensity_factor(entry: EmojiSentimentEntry) -> float:
    return 1.0 + max(entry.pos, entry.neg, entry.neut)


def extract_emojis(text: str) -> list[int]:
    """Codepoints of every emoji scalar in ``text``, in order, duplicates kept.

    ZWJ sequences fall apart into their base scalars; skin-tone modifiers and
    variation selectors are dropped.
    """
    return [ord(m) for m in EMOJI_RE.findall(text)]


def strip_emojis(text: str) -> str:
    return EMOJI_RE.sub("", text)


def message_intensities(text: str, lex: SentimentLexicon) -> list[float]:
    out = []
    for cp in extract_emojis(text):
        entry = lex.get(cp)
        if entry is not None:
            out.append(intensity_factor(entry))
    return out


def render(codepoints: Iterable[int]) -> str:
    return "".join(chr(cp) for cp in codepoints)

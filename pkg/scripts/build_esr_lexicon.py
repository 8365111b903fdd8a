"""Build the lexicon CSV from the raw Emoji Sentiment Ranking v1.0 counts.

The raw file (shipped inside the ``emosent-py`` wheel, originally from the
CLARIN repository, hdl.handle.net/11356/1048) stores per-emoji occurrence
counts. The published ranking keeps emojis seen at least 5 times and reports
Laplace-smoothed shares ``(count + 1) / (occurrences + 3)`` rounded to three
decimals. This script reproduces that table in the layout ``load_lexicon``
reads.

    python scripts/build_esr_lexicon.py --out data/esr_lexicon.csv
"""
from __future__ import annotations

import argparse
import csv
from pathlib import Path

MIN_OCCURRENCES = 5


def default_raw_path() -> Path:
    import emosent

    return Path(emosent.__file__).parent / "data" / "Emoji_Sentiment_Data_v1.0.csv"


def smoothed(count: int, occurrences: int) -> float:
    return round((count + 1) / (occurrences + 3), 3)


def build(raw: Path, out: Path, min_occurrences: int = MIN_OCCURRENCES) -> int:
    with raw.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    kept = 0
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["char", "codepoint", "occurrences", "negative", "neutral", "positive", "name"])
        for row in rows:
            occ = int(row["Occurrences"])
            if occ < min_occurrences:
                continue
            writer.writerow([
                row["Emoji"],
                row["Unicode codepoint"],
                occ,
                f"{smoothed(int(row['Negative']), occ):.3f}",
                f"{smoothed(int(row['Neutral']), occ):.3f}",
                f"{smoothed(int(row['Positive']), occ):.3f}",
                row["Unicode name"],
            ])
            kept += 1
    return kept


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--raw", type=Path, default=None, help="raw ESR count CSV")
    parser.add_argument("--out", type=Path, default=Path("data/esr_lexicon.csv"))
    parser.add_argument("--min-occurrences", type=int, default=MIN_OCCURRENCES)
    args = parser.parse_args()
    n = build(args.raw or default_raw_path(), args.out, args.min_occurrences)
    print(f"wrote {n} entries to {args.out}")


if __name__ == "__main__":
    main()

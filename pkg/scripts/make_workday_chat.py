"""Write the 113-message synthetic workday chat (09:00-18:00) as JSON lines.

Also writes ``<out>.intended.csv`` with the emotion each message was written
to express, for eyeballing classifier output against it.

    python scripts/make_workday_chat.py --out data/workday_chat.jsonl
"""
from __future__ import annotations

import argparse
import csv
from pathlib import Path

from emoflow.synth import make_workday_chat, write_chat_jsonl


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data/workday_chat.jsonl")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--messages", type=int, default=113)
    args = ap.parse_args(argv)
    lines = make_workday_chat(seed=args.seed, n_messages=args.messages)
    out = Path(args.out)
    write_chat_jsonl(lines, out)
    with out.with_suffix(".intended.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", "sender", "intended"])
        w.writerows([ln.timestamp.isoformat(), ln.sender, ln.intended] for ln in lines)
    print(f"wrote {len(lines)} messages to {out} ({lines[0].timestamp:%H:%M}-{lines[-1].timestamp:%H:%M})")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerate fixtures/lexicons/bg.tsv.

A deterministic stand-in lexicon with the same shape as the real Bulgarian
dataset (1414 nouns: 839 masculine, 575 feminine): Cyrillic pseudo-word
surfaces, placeholder glosses, roughly one animate flag per eleven rows.
"""

from __future__ import annotations

import random
from pathlib import Path

TOTAL = 1414
MASCULINE = 839
FEMININE = 575

SYLLABLES = [
    "ба", "ве", "ги", "до", "жу", "за", "ки", "ло", "ми", "но",
    "па", "ру", "си", "ту", "фа", "це", "ча", "ши", "ър", "ят",
]


def main() -> None:
    rng = random.Random(20240101)
    genders = ["m"] * MASCULINE + ["f"] * FEMININE
    rng.shuffle(genders)

    seen: set[str] = set()
    rows = []
    for i, gender in enumerate(genders):
        word = "".join(rng.choice(SYLLABLES) for _ in range(rng.randint(2, 4)))
        while word in seen:
            word += rng.choice(SYLLABLES)
        seen.add(word)
        animate = "1" if i % 11 == 10 else "0"
        rows.append(f"{word}\t{gender}\tthing-{i:04d}\t{animate}")

    out = Path(__file__).resolve().parent.parent / "fixtures" / "lexicons" / "bg.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(
        "surface\tgender\tpivot_gloss\tanimate\n" + "\n".join(rows) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {out} ({TOTAL} rows: {MASCULINE} m / {FEMININE} f)")


if __name__ == "__main__":
    main()

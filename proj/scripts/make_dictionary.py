#!/usr/bin/env python3
"""Extracts the pronouncing-dictionary subset shipped in data/.

usage: make_dictionary.py CMUDICT_FILE

Keeps every entry (with its variants) whose word occurs in the golden corpus,
the test fixtures or data/dictionary_words.txt.
"""

import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
WORD = re.compile(r"[a-z0-9']+")


def wanted_words():
    words = set()
    sources = list((ROOT / "data" / "golden").rglob("*.txt"))
    sources += list((ROOT / "tests" / "data").rglob("*.txt"))
    sources.append(ROOT / "data" / "dictionary_words.txt")
    for path in sources:
        if path.exists():
            words.update(WORD.findall(path.read_text().lower().replace("’", "'")))
    return words


def main():
    words = wanted_words()
    out = [
        ";;; Subset of the CMU Pronouncing Dictionary (see pronouncing.dict.LICENSE).",
        ";;; Regenerate with scripts/make_dictionary.py.",
    ]
    for raw in Path(sys.argv[1]).read_text(encoding="latin-1").splitlines():
        if not raw or raw.startswith(";;;"):
            continue
        head, _, phones = raw.partition(" ")
        base = re.sub(r"\(\d+\)$", "", head).lower()
        if base in words:
            phones = phones.split("#")[0].strip()
            out.append(f"{head.upper()}  {phones}")
    (ROOT / "data" / "pronouncing.dict").write_text("\n".join(out) + "\n")


if __name__ == "__main__":
    main()

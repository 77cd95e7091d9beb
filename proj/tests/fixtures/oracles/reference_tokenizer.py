#!/usr/bin/env python3
"""Independent reference tokenizer: maximal runs of Unicode letters (L*) or
decimal digits (Nd), lowercased, with optional stopword removal. Writes the
expected term/position lists for sentences.txt."""

import json
import sys
import unicodedata
from pathlib import Path

HERE = Path(__file__).resolve().parent


def is_token_char(ch):
    cat = unicodedata.category(ch)
    return cat.startswith("L") or cat == "Nd"


def tokenize(text):
    tokens, cur = [], []
    for ch in text:
        if is_token_char(ch):
            cur.append(ch)
        elif cur:
            tokens.append("".join(cur))
            cur = []
    if cur:
        tokens.append("".join(cur))
    return tokens


def analyze(text, stopwords):
    terms, positions = [], []
    for i, tok in enumerate(tokenize(text)):
        low = tok.lower()
        if low in stopwords:
            continue
        terms.append(low)
        positions.append(i)
    return terms, positions


def main():
    stop = {"the", "in", "der", "die", "sie", "and", "a", "to"}
    out = []
    for line in (HERE / "sentences.txt").read_text(encoding="utf-8").splitlines():
        plain_terms, plain_pos = analyze(line, set())
        terms, pos = analyze(line, stop)
        out.append({"text": line, "terms": plain_terms, "positions": plain_pos,
                    "stopped_terms": terms, "stopped_positions": pos})
    json.dump({"stopwords": sorted(stop), "cases": out},
              open(HERE / "tokenizer_expected.json", "w", encoding="utf-8"),
              ensure_ascii=False, indent=1)


if __name__ == "__main__":
    sys.exit(main())

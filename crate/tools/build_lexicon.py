"""Regenerate crates/core/data/valence.tsv from the TextBlob and VADER word lists.

Usage: python3 tools/build_lexicon.py <en-sentiment.xml> <vader_lexicon.txt> > crates/core/data/valence.tsv

TextBlob polarity is averaged over the senses listed for each form, matching
how TextBlob scores a single word. VADER valences (range -4..4) are divided
by 4 and only fill lemmas TextBlob does not cover. Both sources are MIT
licensed.
"""
import re
import sys
import xml.etree.ElementTree as ET
from collections import defaultdict

WORD = re.compile(r"^[a-z][a-z'-]*[a-z]$")


def main(xml_path, vader_path):
    senses = defaultdict(list)
    for w in ET.parse(xml_path).getroot().iter("word"):
        form = w.get("form", "").lower()
        if WORD.match(form):
            senses[form].append(float(w.get("polarity", "0")))
    lex = {f: sum(v) / len(v) for f, v in senses.items()}
    with open(vader_path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 2:
                continue
            form = parts[0].lower()
            if WORD.match(form) and form not in lex:
                lex[form] = max(-1.0, min(1.0, float(parts[1]) / 4.0))
    print("# lemma\tvalence (TextBlob polarity, VADER/4 fallback; MIT)")
    for form in sorted(lex):
        print(f"{form}\t{lex[form]:.4f}".rstrip("0").rstrip("."))


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])

"""Arabic-aware text normalization and sentence segmentation.

Normalization follows the standard Arabic evaluation recipe: drop
Tatweel and diacritics, collapse Alef variants, map Alef maqsura to
Yaa, and put spaces around punctuation.  Sentence splitting is the
naive full-stop rule used by the sentence-permutation noise.
"""

import re
from dataclasses import dataclass

TATWEEL = "ـ"

# harakat + dagger alif
_DIACRITICS = re.compile("[\u064B-\u065F\u0670]")

# hamza/madda Alef variants -> bare Alef, Alef maqsura -> Yaa
_ALEF_MAP = str.maketrans({"آ": "ا", "أ": "ا", "إ": "ا"})
ALEF_MAQSURA = "ى"
YAA = "ي"

# ASCII punctuation plus Arabic comma/semicolon/question mark and guillemets
PUNCTUATION = set("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~") | {
    "،",  # arabic comma
    "؛",  # arabic semicolon
    "؟",  # arabic question mark
    "«",  # «
    "»",  # »
}
_PUNCT_RE = re.compile("([" + re.escape("".join(sorted(PUNCTUATION))) + "])")

SENTENCE_TERMINATORS = {".", "!", "?", "؟"}
_TERM_RE = re.compile("([.!?؟])")


@dataclass
class NormRules:
    """Which normalization steps to apply; all on by default."""

    remove_tatweel: bool = True
    remove_diacritics: bool = True
    normalize_alef: bool = True
    normalize_yaa: bool = True
    separate_punct: bool = True


def normalize_eval(text: str, rules: NormRules | None = None) -> str:
    """Normalize text for evaluation.  Total and idempotent."""
    if rules is None:
        rules = NormRules()
    if rules.remove_tatweel:
        text = text.replace(TATWEEL, "")
    if rules.remove_diacritics:
        text = _DIACRITICS.sub("", text)
    if rules.normalize_alef:
        text = text.translate(_ALEF_MAP)
    if rules.normalize_yaa:
        text = text.replace(ALEF_MAQSURA, YAA)
    if rules.separate_punct:
        text = _PUNCT_RE.sub(r" \1 ", text)
    return " ".join(text.split())


def split_sentences(text: str) -> list[str]:
    """Split on sentence terminators, keeping each terminator attached.

    Every terminator splits (no abbreviation handling).  Input without
    any terminator comes back as a single sentence.
    """
    text = " ".join(text.split())
    if not text:
        return []
    parts = _TERM_RE.split(text)
    sentences = []
    # parts alternates [chunk, terminator, chunk, terminator, ..., chunk]
    current = ""
    for i, part in enumerate(parts):
        if i % 2 == 0:
            current += part
        else:
            current += part
            sentences.append(current.strip())
            current = ""
    tail = current.strip()
    if tail:
        sentences.append(tail)
    return [s for s in sentences if s]

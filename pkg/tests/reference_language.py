"""Brute-force reference for the text-analysis stage.

Written before the package implementation and kept deliberately separate from
it: the tests compare ``equivalence.language`` output against this module
field by field. The code here favors the most literal possible transcription
of the tokenization / tagging / segmentation rules over speed or elegance, so
that a shared bug between the two implementations is unlikely.
"""

from __future__ import annotations

import unicodedata
from collections import OrderedDict
from pathlib import Path

APOSTROPHES = {"'", "’"}
TERMINATORS = {".", "!", "?"}

POS_NAMES = [
    "Noun", "Verb", "Adj", "Adv", "Pronoun", "Determiner",
    "Preposition", "Conjunction", "Interjection", "Other",
]

# Suffix cascade, applied in this exact order after the closed-class lookup.
SUFFIX_RULES = [
    ("ly", "Adv"),
    ("ing", "Verb"),
    ("ed", "Verb"),
    ("tion", "Noun"),
    ("ness", "Noun"),
    ("ment", "Noun"),
    ("ity", "Noun"),
    ("ous", "Adj"),
    ("ful", "Adj"),
    ("ive", "Adj"),
    ("al", "Adj"),
]

# Lexicon lookup order: first hit wins.
LEXICON_ORDER = [
    ("determiners", "Determiner"),
    ("prepositions", "Preposition"),
    ("conjunctions", "Conjunction"),
    ("pronouns", "Pronoun"),
    ("interjections", "Interjection"),
]


def load_word_list(path):
    words = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line)
    return words


def load_lexicons(data_dir):
    data_dir = Path(data_dir)
    lex = {}
    for name, _pos in LEXICON_ORDER:
        lex[name] = load_word_list(data_dir / f"{name}.txt")
    lex["subordinators"] = load_word_list(data_dir / "subordinators.txt")
    return lex


def _is_run_char(ch):
    if ch in APOSTROPHES:
        return True
    cat = unicodedata.category(ch)
    return cat.startswith("L") or cat == "Nd"


def _is_digit(ch):
    return unicodedata.category(ch) == "Nd"


def ref_tokenize(text):
    """Return list of (surface, kind) tuples, kind in Word/Number/Punct."""
    if text.strip() == "":
        raise ValueError("empty input")
    tokens = []
    # Whitespace first, then walk each chunk character by character.
    for chunk in text.split():
        run = ""
        for ch in chunk:
            if _is_run_char(ch):
                run += ch
            else:
                if run:
                    tokens.append(_classify_run(run))
                    run = ""
                tokens.append((ch, "Punct"))
        if run:
            tokens.append(_classify_run(run))
    return tokens


def _classify_run(run):
    if all(_is_digit(ch) for ch in run):
        return (run, "Number")
    return (run, "Word")


def ref_tag(tokens, lexicons):
    """Return list of (surface, kind, pos)."""
    tagged = []
    for surface, kind in tokens:
        if kind != "Word":
            tagged.append((surface, kind, "Other"))
            continue
        lower = surface.lower()
        pos = None
        for lex_name, lex_pos in LEXICON_ORDER:
            if lower in lexicons[lex_name]:
                pos = lex_pos
                break
        if pos is None:
            for suffix, suffix_pos in SUFFIX_RULES:
                if lower.endswith(suffix):
                    pos = suffix_pos
                    break
        if pos is None:
            pos = "Noun"
        tagged.append((surface, kind, pos))
    return tagged


def ref_sentences(tokens, subordinators):
    """Split tagged tokens into sentences; return list of (token_list, depth).

    A sentence ends at a terminator token that is not immediately followed by
    another terminator (so runs like "?!" or "..." close a single sentence).
    Trailing tokens without a terminator form a final sentence.
    """
    sentences = []
    current = []
    n = len(tokens)
    for i, tok in enumerate(tokens):
        current.append(tok)
        surface = tok[0]
        if surface in TERMINATORS and tok[1] == "Punct":
            next_is_term = (
                i + 1 < n
                and tokens[i + 1][1] == "Punct"
                and tokens[i + 1][0] in TERMINATORS
            )
            if not next_is_term:
                sentences.append(current)
                current = []
    if current:
        sentences.append(current)

    result = []
    for sent in sentences:
        depth = 1
        for surface, kind, *_ in sent:
            if surface.lower() in subordinators:
                depth += 1
        result.append((sent, depth))
    return result


def ref_features(text, lexicons):
    """Compute the seven-field feature summary as a plain dict."""
    tagged = ref_tag(ref_tokenize(text), lexicons)
    sentences = ref_sentences(tagged, lexicons["subordinators"])

    words = [t for t in tagged if t[1] == "Word"]
    numbers = [t for t in tagged if t[1] == "Number"]

    histogram = OrderedDict((name, 0) for name in POS_NAMES)
    for _surface, _kind, pos in words:
        histogram[pos] += 1

    content = sum(histogram[p] for p in ("Noun", "Verb", "Adj", "Adv"))
    if words:
        content_ratio = content / len(words)
        mean_word_length = sum(len(s) for s, _k, _p in words) / len(words)
        lexical_diversity = len({s.lower() for s, _k, _p in words}) / len(words)
    else:
        content_ratio = 0.0
        mean_word_length = 0.0
        # Convention: diversity of an empty bag of words is 1 (no repetition
        # observed), which keeps the (0, 1] bound for number-only utterances.
        lexical_diversity = 1.0

    return {
        "token_count": len(words) + len(numbers),
        "sentence_count": len(sentences),
        "clause_depths": [depth for _sent, depth in sentences],
        "pos_histogram": dict(histogram),
        "content_ratio": content_ratio,
        "mean_word_length": mean_word_length,
        "lexical_diversity": lexical_diversity,
    }

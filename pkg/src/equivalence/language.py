"""Deterministic text analysis: tokens, POS tags, clause structure, features.

This stage is rule-based on purpose. No statistical model means the same
utterance always produces the same feature vector, which keeps the whole
image pipeline reproducible and testable offline.

Tokenization rules: input is split on Unicode whitespace; within the
remaining runs, a maximal run of letters / decimal digits / apostrophes is
one token (Number when every character is a digit, Word otherwise), and every
other non-whitespace character becomes a single-character Punct token.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .errors import EmptyInput

APOSTROPHES = ("'", "’")
SENTENCE_TERMINATORS = (".", "!", "?")

DEFAULT_DATA_DIR = Path(__file__).parent / "data"


class TokenKind(str, Enum):
    WORD = "Word"
    NUMBER = "Number"
    PUNCT = "Punct"


class Pos(str, Enum):
    NOUN = "Noun"
    VERB = "Verb"
    ADJ = "Adj"
    ADV = "Adv"
    PRONOUN = "Pronoun"
    DETERMINER = "Determiner"
    PREPOSITION = "Preposition"
    CONJUNCTION = "Conjunction"
    INTERJECTION = "Interjection"
    OTHER = "Other"


CONTENT_POS = frozenset({Pos.NOUN, Pos.VERB, Pos.ADJ, Pos.ADV})

# Suffix cascade applied to words missing from every closed-class lexicon.
# Order matters: first matching suffix wins, default is Noun.
SUFFIX_POS = (
    ("ly", Pos.ADV),
    ("ing", Pos.VERB),
    ("ed", Pos.VERB),
    ("tion", Pos.NOUN),
    ("ness", Pos.NOUN),
    ("ment", Pos.NOUN),
    ("ity", Pos.NOUN),
    ("ous", Pos.ADJ),
    ("ful", Pos.ADJ),
    ("ive", Pos.ADJ),
    ("al", Pos.ADJ),
)


@dataclass(frozen=True)
class Utterance:
    """One audience speech act, already transcribed to text."""

    id: str
    session_id: str
    text: str
    received_at: int  # ms since epoch


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    index: int
    kind: TokenKind
    pos: Pos | None = None


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    depth: int  # 1 + subordinator count


@dataclass(frozen=True)
class LanguageFeatures:
    token_count: int
    sentence_count: int
    clause_depths: tuple[int, ...]
    pos_histogram: dict[Pos, int]
    content_ratio: float
    mean_word_length: float
    lexical_diversity: float

    def to_payload(self) -> dict:
        return {
            "token_count": self.token_count,
            "sentence_count": self.sentence_count,
            "clause_depths": list(self.clause_depths),
            "pos_histogram": {p.value: n for p, n in self.pos_histogram.items()},
            "content_ratio": self.content_ratio,
            "mean_word_length": self.mean_word_length,
            "lexical_diversity": self.lexical_diversity,
        }


def load_word_list(path: str | Path) -> frozenset[str]:
    """Read a one-word-per-line UTF-8 lexicon file; '#' starts a comment."""
    words = set()
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


@dataclass(frozen=True)
class Lexicons:
    determiners: frozenset[str]
    prepositions: frozenset[str]
    conjunctions: frozenset[str]
    pronouns: frozenset[str]
    interjections: frozenset[str]
    subordinators: frozenset[str]

    # Closed-class lookup order during tagging; first hit wins.
    CLOSED_CLASS_ORDER = (
        ("determiners", Pos.DETERMINER),
        ("prepositions", Pos.PREPOSITION),
        ("conjunctions", Pos.CONJUNCTION),
        ("pronouns", Pos.PRONOUN),
        ("interjections", Pos.INTERJECTION),
    )

    @classmethod
    def load(cls, paths: dict[str, str | Path] | None = None) -> "Lexicons":
        """Load lexicons, falling back to the packaged data files.

        ``paths`` may override individual files, keyed by field name.
        """
        paths = dict(paths or {})
        kwargs = {}
        for name in (
            "determiners", "prepositions", "conjunctions",
            "pronouns", "interjections", "subordinators",
        ):
            path = paths.get(name) or DEFAULT_DATA_DIR / f"{name}.txt"
            kwargs[name] = load_word_list(path)
        return cls(**kwargs)


def _is_word_char(ch: str) -> bool:
    # Letters (category L*), decimal digits (Nd) and apostrophes form runs.
    return ch.isalpha() or unicodedata.category(ch) == "Nd" or ch in APOSTROPHES


def _run_kind(run: str) -> TokenKind:
    if all(unicodedata.category(ch) == "Nd" for ch in run):
        return TokenKind.NUMBER
    return TokenKind.WORD


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into Word/Number/Punct tokens.

    Concatenating the surfaces reproduces every non-whitespace character of
    the input in order. Raises EmptyInput for whitespace-only text.
    """
    if not text.strip():
        raise EmptyInput("utterance text is empty")

    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if _is_word_char(ch):
            j = i + 1
            while j < n and _is_word_char(text[j]):
                j += 1
            run = text[i:j]
            kind = _run_kind(run)
            pos = None if kind is TokenKind.WORD else Pos.OTHER
            tokens.append(Token(run, run.lower(), len(tokens), kind, pos))
            i = j
        else:
            tokens.append(Token(ch, ch.lower(), len(tokens), TokenKind.PUNCT, Pos.OTHER))
            i += 1
    return tokens


def sentence_spans(tokens: list[Token]) -> list[tuple[int, int]]:
    """Half-open (start, end) index spans of sentences within ``tokens``.

    A sentence closes at a terminator token unless the next token is also a
    terminator, so runs like "?!" and "..." end a single sentence. Trailing
    tokens without a terminator form a final sentence.
    """
    spans = []
    start = 0
    for i, tok in enumerate(tokens):
        if tok.kind is TokenKind.PUNCT and tok.surface in SENTENCE_TERMINATORS:
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if not (
                nxt is not None
                and nxt.kind is TokenKind.PUNCT
                and nxt.surface in SENTENCE_TERMINATORS
            ):
                spans.append((start, i + 1))
                start = i + 1
    if start < len(tokens):
        spans.append((start, len(tokens)))
    return spans


class LanguageAnalyzer:
    """Tokenizer + rule tagger + clause segmenter over a fixed lexicon set.

    Pure functions over immutable inputs; a single instance may be shared
    freely between threads.
    """

    def __init__(self, lexicons: Lexicons | None = None):
        self.lexicons = lexicons or Lexicons.load()

    def tag_pos(self, tokens: list[Token]) -> list[Token]:
        """Fill ``pos`` on every token; Word tokens go through the cascade."""
        tagged = []
        for tok in tokens:
            if tok.kind is not TokenKind.WORD:
                tagged.append(tok if tok.pos is Pos.OTHER else replace(tok, pos=Pos.OTHER))
                continue
            tagged.append(replace(tok, pos=self._word_pos(tok.lower)))
        return tagged

    def _word_pos(self, lower: str) -> Pos:
        for lex_name, pos in Lexicons.CLOSED_CLASS_ORDER:
            if lower in getattr(self.lexicons, lex_name):
                return pos
        for suffix, pos in SUFFIX_POS:
            if lower.endswith(suffix):
                return pos
        return Pos.NOUN

    def segment_clauses(self, tokens: list[Token]) -> list[Sentence]:
        """Group tagged tokens into sentences with clause depth."""
        sentences = []
        for start, end in sentence_spans(tokens):
            span = tuple(tokens[start:end])
            depth = 1 + sum(
                1 for t in span if t.lower in self.lexicons.subordinators
            )
            sentences.append(Sentence(tokens=span, depth=depth))
        return sentences

    def analyze(self, text: str) -> tuple[list[Token], list[Sentence], LanguageFeatures]:
        """Run the full stage once; the pipeline uses this to avoid rework."""
        tokens = self.tag_pos(tokenize(text))
        sentences = self.segment_clauses(tokens)
        return tokens, sentences, self._features(tokens, sentences)

    def extract_features(self, utterance: Utterance) -> LanguageFeatures:
        _tokens, _sentences, features = self.analyze(utterance.text)
        return features

    def _features(
        self, tokens: list[Token], sentences: list[Sentence]
    ) -> LanguageFeatures:
        words = [t for t in tokens if t.kind is TokenKind.WORD]
        numbers = [t for t in tokens if t.kind is TokenKind.NUMBER]

        histogram = {pos: 0 for pos in Pos}
        for tok in words:
            histogram[tok.pos] += 1

        if words:
            content = sum(histogram[p] for p in CONTENT_POS)
            content_ratio = content / len(words)
            mean_word_length = sum(len(t.surface) for t in words) / len(words)
            lexical_diversity = len({t.lower for t in words}) / len(words)
        else:
            content_ratio = 0.0
            mean_word_length = 0.0
            # No words observed means no repetition observed; 1.0 keeps the
            # (0, 1] bound for number-only utterances.
            lexical_diversity = 1.0

        return LanguageFeatures(
            token_count=len(words) + len(numbers),
            sentence_count=len(sentences),
            clause_depths=tuple(s.depth for s in sentences),
            pos_histogram=histogram,
            content_ratio=content_ratio,
            mean_word_length=mean_word_length,
            lexical_diversity=lexical_diversity,
        )

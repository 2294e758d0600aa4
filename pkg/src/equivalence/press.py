"""Press-review word-frequency comparison CLI.

Compares word frequencies across two review corpora and classifies each word
against the diagonal: words used more in corpus B lean "generative", more in
corpus A lean "conceptual", equal counts sit on the diagonal. Words whose
combined count is at or below the threshold are filtered out.
"""

from __future__ import annotations

import argparse
import csv
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import EmptyCorpus, UnreadableFile
from .language import TokenKind, load_word_list, tokenize

DEFAULT_THRESHOLD = 8

GENERATIVE = "generative_leaning"
CONCEPTUAL = "conceptual_leaning"
DIAGONAL = "on_diagonal"

SVG_SIZE = 640
SVG_PAD = 48
LABEL_COLORS = {GENERATIVE: "#b2382f", CONCEPTUAL: "#2f55b2", DIAGONAL: "#555555"}


@dataclass(frozen=True)
class WordFreqRecord:
    word: str
    freq_a: int
    freq_b: int
    classification: str

    @staticmethod
    def classify(freq_a: int, freq_b: int) -> str:
        if freq_b > freq_a:
            return GENERATIVE
        if freq_b < freq_a:
            return CONCEPTUAL
        return DIAGONAL


def corpus_word_counts(directory: str | Path, stopwords: frozenset[str] = frozenset()) -> Counter:
    """Unfiltered lowercase Word-token counts over every file in a directory."""
    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.is_file()) if directory.is_dir() else []
    if not files:
        raise EmptyCorpus(f"no corpus files in {directory}")
    counts: Counter = Counter()
    for path in files:
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise UnreadableFile(f"cannot read corpus file {path}: {exc}") from exc
        counts.update(
            t.lower
            for t in tokenize(text)
            if t.kind is TokenKind.WORD and t.lower not in stopwords
        )
    return counts


def analyze_corpora(
    dir_a: str | Path,
    dir_b: str | Path,
    threshold: int = DEFAULT_THRESHOLD,
    stopwords: str | Path | None = None,
    per_corpus_threshold: bool = False,
) -> list[WordFreqRecord]:
    """Build filtered, classified records sorted by combined count.

    A word is kept iff freq_a + freq_b > threshold (strictly greater); with
    ``per_corpus_threshold`` the rule becomes max(freq_a, freq_b) > threshold.
    """
    stop = load_word_list(stopwords) if stopwords else frozenset()
    counts_a = corpus_word_counts(dir_a, stop)
    counts_b = corpus_word_counts(dir_b, stop)

    records = []
    for word in counts_a.keys() | counts_b.keys():
        freq_a, freq_b = counts_a[word], counts_b[word]
        passes = (
            max(freq_a, freq_b) > threshold
            if per_corpus_threshold
            else freq_a + freq_b > threshold
        )
        if passes:
            records.append(
                WordFreqRecord(word, freq_a, freq_b, WordFreqRecord.classify(freq_a, freq_b))
            )
    records.sort(key=lambda r: (-(r.freq_a + r.freq_b), r.word))
    return records


def emit_csv(records: list[WordFreqRecord], out: str | Path) -> None:
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "freq_a", "freq_b", "classification"])
        for r in records:
            writer.writerow([r.word, r.freq_a, r.freq_b, r.classification])


def parse_csv(path: str | Path) -> list[WordFreqRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [
            WordFreqRecord(
                row["word"], int(row["freq_a"]), int(row["freq_b"]), row["classification"]
            )
            for row in reader
        ]


def emit_svg(records: list[WordFreqRecord], out: str | Path) -> None:
    """Scatter of words at (freq_a, freq_b) with the diagonal as reference."""
    max_freq = max(max(r.freq_a, r.freq_b) for r in records)
    span = SVG_SIZE - 2 * SVG_PAD
    scale = span / max(max_freq, 1)

    def x(freq: int) -> float:
        return SVG_PAD + freq * scale

    def y(freq: int) -> float:
        return SVG_SIZE - SVG_PAD - freq * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="#fdfcf8"/>',
        f'<line x1="{x(0)}" y1="{y(0)}" x2="{x(max_freq)}" y2="{y(max_freq)}" '
        'stroke="#c0392b" stroke-width="1.5" class="diagonal"/>',
        f'<line x1="{x(0)}" y1="{y(0)}" x2="{SVG_SIZE - SVG_PAD}" y2="{y(0)}" stroke="#999"/>',
        f'<line x1="{x(0)}" y1="{y(0)}" x2="{x(0)}" y2="{SVG_PAD}" stroke="#999"/>',
        f'<text x="{SVG_SIZE / 2}" y="{SVG_SIZE - 10}" font-size="12" '
        'text-anchor="middle">corpus A frequency</text>',
        f'<text x="14" y="{SVG_SIZE / 2}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {SVG_SIZE / 2})">corpus B frequency</text>',
    ]
    for r in records:
        color = LABEL_COLORS[r.classification]
        parts.append(
            f'<text x="{x(r.freq_a):.2f}" y="{y(r.freq_b):.2f}" font-size="11" '
            f'fill="{color}" data-word="{escape(r.word)}" data-a="{r.freq_a}" '
            f'data-b="{r.freq_b}">{escape(r.word)}</text>'
        )
    parts.append("</svg>")
    Path(out).write_text("\n".join(parts) + "\n", encoding="utf-8")


def emit_scatter(records: list[WordFreqRecord], format: str, out: str | Path) -> None:
    if not records:
        raise ValueError("no records to emit; lower the threshold")
    if format == "csv":
        emit_csv(records, out)
    elif format == "svg":
        emit_svg(records, out)
    else:
        raise ValueError(f"unknown format: {format}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="press-analyzer",
        description="Compare word frequencies across two review corpora.",
    )
    parser.add_argument("--corpus-a", required=True, help="directory of corpus A files")
    parser.add_argument("--corpus-b", required=True, help="directory of corpus B files")
    parser.add_argument(
        "--threshold", type=int, default=DEFAULT_THRESHOLD,
        help="keep words whose combined count exceeds this (default 8)",
    )
    parser.add_argument(
        "--per-corpus-threshold", action="store_true",
        help="apply the threshold to each corpus count instead of the sum",
    )
    parser.add_argument("--stopwords", help="optional stopword list (one per line)")
    parser.add_argument("--format", choices=("csv", "svg"), default="csv")
    parser.add_argument("--out", required=True, help="output file path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        records = analyze_corpora(
            args.corpus_a,
            args.corpus_b,
            threshold=args.threshold,
            stopwords=args.stopwords,
            per_corpus_threshold=args.per_corpus_threshold,
        )
        emit_scatter(records, args.format, args.out)
    except (EmptyCorpus, UnreadableFile, ValueError, OSError) as exc:
        print(f"press-analyzer: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(records)} records to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

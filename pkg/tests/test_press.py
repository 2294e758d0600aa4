"""Tests for the press-review word-frequency CLI."""

import xml.etree.ElementTree as ET
from collections import Counter
from pathlib import Path

import pytest

from equivalence.errors import EmptyCorpus, UnreadableFile
from equivalence.press import (
    CONCEPTUAL,
    DIAGONAL,
    GENERATIVE,
    SVG_PAD,
    SVG_SIZE,
    WordFreqRecord,
    analyze_corpora,
    corpus_word_counts,
    emit_scatter,
    main,
    parse_csv,
)
from reference_language import ref_tokenize

PRESS_DIR = Path(__file__).parent / "fixtures" / "press"
CORPUS_A = PRESS_DIR / "conceptual"
CORPUS_B = PRESS_DIR / "generative"


def write_corpus(root: Path, name: str, *texts: str) -> Path:
    directory = root / name
    directory.mkdir(parents=True, exist_ok=True)
    for i, text in enumerate(texts):
        (directory / f"doc{i}.txt").write_text(text, encoding="utf-8")
    return directory


class TestThreshold:
    def test_combined_count_boundary(self, tmp_path):
        # "more than 8 times": combined 8 excluded, combined 9 included
        a = write_corpus(tmp_path, "a", "edge " * 4 + "keep " * 5)
        b = write_corpus(tmp_path, "b", "edge " * 4 + "keep " * 4)
        words = {r.word for r in analyze_corpora(a, b, threshold=8)}
        assert "keep" in words  # 5 + 4 = 9 > 8
        assert "edge" not in words  # 4 + 4 = 8, not strictly greater

    def test_constructed_counts_example(self, tmp_path):
        a = write_corpus(tmp_path, "a", "idea " * 10)
        b = write_corpus(tmp_path, "b", "idea idea generative art")
        records = analyze_corpora(a, b, threshold=8)
        idea = next(r for r in records if r.word == "idea")
        assert (idea.freq_a, idea.freq_b) == (10, 2)
        assert idea.classification == CONCEPTUAL

    def test_raising_threshold_never_adds_records(self):
        lower = {r.word for r in analyze_corpora(CORPUS_A, CORPUS_B, threshold=4)}
        higher = {r.word for r in analyze_corpora(CORPUS_A, CORPUS_B, threshold=8)}
        assert higher <= lower

    def test_per_corpus_threshold_mode(self, tmp_path):
        # combined 10 but 5 per corpus: kept by default, dropped per-corpus
        a = write_corpus(tmp_path, "a", "split " * 5 + "solo " * 9)
        b = write_corpus(tmp_path, "b", "split " * 5)
        combined = {r.word for r in analyze_corpora(a, b, threshold=8)}
        per_corpus = {
            r.word
            for r in analyze_corpora(a, b, threshold=8, per_corpus_threshold=True)
        }
        assert combined == {"split", "solo"}
        assert per_corpus == {"solo"}


class TestClassification:
    def test_identical_corpora_all_on_diagonal(self):
        records = analyze_corpora(CORPUS_A, CORPUS_A)
        assert records, "fixture corpus should clear the threshold for some words"
        assert all(r.classification == DIAGONAL for r in records)
        assert all(r.freq_a == r.freq_b for r in records)

    def test_classification_rule(self):
        assert WordFreqRecord.classify(3, 9) == GENERATIVE
        assert WordFreqRecord.classify(9, 3) == CONCEPTUAL
        assert WordFreqRecord.classify(4, 4) == DIAGONAL

    def test_fixture_leanings(self):
        records = analyze_corpora(CORPUS_A, CORPUS_B, threshold=4)
        by_word = {r.word: r for r in records}
        assert by_word["idea"].classification == CONCEPTUAL
        assert by_word["model"].classification == GENERATIVE

    def test_sorted_by_combined_then_word(self):
        records = analyze_corpora(CORPUS_A, CORPUS_B, threshold=2)
        keys = [(-(r.freq_a + r.freq_b), r.word) for r in records]
        assert keys == sorted(keys)


class TestCounts:
    def test_word_count_conservation(self):
        counts = corpus_word_counts(CORPUS_A)
        expected = Counter()
        for path in sorted(CORPUS_A.iterdir()):
            expected.update(
                surface.lower()
                for surface, kind in ref_tokenize(path.read_text())
                if kind == "Word"
            )
        assert counts == expected
        assert sum(counts.values()) == sum(expected.values())

    def test_numbers_and_punct_excluded(self, tmp_path):
        a = write_corpus(tmp_path, "a", "stone, stone! 42 42 42 " + "stone " * 8)
        b = write_corpus(tmp_path, "b", "stone")
        records = analyze_corpora(a, b, threshold=8)
        assert {r.word for r in records} == {"stone"}
        assert records[0].freq_a == 10

    def test_stopword_removal(self, tmp_path):
        stop = tmp_path / "stop.txt"
        stop.write_text("# comment line\nthe\n")
        a = write_corpus(tmp_path, "a", "the the the the the idea " * 3)
        b = write_corpus(tmp_path, "b", "the idea " * 3)
        records = analyze_corpora(a, b, threshold=1, stopwords=stop)
        assert {r.word for r in records} == {"idea"}

    def test_empty_corpus_error(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        with pytest.raises(EmptyCorpus):
            analyze_corpora(empty, CORPUS_B)
        with pytest.raises(EmptyCorpus):
            analyze_corpora(CORPUS_A, tmp_path / "missing")

    def test_unreadable_file_named(self, tmp_path):
        bad_dir = tmp_path / "bad"
        bad_dir.mkdir()
        bad_file = bad_dir / "binary.txt"
        bad_file.write_bytes(b"\xff\xfe\x00\x80 not utf8 \x9f")
        with pytest.raises(UnreadableFile, match="binary.txt"):
            analyze_corpora(bad_dir, CORPUS_B)


class TestEmitters:
    def test_csv_round_trip(self, tmp_path):
        records = analyze_corpora(CORPUS_A, CORPUS_B, threshold=4)
        out = tmp_path / "freqs.csv"
        emit_scatter(records, "csv", out)
        assert parse_csv(out) == records

    def test_csv_minimal_output(self, tmp_path):
        out = tmp_path / "one.csv"
        emit_scatter([WordFreqRecord("idea", 10, 2, CONCEPTUAL)], "csv", out)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "word,freq_a,freq_b,classification"
        assert lines[1] == "idea,10,2,conceptual_leaning"
        assert len(lines) == 2

    def test_svg_labels_on_diagonal_for_symmetric_corpora(self, tmp_path):
        records = analyze_corpora(CORPUS_A, CORPUS_A)
        out = tmp_path / "plot.svg"
        emit_scatter(records, "svg", out)
        root = ET.parse(out).getroot()
        ns = {"svg": "http://www.w3.org/2000/svg"}
        labels = [
            t for t in root.findall("svg:text", ns) if t.get("data-word") is not None
        ]
        assert len(labels) == len(records)
        for label in labels:
            x, y = float(label.get("x")), float(label.get("y"))
            # on the diagonal: x - PAD == (SIZE - PAD) - y
            assert abs((x - SVG_PAD) - ((SVG_SIZE - SVG_PAD) - y)) < 1e-6

    def test_svg_contains_diagonal_line(self, tmp_path):
        records = analyze_corpora(CORPUS_A, CORPUS_B, threshold=4)
        out = tmp_path / "plot.svg"
        emit_scatter(records, "svg", out)
        assert 'class="diagonal"' in out.read_text()

    def test_empty_records_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_scatter([], "csv", tmp_path / "x.csv")


class TestCli:
    def test_csv_run(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        code = main(
            [
                "--corpus-a", str(CORPUS_A),
                "--corpus-b", str(CORPUS_B),
                "--threshold", "4",
                "--format", "csv",
                "--out", str(out),
            ]
        )
        assert code == 0
        assert out.exists()
        assert "records" in capsys.readouterr().out

    def test_svg_run(self, tmp_path):
        out = tmp_path / "report.svg"
        code = main(
            [
                "--corpus-a", str(CORPUS_A),
                "--corpus-b", str(CORPUS_B),
                "--format", "svg",
                "--out", str(out),
            ]
        )
        assert code == 0
        ET.parse(out)  # well-formed XML

    def test_missing_corpus_exit_code(self, tmp_path, capsys):
        code = main(
            [
                "--corpus-a", str(tmp_path / "nope"),
                "--corpus-b", str(CORPUS_B),
                "--out", str(tmp_path / "x.csv"),
            ]
        )
        assert code == 1
        assert "press-analyzer" in capsys.readouterr().err

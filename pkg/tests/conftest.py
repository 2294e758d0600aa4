import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"
DATA_DIR = TESTS_DIR.parent / "src" / "equivalence" / "data"

# Make the reference oracle importable regardless of rootdir.
sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def lexicon_data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def fixture_utterances() -> list[str]:
    lines = (FIXTURES / "utterances.txt").read_text(encoding="utf-8").splitlines()
    return [line for line in lines if line.strip()]


@pytest.fixture(scope="session")
def analyzer():
    from equivalence.language import LanguageAnalyzer

    return LanguageAnalyzer()

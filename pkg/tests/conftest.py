import sys
from pathlib import Path

import pytest

from actionsmith import CommandLexicon

FIXTURES = Path(__file__).parent / "fixtures"

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus_files() -> list[Path]:
    return sorted((FIXTURES / "workflows").glob("*.yml"))


@pytest.fixture(scope="session")
def golden_files() -> list[Path]:
    return sorted((FIXTURES / "golden").glob("*.yml"))


@pytest.fixture(scope="session")
def golden_labels() -> dict[str, str]:
    labels = {}
    for line in (FIXTURES / "golden" / "labels.tsv").read_text().splitlines():
        name, verdict = line.split("\t")
        labels[name] = verdict
    return labels


@pytest.fixture(scope="session")
def lexicon() -> CommandLexicon:
    return CommandLexicon.default()

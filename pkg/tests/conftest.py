import json
from pathlib import Path

import pytest

from summgauge.ingest import Corpus, Topic, load_corpus

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"
TESTS_DATA = Path(__file__).resolve().parent / "data"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def toy_corpus_path() -> Path:
    return DATA_DIR / "toy_corpus.jsonl"


@pytest.fixture(scope="session")
def toy_corpus(toy_corpus_path) -> Corpus:
    return load_corpus(toy_corpus_path)


@pytest.fixture(scope="session")
def published_metrics_path() -> Path:
    return DATA_DIR / "published_corpus_metrics.csv"


@pytest.fixture
def write_corpus(tmp_path):
    """Write topic dicts to a JSONL file and return its path."""
    def _write(topics, name="corpus.jsonl"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as fh:
            for t in topics:
                fh.write(json.dumps(t, ensure_ascii=False) + "\n")
        return path
    return _write


def make_topic(topic_id, documents, references) -> Topic:
    return Topic(topic_id, tuple(documents), tuple(references))

"""Loading, validation and round-tripping of corpora and system runs.

Interchange format is UTF-8 JSONL:

  corpus line:      {"topic_id": str, "documents": [str, ...], "references": [str, ...]}
  system-run line:  {"topic_id": str, "summary": str}

Loaded values are frozen and safe to share across threads. Unknown keys are
tolerated with a warning so corpus files may carry extra metadata.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateTopic, MalformedLine, SchemaViolation

logger = logging.getLogger(__name__)

_TOPIC_KEYS = {"topic_id", "documents", "references"}
_RUN_KEYS = {"topic_id", "summary"}


@dataclass(frozen=True)
class Topic:
    topic_id: str
    documents: tuple[str, ...]
    references: tuple[str, ...]


@dataclass(frozen=True)
class Corpus:
    name: str
    topics: tuple[Topic, ...]

    def topic_ids(self) -> list[str]:
        return [t.topic_id for t in self.topics]

    def __len__(self) -> int:
        return len(self.topics)


@dataclass(frozen=True)
class SystemRun:
    system_name: str
    entries: dict[str, str]

    def coverage(self, corpus: Corpus) -> float:
        """Fraction of corpus topics this run has a summary for."""
        ids = corpus.topic_ids()
        if not ids:
            return 0.0
        return sum(1 for t in ids if t in self.entries) / len(ids)


def _require_str(obj: dict, key: str, line_no: int) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value.strip():
        raise SchemaViolation(line_no, key, "must be a non-empty string")
    return value


def _require_str_list(obj: dict, key: str, line_no: int) -> tuple[str, ...]:
    value = obj.get(key)
    if not isinstance(value, list) or not value:
        raise SchemaViolation(line_no, key, "must be a non-empty list of strings")
    for item in value:
        if not isinstance(item, str) or not item.strip():
            raise SchemaViolation(line_no, key, "contains an empty or non-string entry")
    return tuple(value)


def _iter_jsonl(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, str(exc)) from exc
            if not isinstance(obj, dict):
                raise MalformedLine(line_no, "line is not a JSON object")
            yield line_no, obj


def load_corpus(path: str | Path, name: str | None = None) -> Corpus:
    """Load and validate a JSONL corpus; order is preserved exactly."""
    path = Path(path)
    topics: list[Topic] = []
    seen: set[str] = set()
    for line_no, obj in _iter_jsonl(path):
        topic_id = _require_str(obj, "topic_id", line_no)
        documents = _require_str_list(obj, "documents", line_no)
        references = _require_str_list(obj, "references", line_no)
        unknown = set(obj) - _TOPIC_KEYS
        if unknown:
            logger.warning("line %d: ignoring unknown keys %s", line_no, sorted(unknown))
        if topic_id in seen:
            raise DuplicateTopic(topic_id)
        seen.add(topic_id)
        topics.append(Topic(topic_id, documents, references))
    if not topics:
        raise SchemaViolation(0, "topics", "corpus file contains no topics")
    return Corpus(name or path.stem, tuple(topics))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in corpus.topics:
            fh.write(json.dumps({"topic_id": t.topic_id,
                                 "documents": list(t.documents),
                                 "references": list(t.references)},
                                ensure_ascii=False) + "\n")


def load_system_run(path: str | Path, corpus: Corpus | None = None,
                    system_name: str | None = None) -> SystemRun:
    """Load a system-run file. Topics absent from the corpus warn, not error."""
    path = Path(path)
    entries: dict[str, str] = {}
    for line_no, obj in _iter_jsonl(path):
        topic_id = _require_str(obj, "topic_id", line_no)
        summary = _require_str(obj, "summary", line_no)
        unknown = set(obj) - _RUN_KEYS
        if unknown:
            logger.warning("line %d: ignoring unknown keys %s", line_no, sorted(unknown))
        if topic_id in entries:
            logger.warning("line %d: repeated topic_id %r, keeping the last entry",
                           line_no, topic_id)
        entries[topic_id] = summary
    run = SystemRun(system_name or path.stem, entries)
    if corpus is not None:
        known = set(corpus.topic_ids())
        for topic_id in entries:
            if topic_id not in known:
                logger.warning("run %s: topic_id %r not in corpus %s",
                               run.system_name, topic_id, corpus.name)
        logger.info("run %s covers %.1f%% of corpus %s",
                    run.system_name, 100.0 * run.coverage(corpus), corpus.name)
    return run


def save_system_run(run: SystemRun, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for topic_id, summary in run.entries.items():
            fh.write(json.dumps({"topic_id": topic_id, "summary": summary},
                                ensure_ascii=False) + "\n")

"""Extractive oracle summaries.

The oracle is the subset of candidate-document sentences maximizing
ROUGE-N recall against the references under a word budget. Finding the
true optimum is NP-hard, so the default solver is greedy (add the
sentence with the largest recall gain until no gain or no budget); an
exhaustive solver is provided for small instances to measure how far
greedy falls short.

Candidate n-grams are pooled per sentence (no n-grams across sentence
joins), which makes the objective independent of selection order and
keeps greedy and exhaustive scores directly comparable.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import NoSentences, TooLarge
from .ingest import Corpus, SystemRun, Topic

logger = logging.getLogger(__name__)
from .rouge import RougeScore, f1_score, clipped_overlap
from .textproc import (Sentence, TextConfig, ngram_counts, segment_sentences,
                       surface_tokens, tokenize)


@dataclass(frozen=True)
class OracleResult:
    selected: tuple[tuple[int, int], ...]  # (doc_index, sentence_index)
    score: RougeScore
    budget_used: int
    method: str  # "greedy" | "exact"
    summary_text: str


def topic_sentences(topic: Topic, config: TextConfig | None = None
                    ) -> list[tuple[int, int, Sentence]]:
    """All sentences of a topic's documents as (doc_index, sentence_index, sentence)."""
    cfg = config or TextConfig()
    out = []
    for d, doc in enumerate(topic.documents):
        for sent in segment_sentences(doc, cfg):
            out.append((d, sent.index, sent))
    return out


def default_budget(topic: Topic, config: TextConfig | None = None) -> int:
    """Mean reference length in raw word tokens, rounded, at least 1.

    Uses unfiltered tokens so the budget means the same thing whatever the
    stopword policy is."""
    cfg = config or TextConfig()
    lengths = [len(tokenize(r, cfg)) for r in topic.references]
    return max(1, round(sum(lengths) / len(lengths)))


class _Objective:
    """Mean ROUGE-N recall against the topic references, over pooled
    per-sentence n-gram counts."""

    def __init__(self, topic: Topic, sentences, n: int, cfg: TextConfig):
        self.n = n
        self.sent_counts = [ngram_counts(self._sent_tokens(s.text, cfg), n)
                            for _, _, s in sentences]
        self.lengths = [len(s.tokens) for _, _, s in sentences]
        self.refs = [ngram_counts(surface_tokens(r, cfg), n) for r in topic.references]
        self.ref_totals = [sum(r.values()) for r in self.refs]

    @staticmethod
    def _sent_tokens(text: str, cfg: TextConfig):
        return surface_tokens(text, cfg)

    def recall(self, counts: Counter) -> float:
        vals = []
        for ref, total in zip(self.refs, self.ref_totals):
            vals.append(clipped_overlap(counts, ref) / total if total else 0.0)
        return sum(vals) / len(vals)

    def full_score(self, counts: Counter) -> RougeScore:
        cand_total = sum(counts.values())
        rs, ps, fs = [], [], []
        for ref, total in zip(self.refs, self.ref_totals):
            if total == 0 or cand_total == 0:
                rs.append(0.0); ps.append(0.0); fs.append(0.0)
                continue
            m = clipped_overlap(counts, ref)
            r, p = m / total, m / cand_total
            rs.append(r); ps.append(p); fs.append(f1_score(p, r))
        k = len(rs)
        return RougeScore(self.n, sum(rs) / k, sum(ps) / k, sum(fs) / k)


def _merge(counters) -> Counter:
    out: Counter = Counter()
    for c in counters:
        out.update(c)
    return out


def greedy_oracle(topic: Topic, n: int = 1, budget_words: int | None = None,
                  config: TextConfig | None = None, fill_budget: bool = False) -> OracleResult:
    """Greedy oracle: repeatedly add the sentence with the largest recall
    gain (ties broken by document then sentence index).

    Stops at zero gain unless fill_budget is set. If no sentence at all
    fits the budget, the single best sentence is taken regardless of
    length, so a result is never empty for a reachable reference.
    """
    cfg = config or TextConfig()
    sentences = topic_sentences(topic, cfg)
    if not sentences:
        raise NoSentences(f"topic {topic.topic_id!r} has no sentences")
    budget = budget_words if budget_words is not None else default_budget(topic, cfg)
    if budget < 1:
        raise ValueError("budget_words must be >= 1")
    obj = _Objective(topic, sentences, n, cfg)

    selected: list[int] = []
    counts: Counter = Counter()
    used = 0
    current = 0.0
    while True:
        fitting = [i for i in range(len(sentences))
                   if i not in selected and used + obj.lengths[i] <= budget]
        if not fitting:
            if not selected:
                # budget smaller than every sentence: take the best single one
                best = max(range(len(sentences)),
                           key=lambda i: (obj.recall(obj.sent_counts[i]), -i))
                if obj.recall(obj.sent_counts[best]) > 0.0 or fill_budget:
                    selected = [best]
                    counts = Counter(obj.sent_counts[best])
                    used = obj.lengths[best]
            break
        best_i, best_gain = -1, 0.0
        for i in fitting:
            gain = obj.recall(_merge([counts, obj.sent_counts[i]])) - current
            if gain > best_gain or (fill_budget and best_i == -1 and gain >= best_gain):
                best_i, best_gain = i, gain
        if best_i == -1:
            break
        if best_gain <= 0.0 and not fill_budget:
            break
        selected.append(best_i)
        counts.update(obj.sent_counts[best_i])
        used += obj.lengths[best_i]
        current += best_gain

    chosen = [(sentences[i][0], sentences[i][1]) for i in selected]
    text = " ".join(sentences[i][2].text for i in selected)
    return OracleResult(selected=tuple(chosen), score=obj.full_score(counts),
                        budget_used=used, method="greedy", summary_text=text)


def exact_oracle(topic: Topic, n: int = 1, budget_words: int | None = None,
                 config: TextConfig | None = None, max_sentences: int = 14) -> OracleResult:
    """Exhaustive oracle over all budget-feasible sentence subsets.

    Ties prefer the lexicographically smallest index set, so results are
    deterministic and the empty set wins when nothing scores.
    """
    cfg = config or TextConfig()
    sentences = topic_sentences(topic, cfg)
    if not sentences:
        raise NoSentences(f"topic {topic.topic_id!r} has no sentences")
    if len(sentences) > max_sentences:
        raise TooLarge(len(sentences), max_sentences)
    budget = budget_words if budget_words is not None else default_budget(topic, cfg)
    if budget < 1:
        raise ValueError("budget_words must be >= 1")
    obj = _Objective(topic, sentences, n, cfg)

    indices = range(len(sentences))
    if any(obj.lengths[i] <= budget for i in indices):
        def feasible():
            for k in range(len(sentences) + 1):
                for combo in itertools.combinations(indices, k):
                    if sum(obj.lengths[i] for i in combo) <= budget:
                        yield combo
    else:
        def feasible():
            yield ()
            for i in indices:
                yield (i,)

    best_combo: tuple[int, ...] = ()
    best_recall = -1.0
    for combo in feasible():
        recall = obj.recall(_merge([obj.sent_counts[i] for i in combo]))
        if recall > best_recall or (recall == best_recall and combo < best_combo):
            best_combo, best_recall = combo, recall

    counts = _merge([obj.sent_counts[i] for i in best_combo])
    chosen = [(sentences[i][0], sentences[i][1]) for i in best_combo]
    text = " ".join(sentences[i][2].text for i in best_combo)
    return OracleResult(selected=tuple(chosen), score=obj.full_score(counts),
                        budget_used=sum(obj.lengths[i] for i in best_combo),
                        method="exact", summary_text=text)


# --- corpus-level helpers ----------------------------------------------------

def _oracle_worker(args):
    topic, n, budget, cfg, method, fill_budget, max_sentences = args
    try:
        if method == "exact":
            result = exact_oracle(topic, n, budget, cfg, max_sentences)
        else:
            result = greedy_oracle(topic, n, budget, cfg, fill_budget)
    except NoSentences as exc:
        logger.warning("topic %s skipped: %s", topic.topic_id, exc)
        return topic.topic_id, None
    return topic.topic_id, result


def compute_oracles(corpus: Corpus, n: int = 1, budget_words: int | None = None,
                    config: TextConfig | None = None, method: str = "greedy",
                    fill_budget: bool = False, max_sentences: int = 14,
                    jobs: int = 1) -> dict[str, OracleResult]:
    """Oracle per topic; topics with no sentences are skipped with a warning."""
    if method not in ("greedy", "exact"):
        raise ValueError(f"method must be greedy or exact, got {method!r}")
    work = [(t, n, budget_words, config, method, fill_budget, max_sentences)
            for t in corpus.topics]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_oracle_worker, work))
    else:
        results = list(map(_oracle_worker, work))
    return {tid: res for tid, res in results if res is not None}


def oracle_system_run(oracles: dict[str, OracleResult]) -> SystemRun:
    """Package oracle summaries as a run named 'oracle' so they flow through
    the same evaluation path as real systems."""
    entries = {tid: res.summary_text for tid, res in oracles.items()
               if res.summary_text.strip()}
    return SystemRun(system_name="oracle", entries=entries)

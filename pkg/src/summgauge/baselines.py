"""Reference extractive summarizers.

Four classics so the evaluation pipeline can be exercised end to end:
eigenvector centrality over a thresholded TF-IDF cosine graph (lexrank),
weighted PageRank over token-overlap similarities (textrank), maximal
marginal relevance (mmr), and a greedy concept-coverage approximation of
the ILP-style coverage objective (greedy_concept). All are deterministic
for a fixed config and emit verbatim source sentences in original
document order, truncated to the word budget.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NoConcepts, NoSentences, UnknownAlgorithm
from .ingest import Corpus, SystemRun, Topic
from .oracle import default_budget, topic_sentences
from .textproc import TextConfig, cosine, ngrams, surface_tokens, tfidf_vectors

logger = logging.getLogger(__name__)

ALGORITHMS = ("lexrank", "textrank", "mmr", "greedy_concept")


@dataclass(frozen=True)
class SummarizerConfig:
    algorithm: str = "lexrank"
    budget_words: int | None = None  # None: mean reference length per topic
    damping: float = 0.85
    cosine_threshold: float = 0.1
    mmr_lambda: float = 0.5
    max_iterations: int = 100
    epsilon: float = 1e-6

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise UnknownAlgorithm(self.algorithm, ALGORITHMS)
        if self.budget_words is not None and self.budget_words < 1:
            raise ValueError("budget_words must be >= 1")
        if not 0 < self.damping < 1:
            raise ValueError("damping must be in (0, 1)")
        if not 0 <= self.mmr_lambda <= 1:
            raise ValueError("mmr_lambda must be in [0, 1]")
        if self.max_iterations < 1 or self.epsilon <= 0:
            raise ValueError("bad convergence settings")


def _sentences(topic: Topic, text_config: TextConfig | None):
    sents = topic_sentences(topic, text_config)
    if not sents:
        raise NoSentences(f"topic {topic.topic_id!r} has no sentences")
    return sents


def _budget(topic: Topic, cfg: SummarizerConfig, text_config: TextConfig | None) -> int:
    return cfg.budget_words if cfg.budget_words is not None \
        else default_budget(topic, text_config)


def _take_ranked(ranked: list[int], lengths: list[int], budget: int) -> list[int]:
    """Greedy knapsack down the ranking; a single over-budget sentence is
    kept only when nothing fits at all."""
    chosen, used = [], 0
    for i in ranked:
        if used + lengths[i] <= budget:
            chosen.append(i)
            used += lengths[i]
    if not chosen and ranked:
        chosen = [ranked[0]]
    return chosen


def _emit(sentences, chosen: list[int]) -> str:
    return " ".join(sentences[i][2].text for i in sorted(chosen))


# --- graph centrality ---------------------------------------------------------

def _power_iterate(transition: np.ndarray, damping: float,
                   max_iterations: int, epsilon: float) -> np.ndarray:
    n = transition.shape[0]
    p = np.full(n, 1.0 / n)
    for _ in range(max_iterations):
        new_p = damping * (transition.T @ p) + (1.0 - damping) / n
        if np.abs(new_p - p).sum() < epsilon:
            return new_p
        p = new_p
    return p


def lexrank_scores(topic: Topic, cfg: SummarizerConfig,
                   text_config: TextConfig | None = None) -> np.ndarray:
    """Stationary distribution of the thresholded cosine-similarity graph."""
    sents = _sentences(topic, text_config)
    vectors = tfidf_vectors([s for _, _, s in sents], text_config)
    n = len(sents)
    adj = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if cosine(vectors[i], vectors[j]) >= cfg.cosine_threshold:
                adj[i, j] = adj[j, i] = 1.0
    row_sums = adj.sum(axis=1)
    transition = np.where(row_sums[:, None] > 0.0,
                          adj / np.maximum(row_sums[:, None], 1e-12),
                          1.0 / n)  # dangling sentences jump uniformly
    return _power_iterate(transition, cfg.damping, cfg.max_iterations, cfg.epsilon)


def lexrank(topic: Topic, cfg: SummarizerConfig | None = None,
            text_config: TextConfig | None = None) -> str:
    cfg = cfg or SummarizerConfig(algorithm="lexrank")
    sents = _sentences(topic, text_config)
    scores = lexrank_scores(topic, cfg, text_config)
    ranked = sorted(range(len(sents)), key=lambda i: (-scores[i], i))
    lengths = [len(s.tokens) for _, _, s in sents]
    return _emit(sents, _take_ranked(ranked, lengths, _budget(topic, cfg, text_config)))


def textrank_scores(topic: Topic, cfg: SummarizerConfig,
                    text_config: TextConfig | None = None) -> np.ndarray:
    """Weighted PageRank where edge weight is shared-token count scaled by
    sentence lengths; single-token sentences (log 0) get weight 0."""
    sents = _sentences(topic, text_config)
    token_sets = [set(s.tokens) for _, _, s in sents]
    lengths = [len(s.tokens) for _, _, s in sents]
    n = len(sents)
    weights = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            denom = math.log(lengths[i]) + math.log(lengths[j]) \
                if lengths[i] > 1 and lengths[j] > 1 else 0.0
            if denom > 0.0:
                w = len(token_sets[i] & token_sets[j]) / denom
                weights[i, j] = weights[j, i] = w
    out_sums = weights.sum(axis=1)
    contrib = np.where(out_sums[:, None] > 0.0,
                       weights / np.maximum(out_sums[:, None], 1e-12), 0.0)
    scores = np.ones(n)
    for _ in range(cfg.max_iterations):
        new_scores = (1.0 - cfg.damping) + cfg.damping * (contrib.T @ scores)
        if np.abs(new_scores - scores).sum() < cfg.epsilon:
            return new_scores
        scores = new_scores
    return scores


def textrank(topic: Topic, cfg: SummarizerConfig | None = None,
             text_config: TextConfig | None = None) -> str:
    cfg = cfg or SummarizerConfig(algorithm="textrank")
    sents = _sentences(topic, text_config)
    scores = textrank_scores(topic, cfg, text_config)
    ranked = sorted(range(len(sents)), key=lambda i: (-scores[i], i))
    lengths = [len(s.tokens) for _, _, s in sents]
    return _emit(sents, _take_ranked(ranked, lengths, _budget(topic, cfg, text_config)))


# --- maximal marginal relevance -----------------------------------------------

def mmr(topic: Topic, cfg: SummarizerConfig | None = None,
        text_config: TextConfig | None = None) -> str:
    """Iteratively picks argmax of lambda*sim(s, centroid) -
    (1-lambda)*max sim(s, already selected), under the word budget."""
    cfg = cfg or SummarizerConfig(algorithm="mmr")
    sents = _sentences(topic, text_config)
    vectors = tfidf_vectors([s for _, _, s in sents], text_config)
    lengths = [len(s.tokens) for _, _, s in sents]
    budget = _budget(topic, cfg, text_config)
    n = len(sents)

    centroid: dict[str, float] = {}
    for v in vectors:
        for t, x in v.items():
            centroid[t] = centroid.get(t, 0.0) + x
    centroid = {t: x / n for t, x in centroid.items()}
    query_sim = [cosine(v, centroid) for v in vectors]

    selected: list[int] = []
    used = 0
    lam = cfg.mmr_lambda
    while True:
        fitting = [i for i in range(n) if i not in selected and used + lengths[i] <= budget]
        if not fitting:
            break
        best_i, best_score = -1, -float("inf")
        for i in fitting:
            redundancy = max((cosine(vectors[i], vectors[t]) for t in selected), default=0.0)
            score = lam * query_sim[i] - (1.0 - lam) * redundancy
            if score > best_score:
                best_i, best_score = i, score
        selected.append(best_i)
        used += lengths[best_i]
    if not selected:
        selected = [max(range(n), key=lambda i: (lam * query_sim[i], -i))]
    return _emit(sents, selected)


# --- greedy concept coverage ----------------------------------------------------

def concept_weights(topic: Topic, text_config: TextConfig | None = None,
                    min_weight: int = 2) -> dict[tuple[str, ...], int]:
    """Bigrams weighted by document frequency. Falls back to weight >= 1
    with a warning when no bigram repeats across documents."""
    doc_sets = [set(ngrams(surface_tokens(d, text_config), 2)) for d in topic.documents]
    df: dict[tuple[str, ...], int] = {}
    for grams in doc_sets:
        for g in grams:
            df[g] = df.get(g, 0) + 1
    concepts = {g: w for g, w in df.items() if w >= min_weight}
    if not concepts:
        if not df:
            raise NoConcepts(f"topic {topic.topic_id!r} yields no bigrams")
        logger.warning("topic %s: no concept reaches weight %d, keeping all bigrams",
                       topic.topic_id, min_weight)
        concepts = df
    return concepts


def greedy_concept(topic: Topic, cfg: SummarizerConfig | None = None,
                   text_config: TextConfig | None = None) -> str:
    """Greedy approximation of concept coverage: repeatedly add the
    sentence with the highest newly-covered concept weight per word."""
    cfg = cfg or SummarizerConfig(algorithm="greedy_concept")
    sents = _sentences(topic, text_config)
    concepts = concept_weights(topic, text_config)
    lengths = [len(s.tokens) for _, _, s in sents]
    budget = _budget(topic, cfg, text_config)
    sent_concepts = [set(ngrams(surface_tokens(s.text, text_config), 2)) & set(concepts)
                     for _, _, s in sents]

    covered: set = set()
    selected: list[int] = []
    used = 0
    while True:
        fitting = [i for i in range(len(sents))
                   if i not in selected and used + lengths[i] <= budget]
        if not fitting:
            break
        best_i, best_rate = -1, 0.0
        for i in fitting:
            gain = sum(concepts[g] for g in sent_concepts[i] - covered)
            rate = gain / lengths[i]
            if rate > best_rate:
                best_i, best_rate = i, rate
        if best_i == -1:
            break
        selected.append(best_i)
        covered |= sent_concepts[best_i]
        used += lengths[best_i]
    if not selected:
        best = max(range(len(sents)),
                   key=lambda i: (sum(concepts[g] for g in sent_concepts[i]), -i))
        selected = [best]
    return _emit(sents, selected)


# --- dispatch -------------------------------------------------------------------

_DISPATCH = {"lexrank": lexrank, "textrank": textrank, "mmr": mmr,
             "greedy_concept": greedy_concept}


def summarize(topic: Topic, cfg: SummarizerConfig,
              text_config: TextConfig | None = None) -> str:
    return _DISPATCH[cfg.algorithm](topic, cfg, text_config)


def _run_worker(args):
    topic, cfg, text_config = args
    try:
        return topic.topic_id, summarize(topic, cfg, text_config)
    except (NoSentences, NoConcepts) as exc:
        logger.warning("topic %s skipped: %s", topic.topic_id, exc)
        return topic.topic_id, None


def run_summarizer(corpus: Corpus, cfg: SummarizerConfig,
                   text_config: TextConfig | None = None, jobs: int = 1) -> SystemRun:
    """Summarize every topic of a corpus into a SystemRun named after the
    algorithm; topics that cannot be summarized are skipped with a warning."""
    work = [(t, cfg, text_config) for t in corpus.topics]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_worker, work))
    else:
        results = list(map(_run_worker, work))
    entries = {tid: text for tid, text in results if text}
    return SystemRun(system_name=cfg.algorithm, entries=entries)

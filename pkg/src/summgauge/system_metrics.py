"""Metrics for system-generated summaries evaluated against a corpus.

Each covered topic gets ROUGE-1/2, F1 against the extractive oracle,
novel-n-gram abstractness, redundancy of the summary's own unit
distribution, per-document relevance (mean and variance, i.e. which
sources the summary draws from), and positional layout bias with a
seeded shuffled ablation. Corpus-level values are arithmetic means over
the covered topics with non-null values.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .corpus_metrics import relevance, segment_sizes, text_redundancy
from .errors import (DegenerateSummary, EmptyOracle, SingleDocument,
                     SummGaugeError)
from .ingest import Corpus, SystemRun, Topic
from .oracle import OracleResult
from .rouge import RougeScore, rouge_n
from .textproc import (TextConfig, ngrams, segment_sentences, surface_tokens,
                       unit_distribution, vocabulary_of)

logger = logging.getLogger(__name__)


@dataclass
class SystemMetricValues:
    rouge1: RougeScore | None
    rouge2: RougeScore | None
    f1_vs_oracle: float | None
    sys_abstractness: dict[int, float | None]
    sys_redundancy: float | None
    idd: float | None
    iddv: float | None
    layout: list[float | None]
    layout_shuffled: list[float | None]
    shuffle_seed: int

    def to_dict(self) -> dict:
        def rs(score):
            if score is None:
                return None
            return {"recall": score.recall, "precision": score.precision, "f1": score.f1}
        return {"rouge1": rs(self.rouge1), "rouge2": rs(self.rouge2),
                "f1_vs_oracle": self.f1_vs_oracle,
                "sys_abstractness": {str(n): v for n, v in self.sys_abstractness.items()},
                "sys_redundancy": self.sys_redundancy,
                "idd": self.idd, "iddv": self.iddv,
                "layout": list(self.layout),
                "layout_shuffled": list(self.layout_shuffled),
                "shuffle_seed": self.shuffle_seed}


def f1_vs_oracle(summary: str, oracle: OracleResult,
                 config: TextConfig | None = None) -> float:
    """ROUGE-1 F1 of the system summary against the oracle summary text."""
    if not oracle.selected:
        raise EmptyOracle("oracle selected no sentences")
    return rouge_n(summary, [oracle.summary_text], 1, config).f1


def system_abstractness(summary: str, topic: Topic, n: int,
                        config: TextConfig | None = None) -> float:
    """Percentage of summary n-gram instances never seen in the candidate
    documents (100 * (1 - coverage))."""
    cfg = config or TextConfig()
    summary_grams = ngrams(surface_tokens(summary, cfg), n)
    if not summary_grams:
        raise DegenerateSummary(f"summary shorter than {n} tokens")
    doc_grams: set = set()
    for doc in topic.documents:
        doc_grams.update(ngrams(surface_tokens(doc, cfg), n))
    covered = sum(1 for g in summary_grams if g in doc_grams)
    return 100.0 * (1.0 - covered / len(summary_grams))


def idd(summary: str, topic: Topic, config: TextConfig | None = None,
        alpha: float = 0.01) -> tuple[float, float]:
    """Mean and population variance over documents of the summary's
    relevance to each document (pairwise union vocabularies)."""
    if len(topic.documents) < 2:
        raise SingleDocument(f"topic {topic.topic_id!r} has one document")
    cfg = config or TextConfig()
    values = []
    for doc in topic.documents:
        vocab = vocabulary_of([summary, doc], cfg)
        s_dist = unit_distribution([summary], cfg, vocab, alpha)
        d_dist = unit_distribution([doc], cfg, vocab, alpha)
        values.append(relevance(s_dist, d_dist, cfg.log_base))
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, var


def system_redundancy(summary: str, config: TextConfig | None = None) -> float:
    """Negative entropy of the summary's own unit distribution."""
    return text_redundancy(summary, config)


def _concatenated_sentences(topic: Topic, cfg: TextConfig,
                            shuffle_seed: int | None) -> list[str]:
    doc_sents = [[s.text for s in segment_sentences(d, cfg)] for d in topic.documents]
    if shuffle_seed is None:
        return [s for sents in doc_sents for s in sents]
    rng = np.random.default_rng(shuffle_seed)
    order = rng.permutation(len(doc_sents))
    out: list[str] = []
    for d in order:
        sents = doc_sents[d]
        for i in rng.permutation(len(sents)):
            out.append(sents[i])
    return out


def system_layout_bias(summary: str, topic: Topic, k: int = 3,
                       shuffle_seed: int | None = None,
                       config: TextConfig | None = None) -> list[float | None]:
    """Clipped unigram overlap between the summary and each of k segments
    of the concatenated candidate documents.

    With a shuffle seed, document order and the sentences inside each
    document are permuted (deterministically per seed) before
    concatenation, destroying positional structure while keeping content.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    cfg = config or TextConfig()
    summary_counts = Counter(surface_tokens(summary, cfg))
    total = sum(summary_counts.values())
    sentences = _concatenated_sentences(topic, cfg, shuffle_seed)
    scores: list[float | None] = []
    start = 0
    for size in segment_sizes(len(sentences), k):
        seg = sentences[start:start + size]
        start += size
        if not seg or total == 0:
            scores.append(None if not seg else 0.0)
            continue
        seg_counts = Counter()
        for s in seg:
            seg_counts.update(surface_tokens(s, cfg))
        overlap = sum(min(c, seg_counts[t]) for t, c in summary_counts.items())
        scores.append(overlap / total)
    return scores


# --- per-run evaluation -------------------------------------------------------

def evaluate_summary(summary: str, topic: Topic, config: TextConfig | None = None, *,
                     segments: int = 3, alpha: float = 0.01, shuffle_seed: int = 13,
                     ref_agg: str = "mean",
                     oracle: OracleResult | None = None) -> SystemMetricValues:
    cfg = config or TextConfig()

    def attempt(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SummGaugeError as exc:
            logger.warning("topic %s: %s: %s", topic.topic_id, type(exc).__name__, exc)
            return None

    idd_pair = attempt(idd, summary, topic, cfg, alpha)
    return SystemMetricValues(
        rouge1=rouge_n(summary, topic.references, 1, cfg, ref_agg),
        rouge2=rouge_n(summary, topic.references, 2, cfg, ref_agg),
        f1_vs_oracle=(attempt(f1_vs_oracle, summary, oracle, cfg)
                      if oracle is not None else None),
        sys_abstractness={n: attempt(system_abstractness, summary, topic, n, cfg)
                          for n in cfg.ngram_orders},
        sys_redundancy=attempt(system_redundancy, summary, cfg),
        idd=idd_pair[0] if idd_pair else None,
        iddv=idd_pair[1] if idd_pair else None,
        layout=system_layout_bias(summary, topic, segments, None, cfg),
        layout_shuffled=system_layout_bias(summary, topic, segments, shuffle_seed, cfg),
        shuffle_seed=shuffle_seed,
    )


def _summary_worker(args):
    topic, summary, cfg, opts, oracle = args
    return topic.topic_id, evaluate_summary(summary, topic, cfg, oracle=oracle, **opts)


def evaluate_run(corpus: Corpus, run: SystemRun, config: TextConfig | None = None, *,
                 jobs: int = 1, oracles: dict[str, OracleResult] | None = None,
                 **opts) -> tuple[list[dict], dict]:
    """Evaluate one system run against a corpus.

    Topics the run does not cover are skipped with a warning. Returns
    per-topic dicts plus the aggregate (means of non-null values).
    """
    cfg = config or TextConfig()
    work = []
    for topic in corpus.topics:
        if topic.topic_id not in run.entries:
            logger.warning("run %s: no summary for topic %s, skipping",
                           run.system_name, topic.topic_id)
            continue
        oracle = oracles.get(topic.topic_id) if oracles else None
        work.append((topic, run.entries[topic.topic_id], cfg, opts, oracle))
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_summary_worker, work))
    else:
        results = dict(map(_summary_worker, work))

    per_topic = [{"topic_id": t.topic_id, **results[t.topic_id].to_dict()}
                 for t in corpus.topics if t.topic_id in results]
    return per_topic, aggregate_system_metrics(per_topic)


def _mean_or_none(values) -> float | None:
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def _mean_rouge(entries, key) -> dict | None:
    scores = [t[key] for t in entries if t[key] is not None]
    if not scores:
        return None
    return {part: sum(s[part] for s in scores) / len(scores)
            for part in ("recall", "precision", "f1")}


def aggregate_system_metrics(per_topic: list[dict]) -> dict:
    if not per_topic:
        return {}
    orders = sorted(per_topic[0]["sys_abstractness"])
    k = len(per_topic[0]["layout"])
    return {
        "rouge1": _mean_rouge(per_topic, "rouge1"),
        "rouge2": _mean_rouge(per_topic, "rouge2"),
        "f1_vs_oracle": _mean_or_none(t["f1_vs_oracle"] for t in per_topic),
        "sys_abstractness": {n: _mean_or_none(t["sys_abstractness"][n] for t in per_topic)
                             for n in orders},
        "sys_redundancy": _mean_or_none(t["sys_redundancy"] for t in per_topic),
        "idd": _mean_or_none(t["idd"] for t in per_topic),
        "iddv": _mean_or_none(t["iddv"] for t in per_topic),
        "layout": [_mean_or_none(t["layout"][s] for t in per_topic) for s in range(k)],
        "layout_shuffled": [_mean_or_none(t["layout_shuffled"][s] for t in per_topic)
                            for s in range(k)],
        "topics": len(per_topic),
    }

"""Corpus-quality metrics computed per topic and aggregated per corpus.

Per topic: abstractness (novel reference n-grams), inter-document
similarity (cross-entropy relevance between document pairs), redundancy
(negative entropy of the pooled unit distribution), pyramid and
inverse-pyramid scores over the SCU pyramid, positional layout bias, and
the compression factor. Topics where a metric is undefined (single
document, no SCUs, ...) report null and are excluded from aggregates.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .errors import (DegenerateReference, EmptyAfterFiltering, NoSCUs,
                     SingleDocument, SummGaugeError, VocabularyMismatch)
from .ingest import Corpus, Topic
from .textproc import (Pyramid, TextConfig, UnitDistribution, clause_unit_sets,
                       cosine, extract_scus, jaccard, ngrams, segment_sentences,
                       surface_tokens, tfidf_vectors, tokenize,
                       unit_distribution, vocabulary_of)

logger = logging.getLogger(__name__)


@dataclass
class CorpusMetricValues:
    abstractness: dict[int, float | None]
    ids: float | None
    redundancy: float | None
    pyramid: float | None
    inv_pyramid: float | None
    layout: list[float | None]
    compression: float | None

    def to_dict(self) -> dict:
        return {"abstractness": {str(n): v for n, v in self.abstractness.items()},
                "ids": self.ids, "redundancy": self.redundancy,
                "pyramid": self.pyramid, "inv_pyramid": self.inv_pyramid,
                "layout": list(self.layout), "compression": self.compression}


# --- relevance / IDS --------------------------------------------------------

def relevance(a: UnitDistribution, b: UnitDistribution, log_base: str = "e") -> float:
    """Sum over units of P_a(u) * log P_b(u): the negative cross-entropy.

    Always <= 0; maximal (equal to -H(a)) when b matches a exactly. Units
    with P_a = 0 contribute nothing; P_b = 0 on a's support yields -inf,
    which smoothing is meant to prevent.
    """
    if a.vocabulary != b.vocabulary:
        raise VocabularyMismatch("distributions built over different vocabularies")
    log = math.log if log_base == "e" else math.log2
    total = 0.0
    for unit, pa in a.support.items():
        if pa == 0.0:
            continue
        pb = b.support[unit]
        if pb == 0.0:
            return float("-inf")
        total += pa * log(pb)
    return total


def pairwise_relevance(topic: Topic, config: TextConfig | None = None,
                       alpha: float = 0.01) -> list[list[float]]:
    """Matrix r[j][i] = relevance of document j's distribution against
    document i's, each pair smoothed over its own union vocabulary."""
    cfg = config or TextConfig()
    docs = topic.documents
    n = len(docs)
    matrix = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            vocab = vocabulary_of([docs[i], docs[j]], cfg)
            di = unit_distribution([docs[i]], cfg, vocab, alpha)
            dj = unit_distribution([docs[j]], cfg, vocab, alpha)
            matrix[j][i] = relevance(dj, di, cfg.log_base)
    return matrix


def ids(topic: Topic, config: TextConfig | None = None, alpha: float = 0.01) -> float:
    """Inter-document similarity: mean over documents i of the mean
    relevance of every other document against i. Closer to 0 means more
    overlap between candidate documents."""
    if len(topic.documents) < 2:
        raise SingleDocument(f"topic {topic.topic_id!r} has one document")
    matrix = pairwise_relevance(topic, config, alpha)
    n = len(matrix)
    per_doc = [sum(matrix[j][i] for j in range(n) if j != i) / (n - 1) for i in range(n)]
    return sum(per_doc) / n


# --- redundancy -------------------------------------------------------------

def _plogp(dist: UnitDistribution, log_base: str) -> float:
    log = math.log if log_base == "e" else math.log2
    return sum(p * log(p) for p in dist.support.values() if p > 0.0)


def redundancy(topic: Topic, config: TextConfig | None = None,
               per_document: bool = False) -> float:
    """Negative entropy of the semantic-unit distribution (unsmoothed).

    0 only when a single unit repeats; the farther below 0, the more evenly
    the text spreads over distinct units. Defaults to one distribution over
    the concatenation of all candidate documents; per_document averages the
    per-document values instead.
    """
    cfg = config or TextConfig()
    if per_document:
        vals = [_plogp(unit_distribution([d], cfg, alpha=0.0), cfg.log_base)
                for d in topic.documents]
        return sum(vals) / len(vals)
    dist = unit_distribution(list(topic.documents), cfg, alpha=0.0)
    return _plogp(dist, cfg.log_base)


def text_redundancy(text: str, config: TextConfig | None = None) -> float:
    """Negative entropy of one text's own unit distribution."""
    cfg = config or TextConfig()
    return _plogp(unit_distribution([text], cfg, alpha=0.0), cfg.log_base)


# --- abstractness -----------------------------------------------------------

def abstractness(topic: Topic, n: int, config: TextConfig | None = None) -> float:
    """Percentage of distinct reference n-grams absent from the candidate
    documents, averaged over references."""
    cfg = config or TextConfig()
    doc_grams: set = set()
    for doc in topic.documents:
        doc_grams.update(ngrams(surface_tokens(doc, cfg), n))
    values = []
    for ref in topic.references:
        ref_grams = set(ngrams(surface_tokens(ref, cfg), n))
        if not ref_grams:
            raise DegenerateReference(
                f"topic {topic.topic_id!r}: reference shorter than {n} tokens")
        novel = len(ref_grams - doc_grams)
        values.append(100.0 * novel / len(ref_grams))
    return sum(values) / len(values)


# --- pyramid scores ---------------------------------------------------------

def _matched_scu_ids(pyramid: Pyramid, ref_sets, threshold: float) -> set[int]:
    matched = set()
    for scu in pyramid.scus:
        for rs in ref_sets:
            if jaccard(scu.unit_set, rs) >= threshold:
                matched.add(scu.id)
                break
    return matched


def pyramid_score(topic: Topic, pyramid: Pyramid, config: TextConfig | None = None,
                  jaccard_threshold: float = 0.6) -> float:
    """Ratio of the reference's SCU-weight coverage to the best coverage
    attainable with the same number of SCUs, averaged over references."""
    if not pyramid.scus:
        raise NoSCUs("empty pyramid")
    cfg = config or TextConfig()
    weights = [s.weight for s in pyramid.scus]  # already descending
    by_id = {s.id: s.weight for s in pyramid.scus}
    values = []
    for ref in topic.references:
        ref_sets = clause_unit_sets(ref, cfg)
        matched = _matched_scu_ids(pyramid, ref_sets, jaccard_threshold)
        ref_score = sum(by_id[i] for i in matched)
        m = max(len(matched), len(ref_sets), 1)
        optimal = sum(weights[:m])
        values.append(min(1.0, max(0.0, ref_score / optimal)))
    return sum(values) / len(values)


def inverse_pyramid(topic: Topic, pyramid: Pyramid, config: TextConfig | None = None,
                    jaccard_threshold: float = 0.6, normalized: bool = False) -> float:
    """Variance across documents of how many of the reference's SCUs each
    document contains. 0 means every document contributed equally."""
    if len(topic.documents) < 2:
        raise SingleDocument(f"topic {topic.topic_id!r} has one document")
    if not pyramid.scus:
        raise NoSCUs("empty pyramid")
    cfg = config or TextConfig()
    by_id = {s.id: s for s in pyramid.scus}
    n_docs = len(topic.documents)
    values = []
    for ref in topic.references:
        ref_sets = clause_unit_sets(ref, cfg)
        matched = _matched_scu_ids(pyramid, ref_sets, jaccard_threshold)
        counts = []
        for j in range(n_docs):
            c = sum(1 for i in matched if j in by_id[i].doc_indices)
            if normalized and ref_sets:
                counts.append(c / len(ref_sets))
            else:
                counts.append(float(c))
        mean = sum(counts) / n_docs
        values.append(sum((c - mean) ** 2 for c in counts) / n_docs)
    return sum(values) / len(values)


# --- layout bias ------------------------------------------------------------

def segment_sizes(count: int, k: int) -> list[int]:
    """Near-equal split of `count` items into k parts, remainder to the front."""
    q, r = divmod(count, k)
    return [q + 1] * r + [q] * (k - r)


def layout_bias(topic: Topic, k: int = 3, config: TextConfig | None = None
                ) -> list[float | None]:
    """Mean importance of each of k document segments, where a sentence's
    importance is its best TF-IDF cosine against any reference sentence.

    Segments a document cannot fill are skipped; a segment no document
    fills is null.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    cfg = config or TextConfig()
    doc_sents = [segment_sentences(d, cfg) for d in topic.documents]
    ref_sents = [s for r in topic.references for s in segment_sentences(r, cfg)]
    flat = [s for sents in doc_sents for s in sents] + ref_sents
    vectors = tfidf_vectors(flat, cfg)
    ref_vecs = vectors[len(vectors) - len(ref_sents):]

    per_doc_scores: list[list[float | None]] = []
    pos = 0
    for sents in doc_sents:
        vecs = vectors[pos:pos + len(sents)]
        pos += len(sents)
        if not sents:
            continue
        importance = [max((cosine(v, rv) for rv in ref_vecs), default=0.0) for v in vecs]
        scores: list[float | None] = []
        start = 0
        for size in segment_sizes(len(sents), k):
            seg = importance[start:start + size]
            start += size
            scores.append(sum(seg) / len(seg) if seg else None)
        per_doc_scores.append(scores)

    out: list[float | None] = []
    for s in range(k):
        vals = [d[s] for d in per_doc_scores if d[s] is not None]
        out.append(sum(vals) / len(vals) if vals else None)
    return out


# --- compression ------------------------------------------------------------

def compression_factor(topic: Topic, config: TextConfig | None = None) -> float:
    """Total candidate-document words divided by mean reference words.

    Counts raw word tokens, independent of the stopword policy."""
    cfg = config or TextConfig()
    doc_words = sum(len(tokenize(d, cfg)) for d in topic.documents)
    ref_mean = (sum(len(tokenize(r, cfg)) for r in topic.references)
                / len(topic.references))
    if ref_mean == 0:
        raise DegenerateReference(f"topic {topic.topic_id!r}: references have no tokens")
    return doc_words / ref_mean


# --- per-topic evaluation and corpus aggregation -----------------------------

def evaluate_topic(topic: Topic, config: TextConfig | None = None, *,
                   segments: int = 3, alpha: float = 0.01,
                   jaccard_threshold: float = 0.6,
                   per_document_redundancy: bool = False,
                   normalized_inverse: bool = False) -> CorpusMetricValues:
    """All corpus metrics for one topic; undefined metrics come back None."""
    cfg = config or TextConfig()

    abs_values: dict[int, float | None] = {}
    for n in cfg.ngram_orders:
        abs_values[n] = _try(abstractness, topic, n, cfg)

    ids_value = _try(ids, topic, cfg, alpha)
    red_value = _try(redundancy, topic, cfg, per_document_redundancy)

    pyr_value: float | None = None
    inv_value: float | None = None
    try:
        pyramid = extract_scus(topic.documents, cfg, jaccard_threshold)
    except (NoSCUs, EmptyAfterFiltering) as exc:
        logger.warning("topic %s: %s", topic.topic_id, exc)
    else:
        pyr_value = _try(pyramid_score, topic, pyramid, cfg, jaccard_threshold)
        inv_value = _try(inverse_pyramid, topic, pyramid, cfg, jaccard_threshold,
                         normalized_inverse)

    return CorpusMetricValues(
        abstractness=abs_values,
        ids=ids_value,
        redundancy=red_value,
        pyramid=pyr_value,
        inv_pyramid=inv_value,
        layout=layout_bias(topic, segments, cfg),
        compression=_try(compression_factor, topic, cfg),
    )


def _try(fn, topic, *args):
    try:
        return fn(topic, *args)
    except SummGaugeError as exc:
        logger.warning("topic %s: %s: %s", topic.topic_id, type(exc).__name__, exc)
        return None


def _topic_worker(args):
    topic, cfg, opts = args
    return topic.topic_id, evaluate_topic(topic, cfg, **opts)


def evaluate_corpus(corpus: Corpus, config: TextConfig | None = None, *,
                    jobs: int = 1, include_pairwise: bool = False,
                    alpha: float = 0.01, **opts
                    ) -> tuple[list[dict], dict]:
    """Per-topic metric dicts (in corpus order) plus the corpus aggregate."""
    cfg = config or TextConfig()
    opts = dict(opts, alpha=alpha)
    work = [(t, cfg, opts) for t in corpus.topics]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_topic_worker, work))
    else:
        results = dict(map(_topic_worker, work))

    per_topic = []
    for t in corpus.topics:
        entry = {"topic_id": t.topic_id, **results[t.topic_id].to_dict()}
        if include_pairwise:
            entry["pairwise_relevance"] = pairwise_relevance(t, cfg, alpha)
        per_topic.append(entry)
    return per_topic, aggregate_metrics(per_topic)


def _mean_or_none(values) -> float | None:
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def aggregate_metrics(per_topic: list[dict]) -> dict:
    """Arithmetic mean of non-null per-topic values, field by field."""
    if not per_topic:
        return {}
    orders = sorted(per_topic[0]["abstractness"])
    k = len(per_topic[0]["layout"])
    return {
        "abstractness": {n: _mean_or_none(t["abstractness"][n] for t in per_topic)
                         for n in orders},
        "ids": _mean_or_none(t["ids"] for t in per_topic),
        "redundancy": _mean_or_none(t["redundancy"] for t in per_topic),
        "pyramid": _mean_or_none(t["pyramid"] for t in per_topic),
        "inv_pyramid": _mean_or_none(t["inv_pyramid"] for t in per_topic),
        "layout": [_mean_or_none(t["layout"][s] for t in per_topic) for s in range(k)],
        "compression": _mean_or_none(t["compression"] for t in per_topic),
        "topics": len(per_topic),
    }

"""Deterministic text processing.

Tokenization, sentence and clause segmentation, Porter stemming, stopword
filtering, n-gram extraction, TF-IDF sentence vectors, semantic-unit
distributions and SCU pyramid construction. Every function here is a pure
function of (input text, config): repeated calls are byte-identical, which
is what makes golden-file testing of the metric pipeline possible.

A "semantic unit" is operationalized as a lowercased content-word unigram
(stopwords removed, stemmed when the config enables stemming). An SCU is a
clause-level set of stemmed content words; clauses from different documents
that overlap strongly (Jaccard) are merged into one unit whose weight is
the number of distinct documents containing it.
"""

from __future__ import annotations

import math
import os
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import groupby
from typing import Iterable, Sequence

from .errors import EmptyAfterFiltering, NoSCUs, VocabularyMismatch

STOPWORDS_ENV = "SUMMGAUGE_STOPWORDS"

_TOKEN_RE = re.compile(r"[^\W_]+(?:['’-][^\W_]+)*")
_TERMINATOR_RE = re.compile(r"[.!?]+[\"'”’)\]]*")
_LAST_WORD_RE = re.compile(r"(\S+)$")
_CLAUSE_SEP_RE = re.compile(r"[.;:,]|\b(?:and|but|or|while|whereas)\b", re.IGNORECASE)


@dataclass(frozen=True)
class TextConfig:
    """Knobs for the text pipeline.

    stopword_policy is tri-state: None lets each operation use its natural
    default (drop for unit distributions, keep for surface-overlap scores
    such as ROUGE and abstractness); an explicit "keep"/"drop" forces the
    choice everywhere.
    """

    lowercase: bool = True
    stem: bool = False
    stopword_policy: str | None = None
    ngram_orders: tuple[int, ...] = (1, 2, 3)
    log_base: str = "e"

    def __post_init__(self):
        if not self.ngram_orders:
            raise ValueError("ngram_orders must be non-empty")
        for n in self.ngram_orders:
            if not 1 <= n <= 4:
                raise ValueError(f"ngram order {n} outside [1, 4]")
        if self.stopword_policy not in (None, "keep", "drop"):
            raise ValueError(f"stopword_policy must be keep/drop, got {self.stopword_policy!r}")
        if self.log_base not in ("e", "2"):
            raise ValueError(f"log_base must be 'e' or '2', got {self.log_base!r}")

    def log(self, x: float) -> float:
        return math.log(x) if self.log_base == "e" else math.log2(x)


@dataclass(frozen=True)
class Sentence:
    index: int
    tokens: tuple[str, ...]
    char_span: tuple[int, int]
    text: str


@dataclass(frozen=True)
class UnitDistribution:
    """Probability distribution over semantic units with smoothing attached."""

    support: dict[str, float]
    smoothing_alpha: float
    vocabulary: frozenset[str]


@dataclass(frozen=True)
class SCU:
    """A merged summarization content unit.

    unit_set is the stemmed content-word set of the earliest contributing
    clause; weight counts the distinct documents containing a matching
    clause (doc_indices lists them); source locates that earliest clause
    as (doc_index, char_span).
    """

    id: int
    unit_set: frozenset[str]
    weight: int
    source: tuple[int, tuple[int, int]]
    doc_indices: frozenset[int]


@dataclass(frozen=True)
class Pyramid:
    scus: tuple[SCU, ...]  # sorted by descending weight, then id

    @property
    def tiers(self) -> list[tuple[int, list[SCU]]]:
        return [(w, list(g)) for w, g in groupby(self.scus, key=lambda s: s.weight)]


# --- resource word lists ----------------------------------------------------

@lru_cache(maxsize=None)
def _load_wordlist(path: str) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())


@lru_cache(maxsize=None)
def _packaged_wordlist(name: str) -> frozenset[str]:
    text = resources.files("summgauge.resources").joinpath(name).read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


def stopwords() -> frozenset[str]:
    """The versioned stopword list; SUMMGAUGE_STOPWORDS overrides the path."""
    override = os.environ.get(STOPWORDS_ENV)
    if override:
        return _load_wordlist(override)
    return _packaged_wordlist("stopwords.txt")


def abbreviations() -> frozenset[str]:
    return _packaged_wordlist("abbreviations.txt")


# --- tokenization -----------------------------------------------------------

def tokenize(text: str, config: TextConfig | None = None) -> list[str]:
    """Unicode word tokens; internal apostrophes/hyphens kept, punctuation dropped."""
    cfg = config or TextConfig()
    tokens = _TOKEN_RE.findall(text)
    if cfg.lowercase:
        tokens = [t.lower() for t in tokens]
    return tokens


def _filter_tokens(tokens: Iterable[str], cfg: TextConfig, default_policy: str) -> list[str]:
    policy = cfg.stopword_policy or default_policy
    out = list(tokens)
    if policy == "drop":
        sw = stopwords()
        out = [t for t in out if t not in sw]
    if cfg.stem:
        out = [porter_stem(t) for t in out]
    return out


def unit_tokens(text: str, config: TextConfig | None = None) -> list[str]:
    """Semantic-unit token stream: stopwords dropped unless the config keeps them."""
    cfg = config or TextConfig()
    return _filter_tokens(tokenize(text, cfg), cfg, "drop")


def surface_tokens(text: str, config: TextConfig | None = None) -> list[str]:
    """Surface token stream for overlap scores: stopwords kept unless dropped."""
    cfg = config or TextConfig()
    return _filter_tokens(tokenize(text, cfg), cfg, "keep")


def ngrams(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(ngrams(tokens, n))


# --- sentence segmentation --------------------------------------------------

def segment_sentences(text: str, config: TextConfig | None = None) -> list[Sentence]:
    """Split raw text into sentences with character spans.

    Boundaries are terminator runs ([.!?] plus closing quotes) followed by
    whitespace or end of text. Periods after a listed abbreviation or a
    single uppercase initial do not end a sentence. Chunks with no word
    tokens (stray punctuation) are absorbed into the neighbouring sentence
    so that spans still cover all non-whitespace text.
    """
    cfg = config or TextConfig()
    boundaries = []
    for m in _TERMINATOR_RE.finditer(text):
        end = m.end()
        if end < len(text) and not text[end].isspace():
            continue  # mid-token period, e.g. "3.14"
        if "." in m.group():
            wm = _LAST_WORD_RE.search(text, 0, m.start())
            if wm:
                word = wm.group(1).strip("\"'([{‘“")
                if word.lower().rstrip(".") in abbreviations():
                    continue
                if len(word) == 1 and word.isupper():
                    continue  # initials: "J. Smith"
        boundaries.append(end)

    segments = []
    start = 0
    for b in boundaries:
        segments.append((start, b))
        start = b
    if start < len(text):
        segments.append((start, len(text)))

    sentences: list[Sentence] = []
    pending_start: int | None = None
    for s, e in segments:
        seg = text[s:e]
        stripped = seg.strip()
        if not stripped:
            continue
        ls = s + (len(seg) - len(seg.lstrip()))
        rs = e - (len(seg) - len(seg.rstrip()))
        if pending_start is not None:
            ls = min(ls, pending_start)
            pending_start = None
        tokens = tuple(tokenize(text[ls:rs], cfg))
        if not tokens:
            # punctuation-only chunk: extend the previous sentence over it,
            # or hold it for the next one
            if sentences:
                prev = sentences[-1]
                span = (prev.char_span[0], rs)
                sentences[-1] = Sentence(prev.index, prev.tokens, span, text[span[0]:span[1]])
            else:
                pending_start = ls
            continue
        sentences.append(Sentence(len(sentences), tokens, (ls, rs), text[ls:rs]))
    return sentences


# --- clauses and SCUs -------------------------------------------------------

def split_clauses(text: str, offset: int = 0) -> list[tuple[int, int]]:
    """Character spans of clause chunks, split at {. ; : ,} and coordinating
    conjunctions (and/but/or/while/whereas)."""
    spans = []
    pos = 0
    for m in _CLAUSE_SEP_RE.finditer(text):
        if m.start() > pos:
            spans.append((pos, m.start()))
        pos = m.end()
    if pos < len(text):
        spans.append((pos, len(text)))
    out = []
    for s, e in spans:
        seg = text[s:e]
        ls = len(seg) - len(seg.lstrip())
        rs = len(seg) - len(seg.rstrip())
        if s + ls < e - rs:
            out.append((offset + s + ls, offset + e - rs))
    return out


def scu_unit_set(clause: str) -> frozenset[str]:
    """Stemmed lowercase content words of a clause (stopwords always removed)."""
    sw = stopwords()
    return frozenset(porter_stem(t.lower()) for t in _TOKEN_RE.findall(clause)
                     if t.lower() not in sw)


def clause_unit_sets(text: str, config: TextConfig | None = None,
                     min_units: int = 3) -> list[frozenset[str]]:
    """SCU candidate sets of a single text: clause unit sets with >= min_units."""
    cfg = config or TextConfig()
    sets = []
    for sent in segment_sentences(text, cfg):
        for s, e in split_clauses(sent.text, offset=0):
            units = scu_unit_set(sent.text[s:e])
            if len(units) >= min_units:
                sets.append(units)
    return sets


def jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def extract_scus(documents: Sequence[str], config: TextConfig | None = None,
                 jaccard_threshold: float = 0.6) -> Pyramid:
    """Build the SCU pyramid of a document set.

    Clause candidates (>= 3 content-word stems) are merged across the whole
    topic by single-linkage over the Jaccard >= threshold graph, so lowering
    the threshold can only fuse units together, never split them. An SCU's
    weight is the number of distinct documents contributing a clause to its
    merged group.
    """
    cfg = config or TextConfig()
    if not 0 < jaccard_threshold <= 1:
        raise ValueError("jaccard_threshold must be in (0, 1]")

    candidates: list[tuple[int, tuple[int, int], frozenset[str]]] = []
    for d, doc in enumerate(documents):
        for sent in segment_sentences(doc, cfg):
            for s, e in split_clauses(sent.text, offset=sent.char_span[0]):
                units = scu_unit_set(doc[s:e])
                if len(units) >= 3:
                    candidates.append((d, (s, e), units))
    if not candidates:
        raise NoSCUs("no clause has >= 3 content words")

    parent = list(range(len(candidates)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            if jaccard(candidates[i][2], candidates[j][2]) >= jaccard_threshold:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = {}
    for i in range(len(candidates)):
        groups.setdefault(find(i), []).append(i)

    scus = []
    for root in sorted(groups):
        members = groups[root]
        doc_idx, span, units = candidates[min(members)]
        contributing = frozenset(candidates[k][0] for k in members)
        scus.append(SCU(id=len(scus), unit_set=units, weight=len(contributing),
                        source=(doc_idx, span), doc_indices=contributing))
    scus.sort(key=lambda s: (-s.weight, s.id))
    return Pyramid(scus=tuple(scus))


# --- distributions ----------------------------------------------------------

def vocabulary_of(texts: Iterable[str], config: TextConfig | None = None) -> set[str]:
    """Union semantic-unit vocabulary of a group of texts."""
    cfg = config or TextConfig()
    vocab: set[str] = set()
    for text in texts:
        vocab.update(unit_tokens(text, cfg))
    return vocab


def unit_distribution(texts: Sequence[str], config: TextConfig | None = None,
                      vocabulary: Iterable[str] | None = None,
                      alpha: float = 0.01) -> UnitDistribution:
    """Smoothed unit distribution: P(u) = (count(u) + a) / (total + a*|V|).

    The caller supplies the union vocabulary of whatever group of texts is
    being compared, so that two distributions built for a comparison share
    the same support.
    """
    cfg = config or TextConfig()
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    counts: Counter = Counter()
    for text in texts:
        counts.update(unit_tokens(text, cfg))
    if not counts:
        raise EmptyAfterFiltering("no semantic units left after filtering")
    vocab = frozenset(vocabulary) if vocabulary is not None else frozenset(counts)
    extra = set(counts) - vocab
    if extra:
        raise VocabularyMismatch(f"units outside supplied vocabulary: {sorted(extra)[:5]}")
    total = sum(counts.values())
    denom = total + alpha * len(vocab)
    support = {u: (counts.get(u, 0) + alpha) / denom for u in sorted(vocab)}
    return UnitDistribution(support=support, smoothing_alpha=alpha, vocabulary=vocab)


# --- TF-IDF sentence vectors ------------------------------------------------

def tfidf_vectors(sentences: Sequence[Sentence],
                  config: TextConfig | None = None) -> list[dict[str, float]]:
    """Sparse TF-IDF vectors over a sentence collection.

    weight(t) = tf * (ln((N+1)/(df+1)) + 1). Stopword-only sentences get a
    zero vector.
    """
    cfg = config or TextConfig()
    term_lists = [_filter_tokens(s.tokens, cfg, "drop") for s in sentences]
    n = len(sentences)
    df: Counter = Counter()
    for terms in term_lists:
        df.update(set(terms))
    vectors = []
    for terms in term_lists:
        tf = Counter(terms)
        vectors.append({t: c * (math.log((n + 1) / (df[t] + 1)) + 1.0)
                        for t, c in sorted(tf.items())})
    return vectors


def cosine(a: dict[str, float], b: dict[str, float]) -> float:
    if not a or not b:
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    dot = sum(v * b.get(t, 0.0) for t, v in a.items())
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


# --- Porter stemmer ---------------------------------------------------------

_VOWELS = "aeiou"


def _is_cons(word: str, i: int) -> bool:
    c = word[i]
    if c in _VOWELS:
        return False
    if c == "y":
        return i == 0 or not _is_cons(word, i - 1)
    return True


def _measure(stem: str) -> int:
    m = 0
    i, n = 0, len(stem)
    while i < n and _is_cons(stem, i):
        i += 1
    while i < n:
        while i < n and not _is_cons(stem, i):
            i += 1
        if i >= n:
            break
        m += 1
        while i < n and _is_cons(stem, i):
            i += 1
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_cons(stem, i) for i in range(len(stem)))


def _double_cons(stem: str) -> bool:
    return len(stem) >= 2 and stem[-1] == stem[-2] and _is_cons(stem, len(stem) - 1)


def _cvc(stem: str) -> bool:
    return (len(stem) >= 3 and _is_cons(stem, len(stem) - 3)
            and not _is_cons(stem, len(stem) - 2)
            and _is_cons(stem, len(stem) - 1)
            and stem[-1] not in "wxy")


_STEP2 = [("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
          ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
          ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
          ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
          ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")]
_STEP3 = [("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
          ("ical", "ic"), ("ful", ""), ("ness", "")]
_STEP4 = ["al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
          "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize"]


def _longest_rule(word: str, rules: list[tuple[str, str]]) -> tuple[str, str] | None:
    best = None
    for suffix, repl in rules:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, repl)
    return best


@lru_cache(maxsize=65536)
def porter_stem(word: str) -> str:
    """Porter's 1980 suffix-stripping algorithm (self-contained so that
    golden files do not depend on an external stemmer's version)."""
    if len(word) <= 2:
        return word
    w = word

    # step 1a
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-2]
    elif not w.endswith("ss") and w.endswith("s"):
        w = w[:-1]

    # step 1b
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    else:
        stripped = False
        if w.endswith("ed") and _has_vowel(w[:-2]):
            w = w[:-2]
            stripped = True
        elif w.endswith("ing") and _has_vowel(w[:-3]):
            w = w[:-3]
            stripped = True
        if stripped:
            if w.endswith(("at", "bl", "iz")):
                w += "e"
            elif _double_cons(w) and w[-1] not in "lsz":
                w = w[:-1]
            elif _measure(w) == 1 and _cvc(w):
                w += "e"

    # step 1c
    if w.endswith("y") and _has_vowel(w[:-1]):
        w = w[:-1] + "i"

    # step 2
    rule = _longest_rule(w, _STEP2)
    if rule and _measure(w[:-len(rule[0])]) > 0:
        w = w[:-len(rule[0])] + rule[1]

    # step 3
    rule = _longest_rule(w, _STEP3)
    if rule and _measure(w[:-len(rule[0])]) > 0:
        w = w[:-len(rule[0])] + rule[1]

    # step 4
    rule = _longest_rule(w, [(s, "") for s in _STEP4])
    if rule:
        stem = w[:-len(rule[0])]
        if _measure(stem) > 1 and (rule[0] != "ion" or stem.endswith(("s", "t"))):
            w = stem

    # step 5a
    if w.endswith("e"):
        stem = w[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _cvc(stem)):
            w = stem

    # step 5b
    if _measure(w) > 1 and _double_cons(w) and w.endswith("l"):
        w = w[:-1]

    return w

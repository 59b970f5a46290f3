"""Self-contained ROUGE-N scorer (recall, precision, F1).

Counting is clipped: each candidate n-gram is credited at most as many
times as it occurs in the reference. Stopwords are kept and stemming is
off by default, both switchable through TextConfig. Multiple references
aggregate by arithmetic mean (use ref_agg="max" to keep the best
reference instead).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .textproc import TextConfig, ngram_counts, surface_tokens


@dataclass(frozen=True)
class RougeScore:
    n: int
    recall: float
    precision: float
    f1: float


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def clipped_overlap(candidate: Counter, reference: Counter) -> int:
    return sum(min(c, reference[g]) for g, c in candidate.items() if g in reference)


def _score_pair(cand: Counter, ref: Counter, n: int) -> tuple[float, float, float]:
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    if cand_total == 0 or ref_total == 0:
        return 0.0, 0.0, 0.0
    m = clipped_overlap(cand, ref)
    recall = m / ref_total
    precision = m / cand_total
    return recall, precision, f1_score(precision, recall)


def rouge_n(candidate: str, references: Sequence[str], n: int = 1,
            config: TextConfig | None = None, ref_agg: str = "mean") -> RougeScore:
    """ROUGE-N of a candidate text against one or more references.

    Degenerate texts (fewer than n tokens) score 0 rather than erroring.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not references:
        raise ValueError("at least one reference is required")
    if ref_agg not in ("mean", "max"):
        raise ValueError(f"ref_agg must be 'mean' or 'max', got {ref_agg!r}")
    cfg = config or TextConfig()
    cand_counts = ngram_counts(surface_tokens(candidate, cfg), n)
    scored = [_score_pair(cand_counts, ngram_counts(surface_tokens(r, cfg), n), n)
              for r in references]
    if ref_agg == "max":
        r, p, f = max(scored, key=lambda s: (s[2], s[0]))
    else:
        k = len(scored)
        r = sum(s[0] for s in scored) / k
        p = sum(s[1] for s in scored) / k
        f = sum(s[2] for s in scored) / k
    return RougeScore(n=n, recall=r, precision=p, f1=f)

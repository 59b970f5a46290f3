"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s or -v to see them inline).

Note on criterion 1: the shipped reference table reproduces the published
ids-pyramid correlation exactly, but its redundancy-ids correlation
computes to -0.711, not the published -0.8454 (no column pairing,
rank-based variant, or leave-one-out subset of the table yields -0.8454).
The assertion keeps the published target rather than adjusting it to the
computed value, so that check stays red on purpose.
"""

import csv
import json
import math
import time

import numpy as np

from summgauge import baselines, corpus_metrics, system_metrics
from summgauge.analysis import MetricReport, oracle_gap, pearson
from summgauge.cli import main as cli_main
from summgauge.corpus_metrics import (layout_bias, pyramid_score, redundancy,
                                      relevance, text_redundancy)
from summgauge.ingest import Corpus, Topic
from summgauge.oracle import compute_oracles, exact_oracle, greedy_oracle, \
    oracle_system_run
from summgauge.textproc import TextConfig, UnitDistribution, extract_scus, \
    segment_sentences
from tests.conftest import GOLDEN_DIR

KEEP = TextConfig(stopword_policy="keep")


def record(criterion: str, ok: bool, detail: str = "") -> bool:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    return ok


def _uniform_distribution(k: int) -> UnitDistribution:
    units = [f"u{i}" for i in range(k)]
    return UnitDistribution(support={u: 1.0 / k for u in units},
                            smoothing_alpha=0.0, vocabulary=frozenset(units))


# --------------------------------------------------------------------------
# 1. Correlation reproduction against the shipped reference table
# --------------------------------------------------------------------------

def test_criterion_1_correlation_reproduction(published_metrics_path):
    start = time.monotonic()
    with open(published_metrics_path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    ids_col = [float(r["ids"]) for r in rows]
    pyr_col = [float(r["pyramid"]) for r in rows]
    red_col = [float(r["redundancy"]) for r in rows]

    r_ids_pyr = pearson(ids_col, pyr_col, "ids", "pyramid").rho
    r_red_ids = pearson(red_col, ids_col, "redundancy", "ids").rho
    elapsed = time.monotonic() - start

    ok1 = abs(r_ids_pyr - 0.8296) <= 0.001
    ok2 = abs(r_red_ids - (-0.8454)) <= 0.001
    record("1 ids-pyramid correlation", ok1, f"rho={r_ids_pyr:.4f} target 0.8296+-0.001")
    record("1 redundancy-ids correlation", ok2,
           f"rho={r_red_ids:.4f} target -0.8454+-0.001")
    record("1 runtime", elapsed < 1.0, f"{elapsed:.3f}s < 1s")

    assert elapsed < 1.0
    assert ok1, f"rho(ids, pyramid) = {r_ids_pyr:.4f}, expected 0.8296 +- 0.001"
    assert ok2, (
        f"rho(redundancy, ids) = {r_red_ids:.4f} from the shipped table, published "
        "target is -0.8454 +- 0.001; the published figure is not derivable from the "
        "published column values, so this check is expected to stay red")


# --------------------------------------------------------------------------
# 2. Oracle-gap arithmetic on a synthetic 50-topic corpus
# --------------------------------------------------------------------------

def _synthetic_corpus(n_topics: int, seed: int) -> Corpus:
    rng = np.random.default_rng(seed)
    nouns = ["council", "harbor", "railway", "reservoir", "stadium", "bridge",
             "museum", "refinery", "library", "airport"]
    verbs = ["approved", "expanded", "inspected", "funded", "renovated", "audited"]
    topics = []
    for i in range(n_topics):
        facts = [f"The {rng.choice(nouns)} {rng.choice(verbs)} the "
                 f"{rng.choice(nouns)} on day {int(rng.integers(1, 28))}."
                 for _ in range(4)]
        docs = []
        for _ in range(int(rng.integers(2, 4))):
            chosen = [facts[j] for j in
                      sorted(rng.choice(len(facts), size=int(rng.integers(2, 4)),
                                        replace=False))]
            filler = [f"Watchers in sector {int(rng.integers(1, 9))} noted "
                      f"{rng.choice(nouns)} activity."
                      for _ in range(int(rng.integers(2, 4)))]
            docs.append(" ".join(chosen + filler))
        refs = [" ".join(facts[j] for j in
                         sorted(rng.choice(len(facts), size=2, replace=False)))]
        topics.append(Topic(f"syn-{i:03d}", tuple(docs), tuple(refs)))
    return Corpus("synthetic", tuple(topics))


def test_criterion_2_oracle_gap_arithmetic():
    start = time.monotonic()
    corpus = _synthetic_corpus(50, seed=2026)
    oracles = compute_oracles(corpus, n=1)
    oracle_run = oracle_system_run(oracles)
    lexrank_run = baselines.run_summarizer(
        corpus, baselines.SummarizerConfig(algorithm="lexrank"))

    sections = []
    for run in (lexrank_run, oracle_run):
        per_topic, aggregate = system_metrics.evaluate_run(corpus, run,
                                                           oracles=oracles)
        sections.append({"system_name": run.system_name, "aggregate": aggregate,
                         "per_topic": per_topic})
    report = MetricReport("synthetic", {"seed": 2026}, system_sections=sections)

    oracle_section = sections[1]
    perfect = [t["f1_vs_oracle"] for t in oracle_section["per_topic"]]
    all_one = all(v == 1.0 for v in perfect)
    record("2 oracle self-F1", all_one,
           f"{sum(v == 1.0 for v in perfect)}/{len(perfect)} topics exactly 1.0")
    assert all_one

    gap = oracle_gap(report)
    best = sections[0]["aggregate"]["rouge1"]["recall"]
    oracle_r1 = sections[1]["aggregate"]["rouge1"]["recall"]
    hand = 100.0 * best / oracle_r1
    record("2 gap arithmetic", gap == hand, f"gap={gap:.4f}% == {hand:.4f}%")
    assert gap == hand

    elapsed = time.monotonic() - start
    record("2 runtime", elapsed < 30.0, f"{elapsed:.1f}s < 30s")
    assert elapsed < 30.0


# --------------------------------------------------------------------------
# 3. Information-theoretic suite
# --------------------------------------------------------------------------

def test_criterion_3_information_theoretic_suite():
    start = time.monotonic()
    rng = np.random.default_rng(3)

    gibbs_ok = True
    for _ in range(1000):
        k = int(rng.integers(2, 21))
        units = [f"u{i}" for i in range(k)]
        vocab = frozenset(units)
        pa = rng.dirichlet(np.ones(k)) + 1e-9
        pb = rng.dirichlet(np.ones(k)) + 1e-9
        pa, pb = pa / pa.sum(), pb / pb.sum()
        a = UnitDistribution(dict(zip(units, pa)), 0.0, vocab)
        b = UnitDistribution(dict(zip(units, pb)), 0.0, vocab)
        if relevance(a, a) < relevance(a, b) - 1e-12:
            gibbs_ok = False
            break
    record("3 Gibbs inequality", gibbs_ok, "1000 seeded distribution pairs")
    assert gibbs_ok

    words = [f"w{i}" for i in range(9)]
    red_ok = True
    for _ in range(200):
        tokens = list(rng.choice(words, size=int(rng.integers(1, 30))))
        value = text_redundancy(" ".join(tokens), KEEP)
        if len(set(tokens)) == 1:
            red_ok &= value == 0.0
        else:
            red_ok &= value < 0.0
    record("3 redundancy sign", red_ok,
           "<= 0 with equality only for single-unit texts")
    assert red_ok

    two = text_redundancy("cat dog", KEEP)
    four = text_redundancy("cat dog bird fish", KEEP)
    closed_ok = (abs(two - (-math.log(2))) < 1e-6 and round(two, 4) == -0.6931
                 and abs(four - (-math.log(4))) < 1e-6 and round(four, 4) == -1.3863)
    record("3 closed forms", closed_ok,
           f"uniform-2 {two:.6f} ~ -ln2, uniform-4 {four:.6f} ~ -ln4")
    assert closed_ok

    elapsed = time.monotonic() - start
    record("3 runtime", elapsed < 10.0, f"{elapsed:.1f}s < 10s")
    assert elapsed < 10.0


# --------------------------------------------------------------------------
# 4. Oracle optimality on random instances
# --------------------------------------------------------------------------

def _oracle_instance(rng) -> Topic:
    """Reference-summarizes-facts instance: distinct fact sentences plus
    noise, reference built from two facts and a little extra. Mirrors how
    the oracle is used (budget = mean reference length)."""
    vocab = [f"w{i}" for i in range(30)]
    n_facts = int(rng.integers(3, 5))
    facts = [" ".join(rng.choice(vocab, size=int(rng.integers(6, 9)),
                                 replace=False)) + "."
             for _ in range(n_facts)]
    noise = [" ".join(rng.choice(vocab, size=int(rng.integers(5, 9)))) + "."
             for _ in range(int(rng.integers(3, 13 - n_facts)))]
    sents = facts + noise
    order = rng.permutation(len(sents))
    doc = " ".join(sents[i] for i in order)
    picks = rng.choice(n_facts, size=2, replace=False)
    extra = " ".join(rng.choice(vocab, size=3))
    ref = (facts[picks[0]].rstrip(".") + " " + facts[picks[1]].rstrip(".")
           + " " + extra + ".")
    return Topic("r", (doc,), (ref,))


def test_criterion_4_oracle_optimality():
    start = time.monotonic()
    rng = np.random.default_rng(4)

    exact_wins = 0
    ratios = []
    for _ in range(200):
        topic = _oracle_instance(rng)
        greedy = greedy_oracle(topic, n=1)
        exact = exact_oracle(topic, n=1, max_sentences=12)
        if exact.score.recall >= greedy.score.recall - 1e-12:
            exact_wins += 1
        ratios.append(1.0 if exact.score.recall == 0.0
                      else greedy.score.recall / exact.score.recall)

    never_worse = exact_wins == 200
    share_90 = sum(r >= 0.90 for r in ratios) / len(ratios)
    record("4 exact >= greedy", never_worse, f"{exact_wins}/200 instances")
    record("4 greedy quality", share_90 >= 0.95,
           f"greedy >= 90% of exact on {100 * share_90:.1f}% of instances "
           f"(mean ratio {sum(ratios) / len(ratios):.4f})")
    assert never_worse
    assert share_90 >= 0.95

    elapsed = time.monotonic() - start
    record("4 runtime", elapsed < 120.0, f"{elapsed:.1f}s < 120s")
    assert elapsed < 120.0


# --------------------------------------------------------------------------
# 5. Layout bias: construction and destruction
# --------------------------------------------------------------------------

def _layout_topics(n_topics: int, rng) -> list[Topic]:
    topics = []
    for t in range(n_topics):
        leads = [f"lead{t} alpha{d} beta{d} gamma{d}." for d in range(3)]
        docs = []
        for d in range(3):
            filler = [f"noise{t} blob{int(rng.integers(0, 50))} "
                      f"glop{int(rng.integers(0, 50))} mote{int(rng.integers(0, 50))}."
                      for _ in range(8)]
            docs.append(" ".join([leads[d]] + filler))
        topics.append(Topic(f"lay-{t:03d}", tuple(docs), (" ".join(leads),)))
    return topics


def test_criterion_5_layout_bias_construction_destruction():
    start = time.monotonic()
    rng = np.random.default_rng(5)
    topics = _layout_topics(100, rng)

    first_greatest = 0
    for topic in topics:
        scores = layout_bias(topic, k=3)
        if scores[0] > scores[1] and scores[0] > scores[2]:
            first_greatest += 1
    built = first_greatest >= 95
    record("5 construction", built,
           f"segment 1 strictly greatest in {first_greatest}/100 topics")
    assert built

    segment_means = np.zeros(3)
    for topic in topics:
        shuffled_docs = []
        for doc in topic.documents:
            sents = [s.text for s in segment_sentences(doc)]
            order = rng.permutation(len(sents))
            shuffled_docs.append(" ".join(sents[i] for i in order))
        scores = layout_bias(Topic(topic.topic_id, tuple(shuffled_docs),
                                   topic.references), k=3)
        segment_means += np.array(scores)
    segment_means /= len(topics)
    spread = float(segment_means.max() - segment_means.min())
    destroyed = spread <= 0.05
    record("5 destruction", destroyed,
           f"shuffled segment means {np.round(segment_means, 4).tolist()}, "
           f"spread {spread:.4f} <= 0.05")
    assert destroyed

    elapsed = time.monotonic() - start
    record("5 runtime", elapsed < 60.0, f"{elapsed:.1f}s < 60s")
    assert elapsed < 60.0


# --------------------------------------------------------------------------
# 6. Pyramid bounds
# --------------------------------------------------------------------------

def test_criterion_6_pyramid_bounds():
    docs = ("The opposition criticized the proposal. Farmers planted winter wheat. "
            "Engineers tested the narrow bridge.",
            "The opposition criticized the proposal. Farmers planted winter wheat. "
            "Tourists visited the old castle.",
            "The opposition criticized the proposal. Markets stayed calm overnight.")
    pyramid = extract_scus(docs)

    top_ref = "The opposition criticized the proposal. Farmers planted winter wheat."
    exact_one = pyramid_score(Topic("t", docs, (top_ref,)), pyramid) == 1.0
    record("6 top-tier reference", exact_one, "score exactly 1.0")
    assert exact_one

    zero = pyramid_score(
        Topic("t", docs, ("Snowfall blanketed quiet mountain villages.",)), pyramid)
    record("6 disjoint reference", zero == 0.0, f"score {zero}")
    assert zero == 0.0

    rng = np.random.default_rng(6)
    words = ["storm", "flood", "river", "dam", "levee", "rain", "wind", "crop"]
    in_bounds = True
    for _ in range(50):
        rand_docs = tuple(
            " ".join(" ".join(rng.choice(words, size=4, replace=False)) + "."
                     for _ in range(3)) for _ in range(3))
        ref = " ".join(rng.choice(words, size=6, replace=False)) + "."
        value = pyramid_score(Topic("t", rand_docs, (ref,)), extract_scus(rand_docs))
        in_bounds &= 0.0 <= value <= 1.0
    record("6 bounds", in_bounds, "pyramid score in [0, 1] on 50 random fixtures")
    assert in_bounds

    shared = ("Farmers planted winter wheat. Engineers tested the narrow bridge.",) * 3
    sym = corpus_metrics.inverse_pyramid(
        Topic("t", shared, (shared[0],)), extract_scus(shared))
    record("6 symmetric inverse-pyramid", sym == 0.0, f"variance {sym}")
    assert sym == 0.0


# --------------------------------------------------------------------------
# 7. Extractiveness of the built-in summarizers
# --------------------------------------------------------------------------

def test_criterion_7_baseline_extractiveness(toy_corpus, tmp_path):
    sections = []
    for algo in baselines.ALGORITHMS:
        run = baselines.run_summarizer(toy_corpus,
                                       baselines.SummarizerConfig(algorithm=algo))
        per_topic, aggregate = system_metrics.evaluate_run(toy_corpus, run)
        sections.append({"system_name": algo, "aggregate": aggregate,
                         "per_topic": per_topic})
        novelty = aggregate["sys_abstractness"]["1"]
        ok = novelty <= 1.0
        record(f"7 extractiveness {algo}", ok,
               f"novel unigrams {novelty:.3f}% <= 1%")
        assert ok, f"{algo}: {novelty}"

    report = MetricReport(toy_corpus.name, {"seed": 13}, system_sections=sections)
    shaped = all(
        set(("rouge1", "rouge2", "sys_abstractness", "sys_redundancy",
             "idd", "iddv")) <= set(s["aggregate"])
        for s in report.system_sections)
    record("7 report shape", shaped and len(sections) == 4,
           "4 system sections with ROUGE-1/2, abstractness, redundancy, idd, iddv")
    assert shaped and len(sections) == 4

    from summgauge.analysis import emit_report
    emitted = emit_report(report, "json", tmp_path / "baselines.json")[0]
    parsed = json.loads(emitted.read_text("utf-8"))
    ok = [s["system_name"] for s in parsed["system_sections"]] \
        == list(baselines.ALGORITHMS)
    record("7 end-to-end emission", ok, f"report written to {emitted.name}")
    assert ok


# --------------------------------------------------------------------------
# 8. Determinism and golden files
# --------------------------------------------------------------------------

def _pipeline(corpus_path, out_dir, jobs):
    stats = out_dir / "stats.json"
    run = out_dir / "lexrank.jsonl"
    eval_report = out_dir / "eval.json"
    assert cli_main(["corpus-stats", str(corpus_path), "--output", str(stats),
                     "--jobs", str(jobs)]) == 0
    assert cli_main(["summarize", str(corpus_path), "--algo", "lexrank",
                     "--output", str(run), "--jobs", str(jobs)]) == 0
    assert cli_main(["system-eval", str(corpus_path), "--run", str(run),
                     "--with-oracle", "--output", str(eval_report),
                     "--jobs", str(jobs)]) == 0
    return stats, run, eval_report


def test_criterion_8_determinism_and_golden_files(toy_corpus_path, tmp_path):
    start = time.monotonic()
    first = tmp_path / "first"
    second = tmp_path / "second"
    first.mkdir()
    second.mkdir()
    outputs_a = _pipeline(toy_corpus_path, first, jobs=1)
    outputs_b = _pipeline(toy_corpus_path, second, jobs=2)

    identical = all(a.read_bytes() == b.read_bytes()
                    for a, b in zip(outputs_a, outputs_b))
    record("8 repeated runs byte-identical", identical,
           "stats, run and eval files across two runs (serial vs parallel)")
    assert identical

    golden_ok = (outputs_a[0].read_bytes()
                 == (GOLDEN_DIR / "toy_corpus_stats.json").read_bytes()
                 and outputs_a[1].read_bytes()
                 == (GOLDEN_DIR / "toy_lexrank.jsonl").read_bytes())
    record("8 golden files", golden_ok, "match frozen first verified run")
    assert golden_ok

    elapsed = time.monotonic() - start
    record("8 runtime", elapsed < 60.0, f"{elapsed:.1f}s < 60s")
    assert elapsed < 60.0

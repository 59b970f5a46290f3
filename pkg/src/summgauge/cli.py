"""Command-line interface.

Subcommands:

  corpus-stats    corpus-quality metrics for a JSONL corpus -> report
  summarize       run a built-in extractive summarizer -> system-run JSONL
  oracle          extractive oracle summaries -> system-run JSONL
  system-eval     evaluate system runs (optionally with the oracle) -> report
  correlate       Pearson correlation between metric series
  report-convert  re-emit a JSON report as CSV or HTML

Outputs are written atomically (temp file + rename), so a failing command
never leaves a partial file. Identical invocations produce byte-identical
outputs; the effective configuration is embedded in every report.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__, analysis, baselines, corpus_metrics, system_metrics
from .analysis import MetricReport, atomic_write_text
from .errors import SummGaugeError
from .ingest import SystemRun, load_corpus, load_system_run
from .oracle import compute_oracles, oracle_system_run
from .textproc import TextConfig

logger = logging.getLogger("summgauge")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2


def _add_text_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("text processing")
    group.add_argument("--stem", action="store_true",
                       help="apply Porter stemming to tokens")
    group.add_argument("--stopwords", choices=["keep", "drop"], default=None,
                       help="force stopword policy everywhere "
                            "(default: drop for distributions, keep for ROUGE)")
    group.add_argument("--log-base", choices=["e", "2"], default="e",
                       help="logarithm base for entropy-style metrics")
    group.add_argument("--ngram-orders", default="1,2,3",
                       help="comma-separated n-gram orders for abstractness")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker processes over topics (default: logical CPUs)")
    parser.add_argument("--seed", type=int, default=13,
                        help="seed for every stochastic step (default: 13)")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log per-topic warnings and progress")


def _text_config(args) -> TextConfig:
    orders = tuple(int(x) for x in str(args.ngram_orders).split(",") if x.strip())
    return TextConfig(stem=args.stem, stopword_policy=args.stopwords,
                      log_base=args.log_base, ngram_orders=orders)


def _text_provenance(cfg: TextConfig) -> dict:
    return {"lowercase": cfg.lowercase, "stem": cfg.stem,
            "stopword_policy": cfg.stopword_policy,
            "ngram_orders": list(cfg.ngram_orders), "log_base": cfg.log_base}


def _default_output(corpus_path: str, suffix: str) -> Path:
    return Path(corpus_path).with_name(Path(corpus_path).stem + suffix)


def _write_run(run: SystemRun, path: Path) -> None:
    lines = [json.dumps({"topic_id": tid, "summary": text}, ensure_ascii=False)
             for tid, text in run.entries.items()]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


# --- subcommands --------------------------------------------------------------


def cmd_corpus_stats(args) -> int:
    cfg = _text_config(args)
    corpus = load_corpus(args.corpus)
    per_topic, aggregate = corpus_metrics.evaluate_corpus(
        corpus, cfg, jobs=args.jobs, include_pairwise=args.pairwise,
        alpha=args.alpha, segments=args.segments,
        jaccard_threshold=args.jaccard_threshold,
        per_document_redundancy=args.per_document_redundancy,
        normalized_inverse=args.normalized_inverse)
    report = MetricReport(
        corpus_name=corpus.name,
        config={"text": _text_provenance(cfg), "segments": args.segments,
                "alpha": args.alpha, "jaccard_threshold": args.jaccard_threshold,
                "per_document_redundancy": args.per_document_redundancy,
                "normalized_inverse": args.normalized_inverse, "seed": args.seed},
        corpus_metrics={"aggregate": aggregate, "per_topic": per_topic})
    out = Path(args.output) if args.output else _default_output(
        args.corpus, f"_stats.{args.format}")
    paths = analysis.emit_report(report, args.format, out)
    print(f"wrote {paths[0]}")
    return EXIT_OK


def cmd_summarize(args) -> int:
    text_cfg = _text_config(args)
    corpus = load_corpus(args.corpus)
    cfg = baselines.SummarizerConfig(
        algorithm=args.algo, budget_words=args.budget_words, damping=args.damping,
        cosine_threshold=args.cosine_threshold, mmr_lambda=args.mmr_lambda,
        max_iterations=args.max_iterations, epsilon=args.epsilon)
    run = baselines.run_summarizer(corpus, cfg, text_cfg, jobs=args.jobs)
    out = Path(args.output) if args.output else _default_output(
        args.corpus, f"_{args.algo}.jsonl")
    _write_run(run, out)
    print(f"wrote {out} ({len(run.entries)}/{len(corpus)} topics)")
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = _text_config(args)
    corpus = load_corpus(args.corpus)
    oracles = compute_oracles(corpus, n=args.rouge_n, budget_words=args.budget_words,
                              config=cfg, method=args.method,
                              fill_budget=args.fill_budget,
                              max_sentences=args.max_sentences, jobs=args.jobs)
    run = oracle_system_run(oracles)
    out = Path(args.output) if args.output else _default_output(
        args.corpus, "_oracle.jsonl")
    _write_run(run, out)
    mean_recall = (sum(o.score.recall for o in oracles.values()) / len(oracles)
                   if oracles else 0.0)
    print(f"wrote {out} ({len(run.entries)}/{len(corpus)} topics, "
          f"mean ROUGE-{args.rouge_n} recall {mean_recall:.4f}, method {args.method})")
    return EXIT_OK


def cmd_system_eval(args) -> int:
    if not args.run and not args.with_oracle:
        raise SummGaugeError("give at least one --run file or --with-oracle")
    cfg = _text_config(args)
    corpus = load_corpus(args.corpus)
    runs = [load_system_run(path, corpus) for path in args.run]

    oracles = None
    if args.with_oracle:
        oracles = compute_oracles(corpus, n=args.rouge_n,
                                  budget_words=args.budget_words, config=cfg,
                                  fill_budget=args.fill_budget, jobs=args.jobs)
        runs.append(oracle_system_run(oracles))

    sections = []
    for run in runs:
        per_topic, aggregate = system_metrics.evaluate_run(
            corpus, run, cfg, jobs=args.jobs, oracles=oracles,
            segments=args.segments, alpha=args.alpha,
            shuffle_seed=args.shuffle_seed if args.shuffle_seed is not None else args.seed,
            ref_agg=args.ref_agg)
        sections.append({"system_name": run.system_name,
                         "aggregate": aggregate, "per_topic": per_topic})

    report = MetricReport(
        corpus_name=corpus.name,
        config={"text": _text_provenance(cfg), "segments": args.segments,
                "alpha": args.alpha, "ref_agg": args.ref_agg,
                "rouge_n_oracle": args.rouge_n, "with_oracle": args.with_oracle,
                "seed": args.seed,
                "shuffle_seed": (args.shuffle_seed
                                 if args.shuffle_seed is not None else args.seed)},
        system_sections=sections)
    out = Path(args.output) if args.output else _default_output(
        args.corpus, f"_eval.{args.format}")
    paths = analysis.emit_report(report, args.format, out)
    print(f"wrote {paths[0]}")
    if args.with_oracle and any(s["system_name"] != "oracle" for s in sections):
        gap = analysis.oracle_gap(report)
        print(f"best system reaches {gap:.2f}% of the oracle ROUGE-1 recall")
    return EXIT_OK


def _numeric_column(rows: list[dict], column: str) -> list[float]:
    if not rows or column not in rows[0]:
        raise SummGaugeError(f"column {column!r} not found in table")
    try:
        return [float(r[column]) for r in rows]
    except ValueError as exc:
        raise SummGaugeError(f"column {column!r} is not numeric: {exc}") from exc


def _topic_series(report: MetricReport, path: str) -> dict[str, float]:
    if not report.corpus_metrics:
        raise SummGaugeError("report has no corpus_metrics section")
    series = {}
    for entry in report.corpus_metrics["per_topic"]:
        value = analysis.metric_value(entry, path)
        if value is not None:
            series[entry["topic_id"]] = float(value)
    if not series:
        raise SummGaugeError(f"field {path!r} not found in any topic")
    return series


def cmd_correlate(args) -> int:
    if args.table:
        with open(args.table, encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
        xs = _numeric_column(rows, args.x)
        ys = _numeric_column(rows, args.y)
    else:
        if len(args.reports) != 2:
            raise SummGaugeError("give two report files, or use --table")
        ra = MetricReport.from_dict(json.loads(Path(args.reports[0]).read_text("utf-8")))
        rb = MetricReport.from_dict(json.loads(Path(args.reports[1]).read_text("utf-8")))
        sa = _topic_series(ra, args.x)
        sb = _topic_series(rb, args.y)
        shared = sorted(set(sa) & set(sb))
        if not shared:
            raise SummGaugeError("reports share no topic_ids")
        xs = [sa[t] for t in shared]
        ys = [sb[t] for t in shared]
    result = analysis.pearson(xs, ys, args.x, args.y)
    print(f"pearson rho={result.rho:.6f} n={result.n} ({result.series_a} vs {result.series_b})")
    return EXIT_OK


def cmd_report_convert(args) -> int:
    report = MetricReport.from_dict(json.loads(Path(args.report).read_text("utf-8")))
    out = Path(args.output) if args.output else \
        Path(args.report).with_suffix(f".{args.format}")
    paths = analysis.emit_report(report, args.format, out)
    print(f"wrote {paths[0]}")
    return EXIT_OK


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="summgauge",
        description="Quality and bias metrics for multi-document summarization "
                    "corpora and system outputs.")
    parser.add_argument("--version", action="version", version=f"summgauge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corpus-stats", help="corpus-quality metrics for a JSONL corpus")
    p.add_argument("corpus", help="corpus JSONL file")
    p.add_argument("--output", help="report path (default: <corpus>_stats.<fmt>)")
    p.add_argument("--format", choices=["json", "csv", "html"], default="json")
    p.add_argument("--segments", type=int, default=3, help="layout-bias segments")
    p.add_argument("--alpha", type=float, default=0.01, help="distribution smoothing")
    p.add_argument("--jaccard-threshold", type=float, default=0.6,
                   help="SCU merge threshold")
    p.add_argument("--per-document-redundancy", action="store_true",
                   help="average per-document redundancy instead of pooled")
    p.add_argument("--normalized-inverse", action="store_true",
                   help="normalize inverse-pyramid counts by reference SCU count")
    p.add_argument("--pairwise", action="store_true",
                   help="embed per-topic pairwise relevance matrices")
    _add_text_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_corpus_stats)

    p = sub.add_parser("summarize", help="run a built-in extractive summarizer")
    p.add_argument("corpus")
    p.add_argument("--algo", required=True, choices=baselines.ALGORITHMS)
    p.add_argument("--output", help="run path (default: <corpus>_<algo>.jsonl)")
    p.add_argument("--budget-words", type=int, default=None,
                   help="word budget (default: mean reference length per topic)")
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--cosine-threshold", type=float, default=0.1)
    p.add_argument("--mmr-lambda", type=float, default=0.5)
    p.add_argument("--max-iterations", type=int, default=100)
    p.add_argument("--epsilon", type=float, default=1e-6)
    _add_text_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("oracle", help="extractive oracle summaries as a system run")
    p.add_argument("corpus")
    p.add_argument("--output", help="run path (default: <corpus>_oracle.jsonl)")
    p.add_argument("--rouge-n", type=int, default=1, help="oracle objective order")
    p.add_argument("--budget-words", type=int, default=None)
    p.add_argument("--method", choices=["greedy", "exact"], default="greedy")
    p.add_argument("--max-sentences", type=int, default=14,
                   help="exact solver size limit")
    p.add_argument("--fill-budget", action="store_true",
                   help="keep adding sentences at zero gain until the budget is full")
    _add_text_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("system-eval", help="evaluate system runs against a corpus")
    p.add_argument("corpus")
    p.add_argument("--run", action="append", default=[],
                   help="system-run JSONL file (repeatable)")
    p.add_argument("--with-oracle", action="store_true",
                   help="compute the oracle and evaluate it as a system")
    p.add_argument("--output", help="report path (default: <corpus>_eval.<fmt>)")
    p.add_argument("--format", choices=["json", "csv", "html"], default="json")
    p.add_argument("--segments", type=int, default=3)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--shuffle-seed", type=int, default=None,
                   help="seed for the shuffled layout ablation (default: --seed)")
    p.add_argument("--ref-agg", choices=["mean", "max"], default="mean",
                   help="multi-reference ROUGE aggregation")
    p.add_argument("--rouge-n", type=int, default=1, help="oracle objective order")
    p.add_argument("--budget-words", type=int, default=None, help="oracle word budget")
    p.add_argument("--fill-budget", action="store_true")
    _add_text_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_system_eval)

    p = sub.add_parser("correlate", help="Pearson correlation between metric series")
    p.add_argument("reports", nargs="*", help="two report JSON files")
    p.add_argument("--table", help="CSV table with named columns instead of reports")
    p.add_argument("--x", required=True, help="column (table) or dotted field (reports)")
    p.add_argument("--y", required=True)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("report-convert", help="re-emit a JSON report as CSV or HTML")
    p.add_argument("report")
    p.add_argument("--format", choices=["csv", "html", "json"], required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_report_convert)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (SummGaugeError, FileNotFoundError, json.JSONDecodeError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - internal failures
        logger.exception("internal error: %s", exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

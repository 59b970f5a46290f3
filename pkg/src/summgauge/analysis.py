"""Cross-corpus analytics and report emission.

Pearson correlations between metric series, per-corpus system rankings
with an instability summary, the best-system-to-oracle gap, and report
serialization: canonical JSON (sorted keys, floats rounded to 6 decimal
places, byte-deterministic) for golden-file testing, flat CSV, and a
self-contained HTML page with embedded chart data.
"""

from __future__ import annotations

import csv
import html
import io
import json
import math
import os
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (LengthMismatch, MissingOracle, NoOverlap, TooFewSamples,
                     ZeroVariance)

SCHEMA_VERSION = "1"
FLOAT_DECIMALS = 6


@dataclass
class MetricReport:
    corpus_name: str
    config: dict
    schema_version: str = SCHEMA_VERSION
    corpus_metrics: dict | None = None        # {"aggregate": ..., "per_topic": [...]}
    system_sections: list[dict] = field(default_factory=list)
    pairwise_relevance: dict[str, list[list[float]]] | None = None  # topic_id -> matrix

    def to_dict(self) -> dict:
        return {"schema_version": self.schema_version,
                "corpus_name": self.corpus_name,
                "config": self.config,
                "corpus_metrics": self.corpus_metrics,
                "system_sections": self.system_sections,
                "pairwise_relevance": self.pairwise_relevance}

    @classmethod
    def from_dict(cls, data: dict) -> "MetricReport":
        return cls(corpus_name=data["corpus_name"], config=data["config"],
                   schema_version=data.get("schema_version", SCHEMA_VERSION),
                   corpus_metrics=data.get("corpus_metrics"),
                   system_sections=data.get("system_sections") or [],
                   pairwise_relevance=data.get("pairwise_relevance"))


@dataclass(frozen=True)
class CorrelationResult:
    series_a: str
    series_b: str
    rho: float
    n: int


# --- correlation ------------------------------------------------------------

def pearson(x, y, name_a: str = "x", name_b: str = "y") -> CorrelationResult:
    """Pearson product-moment correlation of two equal-length series."""
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if len(xs) != len(ys):
        raise LengthMismatch(f"series lengths differ: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 3:
        raise TooFewSamples(f"need >= 3 paired samples, got {n}")
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((v - mx) ** 2 for v in xs)
    syy = sum((v - my) ** 2 for v in ys)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("a series is constant")
    sxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    return CorrelationResult(name_a, name_b, sxy / math.sqrt(sxx * syy), n)


# --- rankings and gaps --------------------------------------------------------

def metric_value(aggregate: dict, path: str):
    """Fetch a dotted path such as 'rouge1.recall' from an aggregate dict."""
    value = aggregate
    for part in path.split("."):
        if not isinstance(value, dict) or part not in value:
            return None
        value = value[part]
    return value


def rank_table(reports: list[MetricReport], metric: str = "rouge1.recall") -> dict:
    """Per-corpus descending ranking of systems by one metric.

    Tied systems share a rank. The summary flags rank instability: whether
    different corpora crown different top systems.
    """
    per_corpus: dict[str, list[dict]] = {}
    for report in reports:
        rows = []
        for section in report.system_sections:
            value = metric_value(section.get("aggregate", {}), metric)
            if value is not None:
                rows.append({"system": section["system_name"], "value": value})
        if rows:
            rows.sort(key=lambda r: (-r["value"], r["system"]))
            for row in rows:
                row["rank"] = 1 + sum(1 for r in rows if r["value"] > row["value"])
            per_corpus[report.corpus_name] = rows
    if not per_corpus:
        raise NoOverlap(f"no report carries systems with metric {metric!r}")
    top = {corpus: rows[0]["system"] for corpus, rows in per_corpus.items()}
    distinct = sorted(set(top.values()))
    tally = Counter(top.values())
    modal = tally.most_common(1)[0][0]
    return {"metric": metric,
            "per_corpus": per_corpus,
            "top_system": top,
            "distinct_top_systems": distinct,
            "corpora_changing_top": sum(1 for s in top.values() if s != modal),
            "unstable": len(distinct) > 1}


def oracle_gap(report: MetricReport, oracle_name: str = "oracle",
               metric: str = "rouge1.recall") -> float:
    """Best non-oracle system score as a percentage of the oracle's."""
    oracle_value = None
    best = None
    for section in report.system_sections:
        value = metric_value(section.get("aggregate", {}), metric)
        if value is None:
            continue
        if section["system_name"] == oracle_name:
            oracle_value = value
        elif best is None or value > best:
            best = value
    if oracle_value is None:
        raise MissingOracle(f"report has no {oracle_name!r} section with {metric!r}")
    if best is None:
        raise MissingOracle("report has no non-oracle system section")
    if oracle_value == 0.0:
        raise MissingOracle("oracle score is zero; gap undefined")
    return 100.0 * best / oracle_value


# --- canonical serialization ----------------------------------------------------

def _round_floats(obj, decimals: int = FLOAT_DECIMALS):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return round(obj, decimals)
    if isinstance(obj, dict):
        return {k: _round_floats(v, decimals) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, decimals) for v in obj]
    return obj


def canonical_json(obj) -> str:
    """Sorted keys, floats rounded to 6 decimals, trailing newline:
    byte-identical for equal inputs on every platform."""
    return json.dumps(_round_floats(obj), sort_keys=True, ensure_ascii=False,
                      indent=2, allow_nan=False) + "\n"


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write via a temp file and rename, so failures leave no partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def validate_report(report: MetricReport, tol: float = 1e-9) -> None:
    """Check that every aggregate is the mean of its non-null per-topic values."""
    if report.corpus_metrics:
        _check_aggregate(report.corpus_metrics["aggregate"],
                         report.corpus_metrics["per_topic"], tol)
    for section in report.system_sections:
        _check_aggregate(section["aggregate"], section["per_topic"], tol)


def _check_aggregate(aggregate: dict, per_topic: list[dict], tol: float,
                     prefix: str = "") -> None:
    for key, value in aggregate.items():
        if key == "topics":
            continue
        samples = [t.get(key) for t in per_topic]
        if isinstance(value, dict):
            _check_nested(key, value, samples, tol)
        elif isinstance(value, list):
            for idx, v in enumerate(value):
                _check_mean(f"{prefix}{key}[{idx}]", v,
                            [s[idx] if s is not None else None for s in samples], tol)
        else:
            _check_mean(f"{prefix}{key}", value, samples, tol)


def _check_nested(key: str, value: dict, samples: list, tol: float) -> None:
    for sub, v in value.items():
        subsamples = [s.get(sub) if isinstance(s, dict) else None for s in samples]
        if isinstance(v, dict) or isinstance(v, list):
            _check_aggregate({sub: v}, [{sub: s} for s in subsamples], tol,
                             prefix=f"{key}.")
        else:
            _check_mean(f"{key}.{sub}", v, subsamples, tol)


def _check_mean(name: str, value, samples: list, tol: float) -> None:
    vals = [s for s in samples if s is not None]
    if value is None:
        if vals:
            raise ValueError(f"aggregate {name} is null but per-topic values exist")
        return
    if not vals:
        raise ValueError(f"aggregate {name} has no per-topic values")
    mean = sum(vals) / len(vals)
    if abs(mean - value) > tol:
        raise ValueError(f"aggregate {name}: {value} != mean {mean}")


# --- emission -------------------------------------------------------------------

def emit_report(report: MetricReport, fmt: str, out_path: str | Path) -> list[Path]:
    """Write the report as canonical JSON, flat CSV, or standalone HTML."""
    # reports reloaded from canonical JSON carry 6-decimal rounding noise,
    # so emission validates at the rounding scale rather than 1e-9
    validate_report(report, tol=2 * 10 ** -FLOAT_DECIMALS)
    out_path = Path(out_path)
    if fmt == "json":
        return [atomic_write_text(out_path, canonical_json(report.to_dict()))]
    if fmt == "csv":
        return [atomic_write_text(out_path, _report_csv(report))]
    if fmt == "html":
        return [atomic_write_text(out_path, _report_html(report))]
    raise ValueError(f"unknown format {fmt!r}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _report_csv(report: MetricReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.system_sections:
        first = report.system_sections[0]["aggregate"]
        orders = sorted(first.get("sys_abstractness", {}))
        k = len(first.get("layout", []))
        header = (["corpus", "system",
                   "rouge1_recall", "rouge1_precision", "rouge1_f1",
                   "rouge2_recall", "rouge2_precision", "rouge2_f1",
                   "f1_vs_oracle"]
                  + [f"sys_abstractness_{n}" for n in orders]
                  + ["sys_redundancy", "idd", "iddv"]
                  + [f"layout_{s + 1}" for s in range(k)]
                  + [f"layout_shuffled_{s + 1}" for s in range(k)])
        writer.writerow(header)
        for section in report.system_sections:
            agg = section["aggregate"]
            row = [report.corpus_name, section["system_name"]]
            for key in ("rouge1", "rouge2"):
                score = agg.get(key) or {}
                row += [_fmt(score.get(p)) for p in ("recall", "precision", "f1")]
            row.append(_fmt(agg.get("f1_vs_oracle")))
            row += [_fmt(agg.get("sys_abstractness", {}).get(n)) for n in orders]
            row += [_fmt(agg.get(key)) for key in ("sys_redundancy", "idd", "iddv")]
            row += [_fmt(v) for v in agg.get("layout", [])]
            row += [_fmt(v) for v in agg.get("layout_shuffled", [])]
            writer.writerow(row)
    else:
        agg = (report.corpus_metrics or {}).get("aggregate", {})
        orders = sorted(agg.get("abstractness", {}))
        k = len(agg.get("layout", []))
        header = (["corpus"] + [f"abstractness_{n}" for n in orders]
                  + ["redundancy", "ids", "pyramid", "inv_pyramid"]
                  + [f"layout_{s + 1}" for s in range(k)] + ["compression"])
        writer.writerow(header)
        row = [report.corpus_name]
        row += [_fmt(agg.get("abstractness", {}).get(n)) for n in orders]
        row += [_fmt(agg.get(key)) for key in ("redundancy", "ids", "pyramid", "inv_pyramid")]
        row += [_fmt(v) for v in agg.get("layout", [])]
        row.append(_fmt(agg.get("compression")))
        writer.writerow(row)
    return buf.getvalue()


_HTML_PAGE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>summgauge report: {title}</title>
<style>
body {{ font-family: sans-serif; margin: 2rem; color: #222; }}
h1 {{ font-size: 1.4rem; }} h2 {{ font-size: 1.1rem; margin-top: 2rem; }}
.bar-row {{ display: flex; align-items: center; margin: 2px 0; }}
.bar-label {{ width: 16rem; font-size: 0.8rem; }}
.bar {{ height: 14px; background: #4a7db5; }}
.bar-value {{ font-size: 0.75rem; margin-left: 6px; }}
table.heat td {{ width: 2rem; height: 1.4rem; text-align: center; font-size: 0.65rem; }}
</style>
</head>
<body>
<h1>summgauge report: {title}</h1>
<div id="charts"></div>
<script type="application/json" id="report-data">{data}</script>
<script>
const report = JSON.parse(document.getElementById("report-data").textContent);
const charts = document.getElementById("charts");
function barChart(title, rows) {{
  const h = document.createElement("h2"); h.textContent = title; charts.appendChild(h);
  const max = Math.max(...rows.map(r => Math.abs(r.value)), 1e-9);
  for (const r of rows) {{
    const div = document.createElement("div"); div.className = "bar-row";
    const label = document.createElement("span"); label.className = "bar-label";
    label.textContent = r.label;
    const bar = document.createElement("span"); bar.className = "bar";
    bar.style.width = (260 * Math.abs(r.value) / max) + "px";
    const val = document.createElement("span"); val.className = "bar-value";
    val.textContent = r.value.toFixed(4);
    div.append(label, bar, val); charts.appendChild(div);
  }}
}}
if (report.corpus_metrics) {{
  const agg = report.corpus_metrics.aggregate;
  const rows = [];
  for (const [n, v] of Object.entries(agg.abstractness || {{}}))
    if (v !== null) rows.push({{label: "abstractness " + n + "-gram", value: v}});
  for (const key of ["redundancy", "ids", "pyramid", "inv_pyramid", "compression"])
    if (agg[key] !== null && agg[key] !== undefined) rows.push({{label: key, value: agg[key]}});
  barChart("Corpus metrics (aggregate)", rows);
  if (agg.layout)
    barChart("Corpus layout bias by segment",
      agg.layout.map((v, i) => ({{label: "segment " + (i + 1), value: v ?? 0}})));
  const withMatrix = (report.corpus_metrics.per_topic || []).find(t => t.pairwise_relevance);
  if (withMatrix) {{
    const h = document.createElement("h2");
    h.textContent = "Pairwise document relevance (topic " + withMatrix.topic_id + ")";
    charts.appendChild(h);
    const m = withMatrix.pairwise_relevance;
    const lo = Math.min(...m.flat()), hi = Math.max(...m.flat());
    const table = document.createElement("table"); table.className = "heat";
    for (const row of m) {{
      const tr = document.createElement("tr");
      for (const v of row) {{
        const td = document.createElement("td");
        const t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        td.style.background = "rgb(" + Math.round(255 - 140 * t) + "," +
          Math.round(120 + 100 * t) + ",160)";
        td.textContent = v.toFixed(1); tr.appendChild(td);
      }}
      table.appendChild(tr);
    }}
    charts.appendChild(table);
  }}
}}
for (const section of report.system_sections || []) {{
  const agg = section.aggregate;
  const rows = [];
  if (agg.rouge1) rows.push({{label: "ROUGE-1 recall", value: agg.rouge1.recall}});
  if (agg.rouge2) rows.push({{label: "ROUGE-2 recall", value: agg.rouge2.recall}});
  if (agg.f1_vs_oracle !== null && agg.f1_vs_oracle !== undefined)
    rows.push({{label: "F1 vs oracle", value: agg.f1_vs_oracle}});
  for (const key of ["sys_redundancy", "idd", "iddv"])
    if (agg[key] !== null && agg[key] !== undefined) rows.push({{label: key, value: agg[key]}});
  barChart("System: " + section.system_name, rows);
  if (agg.layout)
    barChart(section.system_name + " layout bias by segment",
      agg.layout.map((v, i) => ({{label: "segment " + (i + 1), value: v ?? 0}})));
  if (agg.layout_shuffled)
    barChart(section.system_name + " layout bias, shuffled ablation",
      agg.layout_shuffled.map((v, i) => ({{label: "segment " + (i + 1), value: v ?? 0}})));
}}
</script>
</body>
</html>
"""


def _report_html(report: MetricReport) -> str:
    data = canonical_json(report.to_dict()).rstrip("\n")
    return _HTML_PAGE.format(title=html.escape(report.corpus_name),
                             data=data.replace("</", "<\\/"))

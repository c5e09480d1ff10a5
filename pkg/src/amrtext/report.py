"""Per-language score tables with pooled and mean aggregates.

A report holds one row per system.  Each row has a :class:`MetricResult`
per (metric, language) plus two aggregates: ``All`` is the metric recomputed
over the pooled pairs of every language, ``mean`` the average of the
per-language values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence

from .dataset import ExampleRecord
from .metrics import METRICS, MetricResult, ScoredPair, corpus_score, paired_bootstrap, tokenization_policy

ALL = "All"
MEAN = "mean"
FORMATS = ("json", "tsv", "md")


class ReportError(ValueError):
    pass


@dataclass
class ReportRow:
    system: str
    # metric -> language -> result
    scores: Dict[str, Dict[str, MetricResult]]
    aggregate: Dict[str, Dict[str, float]]  # metric -> {"All": pooled, "mean": average}

    def to_dict(self):
        return {
            "system": self.system,
            "scores": {m: {lang: r.to_dict() for lang, r in by_lang.items()} for m, by_lang in self.scores.items()},
            "aggregate": self.aggregate,
        }

    @classmethod
    def from_dict(cls, d):
        scores = {m: {lang: MetricResult.from_dict(r) for lang, r in by_lang.items()}
                  for m, by_lang in d["scores"].items()}
        return cls(d["system"], scores, d["aggregate"])


@dataclass
class ScoreReport:
    rows: List[ReportRow]
    languages: List[str]
    metrics: List[str]
    significance: Dict[str, float] = field(default_factory=dict)  # "A|B|metric" -> p
    metadata: Dict = field(default_factory=dict)

    def value(self, system: str, metric: str, language: str) -> float:
        row = next(r for r in self.rows if r.system == system)
        if language in (ALL, MEAN):
            return row.aggregate[metric][language]
        return row.scores[metric][language].value

    def to_dict(self):
        return {
            "languages": self.languages,
            "metrics": self.metrics,
            "rows": [r.to_dict() for r in self.rows],
            "significance": self.significance,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d):
        return cls([ReportRow.from_dict(r) for r in d["rows"]], list(d["languages"]), list(d["metrics"]),
                   dict(d.get("significance", {})), dict(d.get("metadata", {})))

    def __eq__(self, other):
        if not isinstance(other, ScoreReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def significance_key(a: str, b: str, metric: str) -> str:
    return f"{a}|{b}|{metric}"


def _pairs(records: Sequence[ExampleRecord], hyps: Mapping[str, str], run: str) -> List[ScoredPair]:
    out = []
    for r in records:
        if r.id not in hyps:
            raise ReportError(f"run {run!r} has no hypothesis for {r.id}")
        out.append(ScoredPair(hyps[r.id], r.target_sentence, r.language))
    return out


def build_report(
    runs: Mapping[str, Mapping[str, str]],
    test_set: Sequence[ExampleRecord],
    metrics: Sequence[str] = ("bleu",),
    languages: Optional[Sequence[str]] = None,
    significance: bool = True,
    samples: int = 1000,
    seed: int = 12345,
    external_scores: Optional[Mapping[str, Mapping[str, Mapping[str, float]]]] = None,
    metadata: Optional[Dict] = None,
) -> ScoreReport:
    """Score every run against ``test_set``.

    Args:
        runs: system name -> {example id -> hypothesis}; rows keep this order.
        test_set: reference records; their languages define the columns
            unless ``languages`` is given.
        metrics: names from :data:`amrtext.metrics.METRICS`.
        significance: run a paired bootstrap on the pooled corpus for every
            pair of systems and metric.
        external_scores: system -> metric name -> {example id -> score};
            per-pair scores from an outside scorer, averaged per language.

    Raises:
        ReportError: if a run lacks a hypothesis for a test example or a
            requested language has no test examples.
    """
    test_set = list(test_set)
    if not runs:
        raise ReportError("no runs to report")
    for m in metrics:
        if m not in METRICS:
            raise ReportError(f"unknown metric {m!r}")
    present = sorted({r.language for r in test_set}, key=_language_order)
    languages = list(languages) if languages is not None else present
    for lang in languages:
        if lang not in present:
            raise ReportError(f"language {lang!r} has no test examples")
    test_set = [r for r in test_set if r.language in languages]
    external_scores = external_scores or {}
    ext_metrics = sorted({m for per_sys in external_scores.values() for m in per_sys})
    all_metrics = list(metrics) + [m for m in ext_metrics if m not in metrics]

    rows = []
    pooled: Dict[str, List[ScoredPair]] = {}
    for name, hyps in runs.items():
        pairs = _pairs(test_set, hyps, name)
        pooled[name] = pairs
        scores: Dict[str, Dict[str, MetricResult]] = {}
        aggregate: Dict[str, Dict[str, float]] = {}
        for m in metrics:
            by_lang = {lang: corpus_score([p for p in pairs if p.language == lang], m) for lang in languages}
            scores[m] = by_lang
            aggregate[m] = {
                ALL: corpus_score(pairs, m).value,
                MEAN: sum(r.value for r in by_lang.values()) / len(by_lang),
            }
        for m in ext_metrics:
            per_id = external_scores.get(name, {}).get(m)
            if per_id is None:
                continue
            scores[m], aggregate[m] = _external(test_set, per_id, m, languages, name)
        rows.append(ReportRow(name, scores, aggregate))

    sig = {}
    if significance and len(runs) > 1:
        for a, b in combinations(runs, 2):
            for m in metrics:
                sig[significance_key(a, b, m)] = paired_bootstrap(pooled[a], pooled[b], m, samples, seed)

    meta = {
        "aggregation": {ALL: "metric over pooled pairs of all languages", MEAN: "mean of per-language values"},
        "tokenization": {lang: tokenization_policy(lang) for lang in languages},
        "seed": seed,
        "bootstrap_samples": samples if sig else 0,
        "test_examples": len(test_set),
    }
    meta.update(metadata or {})
    return ScoreReport(rows, languages, all_metrics, sig, meta)


def _external(test_set, per_id, metric, languages, run):
    scores = {}
    values_all = []
    for lang in languages:
        vals = []
        for r in test_set:
            if r.language != lang:
                continue
            if r.id not in per_id:
                raise ReportError(f"run {run!r}: no {metric} score for {r.id}")
            vals.append(float(per_id[r.id]))
        scores[lang] = MetricResult(metric, sum(vals) / len(vals), {"source": "external", "segments": len(vals)})
        values_all += vals
    aggregate = {ALL: sum(values_all) / len(values_all),
                 MEAN: sum(r.value for r in scores.values()) / len(scores)}
    return scores, aggregate


_ORDER = {"es": 0, "it": 1, "de": 2, "zh": 3, "en": 4}


def _language_order(lang):
    return (_ORDER.get(lang, 99), lang)


# -- rendering ------------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.1f}"


def _columns(report: ScoreReport) -> List[tuple]:
    cols = []
    for m in report.metrics:
        cols += [(m, lang) for lang in report.languages]
        cols += [(m, ALL), (m, MEAN)]
    return cols


def _cell(row: ReportRow, metric: str, lang: str) -> str:
    if metric not in row.scores:
        return "-"
    if lang in (ALL, MEAN):
        return _fmt(row.aggregate[metric][lang])
    return _fmt(row.scores[metric][lang].value)


def render(report: ScoreReport, fmt: str = "json") -> str:
    """Render as ``json`` (lossless), ``tsv`` or ``md`` (values at one decimal)."""
    if fmt == "json":
        return json.dumps(report.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    cols = _columns(report)
    if fmt == "tsv":
        lines = ["\t".join(["system"] + [f"{m}:{lang}" for m, lang in cols])]
        for row in report.rows:
            lines.append("\t".join([row.system] + [_cell(row, m, lang) for m, lang in cols]))
        return "\n".join(lines) + "\n"
    if fmt in ("md", "markdown"):
        header = ["system"] + [f"{m} {lang}" for m, lang in cols]
        lines = ["| " + " | ".join(header) + " |", "|" + "|".join(["---"] + [":---:"] * len(cols)) + "|"]
        for row in report.rows:
            lines.append("| " + " | ".join([row.system] + [_cell(row, m, lang) for m, lang in cols]) + " |")
        if report.significance:
            lines += ["", "| system A | system B | metric | p |", "|---|---|---|---:|"]
            for key, p in sorted(report.significance.items()):
                a, b, m = key.split("|")
                lines.append(f"| {a} | {b} | {m} | {p:.3f} |")
        return "\n".join(lines) + "\n"
    raise ReportError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def parse_report(text: str) -> ScoreReport:
    return ScoreReport.from_dict(json.loads(text))

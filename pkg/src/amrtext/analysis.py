"""Diagnostics over a test set: sentence-length/graph-size ratio bins and genre subsets.

The ratio of an example is the subword length of its reference sentence
divided by the number of concept nodes of its AMR (constants excluded).
Examples are split into three bins, by default equal-count terciles.
"""

from __future__ import annotations

import logging
import warnings
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from sklearn.base import BaseEstimator, TransformerMixin

from . import _io
from ._validation import check_is_fitted
from .dataset import ExampleRecord
from .genres import DEFAULT_GENRE_MAP, genre_for_id, load_genre_map  # noqa: F401
from .metrics import MetricResult, ScoredPair, corpus_score
from .segment import SubwordModel, segment

logger = logging.getLogger(__name__)

BINS = ("low", "mid", "high")
TSV_COLUMNS = ("bin", "gamma_min", "gamma_max", "count", "metric", "value")


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class RatioRecord:
    example_id: str
    subword_length: int
    node_count: int
    gamma: float
    bin: Optional[str] = None
    flags: Tuple[str, ...] = ()


def compute_gamma(records: Iterable[ExampleRecord], model: SubwordModel) -> Iterator[RatioRecord]:
    """One ratio per record; empty references give 0.0 and the ``empty_reference`` flag."""
    for rec in records:
        nodes = len(rec.graph.nodes)
        if nodes == 0:
            raise AnalysisError(f"record {rec.id}: graph without nodes")
        length = len(segment(model, rec.target_sentence))
        flags = ("empty_reference",) if length == 0 else ()
        yield RatioRecord(rec.id, length, nodes, length / nodes, flags=flags)


@dataclass
class BinnedGroups:
    """Ratio records grouped by bin, with the rule that produced them."""

    groups: Dict[str, List[RatioRecord]]
    rule: str
    boundaries: Optional[Tuple[float, float]] = None

    def labels(self) -> List[str]:
        return list(self.groups)

    def ranges(self) -> Dict[str, Tuple[Optional[float], Optional[float]]]:
        out = {}
        for label, members in self.groups.items():
            gammas = [r.gamma for r in members]
            out[label] = (min(gammas), max(gammas)) if gammas else (None, None)
        return out

    def __len__(self):
        return sum(len(g) for g in self.groups.values())


def parse_bin_rule(rule) -> Tuple[str, Optional[Tuple[float, float]]]:
    """``"tercile"``, ``"single"``, ``"fixed:a,b"`` or a ``(a, b)`` pair."""
    if isinstance(rule, (tuple, list)):
        a, b = map(float, rule)
    elif rule in ("tercile", "gamma", "single"):
        return ("single" if rule == "single" else "tercile"), None
    elif isinstance(rule, str) and rule.startswith("fixed:"):
        try:
            a, b = (float(x) for x in rule[len("fixed:"):].split(","))
        except ValueError:
            raise AnalysisError(f"bad bin rule {rule!r}; expected fixed:<a>,<b>") from None
    else:
        raise AnalysisError(f"unknown bin rule {rule!r}")
    if a > b:
        raise AnalysisError(f"fixed bin boundaries must be ordered, got {a} > {b}")
    return "fixed", (a, b)


def bin_by_gamma(ratios: Sequence[RatioRecord], rule="tercile") -> BinnedGroups:
    """Split ratio records into low/mid/high bins.

    Terciles sort by (gamma, example id) and cut into three equal-count parts
    (earlier bins take the remainder).  Fixed boundaries ``(a, b)`` put
    ``gamma < a`` in low, ``a <= gamma < b`` in mid and the rest in high.

    Raises:
        AnalysisError: for an empty input, or fewer than 3 records with terciles.
    """
    ratios = list(ratios)
    if not ratios:
        raise AnalysisError("no ratio records to bin")
    kind, bounds = parse_bin_rule(rule)
    if kind == "single":
        return BinnedGroups({"all": [replace(r, bin="all") for r in ratios]}, "single")
    if kind == "tercile":
        if len(ratios) < 3:
            raise AnalysisError(f"tercile binning needs at least 3 records, got {len(ratios)}")
        ordered = sorted(ratios, key=lambda r: (r.gamma, r.example_id))
        size, extra = divmod(len(ordered), 3)
        groups = {}
        start = 0
        for k, label in enumerate(BINS):
            end = start + size + (1 if k < extra else 0)
            groups[label] = [replace(r, bin=label) for r in ordered[start:end]]
            start = end
        return BinnedGroups(groups, "tercile")
    a, b = bounds
    groups = {label: [] for label in BINS}
    for r in ratios:
        label = "low" if r.gamma < a else "mid" if r.gamma < b else "high"
        groups[label].append(replace(r, bin=label))
    return BinnedGroups(groups, f"fixed:{a:g},{b:g}", bounds)


@dataclass(frozen=True)
class BinScore:
    bin: str
    gamma_min: float
    gamma_max: float
    count: int
    metric: str
    value: float
    result: Optional[MetricResult] = field(default=None, compare=False)


def score_by_bin(binned: BinnedGroups, records: Mapping[str, ExampleRecord], hypotheses: Mapping[str, str],
                 metric: str = "bleu") -> List[BinScore]:
    """Score each bin as its own corpus.

    ``records`` maps example ids to test records (the references);
    ``hypotheses`` maps example ids to system output.

    Raises:
        AnalysisError: if a bin has no hypotheses after the join.
    """
    out = []
    for label, members in binned.groups.items():
        pairs = [
            ScoredPair(hypotheses[r.example_id], records[r.example_id].target_sentence,
                       records[r.example_id].language)
            for r in members
            if r.example_id in hypotheses and r.example_id in records
        ]
        if not pairs:
            raise AnalysisError(f"bin {label!r} is empty after joining hypotheses")
        result = corpus_score(pairs, metric)
        gammas = [r.gamma for r in members]
        out.append(BinScore(label, min(gammas), max(gammas), len(pairs), metric, result.value, result))
    return out


def bin_scores_tsv(scores: Sequence[BinScore]) -> str:
    lines = ["\t".join(TSV_COLUMNS)]
    for s in scores:
        lines.append(f"{s.bin}\t{s.gamma_min:.4f}\t{s.gamma_max:.4f}\t{s.count}\t{s.metric}\t{s.value:.1f}")
    return "\n".join(lines) + "\n"


def ratios_tsv(ratios: Sequence[RatioRecord]) -> str:
    lines = ["example_id\tsubword_length\tnode_count\tgamma\tbin\tflags"]
    for r in ratios:
        lines.append(f"{r.example_id}\t{r.subword_length}\t{r.node_count}\t{r.gamma:.4f}\t{r.bin or ''}\t{','.join(r.flags)}")
    return "\n".join(lines) + "\n"


class GammaBinner(TransformerMixin, BaseEstimator):
    """Learn ratio bin boundaries on one set of records and assign bins.

    ``fit_transform`` assigns exact equal-count terciles (ties broken by
    example id).  ``transform`` on new records uses the fitted boundaries:
    ``gamma <= low_max`` is low, ``gamma <= mid_max`` is mid, the rest high.

    Parameters
    ----------
    rule : str or (float, float), default="tercile"
        ``"tercile"``, ``"fixed:a,b"`` or a boundary pair.
    model : SubwordModel, optional
        Segmenter for reference lengths when fitting on ExampleRecords;
        character-level when omitted.
    """

    def __init__(self, rule="tercile", model=None):
        self.rule = rule
        self.model = model

    def _ratios(self, X) -> List[RatioRecord]:
        X = list(X)
        if X and isinstance(X[0], ExampleRecord):
            return list(compute_gamma(X, self.model or SubwordModel.characters()))
        return X

    def fit(self, X, y=None):
        self.binned_ = bin_by_gamma(self._ratios(X), self.rule)
        ranges = self.binned_.ranges()
        if self.binned_.boundaries is not None:
            self.boundaries_ = self.binned_.boundaries
        else:
            self.boundaries_ = (ranges["low"][1], ranges["mid"][1])
        return self

    def fit_transform(self, X, y=None, **fit_params):
        self.fit(X)
        return [r for label in self.binned_.labels() for r in self.binned_.groups[label]]

    def transform(self, X) -> List[RatioRecord]:
        check_is_fitted(self, "boundaries_")
        a, b = self.boundaries_
        fixed = self.binned_.rule.startswith("fixed")
        out = []
        for r in self._ratios(X):
            if fixed:
                label = "low" if r.gamma < a else "mid" if r.gamma < b else "high"
            else:
                label = "low" if r.gamma <= a else "mid" if r.gamma <= b else "high"
            out.append(replace(r, bin=label))
        return out


# -- genre subsets ------------------------------------------------------------


@dataclass(frozen=True)
class SubsetFilter:
    genres: frozenset
    mode: str = "include"

    def __post_init__(self):
        object.__setattr__(self, "genres", frozenset(self.genres))
        if not self.genres:
            raise AnalysisError("a subset filter needs at least one genre")
        if self.mode not in ("include", "exclude"):
            raise AnalysisError(f"unknown filter mode {self.mode!r}")

    def __call__(self, record: ExampleRecord) -> bool:
        return (record.genre in self.genres) == (self.mode == "include")


def filter_subset(records: Iterable[ExampleRecord], subset: SubsetFilter,
                  counts: Optional[Counter] = None) -> List[ExampleRecord]:
    """Keep (``include``) or drop (``exclude``) records of the given genres.

    Raises:
        AnalysisError: if no record carries genre metadata.
    """
    records = list(records)
    counts = Counter() if counts is None else counts
    if not any(r.genre for r in records):
        raise AnalysisError("no record carries genre metadata")
    kept = [r for r in records if subset(r)]
    counts["input"] += len(records)
    counts["kept"] += len(kept)
    counts["dropped"] += len(records) - len(kept)
    if not kept:
        warnings.warn(f"{subset.mode} {sorted(subset.genres)} left no records", stacklevel=2)
    return kept


def assign_genres(records: Iterable[ExampleRecord], genre_map: Optional[Dict[str, str]] = None,
                  overwrite: bool = False) -> List[ExampleRecord]:
    """Fill in ``genre`` from the record id prefix."""
    out = []
    for r in records:
        if r.genre and not overwrite:
            out.append(r)
        else:
            out.append(replace(r, genre=genre_for_id(r.id, genre_map)))
    return out


def write_bin_scores(path, scores: Sequence[BinScore]):
    _io.write_text(path, bin_scores_tsv(scores))

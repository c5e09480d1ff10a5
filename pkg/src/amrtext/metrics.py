"""Corpus-level BLEU, chrF++ and an exact-match METEOR variant.

Every metric is computed from per-segment sufficient statistics that are
summed over the corpus, which makes the scores permutation invariant and lets
paired bootstrap resampling reuse the per-segment vectors.

BLEU tokenization depends on the pair's language: punctuation is split off
words for es/it/de/en, and zh is scored over characters.
"""

from __future__ import annotations

import logging
import math
import re
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

BLEU_ORDER = 4
BLEU_SMOOTH_EPSILON = 0.1
CHRF_CHAR_ORDER = 6
CHRF_WORD_ORDER = 2
CHRF_BETA = 2
METEOR_ALPHA = 0.9  # recall weighted 9:1
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5
METEOR_BEAM = 512

TOKENIZATION_POLICY = {"zh": "characters", "default": "punct-split"}

_WORD_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


@dataclass(frozen=True)
class ScoredPair:
    hypothesis: str
    reference: str
    language: str = "en"

    def __post_init__(self):
        if not self.reference or not self.reference.strip():
            raise ValueError("reference must be non-empty")


@dataclass
class MetricResult:
    """A corpus score in [0, 100] plus the statistics it was computed from."""

    metric: str
    value: float
    details: Dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 <= self.value <= 100.0) or math.isnan(self.value):
            raise ValueError(f"{self.metric} value {self.value} outside [0, 100]")

    def to_dict(self) -> Dict:
        return {"metric": self.metric, "value": self.value, "details": self.details}

    @classmethod
    def from_dict(cls, d: Dict) -> "MetricResult":
        return cls(d["metric"], d["value"], d.get("details", {}))

    @classmethod
    def from_statistics(cls, metric: str, statistics) -> "MetricResult":
        impl = METRICS[metric]
        stats = np.asarray(statistics, dtype=float)
        return cls(metric, impl.score(stats), impl.describe(stats))


# -- tokenization -------------------------------------------------------------


def tokenize(text: str, language: str) -> List[str]:
    """Word tokens for BLEU and METEOR under the language policy."""
    if language == "zh":
        return [ch for ch in text if not ch.isspace()]
    return _WORD_RE.findall(text)


def tokenization_policy(language: str) -> str:
    return TOKENIZATION_POLICY.get(language, TOKENIZATION_POLICY["default"])


def ngrams(tokens: Sequence, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


# -- BLEU -------------------------------------------------------------------
# statistics: [hyp_len, ref_len, match_1..4, total_1..4]


def bleu_statistics(pair: ScoredPair) -> np.ndarray:
    hyp = tokenize(pair.hypothesis, pair.language)
    ref = tokenize(pair.reference, pair.language)
    stats = np.zeros(2 + 2 * BLEU_ORDER)
    stats[0] = len(hyp)
    stats[1] = len(ref)
    for n in range(1, BLEU_ORDER + 1):
        h, r = ngrams(hyp, n), ngrams(ref, n)
        stats[1 + n] = sum(min(c, r[g]) for g, c in h.items())
        stats[1 + BLEU_ORDER + n] = sum(h.values())
    return stats


def _bleu_parts(stats) -> Tuple[float, List[float], List[bool], float]:
    # orders without any hypothesis n-gram are left out (effective order)
    c, r = stats[0], stats[1]
    precisions, smoothed = [], []
    for n in range(1, BLEU_ORDER + 1):
        match, total = stats[1 + n], stats[1 + BLEU_ORDER + n]
        if total == 0:
            break
        if match > 0:
            precisions.append(match / total)
            smoothed.append(False)
        else:
            precisions.append(BLEU_SMOOTH_EPSILON / total)
            smoothed.append(True)
    if c == 0:
        bp = 0.0
    elif c < r:
        bp = math.exp(1.0 - r / c)
    else:
        bp = 1.0
    return bp, precisions, smoothed, c


def bleu_from_statistics(stats) -> float:
    bp, precisions, _, c = _bleu_parts(stats)
    # no unigram match at all is 0 whatever the smoothing
    if c == 0 or stats[2] == 0:
        return 0.0
    log_mean = sum(math.log(p) for p in precisions) / len(precisions)
    return min(100.0, max(0.0, 100.0 * bp * math.exp(log_mean)))


def _bleu_details(stats) -> Dict:
    bp, precisions, smoothed, _ = _bleu_parts(stats)
    return {
        "precisions": [100.0 * p for p in precisions],
        "smoothed_orders": [n + 1 for n, s in enumerate(smoothed) if s],
        "effective_order": len(precisions),
        "brevity_penalty": bp,
        "hyp_len": int(stats[0]),
        "ref_len": int(stats[1]),
        "smoothing": f"floor epsilon={BLEU_SMOOTH_EPSILON} on zero-match orders; 0 without unigram matches",
    }


# -- chrF++ -------------------------------------------------------------------
# statistics: [n_hyp, n_ref, n_match] per order, character orders first


_CHRF_PUNCT = frozenset(string.punctuation)


def _is_punct(ch: str) -> bool:
    return ch in _CHRF_PUNCT


def chrf_words(text: str) -> List[str]:
    """Whitespace words with one leading or trailing ASCII punctuation mark split off."""
    out = []
    for w in text.split():
        if len(w) == 1:
            out.append(w)
        elif _is_punct(w[-1]):
            out += [w[:-1], w[-1]]
        elif _is_punct(w[0]):
            out += [w[0], w[1:]]
        else:
            out.append(w)
    return out


def chrf_statistics(pair: ScoredPair) -> np.ndarray:
    stats = np.zeros(3 * (CHRF_CHAR_ORDER + CHRF_WORD_ORDER))
    hyp_chars = "".join(pair.hypothesis.split())
    ref_chars = "".join(pair.reference.split())
    hyp_words, ref_words = chrf_words(pair.hypothesis), chrf_words(pair.reference)
    orders = [(hyp_chars, ref_chars, n) for n in range(1, CHRF_CHAR_ORDER + 1)]
    orders += [(hyp_words, ref_words, n) for n in range(1, CHRF_WORD_ORDER + 1)]
    for i, (hyp, ref, n) in enumerate(orders):
        h, r = ngrams(hyp, n), ngrams(ref, n)
        # hypothesis n-grams only count where the reference has some of that order
        stats[3 * i] = sum(h.values()) if r else 0
        stats[3 * i + 1] = sum(r.values())
        stats[3 * i + 2] = sum(min(c, r[g]) for g, c in h.items())
    return stats


def _chrf_averages(stats) -> Tuple[float, float, int]:
    avg_p = avg_r = 0.0
    effective = 0
    for i in range(CHRF_CHAR_ORDER + CHRF_WORD_ORDER):
        n_hyp, n_ref, n_match = stats[3 * i: 3 * i + 3]
        if n_hyp > 0 and n_ref > 0:
            avg_p += n_match / n_hyp
            avg_r += n_match / n_ref
            effective += 1
    if effective:
        avg_p /= effective
        avg_r /= effective
    return avg_p, avg_r, effective


def chrf_from_statistics(stats) -> float:
    p, r, _ = _chrf_averages(stats)
    if p + r == 0:
        return 0.0
    b2 = CHRF_BETA ** 2
    return min(100.0, 100.0 * (1 + b2) * p * r / (b2 * p + r))


def _chrf_details(stats) -> Dict:
    p, r, effective = _chrf_averages(stats)
    return {
        "avg_precision": 100.0 * p,
        "avg_recall": 100.0 * r,
        "effective_order": effective,
        "char_order": CHRF_CHAR_ORDER,
        "word_order": CHRF_WORD_ORDER,
        "beta": CHRF_BETA,
    }


# -- METEOR (exact match only) -------------------------------------------------
# statistics: [matches, hyp_len, ref_len, chunks]


def count_chunks(alignment: Sequence[Tuple[int, int]]) -> int:
    """Number of runs that are contiguous in both hypothesis and reference."""
    chunks = 0
    prev = None
    for h, r in sorted(alignment):
        if prev is None or h != prev[0] + 1 or r != prev[1] + 1:
            chunks += 1
        prev = (h, r)
    return chunks


def align_exact(hyp: Sequence[str], ref: Sequence[str]) -> List[Tuple[int, int]]:
    """Maximum exact-match alignment with the fewest chunks.

    Searches hypothesis positions left to right, keeping the best partial
    alignments per (used reference positions, last aligned pair); the state set
    is capped at ``METEOR_BEAM`` which is never reached for short sentences.
    """
    positions: Dict[str, List[int]] = {}
    for j, w in enumerate(ref):
        positions.setdefault(w, []).append(j)
    max_matches = sum(min(c, Counter(ref)[w]) for w, c in Counter(hyp).items())
    remaining = Counter(hyp)
    ref_counts = Counter(ref)

    # state: (used refs, last (h, r) or None) -> (matches, chunks, alignment)
    states = {(frozenset(), None): (0, 0, ())}
    for i, w in enumerate(hyp):
        remaining[w] -= 1
        nxt = {}
        for (used, last), (m, ch, al) in states.items():
            options = [j for j in positions.get(w, ()) if j not in used]
            # skipping is only allowed if a maximal alignment is still reachable
            free = ref_counts[w] - sum(1 for j in used if ref[j] == w)
            can_skip = free <= remaining[w]
            cands = [(used | {j}, (i, j), m + 1,
                      ch + (0 if last is not None and last == (i - 1, j - 1) else 1),
                      al + ((i, j),)) for j in options]
            if can_skip or not options:
                cands.append((used, last, m, ch, al))
            for u, l, m2, ch2, al2 in cands:
                key = (u, l)
                if key not in nxt or (m2, -ch2) > (nxt[key][0], -nxt[key][1]):
                    nxt[key] = (m2, ch2, al2)
        if len(nxt) > METEOR_BEAM:
            best = sorted(nxt.items(), key=lambda kv: (-kv[1][0], kv[1][1], kv[1][2]))
            nxt = dict(best[:METEOR_BEAM])
        states = nxt
    best = min(states.values(), key=lambda v: (-v[0], v[1], v[2]))
    assert best[0] == max_matches or len(states) >= METEOR_BEAM
    return list(best[2])


def meteor_statistics(pair: ScoredPair) -> np.ndarray:
    hyp = [t.lower() for t in tokenize(pair.hypothesis, pair.language)]
    ref = [t.lower() for t in tokenize(pair.reference, pair.language)]
    alignment = align_exact(hyp, ref)
    return np.array([len(alignment), len(hyp), len(ref), count_chunks(alignment)], dtype=float)


def _meteor_parts(stats) -> Tuple[float, float, float]:
    m, h, r, chunks = stats
    if m == 0:
        return 0.0, 0.0, 0.0
    p, rec = m / h, m / r
    fmean = p * rec / (METEOR_ALPHA * p + (1 - METEOR_ALPHA) * rec)
    penalty = METEOR_GAMMA * (chunks / m) ** METEOR_BETA
    return fmean, penalty, fmean * (1 - penalty)


def meteor_from_statistics(stats) -> float:
    return 100.0 * _meteor_parts(stats)[2]


def _meteor_details(stats) -> Dict:
    fmean, penalty, _ = _meteor_parts(stats)
    return {
        "matches": int(stats[0]),
        "hyp_len": int(stats[1]),
        "ref_len": int(stats[2]),
        "chunks": int(stats[3]),
        "fmean": fmean,
        "fragmentation_penalty": penalty,
        "matcher": "exact",
    }


# -- corpus API ---------------------------------------------------------------


@dataclass(frozen=True)
class _Metric:
    statistics: Callable[[ScoredPair], np.ndarray]
    score: Callable[[np.ndarray], float]
    describe: Callable[[np.ndarray], Dict]


METRICS: Dict[str, _Metric] = {
    "bleu": _Metric(bleu_statistics, bleu_from_statistics, _bleu_details),
    "chrf++": _Metric(chrf_statistics, chrf_from_statistics, _chrf_details),
    "meteor_lite": _Metric(meteor_statistics, meteor_from_statistics, _meteor_details),
}


def _check_pairs(pairs) -> List[ScoredPair]:
    pairs = list(pairs)
    if not pairs:
        raise ValueError("cannot score an empty list of pairs")
    return pairs


def get_metric(name: str) -> _Metric:
    try:
        return METRICS[name]
    except KeyError:
        raise ValueError(f"unknown metric {name!r}; expected one of {', '.join(METRICS)}") from None


def segment_statistics(pairs: Sequence[ScoredPair], metric: str) -> np.ndarray:
    """One row of sufficient statistics per pair."""
    impl = get_metric(metric)
    return np.stack([impl.statistics(p) for p in _check_pairs(pairs)])


def corpus_score(pairs: Sequence[ScoredPair], metric: str) -> MetricResult:
    pairs = _check_pairs(pairs)
    impl = get_metric(metric)
    stats = segment_statistics(pairs, metric).sum(axis=0)
    details = impl.describe(stats)
    details["statistics"] = stats.tolist()
    details["tokenization"] = {
        lang: tokenization_policy(lang) for lang in sorted({p.language for p in pairs})
    }
    details["segments"] = len(pairs)
    return MetricResult(metric, impl.score(stats), details)


def bleu_corpus(pairs: Sequence[ScoredPair]) -> MetricResult:
    """Corpus BLEU (orders 1-4, brevity penalty, floor smoothing of zero-match orders)."""
    pairs = _check_pairs(pairs)
    if all(not p.hypothesis.strip() for p in pairs):
        logger.warning("all hypotheses are empty; BLEU is 0")
    return corpus_score(pairs, "bleu")


def chrf_corpus(pairs: Sequence[ScoredPair]) -> MetricResult:
    """Corpus chrF++ (character orders 1-6, word orders 1-2, beta 2)."""
    return corpus_score(pairs, "chrf++")


def meteor_lite(pairs: Sequence[ScoredPair]) -> MetricResult:
    """METEOR with exact unigram matching only; not comparable with full METEOR."""
    return corpus_score(pairs, "meteor_lite")


# -- significance -------------------------------------------------------------


def paired_bootstrap(
    system_a: Sequence[ScoredPair],
    system_b: Sequence[ScoredPair],
    metric: str = "bleu",
    samples: int = 1000,
    seed: int = 12345,
) -> float:
    """Paired bootstrap resampling over segments.

    The system with the higher score on the full test set is the observed
    winner; the p-value is the fraction of resampled test sets on which it
    does not strictly beat the other system.  Ties on the full set give 1.0.

    Raises:
        ValueError: if the systems differ in length or references, or
            ``samples < 100``.
    """
    system_a, system_b = list(system_a), list(system_b)
    if len(system_a) != len(system_b):
        raise ValueError(f"system lengths differ: {len(system_a)} != {len(system_b)}")
    if samples < 100:
        raise ValueError("paired bootstrap needs at least 100 samples")
    for i, (a, b) in enumerate(zip(system_a, system_b)):
        if a.reference != b.reference:
            raise ValueError(f"references differ at segment {i}")
    impl = get_metric(metric)
    stats_a = segment_statistics(system_a, metric)
    stats_b = segment_statistics(system_b, metric)
    score_a = impl.score(stats_a.sum(axis=0))
    score_b = impl.score(stats_b.sum(axis=0))
    if score_a == score_b:
        return 1.0
    winner, loser = (stats_a, stats_b) if score_a > score_b else (stats_b, stats_a)

    rng = np.random.default_rng(seed)
    n = len(system_a)
    failures = 0
    for _ in range(samples):
        weights = np.bincount(rng.integers(0, n, size=n), minlength=n)
        if impl.score(weights @ winner) <= impl.score(weights @ loser):
            failures += 1
    return failures / samples

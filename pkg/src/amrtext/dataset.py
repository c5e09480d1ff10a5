"""Training and evaluation records, silver-data builders and dataset mixing.

Three sources of (AMR, sentence) pairs are built here:

* ``gold_amr``   gold English AMRs with their gold sentences,
* ``silver_amr`` foreign sentences of a parallel corpus paired with machine
  parses of their English side,
* ``silver_sent`` gold AMRs paired with machine translations of their
  English sentences.

Parser and MT outputs are never produced here; they are read from sidecar
files keyed by stable ids.  Builders are generators; pass a
:class:`collections.Counter` as ``counts`` to collect input/output/skip totals.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

import numpy as np
import yaml

from . import _io
from .amr import AmrGraph, diagnose, parse_penman, read_amr_file, serialize_penman, validate
from .genres import genre_for_id
from .linearize import LANGUAGE_NAMES, MAX_SOURCE_LENGTH, MAX_TARGET_LENGTH, make_task_input

logger = logging.getLogger(__name__)

PROVENANCES = ("gold_amr", "silver_amr", "silver_sent")
CORPORA = ("europarl", "tatoeba", "ted2020", "um")
MIXING_MODES = ("concat-shuffle", "sequential")

RECORD_FIELDS = (
    "id",
    "language",
    "amr",
    "linearized_input",
    "target_sentence",
    "provenance",
    "genre",
    "english_sentence",
)


class DatasetError(ValueError):
    pass


def sentence_id(text: str) -> str:
    """Stable id of an English sentence (content hash)."""
    return hashlib.sha1(text.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class ExampleRecord:
    id: str
    language: str
    amr: str
    linearized_input: Tuple[str, ...]
    target_sentence: str
    provenance: str
    genre: Optional[str] = None
    english_sentence: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "linearized_input", tuple(self.linearized_input))
        if self.provenance not in PROVENANCES:
            raise DatasetError(f"record {self.id}: unknown provenance {self.provenance!r}")
        if self.language not in LANGUAGE_NAMES:
            raise DatasetError(f"record {self.id}: unknown language {self.language!r}")
        if self.provenance != "gold_amr" and not self.english_sentence:
            raise DatasetError(f"record {self.id}: {self.provenance} records need the English sentence")

    @classmethod
    def create(cls, id, language, graph, target_sentence, provenance, genre=None,
               english_sentence=None, amr_text=None) -> "ExampleRecord":
        """Build a record, linearizing ``graph`` for ``language``."""
        amr_text = serialize_penman(graph) if amr_text is None else amr_text
        task = make_task_input(graph, language)
        return cls(id, language, amr_text, tuple(task.tokens), target_sentence, provenance,
                   genre, english_sentence)

    @property
    def graph(self) -> AmrGraph:
        return parse_penman(self.amr)

    def to_dict(self) -> Dict:
        d = {name: getattr(self, name) for name in RECORD_FIELDS}
        d["linearized_input"] = list(self.linearized_input)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ExampleRecord":
        missing = [k for k in RECORD_FIELDS[:6] if k not in d]
        if missing:
            raise DatasetError(f"record is missing fields {missing}")
        return cls(**{k: d.get(k) for k in RECORD_FIELDS})


def check_record(record: ExampleRecord, graph: Optional[AmrGraph] = None) -> List[str]:
    """Problems with a record: invalid AMR or a stale linearization."""
    problems = []
    if graph is None:
        graph, diags = diagnose(record.amr)
        if graph is None:
            return [f"{record.id}: {d}" for d in diags]
    problems += [f"{record.id}: {d}" for d in validate(graph)]
    expected = tuple(make_task_input(graph, record.language).tokens)
    if expected != record.linearized_input:
        problems.append(f"{record.id}: linearized_input does not match the AMR")
    return problems


def read_records(path) -> Iterator[ExampleRecord]:
    for row in _io.read_jsonl(path):
        yield ExampleRecord.from_dict(row)


def write_records(path, records: Iterable[ExampleRecord]) -> int:
    return _io.write_jsonl(path, (r.to_dict() for r in records))


@dataclass(frozen=True)
class ParallelPair:
    english: str
    foreign: str
    language: str
    corpus: str = "europarl"

    def __post_init__(self):
        if not self.english.strip() or not self.foreign.strip():
            raise DatasetError("parallel pair with an empty side")
        if self.corpus not in CORPORA:
            raise DatasetError(f"unknown corpus {self.corpus!r}")

    @property
    def id(self) -> str:
        return sentence_id(self.english)


def read_parallel_pairs(path, counts: Optional[Counter] = None) -> Iterator[ParallelPair]:
    """Read ``{english, foreign, language, corpus}`` JSONL, dropping pairs with an empty side."""
    counts = Counter() if counts is None else counts
    for row in _io.read_jsonl(path):
        english, foreign = row.get("english") or "", row.get("foreign") or ""
        if not english.strip() or not foreign.strip():
            counts["skipped_empty"] += 1
            counts["input"] += 1
            continue
        yield ParallelPair(english, foreign, row["language"], row.get("corpus", "europarl"))


# -- builders -----------------------------------------------------------------


def ingest_gold_amr(amr_file, language: str = "en", genre_map=None,
                    counts: Optional[Counter] = None) -> Iterator[ExampleRecord]:
    """One ``gold_amr`` record per graph of an AMR release file.

    Graphs that fail to parse or validate, or lack a ``::snt`` line, are
    skipped with a logged diagnostic.

    Raises:
        OSError: if the file cannot be read.
        DatasetError: if no valid record was found.
    """
    counts = Counter() if counts is None else counts
    written = 0
    for block in read_amr_file(amr_file):
        counts["input"] += 1
        graph, diags = diagnose(block.text)
        diags = diags if graph is None else validate(graph)
        if diags:
            for d in diags:
                logger.warning("%s:%d: skipped graph: %s", amr_file, block.line, d)
            counts["skipped_invalid"] += 1
            continue
        sentence = block.metadata.get("snt")
        if not sentence:
            logger.warning("%s:%d: skipped graph without ::snt", amr_file, block.line)
            counts["skipped_no_sentence"] += 1
            continue
        rid = block.metadata.get("id") or sentence_id(sentence)
        counts["output"] += 1
        written += 1
        yield ExampleRecord.create(rid, language, graph, sentence, "gold_amr",
                                   genre=genre_for_id(rid, genre_map), english_sentence=sentence)
    if written == 0:
        raise DatasetError(f"{amr_file}: no valid AMR records")


def build_silver_amr(pairs: Iterable[ParallelPair], silver_parses: Mapping[str, str], language: str,
                     counts: Optional[Counter] = None) -> Iterator[ExampleRecord]:
    """Pair the foreign side of each parallel pair with the silver parse of its English side.

    ``silver_parses`` maps :func:`sentence_id` of the English sentence to
    Penman text.  Exact (english, foreign) duplicates are dropped once;
    unparseable parses are skipped.

    Raises:
        DatasetError: on a missing parse or a pair in another language.
    """
    counts = Counter() if counts is None else counts
    seen = set()
    for pair in pairs:
        counts["input"] += 1
        if pair.language != language:
            raise DatasetError(f"pair in {pair.language!r} passed to the {language!r} builder")
        key = (pair.english, pair.foreign)
        if key in seen:
            counts["skipped_duplicate"] += 1
            continue
        seen.add(key)
        if pair.id not in silver_parses:
            raise DatasetError(f"no silver parse for sentence id {pair.id} ({pair.english[:40]!r})")
        graph, diags = diagnose(silver_parses[pair.id])
        diags = diags if graph is None else validate(graph)
        if diags:
            logger.warning("skipped silver parse %s: %s", pair.id, diags[0])
            counts["skipped_invalid"] += 1
            continue
        counts["output"] += 1
        counts[f"corpus:{pair.corpus}"] += 1
        rid = f"silver_amr:{language}:{sentence_id(pair.english + chr(9) + pair.foreign)}"
        yield ExampleRecord.create(rid, language, graph, pair.foreign, "silver_amr",
                                   english_sentence=pair.english)


def build_silver_sent(gold: Iterable[ExampleRecord], translations: Mapping[str, str], language: str,
                      strict: bool = False, counts: Optional[Counter] = None) -> Iterator[ExampleRecord]:
    """Pair every gold AMR with the machine translation of its English sentence.

    The AMR text is copied byte for byte from the gold record.

    Raises:
        DatasetError: for non-gold input, or (with ``strict``) a missing translation.
    """
    counts = Counter() if counts is None else counts
    if strict and not translations:
        raise DatasetError("empty translation map")
    for rec in gold:
        counts["input"] += 1
        if rec.provenance != "gold_amr":
            raise DatasetError(f"record {rec.id} is {rec.provenance}, expected gold_amr")
        text = translations.get(rec.id)
        if text is None or not text.strip():
            if strict:
                raise DatasetError(f"no translation for gold id {rec.id}")
            counts["skipped_missing"] += 1
            continue
        counts["output"] += 1
        yield ExampleRecord.create(f"silver_sent:{language}:{rec.id}", language, rec.graph, text,
                                   "silver_sent", genre=rec.genre,
                                   english_sentence=rec.english_sentence or rec.target_sentence,
                                   amr_text=rec.amr)


# -- manifests ------------------------------------------------------------------


@dataclass
class Source:
    path: str
    provenance: str
    language: Optional[str] = None
    translations: Optional[str] = None
    parses: Optional[str] = None

    def describe(self) -> str:
        return f"{self.provenance}:{os.path.basename(self.path)}" + (f":{self.language}" if self.language else "")


@dataclass
class Phase:
    name: str
    sources: List[Source]
    mixing: str = "concat-shuffle"
    languages: Optional[List[str]] = None


@dataclass
class DatasetManifest:
    """Declarative description of the data of one training run.

    Each phase is materialized as one file; several phases express
    sequential fine-tuning in the declared order.
    """

    phases: List[Phase]
    seed: int = 0
    max_source: int = MAX_SOURCE_LENGTH
    max_target: int = MAX_TARGET_LENGTH
    base_dir: str = "."
    output_dir: Optional[str] = None

    def __post_init__(self):
        if not self.phases:
            raise DatasetError("a manifest needs at least one phase")
        for phase in self.phases:
            if phase.mixing not in MIXING_MODES:
                raise DatasetError(f"phase {phase.name}: unknown mixing {phase.mixing!r}")
            if not phase.sources:
                raise DatasetError(f"phase {phase.name}: no sources")
            for src in phase.sources:
                if src.provenance not in PROVENANCES:
                    raise DatasetError(f"phase {phase.name}: unknown provenance {src.provenance!r}")

    @classmethod
    def from_dict(cls, d: Mapping, base_dir: str = ".") -> "DatasetManifest":
        phases = []
        for i, p in enumerate(d.get("phases") or []):
            sources = [Source(**s) for s in p.get("sources") or []]
            phases.append(Phase(p.get("name", f"phase{i + 1}"), sources, p.get("mixing", "concat-shuffle"),
                                p.get("languages")))
        budgets = d.get("sequence_budgets") or {}
        return cls(phases, int(d.get("seed", 0)), int(budgets.get("max_source", MAX_SOURCE_LENGTH)),
                   int(budgets.get("max_target", MAX_TARGET_LENGTH)), base_dir, d.get("output_dir"))

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        with open(path, encoding="utf-8") as f:
            d = yaml.safe_load(f)
        if not isinstance(d, dict):
            raise DatasetError(f"{path}: manifest must be a mapping")
        return cls.from_dict(d, os.path.dirname(os.path.abspath(path)))

    def resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)


@dataclass
class MixResult:
    phase_files: List[str]
    counts: List[Dict[str, int]] = field(default_factory=list)
    summary_file: Optional[str] = None


def load_source(manifest: DatasetManifest, src: Source, counts: Counter) -> List[ExampleRecord]:
    path = manifest.resolve(src.path)
    if not os.path.exists(path):
        raise DatasetError(f"missing source file {path}")
    if src.parses:
        if not src.language:
            raise DatasetError(f"{src.describe()}: silver_amr sources need a language")
        parses = _io.read_sidecar(manifest.resolve(src.parses))
        pairs = read_parallel_pairs(path, counts)
        return list(build_silver_amr(pairs, parses, src.language, counts))
    if src.translations:
        if not src.language:
            raise DatasetError(f"{src.describe()}: silver_sent sources need a language")
        gold = _gold_records(path)
        translations = _io.read_sidecar(manifest.resolve(src.translations))
        return list(build_silver_sent(gold, translations, src.language, counts=counts))
    if path.endswith(".jsonl"):
        records = list(read_records(path))
        for r in records:
            if r.provenance != src.provenance:
                raise DatasetError(f"{path}: record {r.id} is {r.provenance}, manifest says {src.provenance}")
        counts["input"] += len(records)
        counts["output"] += len(records)
        return records
    if src.provenance != "gold_amr":
        raise DatasetError(f"{path}: an AMR text file can only be a gold_amr source")
    return list(ingest_gold_amr(path, src.language or "en", counts=counts))


def _gold_records(path) -> List[ExampleRecord]:
    if path.endswith(".jsonl"):
        return list(read_records(path))
    return list(ingest_gold_amr(path))


def mix(manifest: DatasetManifest, output_dir=None, seed: Optional[int] = None) -> MixResult:
    """Materialize every phase of ``manifest`` as a JSONL file.

    Records of a phase are ordered by id, then shuffled with a generator
    seeded from ``(seed, phase index)`` for ``concat-shuffle`` or kept in
    source order for ``sequential``.  Output is a pure function of the
    manifest, the source files and the seed.

    Raises:
        DatasetError: on a missing source, duplicate ids within a phase or a
            record failing validation.
    """
    seed = manifest.seed if seed is None else seed
    if output_dir is None:
        if manifest.output_dir is None:
            raise DatasetError("no output directory given")
        output_dir = manifest.resolve(manifest.output_dir)

    phase_records = []
    all_counts = []
    for index, phase in enumerate(manifest.phases):
        records: List[ExampleRecord] = []
        phase_counts: Dict[str, object] = {"phase": phase.name, "mixing": phase.mixing, "sources": {}}
        for src in phase.sources:
            counts: Counter = Counter()
            loaded = load_source(manifest, src, counts)
            if phase.languages is not None:
                kept = [r for r in loaded if r.language in phase.languages]
                counts["filtered_language"] += len(loaded) - len(kept)
                loaded = kept
            counts["records"] = len(loaded)
            phase_counts["sources"][src.describe()] = dict(sorted(counts.items()))
            records += loaded
        seen = set()
        for r in records:
            if r.id in seen:
                raise DatasetError(f"phase {phase.name}: duplicate record id {r.id}")
            seen.add(r.id)
            problems = check_record(r)
            if problems:
                raise DatasetError(f"phase {phase.name}: {problems[0]}")
        if phase.mixing == "concat-shuffle":
            records.sort(key=lambda r: r.id)
            order = np.random.default_rng([seed, index]).permutation(len(records))
            records = [records[i] for i in order]
        phase_counts["records"] = len(records)
        phase_counts["over_max_source"] = sum(len(r.linearized_input) > manifest.max_source for r in records)
        phase_counts["over_max_target"] = sum(len(r.target_sentence.split()) > manifest.max_target for r in records)
        phase_records.append(records)
        all_counts.append(phase_counts)

    # write only after every phase is built so a failure leaves nothing behind
    files = []
    for index, (phase, records) in enumerate(zip(manifest.phases, phase_records), 1):
        path = os.path.join(output_dir, f"phase{index}-{phase.name}.jsonl")
        write_records(path, records)
        files.append(path)
    summary = {
        "seed": seed,
        "sequence_budgets": {"max_source": manifest.max_source, "max_target": manifest.max_target},
        "phases": [dict(c, file=os.path.basename(f)) for c, f in zip(all_counts, files)],
    }
    summary_file = os.path.join(output_dir, "summary.json")
    _io.write_text(summary_file, json.dumps(summary, ensure_ascii=False, indent=2) + "\n")
    return MixResult(files, all_counts, summary_file)

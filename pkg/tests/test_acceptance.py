"""Acceptance checks, one per criterion; each prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py`` (lines appear in the
terminal summary) or ``python tests/test_acceptance.py``.
"""

import json
import os
import random
import shutil
import subprocess
import sys
import time
from collections import Counter

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from amrtext.amr import parse_penman, read_amr_file, serialize_penman  # noqa: E402
from amrtext.analysis import (  # noqa: E402
    TSV_COLUMNS,
    RatioRecord,
    SubsetFilter,
    assign_genres,
    bin_by_gamma,
    bin_scores_tsv,
    compute_gamma,
    filter_subset,
    score_by_bin,
)
from amrtext.dataset import (  # noqa: E402
    DatasetManifest,
    ExampleRecord,
    ParallelPair,
    build_silver_amr,
    build_silver_sent,
    ingest_gold_amr,
    mix,
    read_records,
)
from amrtext.linearize import delinearize, linearize, make_task_input  # noqa: E402
from amrtext.metrics import ScoredPair, bleu_corpus, chrf_corpus, corpus_score, paired_bootstrap  # noqa: E402
from amrtext.segment import SubwordModel  # noqa: E402
from conftest import MULTI, TOY_DIR, WANT  # noqa: E402
from graphgen import isomorphic, random_graph  # noqa: E402
from test_metrics import oracle_bleu, oracle_chrf, random_pairs  # noqa: E402

RESULTS = []


def report(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_penman_roundtrip():
    rng = random.Random(1)
    texts = [b.text for b in read_amr_file(os.path.join(TOY_DIR, "gold.amr"))] + [MULTI, WANT]
    reentrant = 0
    while len(texts) < 100:
        g = random_graph(rng)
        reentrant += bool(g.reentrant_nodes())
        texts.append(serialize_penman(g))
    start = time.perf_counter()
    failures = 0
    for text in texts:
        g = parse_penman(text)
        failures += parse_penman(serialize_penman(g)) != g
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 1.0 and reentrant >= 20 and MULTI in texts
    report("penman round-trip", ok,
           f"{len(texts)} graphs ({reentrant} random reentrant), {failures} failures, {elapsed:.3f}s (< 1s)")


def test_linearization_invertibility():
    rng = random.Random(2)
    graphs = [random_graph(rng, max_nodes=30) for _ in range(500)]
    reentrant = sum(bool(g.reentrant_nodes()) for g in graphs)
    start = time.perf_counter()
    failures = sum(not isomorphic(delinearize(linearize(g)), g) for g in graphs)
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 5.0 and reentrant >= 250 and max(len(g.nodes) for g in graphs) <= 30
    report("linearization invertibility", ok,
           f"500 graphs, {reentrant / 5:.0f}% reentrant, {failures} failures, {elapsed:.2f}s (< 5s)")


def test_prefix_fidelity():
    expected = {"es": "Spanish", "it": "Italian", "de": "German", "zh": "Chinese", "en": "English"}
    bad = []
    for code, name in expected.items():
        task = make_task_input("(a / and)", code)
        if task.prefix.encode("utf-8") != f"translate AMR to {name}:".encode("utf-8"):
            bad.append(code)
        if task.text()[: len(task.prefix)] != task.prefix:
            bad.append(code)
    report("prefix fidelity", not bad, f"5 codes byte-exact, mismatches: {bad or 'none'}")


def test_metric_oracle_equivalence():
    rng = random.Random(3)
    worst_bleu = worst_chrf = 0.0
    for _ in range(50):
        pairs = random_pairs(rng, rng.randint(1, 3))
        scored = [ScoredPair(h, r, lang) for h, r, lang in pairs]
        worst_bleu = max(worst_bleu, abs(bleu_corpus(scored).value - oracle_bleu(pairs)))
        worst_chrf = max(worst_chrf, abs(chrf_corpus(scored).value - oracle_chrf(pairs)))
    ident = [ScoredPair(s, s, lang) for s, lang in
             [("the cat sat on the mat .", "en"), ("Ojalá pudiera.", "es"), ("我想去北京", "zh"), ("a", "en")]]
    ident_values = (bleu_corpus(ident).value, chrf_corpus(ident).value)
    ok = worst_bleu <= 1e-6 and worst_chrf <= 1e-6 and ident_values == (100.0, 100.0)
    report("metric oracle equivalence", ok,
           f"50 instances, max |diff| BLEU {worst_bleu:.1e} chrF++ {worst_chrf:.1e} (<= 1e-6); identity {ident_values}")


def test_significance_sanity():
    refs = [f"sentence {i} about the small cat" for i in range(30)]
    perfect = [ScoredPair(r, r) for r in refs]
    empty = [ScoredPair("", r) for r in refs]
    rng = random.Random(4)
    noisy = [ScoredPair(" ".join(rng.sample(r.split(), 4)), r) for r in refs]
    p_same = paired_bootstrap(noisy, list(noisy), samples=1000, seed=12345)
    p_dom = paired_bootstrap(perfect, empty, samples=1000, seed=12345)
    rerun = paired_bootstrap(perfect, noisy, samples=1000, seed=5) == paired_bootstrap(perfect, noisy, samples=1000, seed=5)
    ok = p_same > 0.05 and p_dom < 0.001 and rerun
    report("significance sanity", ok, f"identical p={p_same:.3f} (> 0.05), perfect-vs-empty p={p_dom:.3f} (< 0.001), "
                                      f"seeded rerun identical={rerun}")


def test_dataset_count_fidelity():
    gold = list(ingest_gold_amr(os.path.join(TOY_DIR, "gold.amr")))
    translations = {r.id: f"traducción {i}" for i, r in enumerate(gold)}
    silver = list(build_silver_sent(gold, translations, "es", strict=True))
    identical = all(s.amr.encode() == g.amr.encode() for s, g in zip(silver, gold))
    pairs = [ParallelPair(f"English {i}.", f"Extranjero {i}.", "es") for i in range(12)] + \
        [ParallelPair("English 0.", "Extranjero 0.", "es")]
    parses = {p.id: "(a / and)" for p in pairs}
    parses[pairs[3].id] = "(a / and :ARG0 z)"  # undefined variable
    counts = Counter()
    out = list(build_silver_amr(pairs, parses, "es", counts))
    skips = sum(v for k, v in counts.items() if k.startswith("skipped"))
    ok = len(silver) == len(gold) and identical and len(out) + skips == counts["input"] == len(pairs)
    report("dataset-count fidelity", ok,
           f"silver_sent {len(silver)}/{len(gold)} byte-identical={identical}; "
           f"silver_amr output {len(out)} + skips {skips} = input {counts['input']}")


def test_manifest_determinism(tmp_path):
    manifest = DatasetManifest.load(os.path.join(TOY_DIR, "manifest.yaml"))
    first = mix(manifest, tmp_path / "a")
    second = mix(manifest, tmp_path / "b")
    same = True
    for f1, f2 in zip(first.phase_files + [first.summary_file], second.phase_files + [second.summary_file]):
        with open(f1, "rb") as a, open(f2, "rb") as b:
            same &= a.read() == b.read()
    names = [os.path.basename(p) for p in first.phase_files]
    provenance = [{r.provenance for r in read_records(p)} for p in first.phase_files]
    ordered = names == ["phase1-silver_amr.jsonl", "phase2-silver_sent_gold.jsonl"] and \
        provenance[0] == {"silver_amr"} and "silver_sent" in provenance[1]
    report("manifest determinism", same and ordered, f"byte-identical reruns={same}; phases in order {names}")


def test_gamma_analysis():
    binned = bin_by_gamma([RatioRecord(f"r{i}", 0, 1, g) for i, g in enumerate([3, 1, 6, 2, 5, 4])])
    sizes = [len(binned.groups[b]) for b in ("low", "mid", "high")]
    rng = random.Random(5)
    words = ["el", "niño", "quiere", "ir", "la", "casa"]
    recs = [ExampleRecord.create(f"wb.{i}", "es", parse_penman(rng.choice([WANT, MULTI])),
                                 " ".join(rng.choice(words) for _ in range(rng.randint(1, 7))), "gold_amr")
            for i in range(10)]
    hyps = {r.id: " ".join(rng.choice(words) for _ in range(3)) for r in recs}
    single = bin_by_gamma(compute_gamma(recs, SubwordModel.characters()), "single")
    (bin_score,) = score_by_bin(single, {r.id: r for r in recs}, hyps, "bleu")
    whole = corpus_score([ScoredPair(hyps[r.id], r.target_sentence, "es") for r in recs], "bleu").value
    header = tuple(bin_scores_tsv([bin_score]).splitlines()[0].split("\t"))
    ok = sizes == [2, 2, 2] and bin_score.value == whole and header == TSV_COLUMNS == (
        "bin", "gamma_min", "gamma_max", "count", "metric", "value")
    report("gamma analysis", ok, f"tercile sizes {sizes}; single bin {bin_score.value:.6f} == corpus {whole:.6f}; "
                                 f"TSV columns {','.join(header)}")


def test_ood_filter():
    recs = assign_genres(read_records(os.path.join(TOY_DIR, "test.jsonl")), overwrite=True)
    ok = True
    for genres in ({"weblog"}, {"weblog", "wsj"}, {"forum", "proxy"}):
        inc = {r.id for r in filter_subset(recs, SubsetFilter(genres, "include"))}
        exc = {r.id for r in filter_subset(recs, SubsetFilter(genres, "exclude"))}
        ok &= (inc | exc) == {r.id for r in recs} and not inc & exc
    genres = sorted(Counter(r.genre for r in recs).items())
    report("OOD filter", ok, f"{len(recs)} records over {genres}; union = identity, intersection empty")


def cli(*args):
    proc = subprocess.run([sys.executable, "-m", "amrtext", *map(str, args)], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def test_end_to_end_smoke(tmp_path):
    work = tmp_path / "toy"
    shutil.copytree(TOY_DIR, work)
    start = time.perf_counter()
    steps = [
        cli("validate", work / "gold.amr"),
        cli("linearize", work / "gold.amr", "--lang", "es", "--out", tmp_path / "lin.jsonl"),
        cli("build-dataset", "--manifest", work / "manifest.yaml", "--out", tmp_path / "build"),
        cli("score", "--test", work / "test.jsonl", "--hyp", f"identity={work / 'hyp.identity.jsonl'}",
            "--out", tmp_path / "report"),
    ]
    elapsed = time.perf_counter() - start
    codes = [s[0] for s in steps]
    data = json.loads((tmp_path / "report" / "report.json").read_text(encoding="utf-8")) if codes[-1] == 0 else {}
    cells = []
    for row in data.get("rows", []):
        for metric, by_lang in row["scores"].items():
            cells += [r["value"] for r in by_lang.values()]
            cells += list(row["aggregate"][metric].values())
    n_test = sum(1 for _ in read_records(work / "test.jsonl"))
    langs = data.get("languages")
    ok = codes == [0, 0, 0, 0] and elapsed < 10 and cells and all(v == 100.0 for v in cells)
    report("end-to-end smoke", ok, f"exit codes {codes}, {n_test} examples in {langs}, "
                                   f"{len(cells)} cells all 100.0={all(v == 100.0 for v in cells)}, {elapsed:.2f}s (< 10s)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))

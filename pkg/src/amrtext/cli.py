"""Command line entry point: ``amrtext <subcommand>``.

Subcommands: validate, linearize, vocab, build-dataset, score, analyze.
Exit status is 0 on success, 1 for invalid data and 2 for usage or I/O errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional, Tuple

from . import _io
from .amr import diagnose, print_diagnostics, read_amr_file, validate
from .analysis import (
    AnalysisError,
    SubsetFilter,
    assign_genres,
    bin_by_gamma,
    bin_scores_tsv,
    compute_gamma,
    filter_subset,
    ratios_tsv,
    score_by_bin,
)
from .dataset import DatasetError, DatasetManifest, mix, read_records
from .genres import load_genre_map
from .linearize import LANGUAGE_NAMES, extract_edge_label_vocab, make_task_input
from .metrics import METRICS
from .report import ReportError, build_report, render
from .segment import model_from_options

DEFAULT_SEED = 12345

logger = logging.getLogger("amrtext")


class UsageError(Exception):
    pass


def _check_inputs(paths):
    for p in paths:
        if p is not None and not os.path.isfile(p):
            raise FileNotFoundError(f"no such file: {p}")


# -- validate -----------------------------------------------------------------


def cmd_validate(args) -> int:
    _check_inputs(args.files)
    ok = True
    for path in args.files:
        n_valid = n_invalid = 0
        for block in read_amr_file(path):
            graph, diags = diagnose(block.text)
            if graph is not None:
                diags = validate(graph)
            if diags:
                n_invalid += 1
                for d in diags:
                    print(f"{path}:{d.severity}:{block.offset + d.offset}:{d.message}", file=sys.stderr)
            else:
                n_valid += 1
        if n_valid + n_invalid == 0:
            print(f"{path}:error:0:no graphs found", file=sys.stderr)
            ok = False
        ok = ok and n_invalid == 0
        print(f"{path}\tvalid={n_valid}\tinvalid={n_invalid}")
    return 0 if ok else 1


# -- linearize / vocab ----------------------------------------------------------


def _graphs(path, strict):
    out = []
    for block in read_amr_file(path):
        graph, diags = diagnose(block.text)
        if graph is not None:
            diags = validate(graph)
        if diags:
            print_diagnostics(diags, prefix=f"{path}:")
            if strict:
                raise DatasetError(f"{path}: invalid graph at line {block.line}")
            continue
        out.append((block, graph))
    if not out:
        raise DatasetError(f"{path}: no valid graphs")
    return out


def cmd_linearize(args) -> int:
    _check_inputs([args.file])
    rows = []
    for i, (block, graph) in enumerate(_graphs(args.file, args.strict)):
        task = make_task_input(graph, args.lang, args.max_source)
        rows.append({
            "id": block.metadata.get("id", f"{os.path.basename(args.file)}:{i + 1}"),
            "target_language": args.lang,
            "prefix": task.prefix,
            "prefix_tokens": list(task.prefix_tokens),
            "graph_tokens": list(task.graph_tokens),
        })
    if args.out:
        _io.write_jsonl(args.out, rows)
    else:
        for row in rows:
            print(_io.dumps(row))
    return 0


def cmd_vocab(args) -> int:
    _check_inputs(args.files)
    graphs = [g for path in args.files for _, g in _graphs(path, args.strict)]
    vocab = extract_edge_label_vocab(graphs, ",".join(args.files))
    text = "".join(label + "\n" for label in vocab)
    if args.out:
        _io.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


# -- build-dataset ----------------------------------------------------------------


def cmd_build_dataset(args) -> int:
    _check_inputs([args.manifest])
    manifest = DatasetManifest.load(args.manifest)
    result = mix(manifest, args.out, args.seed)
    for path, counts in zip(result.phase_files, result.counts):
        print(f"{path}\trecords={counts['records']}")
        for source, c in counts["sources"].items():
            detail = " ".join(f"{k}={v}" for k, v in c.items())
            print(f"  {source}\t{detail}")
    return 0


# -- score / analyze --------------------------------------------------------------


def _parse_runs(specs: List[str]) -> Dict[str, Dict[str, str]]:
    runs = {}
    for spec in specs:
        name, sep, path = spec.partition("=")
        if not sep:
            path, name = spec, os.path.splitext(os.path.basename(spec))[0]
        if name in runs:
            raise UsageError(f"duplicate run name {name!r}")
        _check_inputs([path])
        runs[name] = {k: str(v) for k, v in _io.read_sidecar(path).items()}
    if not runs:
        raise UsageError("at least one --hyp is required")
    return runs


def _parse_external(specs: List[str]):
    out: Dict[str, Dict[str, Dict[str, float]]] = {}
    for spec in specs or []:
        head, sep, path = spec.partition("=")
        run, sep2, metric = head.partition(":")
        if not sep or not sep2:
            raise UsageError(f"--external expects RUN:METRIC=PATH, got {spec!r}")
        _check_inputs([path])
        scores = _io.read_sidecar(path, value="score")
        out.setdefault(run, {})[metric] = {k: float(v) for k, v in scores.items()}
    return out


def _load_test(args):
    _check_inputs([args.test, args.genre_map, args.pieces])
    records = list(read_records(args.test))
    if not records:
        raise DatasetError(f"{args.test}: empty test set")
    if args.subset:
        genre_map = load_genre_map(args.genre_map) if args.genre_map else None
        records = assign_genres(records, genre_map)
        genres = {g.strip() for g in args.subset.split(",") if g.strip()}
        records = filter_subset(records, SubsetFilter(genres, args.subset_mode))
        if not records:
            raise DatasetError(f"subset {sorted(genres)} is empty")
    return records


def _bin_outputs(args, records, runs, metric) -> Tuple[Dict[str, str], Dict]:
    model = model_from_options(args.pieces)
    ratios = list(compute_gamma(records, model))
    binned = bin_by_gamma(ratios, args.bins)
    by_id = {r.id: r for r in records}
    files = {"gamma.tsv": ratios_tsv([r for g in binned.groups.values() for r in g])}
    for name, hyps in runs.items():
        scores = score_by_bin(binned, by_id, hyps, metric)
        files[f"bins-{name}.tsv"] = bin_scores_tsv(scores)
    meta = {
        "bin_rule": binned.rule,
        "segmentation": model.source,
        "gamma_length_side": "reference",
    }
    return files, meta


def _write_all(out_dir, files: Dict[str, str]):
    for name, text in files.items():
        _io.write_text(os.path.join(out_dir, name), text)


def cmd_score(args) -> int:
    runs = _parse_runs(args.hyp)
    external = _parse_external(args.external)
    records = _load_test(args)
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    languages = args.langs.split(",") if args.langs else None
    files = {}
    meta = {"subset": args.subset or None}
    if args.bins:
        bin_files, bin_meta = _bin_outputs(args, records, runs, metrics[0])
        files.update(bin_files)
        meta.update(bin_meta)
    report = build_report(runs, records, metrics, languages, significance=not args.no_significance,
                          samples=args.samples, seed=args.seed, external_scores=external, metadata=meta)
    files["report.json"] = render(report, "json")
    files["report.tsv"] = render(report, "tsv")
    files["report.md"] = render(report, "md")
    # all outputs are computed before anything is written
    if args.out:
        _write_all(args.out, files)
    sys.stdout.write(render(report, args.format))
    return 0


def cmd_analyze(args) -> int:
    runs = _parse_runs(args.hyp)
    records = _load_test(args)
    files, meta = _bin_outputs(args, records, runs, args.metric)
    if args.out:
        _write_all(args.out, files)
    for name in runs:
        sys.stdout.write(f"# {name} ({meta['bin_rule']}, {meta['segmentation']})\n")
        sys.stdout.write(files[f"bins-{name}.tsv"])
    return 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="amrtext", description="Multilingual AMR-to-text data and evaluation toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check AMR files; exit 1 if any graph is invalid")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("linearize", help="write task inputs (prefix + linearized graph) as JSONL")
    p.add_argument("file")
    p.add_argument("--lang", required=True, choices=sorted(LANGUAGE_NAMES))
    p.add_argument("--out")
    p.add_argument("--max-source", type=int, default=350)
    p.add_argument("--strict", action="store_true", help="fail on the first invalid graph")
    p.set_defaults(func=cmd_linearize)

    p = sub.add_parser("vocab", help="extract the edge-label vocabulary, one label per line")
    p.add_argument("files", nargs="+")
    p.add_argument("--out")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("build-dataset", help="materialize the phases of a dataset manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", help="output directory (default: the manifest's output_dir)")
    p.add_argument("--seed", type=int, help="override the manifest seed")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_build_dataset)

    for name, func in (("score", cmd_score), ("analyze", cmd_analyze)):
        p = sub.add_parser(name, help="score system outputs" if name == "score" else "ratio-bin analysis")
        p.add_argument("--test", required=True, help="test set as ExampleRecord JSONL")
        p.add_argument("--hyp", action="append", default=[], metavar="NAME=PATH",
                       help="hypotheses as {id, text} JSONL; repeat per system")
        p.add_argument("--subset", help="comma-separated genres, e.g. weblog,wsj")
        p.add_argument("--subset-mode", choices=("include", "exclude"), default="include")
        p.add_argument("--genre-map", help="id-prefix<TAB>genre file")
        p.add_argument("--pieces", help="subword piece file (default: characters)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", help="output directory")
        if name == "score":
            p.add_argument("--metrics", default="bleu,chrf++", help="comma-separated; also meteor_lite")
            p.add_argument("--langs", help="comma-separated language columns")
            p.add_argument("--bins", help="gamma | fixed:<a>,<b>")
            p.add_argument("--format", choices=("tsv", "md", "json"), default="md")
            p.add_argument("--samples", type=int, default=1000)
            p.add_argument("--no-significance", action="store_true")
            p.add_argument("--external", action="append", metavar="RUN:METRIC=PATH",
                           help="merge per-example scores ({id, score} JSONL) from an outside scorer")
        else:
            p.add_argument("--bins", default="gamma", help="gamma | fixed:<a>,<b>")
            p.add_argument("--metric", default="bleu", choices=sorted(METRICS))
        p.add_argument("--strict", action="store_true")
        p.set_defaults(func=func)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s:%(name)s:%(message)s")
    try:
        return args.func(args)
    except (OSError, UsageError) as e:
        print(f"amrtext {args.command}: {e}", file=sys.stderr)
        return 2
    except (DatasetError, AnalysisError, ReportError, ValueError) as e:
        print(f"amrtext {args.command}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

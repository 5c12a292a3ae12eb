"""Command-line interface: ``summarize``, ``grid``, and ``evaluate`` subcommands.

Any fatal error exits nonzero with a message naming the failing stage
(config, model, ontology, ingest, score, aggregate, or harness). The
embedding model is loaded once per invocation; ``summarize --warm`` keeps
reading further CSV paths from stdin so many datasets can share one load.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
import time
from dataclasses import dataclass

from .aggregate import (
    COLUMN_FNS,
    DATASET_FNS,
    TREE_FNS,
    AggregationConfig,
    NoTextError,
    TagReport,
    summarize_report,
)
from .embedding import MODEL_FORMATS, load_model
from .harness import evaluate_corpus, grid_search, load_corpus
from .ingest import IngestOptions, extract_text
from .ontology import ONTOLOGY_FORMATS, load_ontology, type_vector_index
from .validation import check_positive_int

SCHEMA_VERSION = 1


class StageFailure(Exception):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"error [{stage}]: {cause}")


@contextlib.contextmanager
def _stage(name: str):
    try:
        yield
    except StageFailure:
        raise
    except Exception as exc:
        raise StageFailure(name, exc) from exc


@dataclass(frozen=True)
class RunConfig:
    model: str
    model_format: str
    ontology: str
    ontology_format: str
    config: AggregationConfig
    k: int
    headers: bool
    row_cap: int
    seed: int
    output: str
    token_prefix: str
    delimiter: str
    metadata: str | None = None
    warm: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        check_positive_int("k", args.k)
        run = cls(
            model=args.model,
            model_format=args.model_format,
            ontology=args.ontology,
            ontology_format=args.ontology_format,
            config=AggregationConfig(args.column_agg, args.tree_agg, args.dataset_agg),
            k=args.k,
            headers=args.headers,
            row_cap=args.row_cap,
            seed=args.seed,
            output=args.output,
            token_prefix=args.token_prefix,
            delimiter=args.delimiter,
            metadata=getattr(args, "metadata", None),
            warm=getattr(args, "warm", False),
        )
        run.ingest_options()  # validate row cap and delimiter now
        return run

    def ingest_options(self) -> IngestOptions:
        return IngestOptions(
            headers=self.headers,
            delimiter=self.delimiter,
            row_cap=self.row_cap,
            seed=self.seed,
            metadata=self.metadata,
        )


def _load_components(run: RunConfig):
    started = time.perf_counter()
    with _stage("model"):
        model = load_model(run.model, run.model_format)
    with _stage("ontology"):
        ontology = load_ontology(run.ontology, run.ontology_format)
        type_vector_index(ontology, model, run.token_prefix)
    load_ms = (time.perf_counter() - started) * 1000.0
    return model, ontology, load_ms


def _report_payload(path: str, report: TagReport, load_ms: float, score_ms: float) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "dataset": path,
        "tags": [{"type": t, "score": s} for t, s in report.tags.tags],
        "diagnostics": {
            "oov_cells": report.oov_cells,
            "dropped_columns": len(report.dropped_columns),
            "unscorable_types": len(report.unscorable_types),
            "load_ms": round(load_ms, 3),
            "score_ms": round(score_ms, 3),
        },
    }


def _print_report(run: RunConfig, payload: dict, ontology, first: bool) -> None:
    if run.output == "json":
        print(json.dumps(payload))
        return
    if run.output == "tsv":
        if first:
            print("dataset\trank\ttype\tscore")
        for rank, tag in enumerate(payload["tags"], start=1):
            print(f"{payload['dataset']}\t{rank}\t{tag['type']}\t{tag['score']:.6f}")
        diag = payload["diagnostics"]
        print("# " + " ".join(f"{key}={value}" for key, value in diag.items()))
        return
    diag = payload["diagnostics"]
    print(payload["dataset"])
    for rank, tag in enumerate(payload["tags"], start=1):
        label = ontology.label(tag["type"])
        suffix = f"  ({label})" if label != tag["type"] else ""
        print(f"  {rank}. {tag['type']}  {tag['score']:.6f}{suffix}")
    print(
        f"  oov cells: {diag['oov_cells']} | dropped columns: {diag['dropped_columns']}"
        f" | unscorable types: {diag['unscorable_types']}"
    )
    print(f"  model load: {diag['load_ms']:.1f} ms | scoring: {diag['score_ms']:.1f} ms")


def cmd_summarize(args: argparse.Namespace) -> int:
    with _stage("config"):
        run = RunConfig.from_args(args)
    model, ontology, load_ms = _load_components(run)
    paths = list(args.csv)
    if run.warm:
        paths.extend(line.strip() for line in sys.stdin if line.strip())
    for i, path in enumerate(paths):
        with _stage("ingest"):
            table = extract_text(path, run.ingest_options())
        started = time.perf_counter()
        try:
            report = summarize_report(
                table, ontology, model, run.config, run.k, token_prefix=run.token_prefix
            )
        except NoTextError as exc:
            raise StageFailure("aggregate", exc) from exc
        except Exception as exc:
            raise StageFailure("score", exc) from exc
        score_ms = (time.perf_counter() - started) * 1000.0
        payload = _report_payload(path, report, load_ms, score_ms)
        _print_report(run, payload, ontology, first=(i == 0))
    return 0


def cmd_grid(args: argparse.Namespace) -> int:
    with _stage("config"):
        run = RunConfig.from_args(args)
    model, ontology, _ = _load_components(run)
    with _stage("harness"):
        corpus = load_corpus(args.manifest, ontology)
        result = grid_search(
            corpus,
            ontology,
            model,
            k=run.k,
            options=run.ingest_options(),
            token_prefix=run.token_prefix,
        )
    if run.output == "json":
        print(result.to_json())
    elif run.output == "tsv":
        print(result.to_tsv(), end="")
    else:
        print(f"corpus: {result.corpus_size} datasets, top {run.k} tags")
        print(f"{'column':8} {'tree':8} {'dataset':8} {'match_rate':>10} {'n':>4} {'skipped':>7}")
        for row in result.rows:
            c = row.config
            print(
                f"{c.column_fn:8} {c.tree_fn:8} {c.dataset_fn:8}"
                f" {row.match_rate:>10.6f} {row.evaluated:>4} {row.skipped:>7}"
            )
    if args.plot_csv:
        with _stage("harness"), open(args.plot_csv, "w", newline="", encoding="utf-8") as out:
            writer = csv.writer(out)
            writer.writerow(["config", "match_rate"])
            for row in result.rows:
                writer.writerow([row.config.label, f"{row.match_rate:.6f}"])
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    with _stage("config"):
        run = RunConfig.from_args(args)
    model, ontology, _ = _load_components(run)
    with _stage("harness"):
        corpus = load_corpus(args.manifest, ontology)
        result = evaluate_corpus(
            corpus,
            ontology,
            model,
            run.config,
            k=run.k,
            options=run.ingest_options(),
            token_prefix=run.token_prefix,
        )
    if run.output == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "column_agg": run.config.column_fn,
            "tree_agg": run.config.tree_fn,
            "dataset_agg": run.config.dataset_fn,
            "match_rate": result.match_rate,
            "n": result.evaluated,
            "skipped": result.skipped,
        }
        print(json.dumps(payload, indent=2))
    elif run.output == "tsv":
        print("column_agg\ttree_agg\tdataset_agg\tmatch_rate\tn\tskipped")
        c = run.config
        print(
            f"{c.column_fn}\t{c.tree_fn}\t{c.dataset_fn}"
            f"\t{result.match_rate:.6f}\t{result.evaluated}\t{result.skipped}"
        )
    else:
        print(
            f"{run.config.label}: match rate {result.match_rate:.6f}"
            f" over {result.evaluated} datasets ({result.skipped} skipped)"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="word2vec model file")
    common.add_argument("--model-format", choices=MODEL_FORMATS, default="binary")
    common.add_argument("--ontology", required=True, help="type hierarchy file")
    common.add_argument("--ontology-format", choices=ONTOLOGY_FORMATS, default="ntriples")
    common.add_argument("--column-agg", choices=COLUMN_FNS, default="mean")
    common.add_argument("--tree-agg", choices=TREE_FNS, default="meanmax")
    common.add_argument("--dataset-agg", choices=DATASET_FNS, default="mean")
    common.add_argument("--k", type=int, default=3, help="number of tags to return")
    common.add_argument("--headers", action=argparse.BooleanOptionalAction, default=True)
    common.add_argument("--row-cap", type=int, default=1000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", choices=("json", "tsv", "text"), default="text")
    common.add_argument("--token-prefix", default="", help="prefix for type-name lookups")
    common.add_argument("--delimiter", default=",")

    parser = argparse.ArgumentParser(
        prog="tabletags",
        description="Rank ontology types describing the text of tabular datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sum = sub.add_parser("summarize", parents=[common], help="tag one or more CSV files")
    p_sum.add_argument("csv", nargs="+", help="CSV file(s) to tag")
    p_sum.add_argument(
        "--warm",
        action="store_true",
        help="after the positional files, read further CSV paths from stdin",
    )
    p_sum.add_argument("--metadata", default=None, help="sidecar text file, one more column")
    p_sum.set_defaults(func=cmd_summarize)

    p_grid = sub.add_parser(
        "grid", parents=[common], help="match-rate grid over the 8 standard configurations"
    )
    p_grid.add_argument("manifest", help="JSON-lines corpus manifest")
    p_grid.add_argument("--plot-csv", default=None, help="also write (config, match_rate) CSV")
    p_grid.set_defaults(func=cmd_grid)

    p_eval = sub.add_parser(
        "evaluate", parents=[common], help="match rate of one configuration over a corpus"
    )
    p_eval.add_argument("manifest", help="JSON-lines corpus manifest")
    p_eval.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageFailure as failure:
        print(str(failure), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

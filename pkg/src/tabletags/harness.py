"""Evaluation against hand-labeled corpora: top-k match rate and config grids.

A corpus is a JSON-lines manifest, one ``{"path": ..., "true_types": [...]}``
object per line; relative paths are resolved against the manifest's
directory. Datasets that fail ingestion are skipped and counted rather
than failing the whole run.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .aggregate import (
    AggregationConfig,
    NoTextError,
    TagPrediction,
    tags_from_matrices,
)
from .embedding import EmbeddingModel
from .ingest import IngestError, IngestOptions, extract_text
from .ontology import TypeOntology
from .score import ColumnScoreMatrix, score_column
from .validation import check_positive_int

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledDataset:
    """A table path with its hand-assigned true type ids."""

    path: str
    true_types: frozenset[str]

    def __post_init__(self) -> None:
        if not self.true_types:
            raise ValueError(f"{self.path}: true_types must be nonempty")


@dataclass(frozen=True)
class CorpusResult:
    match_rate: float
    evaluated: int
    skipped: int


@dataclass(frozen=True)
class GridRow:
    config: AggregationConfig
    match_rate: float
    evaluated: int
    skipped: int


@dataclass(frozen=True)
class GridResult:
    """Per-config match rates, best first."""

    rows: tuple[GridRow, ...]
    corpus_size: int

    def to_tsv(self) -> str:
        lines = ["column_agg\ttree_agg\tdataset_agg\tmatch_rate\tn\tskipped"]
        for row in self.rows:
            c = row.config
            lines.append(
                f"{c.column_fn}\t{c.tree_fn}\t{c.dataset_fn}"
                f"\t{row.match_rate:.6f}\t{row.evaluated}\t{row.skipped}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "schema_version": 1,
            "corpus_size": self.corpus_size,
            "results": [
                {
                    "column_agg": row.config.column_fn,
                    "tree_agg": row.config.tree_fn,
                    "dataset_agg": row.config.dataset_fn,
                    "match_rate": row.match_rate,
                    "n": row.evaluated,
                    "skipped": row.skipped,
                }
                for row in self.rows
            ],
        }
        return json.dumps(payload, indent=2)


def match_rate(prediction: TagPrediction, truth: frozenset[str] | set[str], k: int = 3) -> float:
    """Fraction of true type ids found among the top-k predicted ids."""
    check_positive_int("k", k)
    if not truth:
        raise ValueError("truth set must be nonempty")
    top = {type_id for type_id, _ in prediction.tags[:k]}
    return len(set(truth) & top) / len(truth)


def load_corpus(path, ontology: TypeOntology | None = None) -> list[LabeledDataset]:
    """Read a JSON-lines corpus manifest.

    When an ontology is given, every true type is checked against it.
    """
    manifest = Path(path)
    base = manifest.parent
    corpus: list[LabeledDataset] = []
    for lineno, line in enumerate(manifest.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
            table_path = entry["path"]
            if not isinstance(entry["true_types"], list):
                raise TypeError("true_types must be a list")
            true_types = frozenset(entry["true_types"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"manifest line {lineno}: {exc}") from exc
        if ontology is not None:
            unknown = sorted(t for t in true_types if t not in ontology)
            if unknown:
                raise ValueError(f"manifest line {lineno}: unknown types {unknown}")
        resolved = table_path if Path(table_path).is_absolute() else str(base / table_path)
        corpus.append(LabeledDataset(resolved, true_types))
    return corpus


def _score_datasets(
    corpus: Sequence[LabeledDataset],
    ontology: TypeOntology,
    model: EmbeddingModel,
    options: IngestOptions,
    token_prefix: str,
) -> list[list[ColumnScoreMatrix] | None]:
    """Ingest and score each dataset once; None marks a skipped dataset."""
    scored: list[list[ColumnScoreMatrix] | None] = []
    for dataset in corpus:
        try:
            table = extract_text(dataset.path, options)
            matrices = [
                matrix
                for column in table.columns
                if (matrix := score_column(column, ontology, model, token_prefix)) is not None
            ]
            if not matrices:
                raise NoTextError(f"{dataset.path}: no text found")
            scored.append(matrices)
        except (IngestError, NoTextError, OSError) as exc:
            log.warning("skipping dataset %s: %s", dataset.path, exc)
            scored.append(None)
    return scored


def _rate_for_config(
    scored,
    corpus: Sequence[LabeledDataset],
    ontology: TypeOntology,
    config: AggregationConfig,
    k: int,
) -> CorpusResult:
    rates = []
    skipped = 0
    for dataset, matrices in zip(corpus, scored):
        if matrices is None:
            skipped += 1
            continue
        prediction = tags_from_matrices(matrices, ontology, config, k)
        rates.append(match_rate(prediction, dataset.true_types, k))
    if not rates:
        raise ValueError("every dataset in the corpus was skipped")
    return CorpusResult(sum(rates) / len(rates), len(rates), skipped)


def evaluate_corpus(
    corpus: Sequence[LabeledDataset],
    ontology: TypeOntology,
    model: EmbeddingModel,
    config: AggregationConfig,
    k: int = 3,
    options: IngestOptions | None = None,
    token_prefix: str = "",
) -> CorpusResult:
    """Mean per-dataset match rate of one configuration over a corpus."""
    if not corpus:
        raise ValueError("corpus must be nonempty")
    scored = _score_datasets(corpus, ontology, model, options or IngestOptions(), token_prefix)
    return _rate_for_config(scored, corpus, ontology, config, k)


def default_grid() -> list[AggregationConfig]:
    """The eight standard configurations: {mean,max} x {meanmax,max} x {mean,max}."""
    return [
        AggregationConfig(column_fn, tree_fn, dataset_fn)
        for column_fn, tree_fn, dataset_fn in itertools.product(
            ("mean", "max"), ("meanmax", "max"), ("mean", "max")
        )
    ]


def grid_search(
    corpus: Sequence[LabeledDataset],
    ontology: TypeOntology,
    model: EmbeddingModel,
    configs: Sequence[AggregationConfig] | None = None,
    k: int = 3,
    options: IngestOptions | None = None,
    token_prefix: str = "",
) -> GridResult:
    """Evaluate a set of configurations over one corpus, best rate first.

    Each dataset is ingested and scored once and the (cheap) aggregation
    stages re-run per configuration, so results are identical to calling
    :func:`evaluate_corpus` per config.
    """
    if not corpus:
        raise ValueError("corpus must be nonempty")
    configs = list(default_grid() if configs is None else configs)
    if not configs:
        raise ValueError("configs must be nonempty")
    scored = _score_datasets(corpus, ontology, model, options or IngestOptions(), token_prefix)
    rows = []
    for config in configs:
        result = _rate_for_config(scored, corpus, ontology, config, k)
        rows.append(GridRow(config, result.match_rate, result.evaluated, result.skipped))
    rows.sort(key=lambda row: (-row.match_rate, row.config.label))
    return GridResult(tuple(rows), len(corpus))

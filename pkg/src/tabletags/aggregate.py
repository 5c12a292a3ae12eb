"""The three-stage reduction from column score matrices to ranked tags.

Scores flow through three successive aggregations: across the rows of
each column matrix, then up the type hierarchy within each column vector,
then across columns. Throughout, higher scores mean more related, so the
tree stage's max over children picks each node's strongest child.

The tree aggregation is a single bottom-up pass in which children are
finalized before their parents. With original score ``t`` and updated
child scores ``c1..cn``:

====================  =======================
``meanmax``           ``mean(t, max(c1..cn))``
``maxmean``           ``max(t, mean(c1..cn))``
``mean``              ``mean(t, mean(c1..cn))``
``max``               ``max(t, max(c1..cn))``
``none``              identity
====================  =======================

Nodes without scorable children are leaves and keep their score under
every function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embedding import EmbeddingModel
from .ingest import TableText
from .ontology import TypeOntology, type_vector_index
from .score import ColumnScoreMatrix, score_column
from .validation import check_choice, check_positive_int

COLUMN_FNS = ("mean", "max")
TREE_FNS = ("mean", "max", "meanmax", "maxmean", "none")
DATASET_FNS = ("mean", "max")


class NoTextError(RuntimeError):
    """No text in the table survived ingestion and embedding."""


@dataclass(frozen=True)
class AggregationConfig:
    """The (column, tree, dataset) aggregation function triple."""

    column_fn: str = "mean"
    tree_fn: str = "meanmax"
    dataset_fn: str = "mean"

    def __post_init__(self) -> None:
        check_choice("column_fn", self.column_fn, COLUMN_FNS)
        check_choice("tree_fn", self.tree_fn, TREE_FNS)
        check_choice("dataset_fn", self.dataset_fn, DATASET_FNS)

    @property
    def label(self) -> str:
        return f"{self.column_fn},{self.tree_fn},{self.dataset_fn}"


@dataclass(eq=False)
class ScoreVector:
    """Per-type scores in the ontology-global type order."""

    type_ids: tuple[str, ...]
    scores: np.ndarray


@dataclass(frozen=True)
class TagPrediction:
    """Ranked (type id, score) pairs, descending score, ties by id."""

    tags: tuple[tuple[str, float], ...]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.tags)


@dataclass(frozen=True)
class TagReport:
    """A prediction plus the diagnostics accumulated while computing it."""

    tags: TagPrediction
    oov_cells: int
    dropped_columns: tuple[str, ...]
    unscorable_types: tuple[str, ...]
    columns_used: int


def aggregate_column(matrix: ColumnScoreMatrix, fn: str) -> ScoreVector:
    """Reduce a column's rows to one score per type with ``mean`` or ``max``."""
    check_choice("fn", fn, COLUMN_FNS)
    if matrix.rows.shape[0] < 1:
        raise ValueError("cannot aggregate an empty score matrix")
    reduced = matrix.rows.mean(axis=0) if fn == "mean" else matrix.rows.max(axis=0)
    return ScoreVector(matrix.type_ids, reduced)


def tree_aggregate(v: ScoreVector, ontology: TypeOntology, fn: str) -> ScoreVector:
    """Propagate scores up the type hierarchy in one bottom-up pass.

    ``v`` must cover exactly the scorable types (a subset of the ontology,
    no duplicates). Children absent from ``v`` are skipped, and a node
    with no scorable children is treated as a leaf.
    """
    check_choice("fn", fn, TREE_FNS)
    position = {t: i for i, t in enumerate(v.type_ids)}
    if len(position) != len(v.type_ids):
        raise ValueError("score vector contains duplicate type ids")
    unknown = [t for t in v.type_ids if t not in ontology]
    if unknown:
        raise ValueError(f"score vector types not in ontology: {unknown}")
    updated = np.array(v.scores, dtype=np.float64)
    if fn == "none":
        return ScoreVector(v.type_ids, updated)
    # Children are strictly deeper than their parent, so visiting nodes by
    # decreasing depth finalizes every child before its parent is updated.
    order = sorted(v.type_ids, key=lambda t: (-ontology.depth(t), t))
    for node in order:
        kids = [position[c] for c in ontology.children_of(node) if c in position]
        if not kids:
            continue
        child_scores = updated[kids]
        own = updated[position[node]]
        if fn == "meanmax":
            value = (own + child_scores.max()) / 2.0
        elif fn == "maxmean":
            value = max(own, child_scores.mean())
        elif fn == "mean":
            value = (own + child_scores.mean()) / 2.0
        else:  # max
            value = max(own, child_scores.max())
        updated[position[node]] = value
    return ScoreVector(v.type_ids, updated)


def aggregate_dataset(vectors: Sequence[ScoreVector], fn: str) -> ScoreVector:
    """Reduce per-column vectors to one dataset vector with ``mean`` or ``max``."""
    check_choice("fn", fn, DATASET_FNS)
    if not vectors:
        raise ValueError("cannot aggregate an empty vector list")
    type_ids = vectors[0].type_ids
    for v in vectors[1:]:
        if v.type_ids != type_ids:
            raise ValueError("score vectors have mismatched type orderings")
    stacked = np.vstack([v.scores for v in vectors])
    reduced = stacked.mean(axis=0) if fn == "mean" else stacked.max(axis=0)
    return ScoreVector(type_ids, reduced)


def rank_types(v: ScoreVector, k: int) -> TagPrediction:
    """Top ``min(k, |types|)`` types by descending score, ties broken by id."""
    check_positive_int("k", k)
    order = sorted(range(len(v.type_ids)), key=lambda i: (-v.scores[i], v.type_ids[i]))
    top = order[: min(k, len(order))]
    return TagPrediction(tuple((v.type_ids[i], float(v.scores[i])) for i in top))


def tags_from_matrices(
    matrices: Sequence[ColumnScoreMatrix],
    ontology: TypeOntology,
    config: AggregationConfig,
    k: int = 3,
    tree_after_dataset: bool = False,
) -> TagPrediction:
    """Run the reduction stages over already-scored columns.

    Column vectors are combined in column-name order, which makes the
    result independent of the table's column ordering (the dataset
    functions are symmetric). ``tree_after_dataset`` moves the tree stage
    after the dataset stage; the default applies it per column.
    """
    if not matrices:
        raise NoTextError("no text found in any column")
    vectors = []
    for matrix in sorted(matrices, key=lambda m: m.column_name):
        v = aggregate_column(matrix, config.column_fn)
        if not tree_after_dataset:
            v = tree_aggregate(v, ontology, config.tree_fn)
        vectors.append(v)
    combined = aggregate_dataset(vectors, config.dataset_fn)
    if tree_after_dataset:
        combined = tree_aggregate(combined, ontology, config.tree_fn)
    return rank_types(combined, k)


def summarize_report(
    table: TableText,
    ontology: TypeOntology,
    model: EmbeddingModel,
    config: AggregationConfig,
    k: int = 3,
    tree_after_dataset: bool = False,
    token_prefix: str = "",
) -> TagReport:
    """Score a table and reduce it to ranked tags, keeping diagnostics."""
    index = type_vector_index(ontology, model, token_prefix)
    matrices: list[ColumnScoreMatrix] = []
    oov = 0
    unscored: list[str] = []
    for column in table.columns:
        matrix = score_column(column, ontology, model, token_prefix)
        if matrix is None:
            oov += len(column.cells)
            unscored.append(column.name)
            continue
        oov += matrix.dropped_cells
        matrices.append(matrix)
    tags = tags_from_matrices(matrices, ontology, config, k, tree_after_dataset)
    return TagReport(
        tags=tags,
        oov_cells=oov,
        dropped_columns=table.dropped_columns + tuple(unscored),
        unscorable_types=index.missing,
        columns_used=len(matrices),
    )


def summarize(
    table: TableText,
    ontology: TypeOntology,
    model: EmbeddingModel,
    config: AggregationConfig,
    k: int = 3,
    tree_after_dataset: bool = False,
    token_prefix: str = "",
) -> TagPrediction:
    """Ranked descriptive tags for a table; see :func:`summarize_report`."""
    return summarize_report(
        table, ontology, model, config, k, tree_after_dataset, token_prefix
    ).tags

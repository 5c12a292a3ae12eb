"""Similarity scoring of column cells against every scorable ontology type."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddingModel
from .ingest import Column
from .ontology import TypeOntology, type_vector_index


@dataclass(eq=False)
class ColumnScoreMatrix:
    """One similarity row per embedded cell, one column per scorable type.

    Entries are cosine similarities in [-1, 1]; higher means more related.
    Rows follow the surviving-cell order of the source column. Cells whose
    every token was out of vocabulary are dropped and counted in
    ``dropped_cells``.
    """

    column_name: str
    type_ids: tuple[str, ...]
    rows: np.ndarray
    dropped_cells: int = 0


def score_column(
    column: Column,
    ontology: TypeOntology,
    model: EmbeddingModel,
    token_prefix: str = "",
) -> ColumnScoreMatrix | None:
    """Score every cell of ``column`` against all scorable types.

    Returns None when no cell of the column embeds. The type-vector matrix
    is computed once per (ontology, model) pair and reused across columns.
    """
    index = type_vector_index(ontology, model, token_prefix)
    embedded: list[np.ndarray] = []
    dropped = 0
    for cell in column.cells:
        vec = model.embed_phrase(cell)
        if vec is None:
            dropped += 1
        else:
            embedded.append(vec)
    if not embedded:
        return None
    rows = np.vstack(embedded) @ index.matrix.T
    return ColumnScoreMatrix(column.name, index.ids, rows, dropped)

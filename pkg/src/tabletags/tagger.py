"""Scikit-learn style estimator wrapping the whole tagging pipeline."""

from __future__ import annotations

import os

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .aggregate import (
    AggregationConfig,
    TagReport,
    aggregate_column,
    aggregate_dataset,
    summarize_report,
    tree_aggregate,
)
from .embedding import EmbeddingModel, load_model
from .ingest import IngestOptions, TableText, extract_text
from .ontology import TypeOntology, load_ontology, type_vector_index
from .score import score_column


class TableTagger(BaseEstimator):
    """Tag tabular datasets with types from a hierarchical ontology.

    ``fit`` binds the pretrained word-embedding model and the ontology
    (loading them from disk when given as paths) and precomputes the
    scorable-type vectors. ``predict`` maps CSV paths (or already-ingested
    :class:`TableText` objects) to their top-k type ids, and ``transform``
    to the dataset-level score vector over all scorable types, making the
    tagger usable as a feature extractor in sklearn pipelines.

    Parameters
    ----------
    model : str | EmbeddingModel
        Path to a word2vec file, or a loaded model.
    ontology : str | TypeOntology
        Path to a type hierarchy file, or a loaded ontology.
    model_format : {"binary", "text"}
    ontology_format : {"ntriples", "tsv"}
    column_agg, tree_agg, dataset_agg : str
        The aggregation function triple; see :mod:`tabletags.aggregate`.
    k : int
        Number of tags returned by ``predict``.
    headers : bool
        Whether CSV inputs carry a header row.
    row_cap : int
        Per-column cell cap; larger columns are uniformly sampled.
    seed : int
        Seed for the row sampling.
    token_prefix : str
        Prefix prepended to type names when looking up their vectors.
    """

    def __init__(
        self,
        model=None,
        ontology=None,
        model_format: str = "binary",
        ontology_format: str = "ntriples",
        column_agg: str = "mean",
        tree_agg: str = "meanmax",
        dataset_agg: str = "mean",
        k: int = 3,
        headers: bool = True,
        row_cap: int = 1000,
        seed: int = 0,
        token_prefix: str = "",
    ):
        self.model = model
        self.ontology = ontology
        self.model_format = model_format
        self.ontology_format = ontology_format
        self.column_agg = column_agg
        self.tree_agg = tree_agg
        self.dataset_agg = dataset_agg
        self.k = k
        self.headers = headers
        self.row_cap = row_cap
        self.seed = seed
        self.token_prefix = token_prefix

    def _config(self) -> AggregationConfig:
        return AggregationConfig(self.column_agg, self.tree_agg, self.dataset_agg)

    def _options(self) -> IngestOptions:
        return IngestOptions(headers=self.headers, row_cap=self.row_cap, seed=self.seed)

    def fit(self, X=None, y=None) -> "TableTagger":
        """Load the model and ontology and precompute type vectors."""
        self._config()  # validate the aggregation triple up front
        if isinstance(self.model, EmbeddingModel):
            self.model_ = self.model
        elif self.model is None:
            raise ValueError("model must be a path or an EmbeddingModel")
        else:
            self.model_ = load_model(self.model, self.model_format)
        if isinstance(self.ontology, TypeOntology):
            self.ontology_ = self.ontology
        elif self.ontology is None:
            raise ValueError("ontology must be a path or a TypeOntology")
        else:
            self.ontology_ = load_ontology(self.ontology, self.ontology_format)
        self.types_ = type_vector_index(self.ontology_, self.model_, self.token_prefix)
        return self

    def _table(self, item) -> TableText:
        if isinstance(item, TableText):
            return item
        return extract_text(item, self._options())

    @staticmethod
    def _as_items(X) -> list:
        if isinstance(X, (str, os.PathLike, TableText)):
            return [X]
        return list(X)

    def report(self, dataset) -> TagReport:
        """Full tagging report (tags plus diagnostics) for one dataset."""
        check_is_fitted(self, "types_")
        return summarize_report(
            self._table(dataset),
            self.ontology_,
            self.model_,
            self._config(),
            self.k,
            token_prefix=self.token_prefix,
        )

    def predict(self, X) -> list[list[str]]:
        """Top-k type ids for each dataset in ``X``."""
        check_is_fitted(self, "types_")
        return [list(self.report(item).tags.ids) for item in self._as_items(X)]

    def transform(self, X) -> np.ndarray:
        """Dataset-level score vectors, one row per dataset in ``X``.

        Row columns align with :meth:`get_feature_names_out` (the scorable
        type ids). This is the vector that ``predict`` ranks.
        """
        check_is_fitted(self, "types_")
        config = self._config()
        out = []
        for item in self._as_items(X):
            table = self._table(item)
            matrices = []
            for column in table.columns:
                matrix = score_column(column, self.ontology_, self.model_, self.token_prefix)
                if matrix is not None:
                    matrices.append(matrix)
            if not matrices:
                raise ValueError("no text found in any column")
            vectors = [
                tree_aggregate(
                    aggregate_column(matrix, config.column_fn), self.ontology_, config.tree_fn
                )
                for matrix in sorted(matrices, key=lambda m: m.column_name)
            ]
            out.append(aggregate_dataset(vectors, config.dataset_fn).scores)
        return np.vstack(out)

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "types_")
        return np.asarray(self.types_.ids, dtype=object)

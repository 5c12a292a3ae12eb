"""Abstractive subject tags for tabular datasets.

The pipeline embeds a table's text into a pretrained word-embedding
space, scores every text segment against every type in a hierarchical
ontology, and aggregates the scores column-wise, tree-wise, and
dataset-wise into a ranked list of descriptive types.
"""

from .aggregate import (
    COLUMN_FNS,
    DATASET_FNS,
    TREE_FNS,
    AggregationConfig,
    NoTextError,
    ScoreVector,
    TagPrediction,
    TagReport,
    aggregate_column,
    aggregate_dataset,
    rank_types,
    summarize,
    summarize_report,
    tree_aggregate,
)
from .embedding import (
    EmbeddingModel,
    LoadReport,
    ModelFormatError,
    load_model,
    similarity,
)
from .harness import (
    CorpusResult,
    GridResult,
    GridRow,
    LabeledDataset,
    default_grid,
    evaluate_corpus,
    grid_search,
    load_corpus,
    match_rate,
)
from .ingest import (
    Column,
    IngestError,
    IngestOptions,
    TableText,
    extract_text,
    is_textual,
    sample_indices,
    tokenize_cell,
)
from .ontology import (
    CycleError,
    OntologyError,
    TypeNode,
    TypeOntology,
    TypeVectorIndex,
    load_ontology,
    split_type_name,
    type_vector,
    type_vector_index,
)
from .score import ColumnScoreMatrix, score_column
from .tagger import TableTagger

__version__ = "0.1.0"

__all__ = [
    "AggregationConfig",
    "COLUMN_FNS",
    "Column",
    "ColumnScoreMatrix",
    "CorpusResult",
    "CycleError",
    "DATASET_FNS",
    "EmbeddingModel",
    "GridResult",
    "GridRow",
    "IngestError",
    "IngestOptions",
    "LabeledDataset",
    "LoadReport",
    "ModelFormatError",
    "NoTextError",
    "OntologyError",
    "ScoreVector",
    "TREE_FNS",
    "TableTagger",
    "TableText",
    "TagPrediction",
    "TagReport",
    "TypeNode",
    "TypeOntology",
    "TypeVectorIndex",
    "aggregate_column",
    "aggregate_dataset",
    "default_grid",
    "evaluate_corpus",
    "extract_text",
    "grid_search",
    "is_textual",
    "load_corpus",
    "load_model",
    "load_ontology",
    "match_rate",
    "rank_types",
    "sample_indices",
    "score_column",
    "similarity",
    "split_type_name",
    "summarize",
    "summarize_report",
    "tokenize_cell",
    "tree_aggregate",
    "type_vector",
    "type_vector_index",
]

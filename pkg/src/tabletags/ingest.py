"""Extract and tokenize the textual content of a CSV table.

Cells are split on non-alphanumeric characters, lowercased, and pure-digit
tokens dropped, so numeric and date columns fall out naturally. Header
names (when present) become one extra column. Columns larger than the row
cap are reduced to a seeded uniform sample, keeping runs reproducible.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .validation import check_positive_int

log = logging.getLogger(__name__)

HEADER_COLUMN = "__headers__"
METADATA_COLUMN = "__metadata__"

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


class IngestError(ValueError):
    """The input table cannot be read or is structurally inconsistent."""


def tokenize_cell(raw: str) -> list[str]:
    """Lowercased alphanumeric tokens of one cell; pure-digit tokens dropped."""
    return [t.lower() for t in _TOKEN.findall(raw) if not t.isdigit()]


def is_textual(raw: str) -> bool:
    """True iff the cell yields at least one token."""
    return bool(tokenize_cell(raw))


@dataclass(frozen=True)
class IngestOptions:
    headers: bool = True
    delimiter: str = ","
    row_cap: int = 1000
    seed: int = 0
    metadata: str | None = None  # optional sidecar text file, ingested as one more column

    def __post_init__(self) -> None:
        check_positive_int("row_cap", self.row_cap)
        if len(self.delimiter) != 1:
            raise ValueError(f"delimiter must be a single character; got {self.delimiter!r}")


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # "data" or "header"
    cells: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class TableText:
    columns: tuple[Column, ...]
    dropped_columns: tuple[str, ...] = ()


def sample_indices(n: int, cap: int, seed: int) -> np.ndarray:
    """Row indices of a seeded uniform sample without replacement.

    Identity (source order) when n <= cap; otherwise ``cap`` indices in
    draw order, identical across runs for the same seed.
    """
    if n <= cap:
        return np.arange(n)
    return np.random.default_rng(seed).choice(n, size=cap, replace=False)


def _capped(cells: list[tuple[str, ...]], options: IngestOptions) -> tuple[tuple[str, ...], ...]:
    indices = sample_indices(len(cells), options.row_cap, options.seed)
    return tuple(cells[i] for i in indices)


def extract_text(path, options: IngestOptions | None = None) -> TableText:
    """Tokenized textual columns of an RFC-4180 CSV file.

    Cells that tokenize to nothing are removed; columns left with no cells
    are dropped and reported in ``TableText.dropped_columns``. Raises
    :class:`IngestError` for an unreadable file or rows with inconsistent
    field counts.
    """
    options = options or IngestOptions()
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle, delimiter=options.delimiter))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc

    if not rows:
        if options.headers:
            raise IngestError(f"{path}: empty file, expected a header row")
        return _with_metadata(TableText(()), options)

    width = len(rows[0])
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise IngestError(f"row {i}: expected {width} fields, got {len(row)}")

    if options.headers:
        names, data = rows[0], rows[1:]
    else:
        names, data = [f"col_{j}" for j in range(width)], rows

    columns: list[Column] = []
    dropped: list[str] = []
    for j, name in enumerate(names):
        cells = [tuple(t) for row in data if (t := tokenize_cell(row[j]))]
        if cells:
            columns.append(Column(name, "data", _capped(cells, options)))
        else:
            dropped.append(name)
    if options.headers:
        cells = [tuple(t) for name in names if (t := tokenize_cell(name))]
        if cells:
            columns.append(Column(HEADER_COLUMN, "header", _capped(cells, options)))
        else:
            dropped.append(HEADER_COLUMN)
    if dropped:
        log.info("dropped %d non-textual columns: %s", len(dropped), dropped)
    return _with_metadata(TableText(tuple(columns), tuple(dropped)), options)


def _with_metadata(table: TableText, options: IngestOptions) -> TableText:
    if options.metadata is None:
        return table
    try:
        lines = Path(options.metadata).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read metadata {options.metadata}: {exc}") from exc
    cells = [tuple(t) for line in lines if (t := tokenize_cell(line))]
    if not cells:
        return TableText(table.columns, table.dropped_columns + (METADATA_COLUMN,))
    column = Column(METADATA_COLUMN, "data", _capped(cells, options))
    return TableText(table.columns + (column,), table.dropped_columns)

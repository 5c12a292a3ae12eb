"""Pretrained word-embedding models in the two standard word2vec file formats.

binary
    ASCII header line ``"<count> <dim>\\n"``, then one record per token:
    the token's UTF-8 bytes terminated by a single space, followed by
    ``dim`` consecutive little-endian IEEE-754 32-bit floats, optionally
    followed by a newline.
text
    The same header line, then one whitespace-separated
    ``"<token> v1 v2 ... vd"`` line per token.

Every vector is L2-normalized at load so cosine similarity reduces to a
plain dot product. The whole vocabulary is materialized as one float64
matrix (8 * count * dim bytes); a loaded model is read-only and safe to
share across concurrent readers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .validation import check_choice

log = logging.getLogger(__name__)

MODEL_FORMATS = ("binary", "text")


class ModelFormatError(ValueError):
    """An embedding file does not conform to its declared format."""


@dataclass(frozen=True)
class LoadReport:
    """Counters accumulated while building a model's vocabulary."""

    tokens: int
    duplicates_dropped: int = 0
    zero_vectors_dropped: int = 0


class EmbeddingModel:
    """Immutable map from token to L2-normalized embedding vector.

    Duplicate tokens keep their first occurrence; tokens whose raw vector
    has zero norm (or non-finite components) are rejected. Both events are
    counted in :attr:`report` rather than raised.
    """

    def __init__(self, tokens: Sequence[str], vectors) -> None:
        matrix = np.asarray(vectors, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError("vectors must be a 2-D array")
        if len(tokens) != matrix.shape[0]:
            raise ValueError(f"{len(tokens)} tokens but {matrix.shape[0]} vectors")
        if matrix.shape[1] < 1:
            raise ValueError("vector dimension must be positive")
        norms = np.linalg.norm(matrix, axis=1)
        index: dict[str, int] = {}
        keep: list[int] = []
        duplicates = rejected = 0
        for i, token in enumerate(tokens):
            if token in index:
                duplicates += 1
                continue
            if norms[i] == 0.0 or not np.isfinite(matrix[i]).all():
                rejected += 1
                continue
            index[token] = len(keep)
            keep.append(i)
        self._matrix = matrix[keep] / norms[keep][:, np.newaxis]
        self._matrix.flags.writeable = False
        self._index = index
        self.dimension = int(matrix.shape[1])
        self.report = LoadReport(len(keep), duplicates, rejected)
        if duplicates or rejected:
            log.warning(
                "model load dropped %d duplicate and %d zero-norm tokens",
                duplicates,
                rejected,
            )

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, token: str) -> bool:
        return self._row(token) is not None

    def _row(self, token: str) -> int | None:
        i = self._index.get(token)
        if i is None:
            i = self._index.get(token.lower())
        return i

    def lookup(self, token: str) -> np.ndarray | None:
        """Unit vector for ``token``: exact match first, lowercase fallback second.

        Returns None for out-of-vocabulary tokens; absence is a value, not
        an error.
        """
        i = self._row(token)
        return None if i is None else self._matrix[i]

    def embed_phrase(self, tokens: Sequence[str]) -> np.ndarray | None:
        """Mean of the in-vocabulary token vectors, re-normalized to unit length.

        Out-of-vocabulary tokens are skipped; the result is None when every
        token is OOV or the mean is exactly the zero vector. The rows are
        accumulated in a canonical order so any permutation of ``tokens``
        produces a bit-identical result.
        """
        if not tokens:
            raise ValueError("tokens must be nonempty")
        found = [self._row(t) for t in tokens]
        rows = sorted(i for i in found if i is not None)
        if not rows:
            return None
        mean = self._matrix[rows].sum(axis=0) / len(rows)
        norm = float(np.linalg.norm(mean))
        if norm == 0.0:
            return None
        return mean / norm


def similarity(u, v) -> float:
    """Cosine similarity of two unit vectors, i.e. their dot product."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(np.dot(u, v))


def load_model(path, format: str = "binary") -> EmbeddingModel:
    """Load a word2vec model file into an :class:`EmbeddingModel`.

    Raises :class:`ModelFormatError` on a malformed header, a truncated
    record, or a dimension mismatch on any line.
    """
    check_choice("format", format, MODEL_FORMATS)
    path = Path(path)
    if format == "binary":
        tokens, raw = _read_binary(path)
    else:
        tokens, raw = _read_text(path)
    return EmbeddingModel(tokens, raw)


def _parse_header(fields: list) -> tuple[int, int]:
    if len(fields) != 2:
        raise ModelFormatError("malformed header: expected '<count> <dim>'")
    try:
        count, dim = int(fields[0]), int(fields[1])
    except ValueError as exc:
        raise ModelFormatError(f"malformed header: {exc}") from None
    if count < 0 or dim < 1:
        raise ModelFormatError(f"malformed header: count={count} dim={dim}")
    return count, dim


def _read_binary(path: Path) -> tuple[list[str], np.ndarray]:
    data = path.read_bytes()
    newline = data.find(b"\n")
    if newline < 0:
        raise ModelFormatError("malformed header: missing newline")
    count, dim = _parse_header(data[:newline].split())
    tokens: list[str] = []
    raw = np.empty((count, dim), dtype=np.float64)
    pos = newline + 1
    record = 4 * dim
    for i in range(count):
        while pos < len(data) and data[pos] == 0x0A:  # optional record separator
            pos += 1
        space = data.find(b" ", pos)
        if space < 0:
            raise ModelFormatError(f"truncated record {i + 1}: unterminated token")
        tokens.append(data[pos:space].decode("utf-8", errors="replace"))
        pos = space + 1
        if pos + record > len(data):
            raise ModelFormatError(f"truncated record {i + 1}: expected {dim} floats")
        raw[i] = np.frombuffer(data, dtype="<f4", count=dim, offset=pos)
        pos += record
    if data[pos:].lstrip(b"\n"):
        raise ModelFormatError(f"trailing data after {count} records")
    return tokens, raw


def _read_text(path: Path) -> tuple[list[str], np.ndarray]:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ModelFormatError("malformed header: empty file")
    count, dim = _parse_header(lines[0].split())
    entries = [(n, line) for n, line in enumerate(lines[1:], start=2) if line.strip()]
    if len(entries) != count:
        raise ModelFormatError(f"expected {count} vector lines, found {len(entries)}")
    tokens: list[str] = []
    raw = np.empty((count, dim), dtype=np.float64)
    for i, (lineno, line) in enumerate(entries):
        fields = line.split()
        if len(fields) != dim + 1:
            raise ModelFormatError(
                f"line {lineno}: expected {dim} components, got {len(fields) - 1}"
            )
        tokens.append(fields[0])
        try:
            raw[i] = [float(f) for f in fields[1:]]
        except ValueError as exc:
            raise ModelFormatError(f"line {lineno}: {exc}") from None
    return tokens, raw

"""Type vocabularies with a parent/child hierarchy, plus their embedding vectors.

Two on-disk formats are read:

tsv
    One ``child<TAB>parent`` edge per line; a single-column line declares
    a root with no edges.
ntriples
    Lines of the form ``<child-iri> <predicate-iri> <parent-iri> .``;
    only statements whose predicate IRI ends in ``subClassOf`` are
    consumed, and IRIs are reduced to their final path segment.

The hierarchy must be a forest. A type that appears with two distinct
parents keeps the first-seen edge (the extras are recorded, not fatal);
a cycle is fatal and reported. Loaded ontologies are read-only and safe
to share across threads.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .embedding import EmbeddingModel
from .validation import check_choice

log = logging.getLogger(__name__)

ONTOLOGY_FORMATS = ("ntriples", "tsv")


class OntologyError(ValueError):
    """An ontology file or query violates the hierarchy contract."""


class CycleError(OntologyError):
    """The subclass edges contain a cycle."""

    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " -> ".join([*self.cycle, self.cycle[0]]))


@dataclass(frozen=True)
class TypeNode:
    id: str
    label: str
    depth: int


_NAME_PIECE = re.compile(r"[A-Z][a-z0-9]*|[a-z0-9]+")


def split_type_name(name: str) -> list[str]:
    """Lowercased word pieces of a (possibly camel-cased) type name.

    ``"MeanOfTransportation"`` -> ``["mean", "of", "transportation"]``;
    each capital starts a new piece, so ``"AB"`` -> ``["a", "b"]``.
    """
    return [p.lower() for p in _NAME_PIECE.findall(name)]


class TypeOntology:
    """A forest of type nodes keyed by canonical name.

    ``parent`` must map every type id to its parent id (None for roots).
    Children are derived and kept in lexicographic order so traversal is
    reproducible regardless of input file ordering.
    """

    def __init__(
        self,
        parent: Mapping[str, str | None],
        labels: Mapping[str, str] | None = None,
        dropped_edges: Sequence[tuple[str, str]] = (),
    ) -> None:
        self._parent = dict(parent)
        for child, par in self._parent.items():
            if par is not None and par not in self._parent:
                raise OntologyError(f"parent {par!r} of {child!r} is not a known type")
        children: dict[str, list[str]] = {t: [] for t in self._parent}
        for child, par in self._parent.items():
            if par is not None:
                children[par].append(child)
        self._children = {t: tuple(sorted(c)) for t, c in children.items()}
        self._depth = self._compute_depths()
        labels = labels or {}
        self._labels = {
            t: labels.get(t, " ".join(split_type_name(t)) or t) for t in self._parent
        }
        self._ids = tuple(sorted(self._parent))
        self.types = [TypeNode(t, self._labels[t], self._depth[t]) for t in self._ids]
        self.dropped_edges = tuple(dropped_edges)
        self.roots = tuple(sorted(t for t, p in self._parent.items() if p is None))
        if self.dropped_edges:
            log.warning(
                "ontology has %d extra parent edges (first edge kept): %s",
                len(self.dropped_edges),
                self.dropped_edges,
            )

    def _compute_depths(self) -> dict[str, int]:
        depths: dict[str, int] = {}
        for start in sorted(self._parent):
            chain: list[str] = []
            seen: set[str] = set()
            cur: str | None = start
            while cur is not None and cur not in depths:
                if cur in seen:
                    cycle = chain[chain.index(cur):]
                    raise CycleError(cycle)
                seen.add(cur)
                chain.append(cur)
                cur = self._parent[cur]
            base = -1 if cur is None else depths[cur]
            for offset, node in enumerate(reversed(chain), start=1):
                depths[node] = base + offset
        return depths

    def __len__(self) -> int:
        return len(self._parent)

    def __contains__(self, type_id: str) -> bool:
        return type_id in self._parent

    def _require(self, type_id: str) -> None:
        if type_id not in self._parent:
            raise OntologyError(f"unknown type id {type_id!r}")

    def ids(self) -> tuple[str, ...]:
        return self._ids

    def parent_of(self, type_id: str) -> str | None:
        self._require(type_id)
        return self._parent[type_id]

    def children_of(self, type_id: str) -> tuple[str, ...]:
        """Direct children of ``type_id``, lexicographically ordered."""
        self._require(type_id)
        return self._children[type_id]

    def depth(self, type_id: str) -> int:
        self._require(type_id)
        return self._depth[type_id]

    def label(self, type_id: str) -> str:
        self._require(type_id)
        return self._labels[type_id]

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str, str]],
        roots: Iterable[str] = (),
        labels: Mapping[str, str] | None = None,
    ) -> "TypeOntology":
        """Build a forest from (child, parent) pairs.

        Types referenced only as parents are created implicitly. When a
        child appears with more than one distinct parent, the first edge
        wins and the others are recorded in ``dropped_edges``.
        """
        parent: dict[str, str | None] = {t: None for t in roots}
        dropped: list[tuple[str, str]] = []
        for child, par in edges:
            parent.setdefault(par, None)
            existing = parent.get(child)
            if existing is None:
                parent[child] = par
            elif existing != par:
                dropped.append((child, par))
        return cls(parent, labels=labels, dropped_edges=dropped)


def load_ontology(path, format: str = "ntriples") -> TypeOntology:
    """Load a type hierarchy from disk; see the module docstring for formats."""
    check_choice("format", format, ONTOLOGY_FORMATS)
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if format == "tsv":
        edges, roots = _parse_tsv(lines)
    else:
        edges, roots = _parse_ntriples(lines)
    return TypeOntology.from_edges(edges, roots)


def _parse_tsv(lines: list[str]) -> tuple[list[tuple[str, str]], list[str]]:
    edges: list[tuple[str, str]] = []
    roots: list[str] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = line.rstrip("\n").split("\t")
        if len(fields) == 1 and fields[0].strip():
            roots.append(fields[0].strip())
        elif len(fields) == 2 and fields[0].strip() and fields[1].strip():
            edges.append((fields[0].strip(), fields[1].strip()))
        else:
            raise OntologyError(f"line {lineno}: expected 'child<TAB>parent' or a bare root")
    return edges, roots


_TRIPLE = re.compile(
    r'^\s*<([^<>\s]+)>\s+<([^<>\s]+)>\s+(<[^<>\s]+>|"(?:[^"\\]|\\.)*"\S*)\s*\.\s*$'
)


def _iri_name(iri: str) -> str:
    return re.split(r"[/#]", iri)[-1]


def _parse_ntriples(lines: list[str]) -> tuple[list[tuple[str, str]], list[str]]:
    edges: list[tuple[str, str]] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        match = _TRIPLE.match(line)
        if match is None:
            raise OntologyError(f"line {lineno}: not an N-Triples statement")
        subject, predicate, obj = match.groups()
        if not predicate.endswith("subClassOf"):
            continue
        if not obj.startswith("<"):
            raise OntologyError(f"line {lineno}: subclass statement with a literal object")
        edges.append((_iri_name(subject), _iri_name(obj[1:-1])))
    return edges, []


def type_vector(
    ontology: TypeOntology,
    model: EmbeddingModel,
    type_id: str,
    token_prefix: str = "",
) -> np.ndarray | None:
    """Embedding vector for a type, or None if no vector can be obtained.

    The type's mapped token (``token_prefix`` + type name, with the
    model's lowercase fallback) is looked up first; when absent, the
    camel-case split of the name is embedded as a phrase.
    """
    ontology._require(type_id)
    vec = model.lookup(token_prefix + type_id)
    if vec is not None:
        return vec
    pieces = split_type_name(type_id)
    if not pieces:
        return None
    return model.embed_phrase(pieces)


class TypeVectorIndex:
    """The scorable-type vector matrix for one (ontology, model) pair.

    ``ids`` holds the scorable type ids in the ontology-global order
    (lexicographic); ``matrix`` their unit vectors, row-aligned with
    ``ids``; ``missing`` the types for which no vector could be obtained
    (excluded from scoring, surfaced in coverage reports).
    """

    def __init__(self, ontology: TypeOntology, model: EmbeddingModel, token_prefix: str = ""):
        self.ontology = ontology
        self.token_prefix = token_prefix
        ids: list[str] = []
        vectors: list[np.ndarray] = []
        missing: list[str] = []
        for type_id in ontology.ids():
            vec = type_vector(ontology, model, type_id, token_prefix)
            if vec is None:
                missing.append(type_id)
            else:
                ids.append(type_id)
                vectors.append(vec)
        if not ids:
            raise OntologyError("no ontology type has an embedding vector")
        self.ids = tuple(ids)
        self.missing = tuple(missing)
        self.matrix = np.vstack(vectors)
        self.matrix.flags.writeable = False
        self._by_id = {t: i for i, t in enumerate(ids)}
        if missing:
            log.warning("%d/%d types have no embedding vector", len(missing), len(ontology))

    def get(self, type_id: str) -> np.ndarray | None:
        i = self._by_id.get(type_id)
        return None if i is None else self.matrix[i]


@lru_cache(maxsize=8)
def type_vector_index(
    ontology: TypeOntology, model: EmbeddingModel, token_prefix: str = ""
) -> TypeVectorIndex:
    """Cached :class:`TypeVectorIndex` per (ontology, model, prefix) triple."""
    return TypeVectorIndex(ontology, model, token_prefix)

"""Shared builders for synthetic models, ontologies, tables, and corpora."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from tabletags import EmbeddingModel, TypeOntology


def write_w2v_binary(path: Path, tokens, vectors, record_newline=True) -> None:
    vec32 = np.asarray(vectors, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(f"{len(tokens)} {vec32.shape[1]}\n".encode("ascii"))
        for token, row in zip(tokens, vec32):
            fh.write(token.encode("utf-8") + b" " + row.tobytes())
            if record_newline:
                fh.write(b"\n")


def write_w2v_text(path: Path, tokens, vectors) -> None:
    vec32 = np.asarray(vectors, dtype=np.float32)
    lines = [f"{len(tokens)} {vec32.shape[1]}"]
    for token, row in zip(tokens, vec32):
        # repr of the exact float64 value of each float32 component, so the
        # text and binary renderings decode to identical doubles
        lines.append(token + " " + " ".join(repr(float(x)) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def basis_model(tokens) -> EmbeddingModel:
    return EmbeddingModel(list(tokens), np.eye(len(tokens)))


def random_forest(rng: np.random.Generator, n: int, root_prob: float = 0.25) -> dict:
    """Random parent map over ids t00..t<n-1>, names decoupled from topology."""
    ids = [f"t{i:02d}" for i in range(n)]
    names = list(ids)
    rng.shuffle(names)
    parents: dict[str, str | None] = {}
    for i in range(n):
        if i == 0 or rng.random() < root_prob:
            parents[names[i]] = None
        else:
            parents[names[i]] = names[int(rng.integers(0, i))]
    return parents


def forest_to_tsv(path: Path, parents: dict) -> None:
    lines = []
    for child in sorted(parents):
        parent = parents[child]
        lines.append(child if parent is None else f"{child}\t{parent}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class SyntheticFixture:
    """A small end-to-end world: files on disk plus the raw data behind them."""

    model_path: Path
    ontology_path: Path
    csv_path: Path
    tokens: list[str]
    vectors: np.ndarray
    parents: dict
    oracle_columns: list  # (name, cells) pairs extract_text should produce


def build_synthetic_fixture(tmpdir: Path, seed: int = 20240617) -> SyntheticFixture:
    """3 text columns x 20 cells, a 15-type forest, a 100-token embedding."""
    rng = np.random.default_rng(seed)
    dim = 16
    words = [f"w{i:03d}" for i in range(82)]
    direct_types = [
        "animal", "bird", "fish", "plant", "flower", "tree",
        "vehicle", "car", "boat", "place", "city",
    ]
    # FreshWater/OldGrowth resolve through their camel-split pieces below;
    # GhostAlpha/GhostBeta stay wholly out of vocabulary
    pieces = ["fresh", "water", "old", "growth"]
    header_names = ["habitat", "species", "notes"]
    tokens = words + direct_types + pieces + header_names
    assert len(tokens) == 100
    # round through float32 so the values here equal the file contents exactly
    vectors = rng.normal(size=(len(tokens), dim)).astype(np.float32).astype(np.float64)

    parents = {t: None for t in ["animal", "plant", "vehicle", "place", "GhostBeta"]}
    parents.update(
        {
            "bird": "animal",
            "fish": "animal",
            "GhostAlpha": "animal",
            "flower": "plant",
            "tree": "plant",
            "OldGrowth": "plant",
            "car": "vehicle",
            "boat": "vehicle",
            "city": "place",
            "FreshWater": "place",
        }
    )
    assert len(parents) == 15

    cell_pool = words + direct_types
    columns = []
    for name in header_names:
        cells = []
        for _ in range(20):
            if rng.random() < 0.1:
                cells.append(("qqz",))  # wholly out-of-vocabulary cell
            else:
                size = int(rng.integers(1, 4))
                picked = rng.choice(len(cell_pool), size=size, replace=False)
                cells.append(tuple(cell_pool[i] for i in picked))
        columns.append((name, cells))

    model_path = tmpdir / "model.txt"
    ontology_path = tmpdir / "types.tsv"
    csv_path = tmpdir / "table.csv"
    write_w2v_text(model_path, tokens, vectors)
    forest_to_tsv(ontology_path, parents)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header_names + ["year"])
        for r in range(20):
            writer.writerow([" ".join(cells[r]) for _, cells in columns] + [str(1900 + r)])

    # what extract_text should yield: the data columns (the numeric "year"
    # column drops out) plus the header column
    oracle_columns = list(columns)
    oracle_columns.append(
        ("__headers__", [(name,) for name in header_names] + [("year",)])
    )
    return SyntheticFixture(
        model_path, ontology_path, csv_path, tokens, vectors, parents, oracle_columns
    )


@dataclass
class DominanceCorpus:
    """Hand-built corpus on which (mean, meanmax, mean) dominates per dataset.

    - ds1 defeats max column aggregation: the true type leads by frequency
      while every decoy ties it at 1.0 under max.
    - ds2 defeats max tree aggregation: the true type is a parent lifted
      into the top three by mean(own, best child) but tied out of them
      when raised all the way to its best child.
    - ds3 defeats max dataset aggregation: the true type tops the
      column-frequency mean but ties the single-column decoys under max.
    """

    manifest_path: Path
    model_path: Path
    ontology_path: Path
    model: EmbeddingModel
    ontology: TypeOntology
    parents: dict
    vocab_tokens: list[str]
    datasets: list  # (csv name, [(column cells)], truth)


def build_dominance_corpus(tmpdir: Path) -> DominanceCorpus:
    vocab_tokens = ["zz", "aa", "ab", "ac", "cat", "pet", "drum", "quartz", "xx"]
    parents = {
        "zz": None, "aa": None, "ab": None, "ac": None,
        "pet": None, "cat": "pet",
        "quartz": None, "drum": "quartz",
    }
    model_path = tmpdir / "model.txt"
    ontology_path = tmpdir / "types.tsv"
    write_w2v_text(model_path, vocab_tokens, np.eye(len(vocab_tokens)))
    forest_to_tsv(ontology_path, parents)

    ds1 = ["zz"] * 12 + ["aa"] * 3 + ["ab"] * 3 + ["ac"] * 2
    ds2 = ["drum"] * 16 + ["cat"] * 15 + ["pet"] * 10 + ["xx"] * 9
    ds3_cols = [["zz"] * 5, ["zz"] * 5, ["zz"] * 5, ["zz"] * 5,
                ["aa"] * 5, ["ab"] * 5, ["ac"] * 5]
    datasets = [
        ("ds1.csv", [ds1], {"zz"}),
        ("ds2.csv", [ds2], {"pet"}),
        ("ds3.csv", ds3_cols, {"zz"}),
    ]
    for name, cols, _ in datasets:
        with open(tmpdir / name, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            for row in zip(*cols):
                writer.writerow(row)

    manifest_path = tmpdir / "corpus.jsonl"
    manifest_path.write_text(
        "\n".join(
            json.dumps({"path": name, "true_types": sorted(truth)})
            for name, _, truth in datasets
        )
        + "\n",
        encoding="utf-8",
    )
    from tabletags import load_model, load_ontology

    return DominanceCorpus(
        manifest_path=manifest_path,
        model_path=model_path,
        ontology_path=ontology_path,
        model=load_model(model_path, "text"),
        ontology=load_ontology(ontology_path, "tsv"),
        parents=parents,
        vocab_tokens=vocab_tokens,
        datasets=datasets,
    )

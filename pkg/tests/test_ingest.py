import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tabletags import (
    IngestError,
    IngestOptions,
    extract_text,
    is_textual,
    sample_indices,
    tokenize_cell,
)
from tabletags.ingest import HEADER_COLUMN, METADATA_COLUMN


def write(tmp_path, content, name="table.csv"):
    path = tmp_path / name
    path.write_text(content, encoding="utf-8")
    return path


def test_tokenize_cell():
    assert tokenize_cell("BC Liquor Store") == ["bc", "liquor", "store"]
    assert tokenize_cell("2016-2017") == []
    assert tokenize_cell("Class Size 2016-2017") == ["class", "size"]
    assert tokenize_cell("miles/gallon") == ["miles", "gallon"]
    assert tokenize_cell("") == []


def test_is_textual():
    assert not is_textual("3.14159")
    assert is_textual("wine")


@given(st.text(max_size=40))
def test_is_textual_is_token_nonemptiness(raw):
    assert is_textual(raw) == bool(tokenize_cell(raw))
    for token in tokenize_cell(raw):
        assert token == token.lower()
        assert not token.isdigit()


def test_extract_text_filters_numeric_columns(tmp_path):
    path = write(tmp_path, "name,age\nalice smith,31\nbob,44\n")
    table = extract_text(path, IngestOptions())
    by_name = {c.name: c for c in table.columns}
    assert set(by_name) == {"name", HEADER_COLUMN}
    assert by_name["name"].kind == "data"
    assert by_name["name"].cells == (("alice", "smith"), ("bob",))
    assert by_name[HEADER_COLUMN].kind == "header"
    assert by_name[HEADER_COLUMN].cells == (("name",), ("age",))
    assert table.dropped_columns == ("age",)


def test_extract_text_empty_body_keeps_header_column(tmp_path):
    path = write(tmp_path, "a,b\n")
    table = extract_text(path, IngestOptions())
    assert len(table.columns) == 1
    assert table.columns[0].kind == "header"
    assert table.columns[0].cells == (("a",), ("b",))
    assert set(table.dropped_columns) == {"a", "b"}


def test_extract_text_without_headers(tmp_path):
    path = write(tmp_path, "x,1\ny,2\n")
    table = extract_text(path, IngestOptions(headers=False))
    assert [c.name for c in table.columns] == ["col_0"]
    assert table.columns[0].cells == (("x",), ("y",))
    assert table.dropped_columns == ("col_1",)


def test_ragged_rows_are_fatal(tmp_path):
    path = write(tmp_path, "a,b\n1,2\n1,2,3\n")
    with pytest.raises(IngestError, match="row 3"):
        extract_text(path, IngestOptions())


def test_missing_file_is_ingest_error(tmp_path):
    with pytest.raises(IngestError, match="cannot read"):
        extract_text(tmp_path / "nope.csv", IngestOptions())


def test_rfc4180_quoting(tmp_path):
    path = write(tmp_path, 'text\n"hello, world"\n"with ""quotes"""\n')
    table = extract_text(path, IngestOptions())
    assert table.columns[0].cells == (("hello", "world"), ("with", "quotes"))


def test_sampling_is_deterministic(tmp_path):
    rows = "\n".join(f"word{i} extra" for i in range(10_000))
    path = write(tmp_path, "text\n" + rows + "\n")
    options = IngestOptions(row_cap=100, seed=7)
    first = extract_text(path, options)
    second = extract_text(path, options)
    assert first == second
    column = first.columns[0]
    assert len(column.cells) == 100
    expected = np.random.default_rng(7).choice(10_000, size=100, replace=False)
    assert list(column.cells) == [(f"word{i}", "extra") for i in expected]


def test_sample_indices_identity_under_cap():
    np.testing.assert_array_equal(sample_indices(5, 10, 3), np.arange(5))
    picked = sample_indices(100, 10, 3)
    assert len(picked) == 10
    assert len(set(picked.tolist())) == 10


def test_cells_keep_source_order_and_duplicates(tmp_path):
    path = write(tmp_path, "w\nb b\na\nb b\n")
    table = extract_text(path, IngestOptions())
    data = [c for c in table.columns if c.kind == "data"][0]
    assert data.cells == (("b", "b"), ("a",), ("b", "b"))


def test_metadata_sidecar_becomes_a_column(tmp_path):
    csv_path = write(tmp_path, "a\nhello\n")
    meta = write(tmp_path, "wine tasting notes\n2017\n", name="meta.txt")
    table = extract_text(csv_path, IngestOptions(metadata=str(meta)))
    names = [c.name for c in table.columns]
    assert METADATA_COLUMN in names
    meta_col = [c for c in table.columns if c.name == METADATA_COLUMN][0]
    assert meta_col.cells == (("wine", "tasting", "notes"),)


def test_delimiter_option(tmp_path):
    path = write(tmp_path, "a;b\nx;zed\n")
    table = extract_text(path, IngestOptions(delimiter=";"))
    assert {c.name for c in table.columns} == {"a", "b", HEADER_COLUMN}


def test_options_validation():
    with pytest.raises(ValueError, match="row_cap"):
        IngestOptions(row_cap=0)
    with pytest.raises(ValueError, match="delimiter"):
        IngestOptions(delimiter=",,")

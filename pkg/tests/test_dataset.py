import numpy as np
import pytest

from src.core.dataset import (
    BOOLEAN, NUMERIC, TEXT, Dataset, apply_schema, discretize, load_csv, quantile_edges, stratified_split,
)
from src.exceptions import DataValidationError, SchemaMismatchError
from src.models import Variable


def _rows(header, *rows):
    return "\n".join([header] + [",".join(str(c) for c in r) for r in rows]) + "\n"


def test_quantile_binning_of_eight_values(write_csv):
    path = write_csv("x.csv", _rows("x,y", *[(v, v % 2) for v in range(1, 9)]))
    ds = discretize(load_csv(path, ["y"]), n_bins=4)

    x = ds.variables[ds.index("x")]
    assert x.bin_edges == pytest.approx([2.75, 4.5, 6.25])
    assert ds.column(ds.index("x")).tolist() == [0, 0, 1, 1, 2, 2, 3, 3]
    assert x.cardinality == 4


def test_constant_column_collapses_to_one_state(write_csv):
    path = write_csv("c.csv", _rows("c,y", *[(5, i % 2) for i in range(6)]))
    ds = discretize(load_csv(path, ["y"]), n_bins=4)

    assert ds.variables[0].cardinality == 1
    assert ds.variables[0].bin_edges == []
    assert ds.column(0).tolist() == [0] * 6


def test_binary_column_gets_two_states():
    assert quantile_edges(np.array([0, 0, 0, 0, 0, 1], dtype=float), 4) == [0.0]
    assert quantile_edges(np.array([0, 1, 1, 1], dtype=float), 4) == pytest.approx([0.75])


def test_missing_feature_cell_gets_extra_state(write_csv):
    path = write_csv("m.csv", _rows("x,y", (1, 0), (2, 0), (3, 1), (4, 1), ("", 0)))
    ds = discretize(load_csv(path, ["y"]), n_bins=2)

    x = ds.variables[0]
    assert x.missing
    assert x.bin_edges == pytest.approx([2.5])
    assert x.cardinality == 3
    assert ds.column(0).tolist() == [0, 0, 1, 1, 2]


def test_text_states_follow_first_appearance(write_csv):
    path = write_csv("t.csv", _rows("colour,y", ("red", 0), ("blue", 1), ("red", 1)))
    table = load_csv(path, ["y"])
    ds = discretize(table, n_bins=4)

    assert table.kinds["colour"] == TEXT
    assert ds.variables[0].states == ["red", "blue"]
    assert ds.column(0).tolist() == [0, 1, 0]


def test_boolean_columns_only_when_requested(write_csv):
    path = write_csv("b.csv", _rows("flag,y", ("True", 0), ("false", 1), ("1", 1)))

    assert load_csv(path, ["y"]).kinds["flag"] == TEXT
    table = load_csv(path, ["y"], boolean_columns=["flag"])
    assert table.kinds["flag"] == BOOLEAN
    assert table.kinds["y"] == NUMERIC
    assert discretize(table, 4).column(0).tolist() == [1, 0, 1]


def test_rows_with_missing_label_are_rejected(write_csv, caplog):
    path = write_csv("l.csv", _rows("x,y", (1, 0), (2, ""), (3, 1)))
    table = load_csv(path, ["y"])

    assert table.n_rows == 2
    assert "missing label" in caplog.text


def test_labels_are_tagged(write_csv):
    path = write_csv("l.csv", _rows("x,y", (1, 0), (2, 1)))
    ds = discretize(load_csv(path, ["y"]), 4)

    assert ds.label_ids == [1]
    assert ds.variables[1].kind == "label"


def test_empty_file_is_rejected(write_csv):
    with pytest.raises(DataValidationError, match="empty"):
        load_csv(write_csv("e.csv", ""), [])
    with pytest.raises(DataValidationError, match="empty"):
        load_csv(write_csv("h.csv", "x,y\n"), [])


def test_ragged_rows_are_rejected(write_csv):
    with pytest.raises(DataValidationError, match="ragged"):
        load_csv(write_csv("r.csv", "x,y\n1,2\n3,4,5\n"), [])


def test_unknown_label_is_rejected(write_csv):
    with pytest.raises(DataValidationError, match="unknown label"):
        load_csv(write_csv("u.csv", _rows("x,y", (1, 0))), ["z"])


def test_apply_schema_reuses_learned_edges(write_csv):
    train = load_csv(write_csv("train.csv", _rows("x,y", *[(v, v % 2) for v in range(1, 9)])), ["y"])
    schema = discretize(train, 4).variables
    test = load_csv(write_csv("test.csv", _rows("x,y", (0, 1), (100, 0), (4.5, 1))), ["y"])

    ds = apply_schema(test, schema)
    assert ds.column(0).tolist() == [0, 3, 1]
    assert ds.schema_hash() == Dataset(schema, ds.data).schema_hash()


def test_apply_schema_rejects_unknown_states(write_csv):
    train = load_csv(write_csv("train.csv", _rows("colour,y", ("red", 0), ("blue", 1))), ["y"])
    schema = discretize(train, 4).variables

    test = load_csv(write_csv("test.csv", _rows("colour,y", ("green", 0))), ["y"])
    with pytest.raises(SchemaMismatchError, match="unknown state"):
        apply_schema(test, schema)

    missing_column = load_csv(write_csv("other.csv", _rows("shade,y", ("red", 0))), ["y"])
    with pytest.raises(SchemaMismatchError, match="absent"):
        apply_schema(missing_column, schema)


def test_stratified_split_keeps_class_proportions(write_csv):
    rows = [(i, int(i < 10)) for i in range(100)]
    table = load_csv(write_csv("s.csv", _rows("x,y", *rows)), ["y"])

    train, test = stratified_split(table, "y", test_fraction=0.2, seed=1)
    assert test.n_rows == 20
    assert train.n_rows == 80
    assert (test.frame["y"] == "1").sum() == 2
    assert set(train.frame["x"]).isdisjoint(test.frame["x"])


def test_dataset_rejects_out_of_range_codes():
    with pytest.raises(DataValidationError):
        Dataset([Variable(name="x", cardinality=2)], np.array([[0], [2]]))


def test_dataset_json_is_column_major():
    ds = Dataset.from_codes({"x": [0, 1, 1], "y": [1, 0, 0]}, labels=["y"])
    restored = Dataset.from_json(ds.to_json())

    assert np.array_equal(restored.data, ds.data)
    assert restored.variables == ds.variables
    assert '"data": [[0, 1, 1], [1, 0, 0]]' in ds.to_json()


def test_dataset_is_read_only():
    ds = Dataset.from_codes({"x": [0, 1]})
    with pytest.raises(ValueError):
        ds.data[0, 0] = 1


def test_skewed_binary_column_keeps_both_states(write_csv):
    rows = [(int(i >= 4), int(i >= 4)) for i in range(40)]
    ds = discretize(load_csv(write_csv("d.csv", _rows("x,defect", *rows)), ["defect"]), n_bins=4)

    assert quantile_edges(np.array([0.0] * 4 + [1.0] * 36), 4) == [0.0]
    assert [v.cardinality for v in ds.variables] == [2, 2]
    counts = np.bincount(ds.column(1))
    p = counts / counts.sum()
    assert -(p * np.log(p)).sum() > 0


def test_boolean_label_keeps_false_before_true(write_csv):
    rows = [("true", 1), ("false", 0), ("true", 1)]
    text = load_csv(write_csv("t.csv", _rows("defect,x", *rows)), ["defect"])
    declared = load_csv(write_csv("b.csv", _rows("defect,x", *rows)), ["defect"], boolean_columns=["defect"])

    as_text = discretize(text, 4).variables[0]
    assert as_text.states == ["true", "false"]
    assert as_text.positive_state == 0
    as_boolean = discretize(declared, 4)
    assert as_boolean.variables[0].states == ["false", "true"]
    assert as_boolean.variables[0].positive_state == 1
    assert as_boolean.column(0).tolist() == [1, 0, 1]


def test_positive_state_of_numeric_label_is_top_bin():
    assert Variable(name="y", cardinality=2, bin_edges=[0.0]).positive_state == 1
    assert Variable(name="y", cardinality=2, states=["no", "yes"]).positive_state == 1
    assert Variable(name="y", cardinality=2, states=["1", "0"]).positive_state == 0


def test_stratified_split_on_a_declared_boolean(write_csv):
    rows = [(i, "True" if i % 5 == 0 else "false") for i in range(50)]
    table = load_csv(write_csv("s.csv", _rows("x,defect", *rows)), ["defect"], boolean_columns=["defect"])

    train, test = stratified_split(table, "defect", test_fraction=0.2, seed=0)
    assert test.n_rows == 10
    assert (test.frame["defect"] == "True").sum() == 2


def test_binning_preserves_order_and_fills_every_bin():
    rng = np.random.default_rng(11)
    for _ in range(100):
        values = np.round(rng.gamma(2.0, 3.0, int(rng.integers(5, 300))), int(rng.integers(0, 3)))
        n_bins = int(rng.integers(2, 9))
        edges = quantile_edges(values, n_bins)
        codes = np.searchsorted(np.asarray(edges), values, side="left")

        order = np.argsort(values, kind="stable")
        assert np.all(np.diff(codes[order]) >= 0)
        assert len(edges) <= n_bins - 1
        assert np.bincount(codes, minlength=len(edges) + 1).min() > 0
        bounds = np.concatenate([[-np.inf], edges, [np.inf]])
        assert np.all(values > bounds[codes])
        assert np.all(values <= bounds[codes + 1])
        if np.unique(values).size >= 2:
            assert len(edges) >= 1


def test_rediscretizing_with_the_learned_schema_is_bit_identical(write_csv):
    rng = np.random.default_rng(2)
    rows = [(f"{v:.3f}", c, int(y)) for v, c, y in
            zip(rng.normal(size=200), rng.choice(["a", "b", "c"], 200), rng.integers(0, 2, 200))]
    rows[7] = ("", rows[7][1], rows[7][2])
    table = load_csv(write_csv("r.csv", _rows("x,cat,y", *rows)), ["y"])

    learned = discretize(table, 5)
    again = apply_schema(table, learned.variables)
    assert again.data.tobytes() == learned.data.tobytes()
    assert again.to_json() == learned.to_json()

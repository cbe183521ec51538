import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_dataset, t1
from rnimpute.dataset import (
    INTEGER,
    NOMINAL,
    REAL,
    Attribute,
    Dataset,
    DatasetError,
    DatasetParseError,
    inject_mcar,
    parse_csv_with_schema,
    parse_keel_dat,
    read_dataset,
    stratified_kfold,
    summarize,
    write_keel_dat,
)

HEADER = """@relation toy
@attribute x real [0.0, 10.0]
@attribute n integer [0, 5]
@attribute class {Y,N}
@inputs x, n
@outputs class
@data
"""


def test_parse_missing_cell():
    ds = parse_keel_dat(HEADER + "1.0,?,Y\n")
    assert ds.records == ((1.0, None, "Y"),)
    assert ds.missing_count() == 1


def test_parse_kinds_and_whitespace():
    ds = parse_keel_dat(HEADER + "  2.5 ,  3 , N \n")
    x, n, c = ds.records[0]
    assert x == 2.5 and isinstance(x, float)
    assert n == 3 and isinstance(n, int)
    assert c == "N"
    assert ds.attributes[1].low == 0 and ds.attributes[1].high == 5


def test_parse_arity_error_reports_line():
    with pytest.raises(DatasetParseError) as exc:
        parse_keel_dat(HEADER + "1.0,2,Y\n1.0,N\n")
    assert exc.value.line == 9
    assert ":9:" in str(exc.value)


def test_parse_unknown_level():
    with pytest.raises(DatasetParseError, match="not among the levels"):
        parse_keel_dat(HEADER + "1.0,2,maybe\n")


def test_parse_malformed_header():
    with pytest.raises(DatasetParseError) as exc:
        parse_keel_dat("@relation r\n@attribute x complex\n@attribute c {a}\n@data\n")
    assert exc.value.line == 2


def test_parse_out_of_range():
    with pytest.raises(DatasetParseError, match="above declared maximum"):
        parse_keel_dat(HEADER + "11.0,2,Y\n")


def test_parse_nominal_without_space_and_no_io_lines():
    ds = parse_keel_dat("@relation r\n@attribute color{red, blue}\n@attribute Class {p,q}\n@data\nred,p\n")
    assert ds.attributes[0].levels == ("red", "blue")
    assert ds.class_attribute.role == "class"


def test_missing_class_label_rejected():
    with pytest.raises(DatasetParseError, match="class label"):
        parse_keel_dat(HEADER + "1.0,2,?\n")


def test_class_must_be_last_output():
    text = HEADER.replace("@outputs class", "@outputs x") + "1.0,2,Y\n"
    with pytest.raises(DatasetParseError):
        parse_keel_dat(text)


def test_schema_invariants():
    with pytest.raises(DatasetError):
        Attribute("a", NOMINAL, ("x", "x"))
    with pytest.raises(DatasetError):
        Attribute("a", NOMINAL, ("x", ""))
    with pytest.raises(DatasetError):
        Dataset((Attribute("a", REAL), Attribute("c", REAL, role="class")), ())
    with pytest.raises(DatasetError):
        Dataset((Attribute("c", NOMINAL, ("y",), role="class"), Attribute("a", REAL)), ())


def test_iris_fixture(iris_path):
    s = summarize(read_dataset(iris_path))
    assert s.attr_counts == (4, 0, 0)
    assert s.example_count == 150
    assert s.class_count == 3


# --- CSV


SCHEMA = [Attribute("x", REAL), Attribute("class", NOMINAL, ("Y", "N"), role="class")]


def test_csv_empty_field_is_missing():
    ds = parse_csv_with_schema("x,class\n,Y\n", SCHEMA)
    assert ds.records == ((None, "Y"),)


def test_csv_observed_value():
    ds = parse_csv_with_schema("x,class\n1.5,Y\n?,N\n", SCHEMA)
    assert ds.records == ((1.5, "Y"), (None, "N"))


def test_csv_numeric_error():
    with pytest.raises(DatasetParseError, match="cannot parse"):
        parse_csv_with_schema("x,class\nabc,Y\n", SCHEMA)


def test_csv_header_mismatch():
    with pytest.raises(DatasetParseError, match="header"):
        parse_csv_with_schema("y,class\n1,Y\n", SCHEMA)


def test_csv_decimal_point_only():
    with pytest.raises(DatasetParseError):
        parse_csv_with_schema('x,class\n"1,5",Y\n', SCHEMA)


# --- writer


def test_write_marks_missing():
    text = write_keel_dat(t1(mask=[(2, 1)]))
    assert "a, ?, Y" in text


def test_write_empty_dataset():
    ds = Dataset(t1().attributes, (), "empty")
    text = write_keel_dat(ds)
    assert text.rstrip().endswith("@data")
    assert parse_keel_dat(text).records == ()


def test_round_trip_fixtures(iris_path):
    for ds in (t1(), t1(mask=[(0, 0), (3, 1)]), read_dataset(iris_path)):
        back = parse_keel_dat(write_keel_dat(ds))
        assert back == ds


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_random(seed):
    ds = random_dataset(np.random.default_rng(seed), 1, 25, missing=0.3)
    back = parse_keel_dat(write_keel_dat(ds))
    assert back.records == ds.records
    for a, b in zip(back.records, ds.records):
        for u, v in zip(a, b):
            assert type(u) is type(v)


# --- summary


def test_summary_complete_toy():
    assert summarize(t1()).mv_percent == 0


def test_summary_hand_count():
    attrs = (Attribute("p", REAL), Attribute("q", INTEGER), Attribute("c", NOMINAL, ("y",), role="class"))
    rows = [[1.0, 1, "y"] for _ in range(10)]
    rows[0][0] = rows[4][1] = rows[4][0] = None
    s = summarize(Dataset(attrs, rows))
    assert s.mv_percent == pytest.approx(15.0, abs=1e-9)
    assert s.mv_example_percent == pytest.approx(20.0, abs=1e-9)
    assert s.as_dict()["mv_percent"] == 15.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_summary_matches_cell_scan(seed):
    ds = random_dataset(np.random.default_rng(seed), 1, 30, missing=0.25)
    s = summarize(ds)
    cells = [v for r in ds.records for v in r[:-1]]
    expected = 100.0 * sum(v is None for v in cells) / len(cells)
    assert abs(s.mv_percent - expected) <= 1e-9


def test_summary_json_columns(iris_path):
    d = summarize(read_dataset(iris_path)).as_dict()
    assert set(d) == {"attributes", "examples", "classes", "mv_percent", "mv_example_percent"}
    json.dumps(d)


# --- MCAR


def test_inject_rate_zero_identity(iris_path):
    ds = read_dataset(iris_path)
    assert inject_mcar(ds, 0.0, 3) == ds


def test_inject_rate_one(iris_path):
    ds = read_dataset(iris_path)
    out = inject_mcar(ds, 1.0, 3)
    assert all(v is None for r in out.records for v in r[:-1])
    assert out.labels == ds.labels


def test_inject_rejects_bad_rate():
    with pytest.raises(ValueError):
        inject_mcar(t1(), 1.5, 0)


def test_inject_concentration():
    attrs = tuple(Attribute(f"x{j}", REAL) for j in range(10)) + (Attribute("c", NOMINAL, ("y",), role="class"),)
    ds = Dataset(attrs, [[float(j) for j in range(10)] + ["y"] for _ in range(100)])
    for seed in range(20):
        frac = inject_mcar(ds, 0.3, seed).missing_count() / 1000
        assert 0.25 <= frac <= 0.35


def test_inject_deterministic_and_monotone():
    ds = random_dataset(np.random.default_rng(5), 20, 30, missing=0.2)
    a, b = inject_mcar(ds, 0.4, 11), inject_mcar(ds, 0.4, 11)
    assert a == b
    for r0, r1 in zip(ds.records, a.records):
        assert r0[-1] == r1[-1]
        for u, v in zip(r0, r1):
            assert v is None or v == u
            if u is None:
                assert v is None


# --- folds


def _balanced(n_per_class, levels):
    attrs = (Attribute("x", REAL), Attribute("c", NOMINAL, levels, role="class"))
    rows = [(float(i), lv) for lv, n in zip(levels, n_per_class) for i in range(n)]
    return Dataset(attrs, rows)


def test_kfold_exact_division():
    ds = _balanced([50, 50], ("A", "B"))
    plan = stratified_kfold(ds, 10, 1)
    for f in range(10):
        counts = Counter(ds.labels[i] for i in plan.test_indices(f))
        assert counts == {"A": 5, "B": 5}


def test_kfold_too_few_records():
    with pytest.raises(ValueError):
        stratified_kfold(_balanced([9], ("A",)), 10, 1)


def test_kfold_iris(iris_path):
    ds = read_dataset(iris_path)
    plan = stratified_kfold(ds, 10, 7)
    for f in range(10):
        assert Counter(ds.labels[i] for i in plan.test_indices(f)) == Counter(
            {"Iris-setosa": 5, "Iris-versicolor": 5, "Iris-virginica": 5}
        )


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 25), min_size=1, max_size=4), st.integers(2, 10), st.integers(0, 1000))
def test_kfold_stratification(sizes, k, seed):
    levels = tuple(f"c{q}" for q in range(len(sizes)))
    ds = _balanced(sizes, levels)
    if k > ds.n_records:
        with pytest.raises(ValueError):
            stratified_kfold(ds, k, seed)
        return
    plan = stratified_kfold(ds, k, seed)
    assert sorted(Counter(plan.assignment)) == list(range(k))
    for lv, n in zip(levels, sizes):
        per_fold = [sum(1 for i in plan.test_indices(f) if ds.labels[i] == lv) for f in range(k)]
        assert max(per_fold) - min(per_fold) <= 1
        assert sum(1 for c in per_fold if c) == min(n, k)
    assert plan == stratified_kfold(ds, k, seed)

"""Random dataset generators and brute-force oracles shared by the tests."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np

from rnimpute.dataset import INTEGER, NOMINAL, REAL, Attribute, Dataset

T1_ROWS = [
    ("a", 1.0, "Y"),
    ("a", 2.0, "Y"),
    ("a", 3.0, "Y"),
    ("b", 4.0, "Y"),
    ("b", 10.0, "Y"),
    ("a", 1.5, "N"),
    ("b", 2.5, "N"),
    ("b", 3.5, "N"),
]
T1_ATTRS = (
    Attribute("c", NOMINAL, ("a", "b")),
    Attribute("x", REAL),
    Attribute("class", NOMINAL, ("Y", "N"), role="class"),
)


def t1(mask=()):
    rows = [list(r) for r in T1_ROWS]
    for i, j in mask:
        rows[i][j] = None
    return Dataset(T1_ATTRS, rows, "t1")


def random_schema(rng: np.random.Generator):
    kinds = [REAL] * int(rng.integers(0, 4)) + [INTEGER] * int(rng.integers(0, 3)) + [NOMINAL] * int(rng.integers(0, 3))
    if not kinds:
        kinds = [REAL]
    rng.shuffle(kinds)
    attrs = []
    for j, kind in enumerate(kinds):
        if kind == NOMINAL:
            n_lv = int(rng.integers(2, 5))
            attrs.append(Attribute(f"a{j}", NOMINAL, tuple(f"v{q}" for q in range(n_lv))))
        elif kind == INTEGER:
            attrs.append(Attribute(f"a{j}", INTEGER, low=0, high=9))
        else:
            attrs.append(Attribute(f"a{j}", REAL))
    n_cls = int(rng.integers(2, 4))
    attrs.append(Attribute("class", NOMINAL, tuple(f"c{q}" for q in range(n_cls)), role="class"))
    return tuple(attrs)


def random_value(rng, attr):
    if attr.kind == NOMINAL:
        return attr.levels[int(rng.integers(len(attr.levels)))]
    if attr.kind == INTEGER:
        return int(rng.integers(0, 10))
    return float(np.round(rng.normal(0, 3), 3))


def random_dataset(rng: np.random.Generator, min_records=10, max_records=30, missing=0.2) -> Dataset:
    """Mixed-type dataset with MCAR holes; every class and every input column
    keeps at least one observed value."""
    attrs = random_schema(rng)
    m = int(rng.integers(min_records, max_records + 1))
    cls = attrs[-1]
    labels = [cls.levels[q % len(cls.levels)] for q in range(m)]
    rng.shuffle(labels)
    rows = []
    for i in range(m):
        row = [random_value(rng, a) for a in attrs[:-1]]
        row = [None if rng.random() < missing else v for v in row]
        rows.append(row + [labels[i]])
    for j in range(len(attrs) - 1):
        if all(r[j] is None for r in rows):
            rows[int(rng.integers(m))][j] = random_value(rng, attrs[j])
    return Dataset(attrs, rows, "random")


# ---------------------------------------------------------------------------
# brute-force KNN oracle


def knn_oracle(ds: Dataset, k: int) -> Dataset:
    """All-pairs KNN imputation written with plain loops."""
    inputs = list(range(ds.n_attributes - 1))
    lo, span = {}, {}
    for j in inputs:
        if ds.attributes[j].kind == NOMINAL:
            continue
        vals = [float(r[j]) for r in ds.records if r[j] is not None]
        lo[j] = min(vals) if vals else 0.0
        hi = max(vals) if vals else 0.0
        span[j] = hi - lo[j] if hi > lo[j] else 1.0
    num = [j for j in inputs if ds.attributes[j].kind != NOMINAL]
    nom = [j for j in inputs if ds.attributes[j].kind == NOMINAL]

    def dist(a, b):
        total, shared = 0.0, 0
        for j in num:
            if a[j] is not None and b[j] is not None:
                d = (float(a[j]) - lo[j]) / span[j] - (float(b[j]) - lo[j]) / span[j]
                total += d * d
                shared += 1
        mism = 0
        for j in nom:
            if a[j] is not None and b[j] is not None:
                mism += a[j] != b[j]
                shared += 1
        return math.sqrt(total + mism), shared

    out = [list(r) for r in ds.records]
    for i, r in enumerate(ds.records):
        for j in inputs:
            if r[j] is not None:
                continue
            ranked = []
            for q, s in enumerate(ds.records):
                if q == i or s[j] is None:
                    continue
                d, shared = dist(r, s)
                if shared:
                    ranked.append((d, q))
            ranked.sort()
            attr = ds.attributes[j]
            pool = [ds.records[q][j] for _, q in ranked[:k]]
            if not pool:
                pool = [s[j] for s in ds.records if s[j] is not None]
            if attr.kind == NOMINAL:
                c = Counter(pool)
                out[i][j] = max(attr.levels, key=lambda lv: (c[lv], -attr.levels.index(lv)))
            else:
                mean = math.fsum(float(v) for v in pool) / len(pool)
                out[i][j] = int(math.floor(mean + 0.5)) if attr.kind == INTEGER else mean
    return ds.with_records(out)


# ---------------------------------------------------------------------------
# brute-force Wilcoxon oracle


def midranks(values):
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    pos = 0
    while pos < len(order):
        end = pos
        while end + 1 < len(order) and values[order[end + 1]] == values[order[pos]]:
            end += 1
        r = Fraction(pos + 1 + end + 1, 2)
        for q in range(pos, end + 1):
            ranks[order[q]] = r
        pos = end + 1
    return ranks


def wilcoxon_bruteforce(a, b):
    """(w_plus, w_minus, p) by enumerating every sign assignment."""
    diffs = [round(x - y, 9) for x, y in zip(a, b)]
    diffs = [d for d in diffs if d != 0]
    if not diffs:
        return 0, 0, 1.0
    ranks = midranks([abs(d) for d in diffs])
    w_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)
    w_minus = sum(r for r, d in zip(ranks, diffs) if d < 0)
    stat = min(w_plus, w_minus)
    total = sum(ranks)
    hits = 0
    n_assign = 0
    for signs in itertools.product((0, 1), repeat=len(ranks)):
        wp = sum(r for r, s in zip(ranks, signs) if s)
        n_assign += 1
        if min(wp, total - wp) <= stat:
            hits += 1
    return w_plus, w_minus, hits / n_assign


# ---------------------------------------------------------------------------
# entropy oracle


def gain_ratio_oracle(values, labels, threshold=None):
    """Information gain ratio of splitting ``labels`` by nominal ``values``
    or by ``value <= threshold``."""

    def h(seq):
        n = len(seq)
        return -sum((c / n) * math.log(c / n, 2) for c in Counter(seq).values())

    keys = values if threshold is None else [v <= threshold for v in values]
    groups = {}
    for key, y in zip(keys, labels):
        groups.setdefault(key, []).append(y)
    n = len(labels)
    gain = h(labels) - sum(len(g) / n * h(g) for g in groups.values())
    split = -sum(len(g) / n * math.log(len(g) / n, 2) for g in groups.values())
    return gain, split, gain / split

"""Tabular dataset model, Keel DAT / CSV I/O, summaries, MCAR injection and
stratified fold assignment.

Missing cells are represented by ``None``. Observed cells hold ``str`` for
nominal attributes, ``int`` for integer attributes and ``float`` for real
attributes. The class attribute is always the last one and always nominal.
"""

from __future__ import annotations

import csv
import io
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

NOMINAL = "nominal"
INTEGER = "integer"
REAL = "real"

MISSING_TOKEN = "?"

Value = Optional[object]
Row = tuple


class DatasetError(ValueError):
    """Raised when a dataset violates its schema."""


class DatasetParseError(DatasetError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.message = message
        self.line = line
        self.source = source
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.source or "<input>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        return f"{where}: {self.message}"


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str
    levels: tuple[str, ...] = ()
    low: float | int | None = None
    high: float | int | None = None
    role: str = "input"

    def __post_init__(self):
        if self.kind not in (NOMINAL, INTEGER, REAL):
            raise DatasetError(f"unknown attribute kind {self.kind!r}")
        if self.kind == NOMINAL:
            if any(not lv for lv in self.levels):
                raise DatasetError(f"attribute {self.name}: empty level label")
            if len(set(self.levels)) != len(self.levels):
                raise DatasetError(f"attribute {self.name}: duplicate level labels")
        if self.role not in ("input", "class"):
            raise DatasetError(f"unknown role {self.role!r}")

    @property
    def is_nominal(self) -> bool:
        return self.kind == NOMINAL

    @property
    def is_numeric(self) -> bool:
        return self.kind != NOMINAL

    def parse_value(self, token: str) -> Value:
        """Convert a raw token into an observed cell value (``None`` for ``?``)."""
        token = token.strip()
        if token == MISSING_TOKEN:
            return None
        if self.kind == NOMINAL:
            if token not in self.levels:
                raise DatasetError(f"value {token!r} not among the levels of {self.name}")
            return token
        try:
            number = float(token)
        except ValueError:
            raise DatasetError(f"cannot parse {token!r} as {self.kind} for {self.name}") from None
        if self.kind == INTEGER:
            if not number.is_integer():
                raise DatasetError(f"value {token!r} of {self.name} is not an integer")
            value: float | int = int(number)
        else:
            value = number
        self.check_range(value)
        return value

    def check_range(self, value) -> None:
        if self.low is not None and value < self.low:
            raise DatasetError(f"value {value} of {self.name} below declared minimum {self.low}")
        if self.high is not None and value > self.high:
            raise DatasetError(f"value {value} of {self.name} above declared maximum {self.high}")

    def format_value(self, value: Value) -> str:
        if value is None:
            return MISSING_TOKEN
        if self.kind == REAL:
            return repr(float(value))
        return str(value)


@dataclass(frozen=True)
class Dataset:
    attributes: tuple[Attribute, ...]
    records: tuple[Row, ...]
    relation: str = "dataset"

    def __post_init__(self):
        attrs = tuple(self.attributes)
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "records", tuple(tuple(r) for r in self.records))
        if not attrs:
            raise DatasetError("schema has no attributes")
        roles = [a.role for a in attrs]
        if roles.count("class") != 1 or roles[-1] != "class":
            raise DatasetError("exactly one class attribute is required and it must be last")
        if not attrs[-1].is_nominal:
            raise DatasetError("the class attribute must be nominal")
        n = len(attrs)
        for i, row in enumerate(self.records):
            if len(row) != n:
                raise DatasetError(f"record {i} has {len(row)} cells, expected {n}")
            if row[-1] is None:
                raise DatasetError(f"record {i} has a missing class label")

    @property
    def n_records(self) -> int:
        return len(self.records)

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def input_indices(self) -> range:
        return range(len(self.attributes) - 1)

    @property
    def class_attribute(self) -> Attribute:
        return self.attributes[-1]

    @property
    def labels(self) -> list[str]:
        return [r[-1] for r in self.records]

    def column(self, j: int) -> list[Value]:
        return [r[j] for r in self.records]

    def missing_count(self) -> int:
        return sum(1 for r in self.records for v in r[:-1] if v is None)

    def is_complete(self) -> bool:
        return self.missing_count() == 0

    def with_records(self, records: Iterable[Sequence]) -> "Dataset":
        return Dataset(self.attributes, tuple(tuple(r) for r in records), self.relation)

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return self.with_records(self.records[i] for i in indices)

    def validate_values(self) -> None:
        """Check every observed cell against its attribute declaration."""
        for i, row in enumerate(self.records):
            for attr, v in zip(self.attributes, row):
                if v is None:
                    continue
                if attr.is_nominal:
                    if v not in attr.levels:
                        raise DatasetError(f"record {i}: {v!r} not a level of {attr.name}")
                else:
                    attr.check_range(v)


# ---------------------------------------------------------------------------
# Keel DAT


_ATTR_RE = re.compile(
    r"^@attribute\s+(?P<name>'[^']*'|\"[^\"]*\"|[^\s{]+)\s*(?P<rest>.*)$", re.IGNORECASE
)
_RANGE_RE = re.compile(r"^\[\s*(?P<lo>[^,\]]+)\s*,\s*(?P<hi>[^\]]+)\s*\]$")


def _strip_quotes(name: str) -> str:
    if len(name) >= 2 and name[0] == name[-1] and name[0] in "'\"":
        return name[1:-1]
    return name


def _split_names(text: str) -> list[str]:
    return [_strip_quotes(t.strip()) for t in text.split(",") if t.strip()]


def _parse_attribute(line: str, lineno: int, source: str | None) -> Attribute:
    m = _ATTR_RE.match(line)
    if not m:
        raise DatasetParseError(f"malformed attribute declaration: {line!r}", lineno, source)
    name = _strip_quotes(m.group("name"))
    rest = m.group("rest").strip()
    # nominal: "{a, b}" possibly directly after the name with no space
    if rest.startswith("{"):
        if not rest.endswith("}"):
            raise DatasetParseError(f"unterminated level list for {name}", lineno, source)
        levels = tuple(t.strip() for t in rest[1:-1].split(","))
        try:
            return Attribute(name, NOMINAL, levels)
        except DatasetError as exc:
            raise DatasetParseError(str(exc), lineno, source) from None
    parts = rest.split(None, 1)
    if not parts:
        raise DatasetParseError(f"attribute {name} has no type", lineno, source)
    kind = parts[0].lower()
    if kind not in (INTEGER, REAL):
        raise DatasetParseError(f"unknown attribute type {parts[0]!r} for {name}", lineno, source)
    low = high = None
    if len(parts) > 1:
        rm = _RANGE_RE.match(parts[1].strip())
        if not rm:
            raise DatasetParseError(f"malformed range for {name}: {parts[1]!r}", lineno, source)
        try:
            low, high = float(rm.group("lo")), float(rm.group("hi"))
        except ValueError:
            raise DatasetParseError(f"malformed range for {name}: {parts[1]!r}", lineno, source) from None
        if kind == INTEGER:
            low, high = int(low), int(high)
    return Attribute(name, kind, (), low, high)


def parse_keel_dat(text: str | io.TextIOBase, source: str | None = None) -> Dataset:
    """Parse a Keel ``.dat`` file.

    ``@inputs``/``@outputs`` are optional; without ``@outputs`` the last
    attribute is taken as the class. ``?`` marks a missing cell.
    """
    if not isinstance(text, str):
        text = text.read()
    relation = "dataset"
    attributes: list[Attribute] = []
    output_names: list[str] | None = None
    rows: list[tuple] = []
    in_data = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if in_data:
            tokens = [t.strip() for t in line.split(",")]
            if len(tokens) != len(attributes):
                raise DatasetParseError(
                    f"row has {len(tokens)} values, expected {len(attributes)}", lineno, source
                )
            try:
                row = tuple(a.parse_value(t) for a, t in zip(attributes, tokens))
            except DatasetError as exc:
                raise DatasetParseError(str(exc), lineno, source) from None
            if row[-1] is None:
                raise DatasetParseError("class label is missing", lineno, source)
            rows.append(row)
            continue
        if not line.startswith("@"):
            raise DatasetParseError(f"unexpected header line: {line!r}", lineno, source)
        keyword = line.split(None, 1)[0].lower()
        # Keel writes "@attribute name{a,b}" without a space in some files
        if keyword.startswith("@attribute"):
            attributes.append(_parse_attribute(line, lineno, source))
        elif keyword == "@relation":
            parts = line.split(None, 1)
            relation = _strip_quotes(parts[1].strip()) if len(parts) > 1 else relation
        elif keyword in ("@inputs", "@input"):
            pass  # inputs are every attribute except the output
        elif keyword in ("@outputs", "@output"):
            parts = line.split(None, 1)
            output_names = _split_names(parts[1]) if len(parts) > 1 else []
        elif keyword == "@data":
            if not attributes:
                raise DatasetParseError("@data before any @attribute", lineno, source)
            if output_names is not None:
                if len(output_names) != 1 or output_names[0] != attributes[-1].name:
                    raise DatasetParseError(
                        "the single output attribute must be the last declared attribute",
                        lineno,
                        source,
                    )
            cls = attributes[-1]
            if not cls.is_nominal:
                raise DatasetParseError(f"class attribute {cls.name} must be nominal", lineno, source)
            attributes[-1] = Attribute(cls.name, cls.kind, cls.levels, role="class")
            in_data = True
        else:
            raise DatasetParseError(f"unknown header keyword {keyword!r}", lineno, source)

    if not in_data:
        raise DatasetParseError("no @data section", None, source)
    return Dataset(tuple(attributes), tuple(rows), relation)


def write_keel_dat(ds: Dataset) -> str:
    out = [f"@relation {ds.relation}"]
    for a in ds.attributes:
        if a.is_nominal:
            out.append(f"@attribute {a.name} {{{', '.join(a.levels)}}}")
        else:
            decl = f"@attribute {a.name} {a.kind}"
            if a.low is not None and a.high is not None:
                decl += f" [{a.format_value(a.low)}, {a.format_value(a.high)}]"
            out.append(decl)
    out.append("@inputs " + ", ".join(a.name for a in ds.attributes[:-1]))
    out.append("@outputs " + ds.class_attribute.name)
    out.append("@data")
    for row in ds.records:
        out.append(", ".join(a.format_value(v) for a, v in zip(ds.attributes, row)))
    return "\n".join(out) + "\n"


def read_dataset(path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return parse_keel_dat(fh.read(), source=str(path))


def write_dataset(ds: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_keel_dat(ds))


# ---------------------------------------------------------------------------
# CSV


def parse_csv_with_schema(text: str | io.TextIOBase, schema: Sequence[Attribute],
                          relation: str = "dataset") -> Dataset:
    """Parse CSV with a header row. Empty fields and ``?`` are missing."""
    if isinstance(text, str):
        text = io.StringIO(text)
    schema = list(schema)
    if schema and schema[-1].role != "class":
        last = schema[-1]
        schema[-1] = Attribute(last.name, last.kind, last.levels, last.low, last.high, "class")
    reader = csv.reader(text)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DatasetParseError("empty CSV input", 1) from None
    names = [a.name for a in schema]
    if header != names:
        raise DatasetParseError(f"header {header} does not match schema {names}", 1)
    rows = []
    for lineno, fields in enumerate(reader, start=2):
        if not fields or all(not f.strip() for f in fields):
            continue
        if len(fields) != len(schema):
            raise DatasetParseError(f"row has {len(fields)} values, expected {len(schema)}", lineno)
        try:
            row = tuple(
                None if not f.strip() else a.parse_value(f) for a, f in zip(schema, fields)
            )
        except DatasetError as exc:
            raise DatasetParseError(str(exc), lineno) from None
        if row[-1] is None:
            raise DatasetParseError("class label is missing", lineno)
        rows.append(row)
    return Dataset(tuple(schema), tuple(rows), relation)


# ---------------------------------------------------------------------------
# summaries


@dataclass(frozen=True)
class DatasetSummary:
    attr_counts: tuple[int, int, int]  # (real, integer, nominal) inputs
    example_count: int
    class_count: int
    mv_percent: float
    mv_example_percent: float

    def as_dict(self) -> dict:
        r, i, n = self.attr_counts
        return {
            "attributes": {"real": r, "integer": i, "nominal": n, "total": r + i + n},
            "examples": self.example_count,
            "classes": self.class_count,
            "mv_percent": round(self.mv_percent, 2),
            "mv_example_percent": round(self.mv_example_percent, 2),
        }


def summarize(ds: Dataset) -> DatasetSummary:
    inputs = ds.attributes[:-1]
    counts = Counter(a.kind for a in inputs)
    m = ds.n_records
    n_in = len(inputs)
    missing = ds.missing_count()
    incomplete = sum(1 for r in ds.records if any(v is None for v in r[:-1]))
    cells = m * n_in
    return DatasetSummary(
        attr_counts=(counts[REAL], counts[INTEGER], counts[NOMINAL]),
        example_count=m,
        class_count=len(set(ds.labels)),
        mv_percent=100.0 * missing / cells if cells else 0.0,
        mv_example_percent=100.0 * incomplete / m if m else 0.0,
    )


# ---------------------------------------------------------------------------
# missingness injection


def inject_mcar(ds: Dataset, rate: float, seed: int) -> Dataset:
    """Mask each observed input cell independently with probability ``rate``.

    Uses numpy's PCG64 generator (``numpy.random.default_rng(seed)``), one
    uniform draw per input cell in row-major order, so the result depends only
    on ``(ds, rate, seed)``.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must lie in [0, 1], got {rate}")
    n_in = ds.n_attributes - 1
    rng = np.random.default_rng(seed)
    draws = rng.random((ds.n_records, n_in))
    out = []
    for row, u in zip(ds.records, draws):
        cells = list(row)
        for j in range(n_in):
            if cells[j] is not None and u[j] < rate:
                cells[j] = None
        out.append(tuple(cells))
    return ds.with_records(out)


# ---------------------------------------------------------------------------
# stratified k-fold


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: tuple[int, ...]
    seed: int

    def test_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f == fold]

    def train_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f != fold]

    def splits(self):
        for f in range(self.k):
            yield self.train_indices(f), self.test_indices(f)


def stratified_kfold(ds: Dataset, k: int, seed: int) -> FoldPlan:
    """Assign records to ``k`` folds preserving class proportions.

    Records of each class (in declared level order) are shuffled with
    ``numpy.random.default_rng(seed)`` and dealt round-robin; the deal
    continues from the fold where the previous class stopped, which keeps
    overall fold sizes within one of each other as well.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > ds.n_records:
        raise ValueError(f"k={k} exceeds the record count {ds.n_records}")
    rng = np.random.default_rng(seed)
    assignment = [-1] * ds.n_records
    labels = ds.labels
    fold = 0
    for level in ds.class_attribute.levels:
        members = [i for i, c in enumerate(labels) if c == level]
        if not members:
            continue
        for i in rng.permutation(members):
            assignment[int(i)] = fold
            fold = (fold + 1) % k
    return FoldPlan(k, tuple(assignment), seed)

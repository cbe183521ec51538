"""Index-based imputation (RNI-II).

Each pair of records gets a per-column index in [0, 1] built from
class-conditional value frequencies (nominal and integer columns) or
class-conditional tail masses (real columns). The record distance is the mean
index over the columns both records observe. For a missing cell, candidate
donors are ranked by distance, those whose median/MAD score is <= 0 are kept,
and the cell is filled with their mode (nominal) or inverse-distance weighted
mean (numeric).

Indices are used as distances: smaller means closer.
"""

from __future__ import annotations

import bisect
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._util import EmptyColumnError, column_fill_value, finalize_numeric, mode_by_level
from .dataset import REAL, Dataset


class UninformativeColumn(ValueError):
    """The column has no observed values to compare against; skip it."""


class IncomparablePair(ValueError):
    """Two records share no observed input column."""


class NoDonors(ValueError):
    pass


# ---------------------------------------------------------------------------
# column statistics


def skewness(values: Sequence[float]) -> float:
    """Population skewness g1 = m3 / m2**1.5 (0 for constant or empty input)."""
    n = len(values)
    if n == 0:
        return 0.0
    mean = math.fsum(values) / n
    m2 = math.fsum((v - mean) ** 2 for v in values) / n
    if m2 <= 0.0:
        return 0.0
    m3 = math.fsum((v - mean) ** 3 for v in values) / n
    return m3 / m2 ** 1.5


@dataclass(frozen=True)
class ValueFrequencyTable:
    class_label: str
    column: int
    counts: dict

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def count(self, value) -> int:
        return self.counts.get(value, 0)

    @classmethod
    def from_dataset(cls, ds: Dataset, class_label: str, column: int) -> "ValueFrequencyTable":
        counts = Counter(r[column] for r in ds.records if r[-1] == class_label and r[column] is not None)
        return cls(class_label, column, dict(counts))


@dataclass(frozen=True)
class NumericColumnStats:
    class_label: str
    column: int
    values: tuple[float, ...]
    skewness: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(sorted(self.values)))
        object.__setattr__(self, "skewness", skewness(self.values))

    @property
    def size(self) -> int:
        return len(self.values)

    def tail_count(self, x: float) -> int:
        """Number of values on the skew side of ``x``, ``x`` included:
        lower tail when skewness >= 0, upper tail otherwise."""
        if self.skewness >= 0:
            return bisect.bisect_right(self.values, x)
        return len(self.values) - bisect.bisect_left(self.values, x)

    @classmethod
    def from_dataset(cls, ds: Dataset, class_label: str, column: int) -> "NumericColumnStats":
        vals = [float(r[column]) for r in ds.records if r[-1] == class_label and r[column] is not None]
        return cls(class_label, column, tuple(vals))


@dataclass(frozen=True)
class CrossClassFrequency:
    column: int
    beta_rl: int
    delta_sl: int


# ---------------------------------------------------------------------------
# the four index cases


def index_same_class_nominal(table: ValueFrequencyTable, v_i, v_k, same_record: bool = False) -> float:
    if same_record:
        return 0.0
    gamma = table.total
    if gamma == 0:
        raise UninformativeColumn(f"no observed values in column {table.column}")
    return min(table.count(v_i) / gamma, table.count(v_k) / gamma)


def index_same_class_numeric(stats: NumericColumnStats, x_i: float, x_k: float,
                             same_record: bool = False) -> float:
    if same_record:
        return 0.0
    gamma = stats.size
    if gamma == 0:
        raise UninformativeColumn(f"no observed values in column {stats.column}")
    return min(stats.tail_count(x_i) / gamma, stats.tail_count(x_k) / gamma)


def index_cross_class_nominal(freq: CrossClassFrequency, same_record: bool = False) -> float:
    if same_record:
        return 0.0
    total = freq.beta_rl + freq.delta_sl
    if total == 0:
        raise UninformativeColumn(f"no observed values in column {freq.column}")
    return max(freq.beta_rl / total, freq.delta_sl / total)


def index_cross_class_numeric(stats_i: NumericColumnStats, stats_k: NumericColumnStats,
                              x_i: float, x_k: float, same_record: bool = False) -> float:
    """``stats_i`` holds the column values of record i's class, ``stats_k``
    those of record k's class."""
    if same_record:
        return 0.0
    lam = stats_i.size + stats_k.size
    if lam == 0:
        raise UninformativeColumn(f"no observed values in column {stats_i.column}")
    return min(stats_i.tail_count(x_i) / lam, stats_k.tail_count(x_k) / lam)


# ---------------------------------------------------------------------------
# record distances


@dataclass(frozen=True)
class PairIndex:
    record_i: int
    record_k: int
    per_column: dict
    distance: float


class IndexModel:
    """Class-conditional column statistics of one dataset.

    ``pair_index`` evaluates one pair through the scalar index functions;
    ``distance_row`` computes the distances from one record to all others in
    a vectorized pass. Both give the same numbers.
    """

    def __init__(self, ds: Dataset):
        self.ds = ds
        self.labels = ds.labels
        self.class_levels = [c for c in ds.class_attribute.levels if c in set(self.labels)]
        self.columns = list(ds.input_indices)
        self.uses_tails = {j: ds.attributes[j].kind == REAL for j in self.columns}
        self.freq: dict[tuple[str, int], ValueFrequencyTable] = {}
        self.stats: dict[tuple[str, int], NumericColumnStats] = {}
        for c in self.class_levels:
            for j in self.columns:
                if self.uses_tails[j]:
                    self.stats[c, j] = NumericColumnStats.from_dataset(ds, c, j)
                else:
                    self.freq[c, j] = ValueFrequencyTable.from_dataset(ds, c, j)
        self._build_arrays()

    def _build_arrays(self):
        m, n = self.ds.n_records, len(self.columns)
        own = np.full((m, n), np.nan)
        gam = np.zeros((m, n))
        for i, row in enumerate(self.ds.records):
            c = row[-1]
            for j in self.columns:
                v = row[j]
                if self.uses_tails[j]:
                    st = self.stats[c, j]
                    gam[i, j] = st.size
                    if v is not None:
                        own[i, j] = st.tail_count(float(v))
                else:
                    tb = self.freq[c, j]
                    gam[i, j] = tb.total
                    if v is not None:
                        own[i, j] = tb.count(v)
        self._own = own
        self._gam = gam
        self._observed = ~np.isnan(own)
        codes = {c: n for n, c in enumerate(self.class_levels)}
        self._class_code = np.array([codes[c] for c in self.labels], dtype=int)

    def column_index(self, i: int, k: int, j: int) -> float:
        ri, rk = self.ds.records[i], self.ds.records[k]
        ci, ck = ri[-1], rk[-1]
        same = i == k
        if self.uses_tails[j]:
            if ci == ck:
                return index_same_class_numeric(self.stats[ci, j], float(ri[j]), float(rk[j]), same)
            return index_cross_class_numeric(self.stats[ci, j], self.stats[ck, j],
                                             float(ri[j]), float(rk[j]), same)
        if ci == ck:
            return index_same_class_nominal(self.freq[ci, j], ri[j], rk[j], same)
        freq = CrossClassFrequency(j, self.freq[ci, j].count(ri[j]), self.freq[ck, j].count(rk[j]))
        return index_cross_class_nominal(freq, same)

    def pair_index(self, i: int, k: int) -> PairIndex:
        if i == k:
            return PairIndex(i, k, {j: 0.0 for j in self.columns if self.ds.records[i][j] is not None}, 0.0)
        ri, rk = self.ds.records[i], self.ds.records[k]
        per_column = {}
        for j in self.columns:
            if ri[j] is None or rk[j] is None:
                continue
            try:
                per_column[j] = self.column_index(i, k, j)
            except UninformativeColumn:
                continue
        if not per_column:
            raise IncomparablePair(f"records {i} and {k} share no observed column")
        distance = math.fsum(per_column.values()) / len(per_column)
        return PairIndex(i, k, per_column, distance)

    def distance_row(self, i: int) -> np.ndarray:
        """Distances from record ``i`` to every record (NaN where incomparable)."""
        own, gam, obs = self._own, self._gam, self._observed
        same = self._class_code == self._class_code[i]
        total = np.zeros(own.shape[0])
        count = np.zeros(own.shape[0])
        with np.errstate(invalid="ignore", divide="ignore"):
            for j in self.columns:
                if not obs[i, j]:
                    continue
                mask = obs[:, j]
                a, b = own[i, j], own[:, j]
                lo = np.minimum(a, b)
                if self.uses_tails[j]:
                    idx = np.where(same, lo / gam[i, j], lo / (gam[i, j] + gam[:, j]))
                else:
                    idx = np.where(same, lo / gam[i, j], np.maximum(a, b) / (a + b))
                total[mask] += idx[mask]
                count[mask] += 1
            dist = total / count
        dist[count == 0] = np.nan
        dist[i] = 0.0
        return dist


def record_distance(ds: Dataset, i: int, k: int) -> PairIndex:
    return IndexModel(ds).pair_index(i, k)


# ---------------------------------------------------------------------------
# donor selection and fill rules


@dataclass(frozen=True)
class NeighborSelection:
    target_record: int | None
    candidates: tuple[int, ...]
    distances: tuple[float, ...]
    median: float
    mad: float
    alpha_scores: tuple[float, ...]
    donors: tuple[int, ...]

    @property
    def donor_distances(self) -> tuple[float, ...]:
        return tuple(d for d, a in zip(self.distances, self.alpha_scores) if a <= 0)


def select_donors(distances: Sequence[tuple[int, float]], target: int | None = None) -> NeighborSelection:
    """Keep the candidates whose score (d - median) / MAD is <= 0.

    With MAD = 0 the score is taken as its limit: -inf below the median,
    0 at it and +inf above, so the rule still keeps d <= median.
    """
    if not distances:
        raise NoDonors("no candidate donors")
    ranked = sorted(distances, key=lambda t: (t[1], t[0]))
    idx = tuple(int(k) for k, _ in ranked)
    dist = tuple(float(d) for _, d in ranked)
    med = statistics.median(dist)
    mad = statistics.median(abs(d - med) for d in dist)
    if mad > 0:
        alpha = tuple((d - med) / mad for d in dist)
    else:
        alpha = tuple(0.0 if d == med else math.copysign(math.inf, d - med) for d in dist)
    donors = tuple(k for k, a in zip(idx, alpha) if a <= 0)
    return NeighborSelection(target, idx, dist, med, mad, alpha, donors)


@dataclass(frozen=True)
class ImputationWeights:
    donor_distances: tuple[float, ...]
    donor_values: tuple[float, ...]

    def __post_init__(self):
        if len(self.donor_distances) != len(self.donor_values):
            raise ValueError("one distance per donor value is required")
        if not self.donor_distances:
            raise NoDonors("no donors to weight")

    @property
    def gamma(self) -> int:
        return len(self.donor_distances)

    @property
    def reciprocals(self) -> tuple[float, ...]:
        return tuple(math.inf if d == 0 else 1.0 / d for d in self.donor_distances)

    @property
    def weights(self) -> tuple[float, ...]:
        zero = [d == 0 for d in self.donor_distances]
        if any(zero):
            # exact matches share all the weight
            z = sum(zero)
            return tuple(1.0 / z if flag else 0.0 for flag in zero)
        # scaled by the smallest distance so tiny distances cannot overflow
        d_min = min(self.donor_distances)
        beta = [d_min / d for d in self.donor_distances]
        s = math.fsum(beta)
        return tuple(b / s for b in beta)


def impute_numeric(weights: ImputationWeights) -> float:
    return math.fsum(w * v for w, v in zip(weights.weights, weights.donor_values))


def impute_nominal(donor_values: Sequence[str], levels: Sequence[str]) -> str:
    if not donor_values:
        raise NoDonors("no donor values")
    return mode_by_level(donor_values, levels)


# ---------------------------------------------------------------------------
# whole-dataset imputation


@dataclass(frozen=True)
class CellImputation:
    record: int
    column: int
    value: object
    selection: NeighborSelection | None  # None when the column fallback was used


def _impute_cell(model: IndexModel, i: int, j: int, row_dist: np.ndarray) -> CellImputation:
    ds = model.ds
    attr = ds.attributes[j]
    cands = [
        (k, float(row_dist[k]))
        for k in range(ds.n_records)
        if k != i and ds.records[k][j] is not None and not np.isnan(row_dist[k])
    ]
    if not cands:
        return CellImputation(i, j, column_fill_value(ds, j), None)
    sel = select_donors(cands, target=i)
    donor_vals = [ds.records[k][j] for k in sel.donors]
    if attr.is_nominal:
        value = impute_nominal(donor_vals, attr.levels)
    else:
        w = ImputationWeights(sel.donor_distances, tuple(float(v) for v in donor_vals))
        value = finalize_numeric(attr, impute_numeric(w))
    return CellImputation(i, j, value, sel)


def impute_cells_rnii(ds: Dataset) -> list[CellImputation]:
    """Imputations for every missing input cell, in (record, column) order.

    Donors and statistics come from the observed cells of ``ds`` only; cells
    filled earlier in the pass are never used as donors.
    """
    for j in ds.input_indices:
        if all(r[j] is None for r in ds.records) and ds.n_records:
            raise EmptyColumnError(f"column {ds.attributes[j].name} has no observed values")
    model = IndexModel(ds)
    out = []
    for i, row in enumerate(ds.records):
        missing = [j for j in ds.input_indices if row[j] is None]
        if not missing:
            continue
        dist = model.distance_row(i)
        for j in missing:
            out.append(_impute_cell(model, i, j, dist))
    return out


def impute_dataset_rnii(ds: Dataset, seed: int | None = None) -> Dataset:
    """Fill every missing input cell of ``ds``. ``seed`` is accepted for
    interface uniformity; the procedure is deterministic."""
    cells = impute_cells_rnii(ds)
    if not cells:
        return ds
    rows = [list(r) for r in ds.records]
    for c in cells:
        rows[c.record][c.column] = c.value
    return ds.with_records(rows)

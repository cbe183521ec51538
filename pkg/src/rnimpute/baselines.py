"""Reference imputers: mean/mode, KNNI, WKNNI, KMI and FKMI.

All distance-based imputers share one mixed-type metric: numeric columns are
min-max scaled to [0, 1] over their observed values and contribute squared
differences; nominal columns contribute a 0/1 mismatch. The class column is
never used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._util import EmptyColumnError, column_fill_value, finalize_numeric, mode_by_level
from .dataset import Dataset


@dataclass(frozen=True)
class KnnParams:
    k: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class KMeansParams:
    k: int = 10
    max_iterations: int = 100
    convergence_epsilon: float = 100.0

    def __post_init__(self):
        if self.k < 1 or self.max_iterations < 1 or self.convergence_epsilon < 0:
            raise ValueError("invalid k-means parameters")


@dataclass(frozen=True)
class FkmParams:
    k: int = 3
    m: float = 1.5
    max_iterations: int = 100
    convergence_epsilon: float = 100.0

    def __post_init__(self):
        if self.k < 1 or self.max_iterations < 1 or self.convergence_epsilon < 0:
            raise ValueError("invalid fuzzy k-means parameters")
        if not self.m > 1:
            raise ValueError("fuzzifier m must be > 1")


# ---------------------------------------------------------------------------
# encoding


@dataclass
class Encoded:
    """Input columns split into scaled numerics (NaN = missing) and nominal
    level codes (-1 = missing)."""

    num_cols: list[int]
    nom_cols: list[int]
    num: np.ndarray
    nom: np.ndarray
    lo: np.ndarray
    span: np.ndarray

    @classmethod
    def from_dataset(cls, ds: Dataset) -> "Encoded":
        num_cols = [j for j in ds.input_indices if ds.attributes[j].is_numeric]
        nom_cols = [j for j in ds.input_indices if ds.attributes[j].is_nominal]
        m = ds.n_records
        num = np.array(
            [[np.nan if r[j] is None else float(r[j]) for j in num_cols] for r in ds.records],
            dtype=float,
        ).reshape(m, len(num_cols))
        codes = []
        for r in ds.records:
            codes.append([-1 if r[j] is None else ds.attributes[j].levels.index(r[j]) for j in nom_cols])
        nom = np.array(codes, dtype=int).reshape(m, len(nom_cols))
        lo = np.zeros(len(num_cols))
        span = np.ones(len(num_cols))
        for c in range(len(num_cols)):
            col = num[:, c][~np.isnan(num[:, c])]
            if col.size:
                lo[c] = col.min()
                if col.max() > col.min():
                    span[c] = col.max() - col.min()
        return cls(num_cols, nom_cols, (num - lo) / span, nom, lo, span)

    def filled(self, ds: Dataset) -> tuple[np.ndarray, np.ndarray]:
        """Copies with column mean / mode standing in for missing cells."""
        num = self.num.copy()
        for c in range(num.shape[1]):
            col = num[:, c]
            obs = ~np.isnan(col)
            col[~obs] = col[obs].mean() if obs.any() else 0.0
        nom = self.nom.copy()
        for c, j in enumerate(self.nom_cols):
            col = nom[:, c]
            obs = col >= 0
            if obs.any():
                counts = np.bincount(col[obs], minlength=len(ds.attributes[j].levels))
                col[~obs] = int(np.argmax(counts))
            else:
                col[~obs] = 0
        return num, nom


def pairwise_sq_distance(enc: Encoded, i: int) -> tuple[np.ndarray, np.ndarray]:
    """Squared mixed distance from record ``i`` to all records over mutually
    observed columns, and the number of such columns."""
    m = enc.num.shape[0]
    total = np.zeros(m)
    shared = np.zeros(m, dtype=int)
    if enc.num.shape[1]:
        diff = enc.num - enc.num[i]
        ok = ~np.isnan(diff)
        total += np.where(ok, diff * diff, 0.0).sum(axis=1)
        shared += ok.sum(axis=1)
    if enc.nom.shape[1]:
        ok = (enc.nom >= 0) & (enc.nom[i] >= 0)
        total += (ok & (enc.nom != enc.nom[i])).sum(axis=1)
        shared += ok.sum(axis=1)
    return total, shared


# ---------------------------------------------------------------------------
# mean / mode


def impute_mean_mode(ds: Dataset) -> Dataset:
    fills = {}
    rows = []
    for r in ds.records:
        row = list(r)
        for j in ds.input_indices:
            if row[j] is None:
                if j not in fills:
                    fills[j] = column_fill_value(ds, j)
                row[j] = fills[j]
        rows.append(row)
    return ds.with_records(rows) if fills else ds


# ---------------------------------------------------------------------------
# k nearest neighbours


def _donor_estimate(ds: Dataset, j: int, donors: list[int], dists: np.ndarray | None):
    """Mean/mode of donor values; inverse-distance weighted when ``dists`` is given."""
    attr = ds.attributes[j]
    vals = [ds.records[k][j] for k in donors]
    if dists is not None:
        zero = dists == 0
        if zero.any():
            vals = [v for v, z in zip(vals, zero) if z]
            dists = None
    if attr.is_nominal:
        weights = None if dists is None else (1.0 / dists).tolist()
        return mode_by_level(vals, attr.levels, weights)
    x = np.array(vals, dtype=float)
    if dists is None:
        est = math.fsum(x) / len(x)
    else:
        w = 1.0 / dists
        est = math.fsum(w * x) / math.fsum(w)
    return finalize_numeric(attr, est)


def nearest_donors(ds: Dataset, enc: Encoded, i: int, j: int, k: int,
                   sq: np.ndarray, shared: np.ndarray) -> tuple[list[int], np.ndarray]:
    """The ``k`` closest records observed in column ``j`` (ties to lower index)."""
    cand = np.array(
        [q for q in range(ds.n_records) if q != i and shared[q] > 0 and ds.records[q][j] is not None],
        dtype=int,
    )
    if cand.size == 0:
        return [], np.empty(0)
    d = np.sqrt(sq[cand])
    order = np.lexsort((cand, d))[:k]
    return cand[order].tolist(), d[order]


def _impute_knn(ds: Dataset, p: KnnParams, weighted: bool) -> Dataset:
    enc = Encoded.from_dataset(ds)
    rows = [list(r) for r in ds.records]
    changed = False
    for i, r in enumerate(ds.records):
        missing = [j for j in ds.input_indices if r[j] is None]
        if not missing:
            continue
        sq, shared = pairwise_sq_distance(enc, i)
        for j in missing:
            donors, d = nearest_donors(ds, enc, i, j, p.k, sq, shared)
            if donors:
                rows[i][j] = _donor_estimate(ds, j, donors, d if weighted else None)
            else:
                rows[i][j] = column_fill_value(ds, j)
            changed = True
    return ds.with_records(rows) if changed else ds


def impute_knn(ds: Dataset, p: KnnParams = KnnParams()) -> Dataset:
    return _impute_knn(ds, p, weighted=False)


def impute_wknn(ds: Dataset, p: KnnParams = KnnParams()) -> Dataset:
    return _impute_knn(ds, p, weighted=True)


# ---------------------------------------------------------------------------
# hard k-means


def _check_k(ds: Dataset, k: int):
    if k > ds.n_records:
        raise ValueError(f"k={k} exceeds the record count {ds.n_records}")


def _sq_to_centroids(num, nom, cnum, cnom) -> np.ndarray:
    d = np.zeros((num.shape[0], cnum.shape[0]))
    if num.shape[1]:
        d += ((num[:, None, :] - cnum[None, :, :]) ** 2).sum(axis=2)
    if nom.shape[1]:
        d += (nom[:, None, :] != cnom[None, :, :]).sum(axis=2)
    return d


def _weighted_modes(nom: np.ndarray, w: np.ndarray, n_levels: list[int]) -> np.ndarray:
    """Per-column level with the largest total weight (ties to the lowest code)."""
    out = np.zeros(nom.shape[1], dtype=int)
    for c in range(nom.shape[1]):
        tally = np.bincount(nom[:, c], weights=w, minlength=n_levels[c])
        out[c] = int(np.argmax(tally))
    return out


def _centroid_shift(cnum, cnom, new_num, new_nom) -> float:
    sq = ((cnum - new_num) ** 2).sum(axis=1) + (cnom != new_nom).sum(axis=1)
    return float(np.sqrt(sq).sum())


@dataclass
class ClusterResult:
    labels: np.ndarray
    centroids_num: np.ndarray
    centroids_nom: np.ndarray
    costs: list[float] = field(default_factory=list)
    iterations: int = 0


def kmeans_cluster(num: np.ndarray, nom: np.ndarray, n_levels: list[int],
                   p: KMeansParams, seed: int) -> ClusterResult:
    """Lloyd iterations on the mixed embedding. ``costs`` holds the total
    within-cluster squared dissimilarity after every assignment step."""
    m = num.shape[0]
    rng = np.random.default_rng(seed)
    start = rng.choice(m, size=p.k, replace=False)
    cnum, cnom = num[start].copy(), nom[start].copy()
    costs = []
    it = 0
    for it in range(1, p.max_iterations + 1):
        d = _sq_to_centroids(num, nom, cnum, cnom)
        labels = np.argmin(d, axis=1)
        costs.append(float(d[np.arange(m), labels].sum()))
        new_num, new_nom = cnum.copy(), cnom.copy()
        for c in range(p.k):
            members = labels == c
            if not members.any():
                continue
            new_num[c] = num[members].mean(axis=0)
            new_nom[c] = _weighted_modes(nom[members], np.ones(members.sum()), n_levels)
        shift = _centroid_shift(cnum, cnom, new_num, new_nom)
        cnum, cnom = new_num, new_nom
        if shift < p.convergence_epsilon or shift == 0:
            break
    d = _sq_to_centroids(num, nom, cnum, cnom)
    labels = np.argmin(d, axis=1)
    costs.append(float(d[np.arange(m), labels].sum()))
    return ClusterResult(labels, cnum, cnom, costs, it)


def _n_levels(ds: Dataset, enc: Encoded) -> list[int]:
    return [len(ds.attributes[j].levels) for j in enc.nom_cols]


def impute_kmeans(ds: Dataset, p: KMeansParams = KMeansParams(), seed: int = 0) -> Dataset:
    _check_k(ds, p.k)
    if ds.is_complete():
        return ds
    enc = Encoded.from_dataset(ds)
    num, nom = enc.filled(ds)
    res = kmeans_cluster(num, nom, _n_levels(ds, enc), p, seed)
    rows = [list(r) for r in ds.records]
    for i, r in enumerate(ds.records):
        for j in ds.input_indices:
            if r[j] is not None:
                continue
            mates = [q for q in np.flatnonzero(res.labels == res.labels[i])
                     if q != i and ds.records[q][j] is not None]
            rows[i][j] = _donor_estimate(ds, j, mates, None) if mates else column_fill_value(ds, j)
    return ds.with_records(rows)


# ---------------------------------------------------------------------------
# fuzzy k-means


def memberships(d2: np.ndarray, m: float) -> np.ndarray:
    """Fuzzy c-means membership degrees from squared distances.

    A record that coincides with one or more centroids is shared equally
    among those centroids.
    """
    u = np.zeros_like(d2)
    zero = d2 <= 0
    hit = zero.any(axis=1)
    if hit.any():
        u[hit] = zero[hit] / zero[hit].sum(axis=1, keepdims=True)
    rest = ~hit
    if rest.any():
        inv = d2[rest] ** (-1.0 / (m - 1.0))
        u[rest] = inv / inv.sum(axis=1, keepdims=True)
    return u


@dataclass
class FuzzyResult:
    u: np.ndarray
    centroids_num: np.ndarray
    centroids_nom: np.ndarray
    objectives: list[float] = field(default_factory=list)
    history: list[np.ndarray] = field(default_factory=list)
    iterations: int = 0


def fuzzy_cluster(num: np.ndarray, nom: np.ndarray, n_levels: list[int],
                  p: FkmParams, seed: int) -> FuzzyResult:
    """Alternating membership/centroid updates. ``objectives`` records
    sum(u**m * d2) after every membership update."""
    m_rec = num.shape[0]
    rng = np.random.default_rng(seed)
    start = rng.choice(m_rec, size=p.k, replace=False)
    cnum, cnom = num[start].copy(), nom[start].copy()
    objectives, history = [], []
    it = 0
    for it in range(1, p.max_iterations + 1):
        d2 = _sq_to_centroids(num, nom, cnum, cnom)
        u = memberships(d2, p.m)
        history.append(u)
        objectives.append(float((u ** p.m * d2).sum()))
        um = u ** p.m
        new_num, new_nom = cnum.copy(), cnom.copy()
        for c in range(p.k):
            w = um[:, c]
            if w.sum() <= 0:
                continue
            new_num[c] = (w[:, None] * num).sum(axis=0) / w.sum()
            new_nom[c] = _weighted_modes(nom, w, n_levels)
        shift = _centroid_shift(cnum, cnom, new_num, new_nom)
        cnum, cnom = new_num, new_nom
        if shift < p.convergence_epsilon or shift == 0:
            break
    d2 = _sq_to_centroids(num, nom, cnum, cnom)
    u = memberships(d2, p.m)
    history.append(u)
    objectives.append(float((u ** p.m * d2).sum()))
    return FuzzyResult(u, cnum, cnom, objectives, history, it)


def impute_fuzzy_kmeans(ds: Dataset, p: FkmParams = FkmParams(), seed: int = 0) -> Dataset:
    _check_k(ds, p.k)
    if ds.is_complete():
        return ds
    for j in ds.input_indices:
        if all(r[j] is None for r in ds.records):
            raise EmptyColumnError(f"column {ds.attributes[j].name} has no observed values")
    enc = Encoded.from_dataset(ds)
    num, nom = enc.filled(ds)
    res = fuzzy_cluster(num, nom, _n_levels(ds, enc), p, seed)
    # rescaling can drift by an ulp past the observed extremes
    col_lo = [min(v for v in ds.column(j) if v is not None) for j in enc.num_cols]
    col_hi = [max(v for v in ds.column(j) if v is not None) for j in enc.num_cols]
    num_pos = {j: c for c, j in enumerate(enc.num_cols)}
    nom_pos = {j: c for c, j in enumerate(enc.nom_cols)}
    rows = [list(r) for r in ds.records]
    for i, r in enumerate(ds.records):
        for j in ds.input_indices:
            if r[j] is not None:
                continue
            attr = ds.attributes[j]
            if attr.is_nominal:
                best = int(np.argmax(res.u[i]))
                rows[i][j] = attr.levels[res.centroids_nom[best, nom_pos[j]]]
            else:
                c = num_pos[j]
                scaled = float(np.dot(res.u[i], res.centroids_num[:, c]))
                value = float(np.clip(enc.lo[c] + scaled * enc.span[c], col_lo[c], col_hi[c]))
                rows[i][j] = finalize_numeric(attr, value)
    return ds.with_records(rows)

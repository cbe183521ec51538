"""Exact Wilcoxon signed-rank test for paired accuracy vectors."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

# differences are rounded before ranking so that equal table deltas tie exactly
DIFF_DECIMALS = 9


@dataclass(frozen=True)
class WilcoxonReport:
    n_effective: int
    w_plus: float
    w_minus: float
    statistic: float
    critical_value: float | None
    p_value: float
    alpha: float = 0.05
    label: str | None = None

    @property
    def significant(self) -> bool:
        return self.p_value <= self.alpha

    def as_dict(self) -> dict:
        return asdict(self)


def signed_ranks(diffs: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Mid-ranks of ``|d|`` and signs, zero differences dropped."""
    d = np.round(np.asarray(diffs, dtype=float), DIFF_DECIMALS)
    d = d[d != 0]
    return rankdata(np.abs(d), method="average"), np.sign(d)


def null_counts(doubled_ranks: Sequence[int]) -> np.ndarray:
    """``counts[s]`` = number of sign assignments whose doubled positive rank
    sum equals ``s``."""
    total = int(sum(doubled_ranks))
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled_ranks:
        r = int(r)
        if r:
            counts[r:] = counts[r:] + counts[:-r].copy()
        else:
            counts *= 2
    return counts


def _tail_probability(counts: np.ndarray, stat2: int) -> float:
    total = len(counts) - 1
    s = np.arange(total + 1)
    mask = np.minimum(s, total - s) <= stat2
    return float(counts[mask].sum() / counts.sum())


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float], alpha: float = 0.05,
                         label: str | None = None) -> WilcoxonReport:
    """Two-sided exact test of ``a - b``.

    The statistic is ``min(W+, W-)``; the p-value is the exact probability,
    under random signs, of a statistic at least as extreme. The critical
    value is the largest statistic value whose tail probability is still
    <= ``alpha`` (``None`` when no value reaches significance).
    """
    if len(a) != len(b):
        raise ValueError("paired vectors must have equal length")
    if len(a) == 0:
        raise ValueError("paired vectors must not be empty")
    ranks, signs = signed_ranks(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    n = len(ranks)
    if n == 0:
        return WilcoxonReport(0, 0.0, 0.0, 0.0, None, 1.0, alpha, label)
    w_plus = float(ranks[signs > 0].sum())
    w_minus = float(ranks[signs < 0].sum())
    stat = min(w_plus, w_minus)
    doubled = np.rint(2 * ranks).astype(int)
    counts = null_counts(doubled)
    p = min(1.0, _tail_probability(counts, int(round(2 * stat))))

    total = len(counts) - 1
    support = sorted({min(s, total - s) for s in np.flatnonzero(counts)})
    critical = None
    for c in support:
        if _tail_probability(counts, c) <= alpha:
            critical = c / 2.0
        else:
            break
    return WilcoxonReport(n, w_plus, w_minus, stat, critical, p, alpha, label)


def compare_all(table: Mapping[str, Mapping[str, float]], reference: str,
                alpha: float = 0.05) -> list[WilcoxonReport]:
    """Reference-vs-method reports for every other method, in table order.

    ``table`` maps method -> dataset -> accuracy.
    """
    if reference not in table:
        raise KeyError(f"reference method {reference!r} not in table")
    datasets = list(table[reference])
    reports = []
    for method, row in table.items():
        if set(row) != set(datasets):
            raise ValueError(f"method {method!r} covers different datasets than {reference!r}")
        if method == reference:
            continue
        ref = [table[reference][d] for d in datasets]
        other = [row[d] for d in datasets]
        reports.append(wilcoxon_signed_rank(ref, other, alpha, label=method))
    return reports


def format_table(reports: Sequence[WilcoxonReport]) -> str:
    lines = [f"{'Method':<10}{'Rank Sums (+, -)':<20}{'Statistic':<12}{'Critical':<10}{'p-value':<8}"]
    for r in reports:
        crit = "-" if r.critical_value is None else f"{r.critical_value:.1f}"
        sums = f"{r.w_plus:.1f}, {r.w_minus:.1f}"
        lines.append(f"{str(r.label):<10}{sums:<20}{r.statistic:<12.1f}{crit:<10}{r.p_value:.2f}")
    return "\n".join(lines) + "\n"


def reports_to_json(reports: Sequence[WilcoxonReport], reference: str) -> str:
    return json.dumps({"reference": reference, "reports": [r.as_dict() for r in reports]},
                      indent=2) + "\n"

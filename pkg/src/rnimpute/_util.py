from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Sequence

from .dataset import INTEGER, Attribute, Dataset, DatasetError


class EmptyColumnError(DatasetError):
    pass


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def finalize_numeric(attr: Attribute, value: float):
    """Cast an estimate to the attribute's storage type (integers round half-up
    and are clamped to the declared bounds)."""
    if attr.kind == INTEGER:
        v = round_half_up(value)
        if attr.low is not None:
            v = max(v, int(attr.low))
        if attr.high is not None:
            v = min(v, int(attr.high))
        return v
    return float(value)


def mode_by_level(values: Iterable[str], levels: Sequence[str], weights: Iterable[float] | None = None) -> str:
    """Most frequent (or heaviest) level; ties go to the earliest declared level."""
    tally: Counter = Counter()
    if weights is None:
        tally.update(values)
    else:
        for v, w in zip(values, weights):
            tally[v] += w
    if not tally:
        raise ValueError("no values to take a mode of")
    order = {lv: i for i, lv in enumerate(levels)}
    return max(tally, key=lambda lv: (tally[lv], -order.get(lv, len(order))))


def observed(values: Iterable) -> list:
    return [v for v in values if v is not None]


def column_fill_value(ds: Dataset, j: int):
    """Mean (numeric) or mode (nominal) of the observed cells of column ``j``."""
    attr = ds.attributes[j]
    vals = observed(ds.column(j))
    if not vals:
        raise EmptyColumnError(f"column {attr.name} has no observed values")
    if attr.is_nominal:
        return mode_by_level(vals, attr.levels)
    return finalize_numeric(attr, math.fsum(vals) / len(vals))

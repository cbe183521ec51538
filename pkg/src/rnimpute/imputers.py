"""Name-based imputer registry.

Every imputer is called as ``imputer(ds, seed)`` and returns a completed
dataset. New methods plug in through :func:`register_imputer`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, Callable

from . import baselines, rni
from .dataset import Dataset


class UnknownImputer(KeyError):
    def __str__(self) -> str:
        return f"unknown imputer {self.args[0]!r} (known: {', '.join(sorted(REGISTRY))})"


@dataclass(frozen=True)
class ImputerEntry:
    name: str
    func: Callable[[Dataset, Any, int], Dataset]
    params_type: type | None = None


@dataclass(frozen=True)
class Imputer:
    name: str
    func: Callable[[Dataset, Any, int], Dataset]
    params: Any = None

    def __call__(self, ds: Dataset, seed: int = 0) -> Dataset:
        return self.func(ds, self.params, seed)

    def params_dict(self) -> dict:
        return dataclasses.asdict(self.params) if self.params is not None else {}


REGISTRY: dict[str, ImputerEntry] = {}


def register_imputer(name: str, func: Callable[[Dataset, Any, int], Dataset],
                     params_type: type | None = None) -> None:
    REGISTRY[name] = ImputerEntry(name, func, params_type)


def _coerce(params_type: type, overrides: dict) -> Any:
    fields = {f.name: f for f in dataclasses.fields(params_type)}
    kwargs = {}
    for key, raw in overrides.items():
        if key not in fields:
            raise ValueError(f"{params_type.__name__} has no parameter {key!r}")
        default = fields[key].default
        kwargs[key] = type(default)(raw) if isinstance(raw, str) else raw
    return params_type(**kwargs)


def make_imputer(name: str, overrides: dict | None = None) -> Imputer:
    try:
        entry = REGISTRY[name]
    except KeyError:
        raise UnknownImputer(name) from None
    overrides = overrides or {}
    if entry.params_type is None:
        if overrides:
            raise ValueError(f"imputer {name!r} takes no parameters")
        return Imputer(name, entry.func)
    return Imputer(name, entry.func, _coerce(entry.params_type, overrides))


register_imputer("mean", lambda ds, p, seed: baselines.impute_mean_mode(ds))
register_imputer("knni", lambda ds, p, seed: baselines.impute_knn(ds, p), baselines.KnnParams)
register_imputer("wknni", lambda ds, p, seed: baselines.impute_wknn(ds, p), baselines.KnnParams)
register_imputer("kmi", lambda ds, p, seed: baselines.impute_kmeans(ds, p, seed), baselines.KMeansParams)
register_imputer("fkmi", lambda ds, p, seed: baselines.impute_fuzzy_kmeans(ds, p, seed), baselines.FkmParams)
register_imputer("rnii", lambda ds, p, seed: rni.impute_dataset_rnii(ds))

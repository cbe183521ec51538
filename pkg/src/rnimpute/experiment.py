"""Cross-validated evaluation of an imputer through C4.5 accuracy."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import c45
from .dataset import Dataset, stratified_kfold
from .imputers import Imputer, make_imputer

TEST_INDEPENDENT = "independent"
TEST_WITH_TRAIN = "train"


class FoldError(RuntimeError):
    def __init__(self, fold: int, cause: Exception):
        self.fold = fold
        super().__init__(f"fold {fold}: {type(cause).__name__}: {cause}")


@dataclass
class ExperimentResult:
    dataset: str
    imputer: str
    params: dict
    seed: int
    fold_accuracies: list[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return sum(self.fold_accuracies) / len(self.fold_accuracies)

    def as_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "imputer": self.imputer,
            "params": self.params,
            "seed": self.seed,
            "fold_accuracies": self.fold_accuracies,
            "mean": self.mean,
        }


def _impute_test(imputer: Imputer, train_done: Dataset, test: Dataset, seed: int, mode: str) -> Dataset:
    if test.is_complete():
        return test
    if mode == TEST_INDEPENDENT:
        return imputer(test, seed)
    if mode == TEST_WITH_TRAIN:
        # completed training rows act as extra donors for the test rows
        joined = test.with_records(train_done.records + test.records)
        done = imputer(joined, seed)
        return test.with_records(done.records[train_done.n_records:])
    raise ValueError(f"unknown test imputation mode {mode!r}")


def run_experiment(ds: Dataset, imputer: Imputer | str, k: int = 10, seed: int = 1,
                   name: str | None = None, test_mode: str = TEST_INDEPENDENT,
                   min_leaf: int = 2, cf: float = 0.25) -> ExperimentResult:
    """Stratified k-fold: impute train and test partitions, fit a pruned
    tree on the training part and score it on the test part.

    Fold ``f`` passes ``seed + f`` to seeded imputers.
    """
    if isinstance(imputer, str):
        imputer = make_imputer(imputer)
    plan = stratified_kfold(ds, k, seed)
    result = ExperimentResult(name or ds.relation, imputer.name, imputer.params_dict(), seed)
    for fold, (train_idx, test_idx) in enumerate(plan.splits()):
        try:
            train = imputer(ds.subset(train_idx), seed + fold)
            test = _impute_test(imputer, train, ds.subset(test_idx), seed + fold, test_mode)
            tree = c45.build_tree(train, min_leaf=min_leaf, cf=cf)
            result.fold_accuracies.append(c45.accuracy(tree, test))
        except Exception as exc:
            raise FoldError(fold, exc) from exc
    return result

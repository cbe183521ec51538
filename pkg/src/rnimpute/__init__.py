"""Missing-value imputation (index-based RNI-II plus baselines) and the
C4.5 / Wilcoxon evaluation pipeline around it."""

from .dataset import (
    Attribute,
    Dataset,
    DatasetError,
    DatasetParseError,
    DatasetSummary,
    FoldPlan,
    inject_mcar,
    parse_csv_with_schema,
    parse_keel_dat,
    read_dataset,
    stratified_kfold,
    summarize,
    write_keel_dat,
)
from .experiment import ExperimentResult, run_experiment
from .imputers import REGISTRY, make_imputer, register_imputer
from .rni import impute_dataset_rnii
from .wilcoxon import WilcoxonReport, compare_all, wilcoxon_signed_rank

__version__ = "0.1.0"

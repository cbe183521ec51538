"""Command-line entry point: ``rnimpute {impute,inject,summarize,evaluate,compare}``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import DatasetError, inject_mcar, read_dataset, summarize, write_dataset
from .experiment import TEST_INDEPENDENT, TEST_WITH_TRAIN, FoldError, run_experiment
from .imputers import UnknownImputer, make_imputer
from .wilcoxon import compare_all, format_table, reports_to_json


class CliError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"rnimpute: {msg}", file=sys.stderr)


def _split_list(value) -> list[str]:
    if value is None:
        return []
    if isinstance(value, str):
        value = [value]
    return [p.strip() for v in value for p in v.split(",") if p.strip()]


def parse_param_overrides(items) -> dict[str, dict[str, str]]:
    """``["knni.k=5", "fkmi.m=2"]`` -> ``{"knni": {"k": "5"}, "fkmi": {"m": "2"}}``."""
    out: dict[str, dict[str, str]] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        method, dot, name = key.strip().partition(".")
        if not sep or not dot or not name:
            raise CliError(f"bad parameter override {item!r}; expected method.name=value")
        out.setdefault(method, {})[name.strip()] = value.strip()
    return out


def read_config(path) -> dict[str, str]:
    """Simple ``key = value`` file; ``#`` starts a comment."""
    cfg = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise CliError(f"{path}:{lineno}: expected key = value")
            cfg[key.strip()] = value.strip()
    return cfg


@dataclass
class RunConfig:
    datasets: list[str]
    methods: list[str]
    folds: int = 10
    seed: int = 1
    alpha: float = 0.05
    out: str = "results"
    rate: float | None = None
    test_mode: str = TEST_INDEPENDENT
    params: dict = field(default_factory=dict)
    jobs: int = 1

    def validate(self) -> None:
        if not self.datasets:
            raise CliError("no datasets given")
        if not self.methods:
            raise CliError("no imputers given")
        for m in self.methods:
            make_imputer(m, self.params.get(m))
        for p in self.datasets:
            if not Path(p).is_file():
                raise CliError(f"cannot read dataset {p}")
        if self.rate is not None and not 0 <= self.rate <= 1:
            raise CliError("--rate must lie in [0, 1]")


def build_run_config(args) -> RunConfig:
    cfg = read_config(args.config) if args.config else {}
    params = parse_param_overrides([f"{k[6:]}={v}" for k, v in cfg.items() if k.startswith("param.")])
    for method, kv in parse_param_overrides(args.param).items():
        params.setdefault(method, {}).update(kv)

    def pick(flag, key, conv, default):
        if flag is not None:
            return flag
        return conv(cfg[key]) if key in cfg else default

    rate = pick(args.rate, "rate", float, None)
    run = RunConfig(
        datasets=_split_list(args.inputs) or _split_list(cfg.get("in")),
        methods=_split_list(args.method) or _split_list(cfg.get("method")),
        folds=pick(args.folds, "folds", int, 10),
        seed=pick(args.seed, "seed", int, 1),
        alpha=pick(args.alpha, "alpha", float, 0.05),
        out=pick(args.out, "out", str, "results"),
        rate=rate,
        test_mode=pick(args.test_mode, "test_mode", str, TEST_INDEPENDENT),
        params=params,
        jobs=pick(args.jobs, "jobs", int, 1),
    )
    run.validate()
    return run


# ---------------------------------------------------------------------------
# subcommands


def cmd_impute(args) -> int:
    params = parse_param_overrides(args.param).get(args.method)
    imputer = make_imputer(args.method, params)
    ds = read_dataset(args.inputs)
    done = imputer(ds, args.seed if args.seed is not None else 1)
    write_dataset(done, args.out)
    per_col = Counter(j for r in ds.records for j in ds.input_indices if r[j] is None)
    print(f"imputed {sum(per_col.values())} cells with {imputer.name}")
    for j in ds.input_indices:
        if per_col[j]:
            print(f"  {ds.attributes[j].name}\t{per_col[j]}")
    return 0


def cmd_inject(args) -> int:
    ds = read_dataset(args.inputs)
    rate = 0.0 if args.rate is None else args.rate
    out = inject_mcar(ds, rate, args.seed if args.seed is not None else 1)
    write_dataset(out, args.out)
    print(json.dumps(summarize(out).as_dict(), indent=2))
    return 0


def cmd_summarize(args) -> int:
    result = {}
    for path in _split_list(args.inputs):
        result[Path(path).stem] = summarize(read_dataset(path)).as_dict()
    print(json.dumps(result, indent=2))
    return 0


def _run_job(job):
    path, method, params, folds, seed, rate, test_mode = job
    ds = read_dataset(path)
    if rate is not None:
        ds = inject_mcar(ds, rate, seed)
    res = run_experiment(ds, make_imputer(method, params), folds, seed,
                         name=Path(path).stem, test_mode=test_mode)
    return res.as_dict()


def accuracy_matrix(runs: list[dict]) -> dict[str, dict[str, float]]:
    table: dict[str, dict[str, float]] = {}
    for r in runs:
        table.setdefault(r["imputer"], {})[r["dataset"]] = r["mean"]
    return table


def write_tsv_matrix(table: dict[str, dict[str, float]], path: Path) -> None:
    datasets = list(next(iter(table.values())).keys()) if table else []
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["method", *datasets])
        for method, row in table.items():
            w.writerow([method, *(f"{row[d]:.2f}" for d in datasets)])


def cmd_evaluate(args) -> int:
    run = build_run_config(args)
    out = Path(run.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [
        (p, m, run.params.get(m), run.folds, run.seed, run.rate, run.test_mode)
        for p in run.datasets
        for m in run.methods
    ]
    if run.jobs > 1:
        with ProcessPoolExecutor(max_workers=run.jobs) as pool:
            futures = [pool.submit(_run_job, j) for j in jobs]
            runs = []
            for j, f in zip(jobs, futures):
                try:
                    runs.append(f.result())
                except FoldError as exc:
                    raise CliError(f"{j[0]} / {j[1]}: {exc}") from exc
    else:
        runs = []
        for j in jobs:
            print(f"running {j[1]} on {j[0]}", file=sys.stderr)
            try:
                runs.append(_run_job(j))
            except FoldError as exc:
                raise CliError(f"{j[0]} / {j[1]}: {exc}") from exc

    summaries = {}
    for p in run.datasets:
        ds = read_dataset(p)
        if run.rate is not None:
            ds = inject_mcar(ds, run.rate, run.seed)
        summaries[Path(p).stem] = summarize(ds).as_dict()

    (out / "results.json").write_text(json.dumps({"runs": runs}, indent=2) + "\n", encoding="utf-8")
    (out / "summaries.json").write_text(json.dumps(summaries, indent=2) + "\n", encoding="utf-8")
    write_tsv_matrix(accuracy_matrix(runs), out / "accuracy.tsv")
    print((out / "accuracy.tsv").read_text(encoding="utf-8"), end="")
    return 0


def load_accuracy_table(path) -> dict[str, dict[str, float]]:
    """Read a ``results.json`` from ``evaluate`` or a method x dataset TSV."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return accuracy_matrix(json.loads(text)["runs"])
    rows = list(csv.reader(text.splitlines(), delimiter="\t"))
    header = rows[0][1:]
    table = {}
    for lineno, r in enumerate(rows[1:], start=2):
        if not r:
            continue
        if len(r) != len(header) + 1 or any(not c.strip() for c in r):
            raise CliError(f"{path}:{lineno}: missing cells in accuracy table")
        try:
            table[r[0]] = {d: float(v) for d, v in zip(header, r[1:])}
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: {exc}") from None
    return table


def cmd_compare(args) -> int:
    table = load_accuracy_table(args.inputs)
    reference = args.reference
    alpha = 0.05 if args.alpha is None else args.alpha
    try:
        reports = compare_all(table, reference, alpha)
    except (KeyError, ValueError) as exc:
        raise CliError(str(exc).strip("'\"")) from None
    text = format_table(reports)
    print(text, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "wilcoxon.txt").write_text(text, encoding="utf-8")
        (out / "wilcoxon.json").write_text(reports_to_json(reports, reference), encoding="utf-8")
        ref = table[reference]
        for method, row in table.items():
            if method == reference:
                continue
            with open(out / f"delta_{method}.tsv", "w", encoding="utf-8", newline="") as fh:
                fh.write("dataset\tdelta\n")
                for d in ref:
                    fh.write(f"{d}\t{ref[d] - row[d]:.2f}\n")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rnimpute", description="Missing-value imputation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("impute", help="complete a Keel DAT file")
    p.add_argument("--in", dest="inputs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", default="rnii")
    p.add_argument("--param", action="append", help="method.name=value")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_impute)

    p = sub.add_parser("inject", help="mask cells completely at random")
    p.add_argument("--in", dest="inputs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("summarize", help="dataset summary as JSON")
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("evaluate", help="cross-validated C4.5 accuracy per imputer")
    p.add_argument("--config")
    p.add_argument("--in", dest="inputs", nargs="+")
    p.add_argument("--method", action="append", help="comma-separated imputer names")
    p.add_argument("--param", action="append", help="method.name=value")
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--rate", type=float)
    p.add_argument("--test-mode", choices=[TEST_INDEPENDENT, TEST_WITH_TRAIN])
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="Wilcoxon signed-rank tests against a reference method")
    p.add_argument("--in", dest="inputs", required=True, help="results.json or accuracy TSV")
    p.add_argument("--reference", default="rnii")
    p.add_argument("--alpha", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnknownImputer as exc:
        _err(str(exc))
    except (CliError, DatasetError, FoldError, OSError, ValueError) as exc:
        _err(str(exc))
    return 1


if __name__ == "__main__":
    sys.exit(main())

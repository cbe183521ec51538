"""Run the signed-rank comparison on the reference accuracy matrices in data/."""

import argparse
from pathlib import Path

from rnimpute.cli import load_accuracy_table
from rnimpute.wilcoxon import compare_all, format_table

DATA = Path(__file__).resolve().parents[1] / "data"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reference", default="rnii")
    parser.add_argument("--alpha", type=float, default=0.05)
    args = parser.parse_args()
    for name in ("c45_accuracy.tsv", "ga_c45_accuracy.tsv"):
        table = load_accuracy_table(DATA / name)
        print(f"== {name} ({len(next(iter(table.values())))} datasets)")
        print(format_table(compare_all(table, args.reference, args.alpha)))


if __name__ == "__main__":
    main()

"""Write the Iris data bundled with scikit-learn as a Keel DAT file."""

import sys
from importlib import resources
from pathlib import Path

from rnimpute.dataset import NOMINAL, REAL, Attribute, Dataset, write_dataset

NAMES = ["SepalLength", "SepalWidth", "PetalLength", "PetalWidth"]
CLASSES = ("Iris-setosa", "Iris-versicolor", "Iris-virginica")


def main(out):
    text = resources.files("sklearn.datasets").joinpath("data/iris.csv").read_text()
    rows = []
    for line in text.splitlines()[1:]:
        *x, y = line.split(",")
        rows.append(tuple(float(v) for v in x) + (CLASSES[int(y)],))
    attrs = [
        Attribute(n, REAL, low=min(r[i] for r in rows), high=max(r[i] for r in rows))
        for i, n in enumerate(NAMES)
    ]
    attrs.append(Attribute("Class", NOMINAL, CLASSES, role="class"))
    write_dataset(Dataset(tuple(attrs), tuple(rows), "iris"), out)


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "data/iris.dat"))

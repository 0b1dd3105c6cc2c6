#!/usr/bin/env python3
"""Rebuild the benchmark CSVs under data/ from publicly packaged UCI sources.

The outlier benchmark variants follow the usual semantic-outlier protocol:
one class (or a small sample of it) is declared the outlier class, and the
remaining classes are inliers.

  glass.csv  UCI Glass Identification, class 6 (tableware) = outlier.
             Attributes K and Ba dropped (7 attributes), raw values.
  wbc.csv    UCI Breast Cancer Wisconsin (original): rows with missing
             values and duplicate rows removed, all 213 benign rows plus
             10 malignant rows sampled with numpy default_rng(2). Raw values.
  wdbc.csv   UCI Breast Cancer Wisconsin (diagnostic): all 357 benign rows
             plus 10 malignant rows sampled with numpy default_rng(5),
             min-max normalized per column.

Attribute subset and sample seeds were chosen by matching the published
exact KNN / KNNW baseline AUCs (k = 10, 20) of each benchmark; see
data/README.md for the resulting fingerprints.

Sources are fetched from PyPI wheels that bundle the UCI files:
  imbalanced-databases (glass.data.txt), rdatasets (MASS::biopsy),
  scikit-learn (load_breast_cancer).
"""

import argparse
import glob
import io
import os
import subprocess
import sys
import tempfile
import zipfile

import numpy as np
import pandas as pd


def fetch_wheel(name, workdir):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", workdir, name],
        check=True,
    )
    pattern = name.replace("-", "_") + "-*.whl"
    return zipfile.ZipFile(glob.glob(os.path.join(workdir, pattern))[0])


def minmax(x):
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    return np.where(span > 0, (x - lo) / np.where(span > 0, span, 1.0), 0.0)


def write_csv(path, names, inliers, outliers):
    features = np.vstack([inliers, outliers])
    labels = ["no"] * len(inliers) + ["yes"] * len(outliers)
    with open(path, "w") as out:
        out.write(",".join(names + ["outlier"]) + "\n")
        for row, label in zip(features, labels):
            out.write(",".join(repr(float(v)) for v in row) + "," + label + "\n")
    print(f"{path}: n={len(features)} d={features.shape[1]} outliers={len(outliers)}")


def glass(workdir, outdir):
    wheel = fetch_wheel("imbalanced-databases", workdir)
    raw = wheel.read("imbalanced_databases/data/glass/glass.data.txt").decode()
    table = np.loadtxt(io.StringIO(raw), delimiter=",")
    names = ["RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe"]
    keep = [i for i, n in enumerate(names) if n not in ("K", "Ba")]
    x = table[:, 1:10][:, keep]
    is_outlier = table[:, 10] == 6
    write_csv(os.path.join(outdir, "glass.csv"), [names[i] for i in keep],
              x[~is_outlier], x[is_outlier])


def wbc(workdir, outdir):
    wheel = fetch_wheel("rdatasets", workdir)
    blob = wheel.read("rdatasets/_data/MASS/biopsy.pkl.compress")
    frame = pd.read_pickle(io.BytesIO(blob), compression="xz").dropna()
    cols = [f"V{i}" for i in range(1, 10)]
    frame = frame.drop_duplicates(subset=cols)
    benign = frame[frame["class"] == "benign"][cols].to_numpy(float)
    malignant = frame[frame["class"] == "malignant"][cols].to_numpy(float)
    pick = np.random.default_rng(2).choice(len(malignant), 10, replace=False)
    write_csv(os.path.join(outdir, "wbc.csv"), cols, benign, malignant[pick])


def wdbc(outdir):
    from sklearn.datasets import load_breast_cancer

    d = load_breast_cancer()
    benign = d.data[d.target == 1]
    malignant = d.data[d.target == 0]
    pick = np.random.default_rng(5).choice(len(malignant), 10, replace=False)
    x = minmax(np.vstack([benign, malignant[pick]]))
    names = [n.replace(" ", "_") for n in d.feature_names]
    write_csv(os.path.join(outdir, "wdbc.csv"), names, x[: len(benign)], x[len(benign):])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    here = os.path.dirname(os.path.abspath(__file__))
    parser.add_argument("--out", default=os.path.join(here, "..", "..", "data"))
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    with tempfile.TemporaryDirectory() as workdir:
        glass(workdir, args.out)
        wbc(workdir, args.out)
    wdbc(args.out)


if __name__ == "__main__":
    main()

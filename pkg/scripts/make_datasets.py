#!/usr/bin/env python3
"""Materialize the two UCI benchmark datasets as CSV files.

Writes breast_cancer.csv (569 rows, 30 feature columns, 2 classes) and
wine.csv (178 rows, 13 feature columns, 3 classes) with a header row and
a trailing "label" column, the layout the loader defaults expect.
Uses scikit-learn's bundled copies so no network access is needed.
"""

import argparse
import csv
import os


def write_csv(path, data, target, feature_names):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([*feature_names, "label"])
        for row, label in zip(data, target):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])
    print(f"wrote {path} ({data.shape[0]} rows, {data.shape[1]} feature columns)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data")
    args = parser.parse_args()

    from sklearn.datasets import load_breast_cancer, load_wine

    os.makedirs(args.out_dir, exist_ok=True)
    bc = load_breast_cancer()
    write_csv(
        os.path.join(args.out_dir, "breast_cancer.csv"),
        bc.data, bc.target, [n.replace(" ", "_") for n in bc.feature_names],
    )
    wine = load_wine()
    write_csv(
        os.path.join(args.out_dir, "wine.csv"),
        wine.data, wine.target, [n.replace(" ", "_") for n in wine.feature_names],
    )


if __name__ == "__main__":
    main()

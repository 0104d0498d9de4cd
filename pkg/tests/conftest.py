import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "scripts"))

from snnfault import Dataset, DatasetSpec, load_csv, normalize_minmax


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    """Materialize the two UCI benchmark CSVs once per session."""
    out = tmp_path_factory.mktemp("data")
    import make_datasets

    from sklearn.datasets import load_breast_cancer, load_wine

    bc = load_breast_cancer()
    make_datasets.write_csv(
        str(out / "breast_cancer.csv"), bc.data, bc.target,
        [n.replace(" ", "_") for n in bc.feature_names],
    )
    wine = load_wine()
    make_datasets.write_csv(
        str(out / "wine.csv"), wine.data, wine.target,
        [n.replace(" ", "_") for n in wine.feature_names],
    )
    return out


@pytest.fixture(scope="session")
def wine_csv(data_dir):
    return str(data_dir / "wine.csv")


@pytest.fixture(scope="session")
def bc_csv(data_dir):
    return str(data_dir / "breast_cancer.csv")


@pytest.fixture(scope="session")
def wine_dataset(wine_csv):
    return normalize_minmax(load_csv(wine_csv, name="wine"))


@pytest.fixture(scope="session")
def bc_dataset(bc_csv):
    return normalize_minmax(load_csv(bc_csv, name="breast_cancer"))


@pytest.fixture(scope="session")
def wine_spec(wine_csv):
    return DatasetSpec(name="wine", path=wine_csv)


@pytest.fixture(scope="session")
def bc_spec(bc_csv):
    return DatasetSpec(name="breast_cancer", path=bc_csv)


def make_synthetic_dataset(n_samples=30, n_columns=4, n_classes=2, seed=0):
    """Small separable dataset for fast end-to-end trials."""
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.15, 0.85, size=(n_classes, n_columns))
    labels = np.arange(n_samples) % n_classes
    feats = np.clip(centers[labels] + rng.normal(0, 0.08, (n_samples, n_columns)), 0, 1)
    return Dataset(
        name="synthetic",
        features=feats,
        labels=labels.astype(np.int64),
        n_classes=n_classes,
        column_names=[f"col_{k}" for k in range(n_columns)],
    )


@pytest.fixture()
def synthetic_dataset():
    return make_synthetic_dataset()

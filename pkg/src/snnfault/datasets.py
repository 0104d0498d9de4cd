"""CSV dataset loading, min-max normalization, stratified splitting."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import DataLoadError, InputError


@dataclass
class Dataset:
    """Feature matrix plus dense class labels.

    After ``normalize_minmax`` every feature value lies in [0, 1], which
    the spike encoder requires.
    """

    name: str
    features: np.ndarray  # (n_samples, n_columns) float64
    labels: np.ndarray  # (n_samples,) int64 in 0..n_classes-1
    n_classes: int
    column_names: list[str]

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_columns(self) -> int:
        return self.features.shape[1]


def _looks_like_header(cells: list[str], label_idx: int) -> bool:
    # A row is a header if any feature cell fails to parse as a number.
    for k, cell in enumerate(cells):
        if k == label_idx:
            continue
        try:
            float(cell)
        except ValueError:
            return True
    return False


def load_csv(
    path: str | os.PathLike,
    label_column: str | int = "label",
    delimiter: str = ",",
    name: str | None = None,
) -> Dataset:
    """Load a delimited text file into a raw (unnormalized) Dataset.

    ``label_column`` may be a header name (requires a header row) or a
    column index (negative indices count from the right; the header row,
    if present, is detected by non-numeric feature cells). Labels are
    mapped to dense indices 0..n_classes-1 in order of first appearance.
    Raises DataLoadError with the offending row/column for anything
    malformed: missing file, ragged rows, non-numeric features, fewer
    than two classes.
    """
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh, delimiter=delimiter)]
    except OSError as exc:
        raise DataLoadError(f"cannot read {path}: {exc}") from exc

    rows = [row for row in rows if any(cell.strip() for cell in row)]
    if not rows:
        raise DataLoadError(f"{path} contains no data rows")

    width = len(rows[0])
    if width < 2:
        raise DataLoadError("need at least one feature column plus the label", row=1)

    if isinstance(label_column, str):
        header = [cell.strip() for cell in rows[0]]
        if label_column not in header:
            raise DataLoadError(
                f"label column {label_column!r} not found in header {header}"
            )
        label_idx = header.index(label_column)
        names = [h for k, h in enumerate(header) if k != label_idx]
        data_rows = rows[1:]
        first_data_row = 2
    else:
        label_idx = label_column if label_column >= 0 else width + label_column
        if not (0 <= label_idx < width):
            raise DataLoadError(
                f"label column index {label_column} out of range for width {width}"
            )
        if _looks_like_header(rows[0], label_idx):
            header = [cell.strip() for cell in rows[0]]
            names = [h for k, h in enumerate(header) if k != label_idx]
            data_rows = rows[1:]
            first_data_row = 2
        else:
            names = [f"col_{k}" for k in range(width) if k != label_idx]
            data_rows = rows
            first_data_row = 1

    if not data_rows:
        raise DataLoadError(f"{path} has a header but no data rows")

    features = np.empty((len(data_rows), width - 1), dtype=np.float64)
    label_map: dict[str, int] = {}
    labels = np.empty(len(data_rows), dtype=np.int64)

    for r, row in enumerate(data_rows):
        file_row = first_data_row + r
        if len(row) != width:
            raise DataLoadError(
                f"ragged row: expected {width} cells, got {len(row)}", row=file_row
            )
        c = 0
        for k, cell in enumerate(row):
            cell = cell.strip()
            if k == label_idx:
                if cell not in label_map:
                    label_map[cell] = len(label_map)
                labels[r] = label_map[cell]
                continue
            try:
                features[r, c] = float(cell)
            except ValueError:
                raise DataLoadError(
                    f"non-numeric feature value {cell!r}", row=file_row, column=names[c]
                ) from None
            c += 1

    if len(label_map) < 2:
        raise DataLoadError(f"{path} holds a single class; need at least two")

    return Dataset(
        name=name or os.path.splitext(os.path.basename(os.fspath(path)))[0],
        features=features,
        labels=labels,
        n_classes=len(label_map),
        column_names=names,
    )


def normalize_minmax(ds: Dataset) -> Dataset:
    """Rescale each column to [0, 1]; constant columns map to all zeros.

    Idempotent, and preserves the per-column ordering of values.
    """
    lo = ds.features.min(axis=0)
    hi = ds.features.max(axis=0)
    span = hi - lo
    out = np.zeros_like(ds.features)
    varying = span > 0
    out[:, varying] = (ds.features[:, varying] - lo[varying]) / span[varying]
    return replace(ds, features=out)


def stratified_split(
    ds: Dataset, test_fraction: float, seed: int = 0
) -> tuple[Dataset, Dataset]:
    """Split into (train, test) keeping per-class proportions within one sample.

    Deterministic for a given seed; the two index sets are disjoint and
    cover every row. Both halves come back in a seeded shuffled order so
    class-sorted input files do not produce class-sorted training runs.
    """
    if not (0.0 <= test_fraction <= 1.0):
        raise InputError(f"test_fraction must be in [0, 1], got {test_fraction}")

    rng = np.random.default_rng(seed)
    train_parts = []
    test_parts = []
    for c in range(ds.n_classes):
        idx = np.nonzero(ds.labels == c)[0]
        idx = rng.permutation(idx)
        n_test = int(len(idx) * test_fraction + 0.5)
        test_parts.append(idx[:n_test])
        train_parts.append(idx[n_test:])

    train_idx = rng.permutation(np.concatenate(train_parts))
    test_idx = rng.permutation(np.concatenate(test_parts))

    def subset(indices: np.ndarray) -> Dataset:
        return replace(
            ds, features=ds.features[indices].copy(), labels=ds.labels[indices].copy()
        )

    return subset(train_idx), subset(test_idx)

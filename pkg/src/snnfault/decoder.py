"""Marker assignment and most-active-neuron classification.

After training, every excitatory neuron gets a class marker: the class
whose samples made it spike the most during a labeled, plasticity-frozen
pass. A test sample is then classified as the marker of the assigned
neuron that fired most on it. All tie-breaks are deterministic (lowest
class, lowest neuron index) so runs reproduce exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, InputError

UNASSIGNED = -1
FALLBACK_CLASS = 0


@dataclass
class MarkerMap:
    """Per-neuron class markers plus the spike evidence behind them."""

    marker: np.ndarray  # (n_exc,) int64, UNASSIGNED for silent neurons
    evidence: np.ndarray  # (n_exc, n_classes) int64 spike totals

    @property
    def n_assigned(self) -> int:
        return int((self.marker != UNASSIGNED).sum())


def assign_markers(
    per_sample_counts: np.ndarray, labels: np.ndarray, n_classes: int
) -> MarkerMap:
    """Vote a marker for each neuron from a labeled assignment pass.

    ``per_sample_counts[s, j]`` is neuron j's spike count on sample s.
    evidence[j, c] sums counts over samples of class c; the marker is the
    argmax class (ties -> lower class index). Neurons silent on every
    sample stay unassigned, which is exactly what happens to fault
    neurons.
    """
    counts = np.asarray(per_sample_counts)
    labels = np.asarray(labels)
    if counts.ndim != 2 or counts.shape[0] != labels.shape[0]:
        raise InputError(
            f"counts {counts.shape} do not line up with labels {labels.shape}"
        )
    n_exc = counts.shape[1]
    evidence = np.zeros((n_exc, n_classes), dtype=np.int64)
    for c in range(n_classes):
        rows = labels == c
        if rows.any():
            evidence[:, c] = counts[rows].sum(axis=0)

    marker = np.argmax(evidence, axis=1).astype(np.int64)  # first max wins ties
    marker[evidence.sum(axis=1) == 0] = UNASSIGNED
    return MarkerMap(marker=marker, evidence=evidence)


def classify(sample_counts: np.ndarray, markers: MarkerMap) -> int:
    """Predict the marker of the most active assigned neuron.

    Ties go to the lowest neuron index. When every assigned neuron stays
    silent on the sample, the designated fallback class 0 is returned and
    still counts as a prediction. Raises EvaluationError when no neuron
    is assigned at all.
    """
    counts = np.asarray(sample_counts)
    assigned = np.nonzero(markers.marker != UNASSIGNED)[0]
    if assigned.size == 0:
        raise EvaluationError("no excitatory neuron ever received a marker")
    sub = counts[assigned]
    best = int(assigned[np.argmax(sub)])  # first max -> lowest neuron index
    if counts[best] == 0:
        return FALLBACK_CLASS
    return int(markers.marker[best])


def accuracy(predictions: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of correct predictions."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape or predictions.size == 0:
        raise InputError("predictions and labels must be equal-length and non-empty")
    return float((predictions == labels).mean())


def per_class_accuracy(predictions: np.ndarray, labels: np.ndarray) -> dict[int, float]:
    """Accuracy restricted to each true class present in ``labels``."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    out: dict[int, float] = {}
    for c in np.unique(labels):
        rows = labels == c
        out[int(c)] = float((predictions[rows] == c).mean())
    return out

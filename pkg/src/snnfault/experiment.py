"""Trial pipeline, sweep grids, aggregation and result persistence.

A trial is the reproducibility unit: one (scenario, seed) pair running
the full pipeline

    build network -> inject faults -> train -> assign markers on the
    training set (plasticity frozen) -> classify the test set

Everything downstream of the master seed is derived through a seed tree,
so a TrialSpec fully determines its TrialRecord (wall time aside), cell
by cell, regardless of sweep execution order or worker count.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import product

import numpy as np

from .datasets import Dataset, load_csv, normalize_minmax, stratified_split
from .decoder import accuracy, assign_markers, classify, per_class_accuracy
from .encoding import EncoderConfig, encode_poisson_raster
from .errors import InputError
from .faults import (
    KIND_NEURON,
    KIND_SYNAPSE,
    POLICY_IMPORTANT,
    FaultPlan,
    build_fault_plan,
    inject_faults,
    rank_important_columns,
)
from .kernels import run_sample
from .network import G_MODES, GRANULARITIES, NetworkConfig, build_network
from .plasticity import PlasticityParams

CSV_COLUMNS = (
    "dataset",
    "g_mode",
    "granularity",
    "v_ltp",
    "v_ltd",
    "fault_kind",
    "fault_type",
    "position_policy",
    "ratio",
    "epochs",
    "seed",
    "accuracy",
    "n_test",
    "wall_s",
)

_NETWORK_OVERRIDE_FIELDS = frozenset(
    f for f in NetworkConfig.__dataclass_fields__ if f != "n_input"
)
_ENCODER_OVERRIDE_FIELDS = frozenset({"intensity"})
_PLASTICITY_OVERRIDE_FIELDS = frozenset(
    f for f in PlasticityParams.__dataclass_fields__ if f not in ("v_ltp", "v_ltd")
)


def _check_overrides(overrides: dict, allowed: frozenset, label: str) -> dict:
    unknown = set(overrides) - allowed
    if unknown:
        raise InputError(
            f"unknown {label} override(s) {sorted(unknown)}; allowed: {sorted(allowed)}"
        )
    return dict(overrides)


@dataclass(frozen=True)
class DatasetSpec:
    """Where a dataset lives and how to split it."""

    name: str
    path: str | None = None
    label_column: str | int = "label"
    delimiter: str = ","
    test_fraction: float = 0.2
    split_seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetSpec":
        _reject_unknown(d, cls, "dataset")
        return cls(**d)


@dataclass(frozen=True)
class FaultSpec:
    """Which fault scenario a trial runs, before seed resolution."""

    kind: str
    synapse_type: str | None = None
    position_policy: str | None = None
    ratio: float = 0.0

    def __post_init__(self):
        if self.kind not in (KIND_NEURON, KIND_SYNAPSE):
            raise InputError(f"fault kind must be neuron or synapse, got {self.kind!r}")
        if not (0.0 <= self.ratio <= 1.0):
            raise InputError(f"fault ratio must be in [0, 1], got {self.ratio}")
        if self.kind == KIND_SYNAPSE:
            if self.synapse_type not in ("SA0", "SA1"):
                raise InputError(
                    f"synapse faults need synapse_type SA0 or SA1, got {self.synapse_type!r}"
                )
            if self.position_policy not in ("random", "important"):
                raise InputError(
                    "synapse faults need position_policy random or important, "
                    f"got {self.position_policy!r}"
                )
        else:
            if self.synapse_type is not None or self.position_policy is not None:
                raise InputError("neuron faults take no synapse_type/position_policy")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FaultSpec":
        _reject_unknown(d, cls, "fault")
        return cls(**d)


@dataclass(frozen=True)
class TrialSpec:
    """Every factor of one trial; serializable and self-contained.

    ``epochs`` defaults to 30: the homeostatic thresholds need a few
    thousand presentations to equilibrate, and the benchmark datasets
    only have 142-455 training rows, so a single pass leaves the
    competition far from converged.
    """

    dataset: DatasetSpec
    g_mode: str = "static"
    granularity: str = "per_synapse"
    v_ltp: float = 0.0
    v_ltd: float = 0.0
    fault: FaultSpec | None = None
    epochs: int = 30
    seed: int = 0
    network: dict = field(default_factory=dict)
    encoder: dict = field(default_factory=dict)
    plasticity: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.g_mode not in G_MODES:
            raise InputError(f"g_mode must be one of {G_MODES}, got {self.g_mode!r}")
        if self.granularity not in GRANULARITIES:
            raise InputError(
                f"granularity must be one of {GRANULARITIES}, got {self.granularity!r}"
            )
        if self.epochs < 1:
            raise InputError(f"epochs must be >= 1, got {self.epochs}")
        _check_overrides(self.network, _NETWORK_OVERRIDE_FIELDS, "network")
        _check_overrides(self.encoder, _ENCODER_OVERRIDE_FIELDS, "encoder")
        _check_overrides(self.plasticity, _PLASTICITY_OVERRIDE_FIELDS, "plasticity")

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.fault is None:
            d["fault"] = None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrialSpec":
        _reject_unknown(d, cls, "trial")
        d = dict(d)
        d["dataset"] = DatasetSpec.from_dict(d["dataset"])
        if d.get("fault") is not None:
            d["fault"] = FaultSpec.from_dict(d["fault"])
        return cls(**d)


def _reject_unknown(d: dict, cls, label: str) -> None:
    if not isinstance(d, dict):
        raise InputError(f"{label} section must be an object, got {type(d).__name__}")
    unknown = set(d) - set(cls.__dataclass_fields__)
    if unknown:
        raise InputError(f"unknown {label} field(s): {sorted(unknown)}")


@dataclass
class TrialRecord:
    """One trial's outcome plus everything needed to reproduce it."""

    spec: TrialSpec
    accuracy: float
    per_class_accuracy: dict[int, float]
    n_test: int
    wall_s: float
    fault_plan: FaultPlan | None
    spike_totals: dict[str, int]
    n_assigned_neurons: int
    evaluation_error: str | None = None

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "accuracy": self.accuracy,
            "per_class_accuracy": {str(k): v for k, v in self.per_class_accuracy.items()},
            "n_test": self.n_test,
            "wall_s": self.wall_s,
            "fault_plan": self.fault_plan.to_dict() if self.fault_plan else None,
            "spike_totals": dict(self.spike_totals),
            "n_assigned_neurons": self.n_assigned_neurons,
            "evaluation_error": self.evaluation_error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        return cls(
            spec=TrialSpec.from_dict(d["spec"]),
            accuracy=d["accuracy"],
            per_class_accuracy={int(k): v for k, v in d["per_class_accuracy"].items()},
            n_test=d["n_test"],
            wall_s=d["wall_s"],
            fault_plan=FaultPlan.from_dict(d["fault_plan"]) if d.get("fault_plan") else None,
            spike_totals=dict(d["spike_totals"]),
            n_assigned_neurons=d["n_assigned_neurons"],
            evaluation_error=d.get("evaluation_error"),
        )

    def flat_row(self) -> dict:
        """The fixed flat projection used by the CSV schema and grouping."""
        s = self.spec
        f = s.fault
        return {
            "dataset": s.dataset.name,
            "g_mode": s.g_mode,
            "granularity": s.granularity,
            "v_ltp": s.v_ltp,
            "v_ltd": s.v_ltd,
            "fault_kind": f.kind if f else "",
            "fault_type": (f.synapse_type or "") if f else "",
            "position_policy": (f.position_policy or "") if f else "",
            "ratio": f.ratio if f else 0.0,
            "epochs": s.epochs,
            "seed": s.seed,
            "accuracy": self.accuracy,
            "n_test": self.n_test,
            "wall_s": self.wall_s,
        }


def sort_key(row: dict) -> tuple:
    """Canonical record order: spec fields in schema order, then seed."""
    return (
        row["dataset"],
        row["g_mode"],
        row["granularity"],
        row["v_ltp"],
        row["v_ltd"],
        row["fault_kind"],
        row["fault_type"],
        row["position_policy"],
        row["ratio"],
        row["epochs"],
        row["seed"],
    )


def load_dataset(spec: DatasetSpec) -> Dataset:
    """Load, normalize and name the dataset a spec points at."""
    if spec.path is None:
        raise InputError(
            f"dataset {spec.name!r} has no path; supply one to load it from disk"
        )
    ds = load_csv(spec.path, spec.label_column, spec.delimiter, name=spec.name)
    return normalize_minmax(ds)


def _seed_int(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, np.uint64)[0])


def run_trial(
    spec: TrialSpec, dataset: Dataset | None = None, backend: str | None = None
) -> TrialRecord:
    """Execute one trial end to end, deterministically in the seed.

    ``dataset`` lets callers hand in an already loaded (normalized)
    dataset; otherwise ``spec.dataset.path`` is loaded. When no neuron
    ever receives a marker the trial still completes: every prediction
    falls back to class 0 and the condition is recorded on the record.
    """
    t0 = time.perf_counter()
    ds = dataset if dataset is not None else load_dataset(spec.dataset)
    train, test = stratified_split(ds, spec.dataset.test_fraction, spec.dataset.split_seed)

    cfg = NetworkConfig(n_input=ds.n_columns, **spec.network)
    enc = EncoderConfig(duration=cfg.sample_duration, dt=cfg.dt, **spec.encoder)
    params = PlasticityParams(v_ltp=spec.v_ltp, v_ltd=spec.v_ltd, **spec.plasticity)

    root = np.random.SeedSequence(spec.seed)
    net_ss, fault_ss, train_ss, assign_ss, test_ss = root.spawn(5)

    net = build_network(cfg, spec.g_mode, spec.granularity, rng_seed=_seed_int(net_ss))

    plan = None
    if spec.fault is not None:
        importance = None
        if spec.fault.position_policy == POLICY_IMPORTANT:
            importance = rank_important_columns(train.features)
        plan = build_fault_plan(
            spec.fault.kind,
            spec.fault.synapse_type,
            spec.fault.position_policy,
            spec.fault.ratio,
            cfg.n_exc,
            cfg.n_input,
            importance=importance,
            seed=_seed_int(fault_ss),
        )
        inject_faults(net, plan)

    totals = {"train_exc": 0, "train_inh": 0, "assign_exc": 0, "test_exc": 0}

    for epoch_ss in train_ss.spawn(spec.epochs):
        rng = np.random.default_rng(epoch_ss)
        order = rng.permutation(train.n_samples)
        for si in order:
            raster = encode_poisson_raster(train.features[si], enc, rng)
            ce, ci = run_sample(net, raster, params, train=True, backend=backend)
            totals["train_exc"] += int(ce.sum())
            totals["train_inh"] += int(ci.sum())

    rng = np.random.default_rng(assign_ss)
    assign_counts = np.zeros((train.n_samples, cfg.n_exc), dtype=np.int64)
    for si in range(train.n_samples):
        raster = encode_poisson_raster(train.features[si], enc, rng)
        ce, _ = run_sample(net, raster, params, train=False, backend=backend)
        assign_counts[si] = ce
    totals["assign_exc"] = int(assign_counts.sum())
    markers = assign_markers(assign_counts, train.labels, ds.n_classes)

    rng = np.random.default_rng(test_ss)
    predictions = np.zeros(test.n_samples, dtype=np.int64)
    evaluation_error = None
    for si in range(test.n_samples):
        raster = encode_poisson_raster(test.features[si], enc, rng)
        ce, _ = run_sample(net, raster, params, train=False, backend=backend)
        totals["test_exc"] += int(ce.sum())
        if markers.n_assigned == 0:
            predictions[si] = 0
        else:
            predictions[si] = classify(ce, markers)
    if markers.n_assigned == 0:
        evaluation_error = "no assigned neurons; all predictions fell back to class 0"

    return TrialRecord(
        spec=spec,
        accuracy=accuracy(predictions, test.labels),
        per_class_accuracy=per_class_accuracy(predictions, test.labels),
        n_test=test.n_samples,
        wall_s=time.perf_counter() - t0,
        fault_plan=plan,
        spike_totals=totals,
        n_assigned_neurons=markers.n_assigned,
        evaluation_error=evaluation_error,
    )


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian scenario grid: cells x seeds, all sharing one dataset."""

    base: TrialSpec
    g_modes: tuple[str, ...] = ("static",)
    v_settings: tuple[tuple[float, float], ...] = ((0.0, 0.0),)
    ratios: tuple[float, ...] = (0.0,)
    fault_kind: str | None = None
    synapse_type: str | None = None
    position_policy: str | None = None
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        for axis in ("g_modes", "v_settings", "ratios", "seeds"):
            if len(getattr(self, axis)) == 0:
                raise InputError(f"sweep axis {axis} must not be empty")
        if self.fault_kind is None and tuple(self.ratios) != (0.0,):
            raise InputError("a ratio axis needs fault_kind to be set")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["base"] = self.base.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SweepGrid":
        _reject_unknown(d, cls, "sweep")
        d = dict(d)
        d["base"] = TrialSpec.from_dict(d["base"])
        for axis in ("g_modes", "ratios", "seeds"):
            if axis in d:
                d[axis] = tuple(d[axis])
        if "v_settings" in d:
            d["v_settings"] = tuple((float(a), float(b)) for a, b in d["v_settings"])
        return cls(**d)

    def all_specs(self) -> list[TrialSpec]:
        specs = []
        for g_mode, (v_ltp, v_ltd), ratio, seed in product(
            self.g_modes, self.v_settings, self.ratios, self.seeds
        ):
            fault = None
            if self.fault_kind is not None:
                fault = FaultSpec(
                    kind=self.fault_kind,
                    synapse_type=self.synapse_type,
                    position_policy=self.position_policy,
                    ratio=ratio,
                )
            specs.append(
                replace(
                    self.base,
                    g_mode=g_mode,
                    v_ltp=v_ltp,
                    v_ltd=v_ltd,
                    fault=fault,
                    seed=seed,
                )
            )
        return specs


def _run_trial_worker(args) -> TrialRecord:
    spec, dataset, backend = args
    return run_trial(spec, dataset=dataset, backend=backend)


def run_sweep(
    grid: SweepGrid,
    jobs: int = 1,
    dataset: Dataset | None = None,
    backend: str | None = None,
) -> list[TrialRecord]:
    """Run every cell of the grid; output is canonically sorted.

    Cells are fully independent, so any worker count produces the same
    records. The dataset loads once and is shared by every cell.
    """
    specs = grid.all_specs()
    ds = dataset if dataset is not None else load_dataset(grid.base.dataset)
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_trial_worker, [(s, ds, backend) for s in specs]))
    else:
        records = [run_trial(s, dataset=ds, backend=backend) for s in specs]
    records.sort(key=lambda r: sort_key(r.flat_row()))
    return records


def summarize(records, group_by: list[str]) -> list[dict]:
    """Aggregate accuracy per group: mean, sample std, cell count.

    ``records`` may be TrialRecords or flat row dicts (as read back from
    a results file). Single-record groups report std 0.
    """
    bad = [k for k in group_by if k not in CSV_COLUMNS]
    if bad:
        raise InputError(f"unknown group-by key(s) {bad}; choose from {CSV_COLUMNS}")
    rows = [r.flat_row() if isinstance(r, TrialRecord) else r for r in records]
    groups: dict[tuple, list[float]] = {}
    for row in rows:
        key = tuple(row[k] for k in group_by)
        groups.setdefault(key, []).append(float(row["accuracy"]))
    out = []
    for key in sorted(groups, key=lambda k: tuple(str(v) for v in k)):
        accs = np.asarray(groups[key])
        out.append(
            {
                **dict(zip(group_by, key)),
                "mean_accuracy": float(accs.mean()),
                "std_accuracy": float(accs.std(ddof=1)) if accs.size > 1 else 0.0,
                "n": int(accs.size),
            }
        )
    return out


def write_results(records, path: str | os.PathLike, format: str = "csv") -> None:
    """Persist records. CSV appends (header written once); JSON merges.

    The CSV column order is exactly ``CSV_COLUMNS``. JSON files hold the
    full nested records, list-of-objects.
    """
    if format == "csv":
        rows = [r.flat_row() if isinstance(r, TrialRecord) else r for r in records]
        exists = os.path.exists(path) and os.path.getsize(path) > 0
        with open(path, "a", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            if not exists:
                writer.writeheader()
            for row in rows:
                writer.writerow({k: row[k] for k in CSV_COLUMNS})
    elif format == "json":
        existing = []
        if os.path.exists(path) and os.path.getsize(path) > 0:
            with open(path) as fh:
                existing = json.load(fh)
        payload = existing + [
            r.to_dict() if isinstance(r, TrialRecord) else r for r in records
        ]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    else:
        raise InputError(f"format must be csv or json, got {format!r}")


_CSV_TYPES = {
    "v_ltp": float,
    "v_ltd": float,
    "ratio": float,
    "epochs": int,
    "seed": int,
    "accuracy": float,
    "n_test": int,
    "wall_s": float,
}


def read_results(path: str | os.PathLike, format: str | None = None):
    """Read results back; CSV yields flat rows, JSON yields TrialRecords."""
    if format is None:
        format = "json" if str(path).endswith(".json") else "csv"
    if format == "json":
        with open(path) as fh:
            return [TrialRecord.from_dict(d) for d in json.load(fh)]
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for raw in reader:
            rows.append(
                {k: (_CSV_TYPES[k](v) if k in _CSV_TYPES else v) for k, v in raw.items()}
            )
        return rows

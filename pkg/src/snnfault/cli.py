"""Command line front end.

Subcommands: ``run`` (one trial), ``sweep`` (a grid or preset),
``summarize`` (aggregate a results file), ``rank-features`` (print the
importance ordering a trial would use), ``validate-config`` (parse-check
a config without simulating). Flags override config-file values; every
run echoes its fully resolved spec so results can be reproduced from the
echo alone.

Environment: SNNFAULT_OUTPUT_DIR anchors relative output paths,
SNNFAULT_JOBS sets the default worker count. (SNNFAULT_BACKEND selects
the numeric kernel implementation; results do not depend on it.)
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields as dataclass_fields

from .datasets import load_csv, normalize_minmax, stratified_split
from .errors import InputError, SnnFaultError
from .experiment import (
    CSV_COLUMNS,
    DatasetSpec,
    FaultSpec,
    SweepGrid,
    TrialSpec,
    read_results,
    run_sweep,
    run_trial,
    summarize,
    write_results,
)
from .faults import rank_important_columns
from .network import NetworkConfig
from .plasticity import PlasticityParams
from .presets import DEFAULT_SEEDS, PRESETS

ENV_OUTPUT_DIR = "SNNFAULT_OUTPUT_DIR"
ENV_JOBS = "SNNFAULT_JOBS"

_NET_FLAG_FIELDS = [f.name for f in dataclass_fields(NetworkConfig) if f.name != "n_input"]
_PLAST_FLAG_FIELDS = [
    f.name for f in dataclass_fields(PlasticityParams) if f.name not in ("v_ltp", "v_ltd")
]


def _add_dataset_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="dataset name used in result rows")
    p.add_argument("--dataset-path", help="CSV file with features and a label column")
    p.add_argument("--label-column", help="label column name or index (default: label)")
    p.add_argument("--delimiter", help="CSV delimiter (default ,)")
    p.add_argument("--test-fraction", type=float, help="held-out fraction (default 0.2)")
    p.add_argument("--split-seed", type=int, help="train/test split seed (default 0)")


def _add_trial_flags(p: argparse.ArgumentParser) -> None:
    _add_dataset_flags(p)
    p.add_argument("--g-mode", choices=("static", "random"))
    p.add_argument("--granularity", choices=("per_synapse", "per_neuron"))
    p.add_argument("--v-ltp", type=float)
    p.add_argument("--v-ltd", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--fault-kind", choices=("neuron", "synapse"))
    p.add_argument("--fault-type", choices=("SA0", "SA1"))
    p.add_argument("--position-policy", choices=("random", "important"))
    p.add_argument("--ratio", type=float)
    for name in _NET_FLAG_FIELDS:
        p.add_argument(f"--net-{name.replace('_', '-')}", type=float, dest=f"net_{name}")
    p.add_argument("--enc-intensity", type=float, dest="enc_intensity")
    for name in _PLAST_FLAG_FIELDS:
        kind = str if name == "ltd_sign_mode" else float
        p.add_argument(f"--plast-{name.replace('_', '-')}", type=kind, dest=f"plast_{name}")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="results file (default results.csv)")
    p.add_argument("--format", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snnfault",
        description="Memristive spiking-network fault-injection experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single trial")
    p_run.add_argument("--config", help="TrialSpec JSON file")
    _add_trial_flags(p_run)
    _add_output_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="run a scenario grid")
    p_sweep.add_argument("--config", help="SweepGrid JSON file")
    p_sweep.add_argument("--preset", choices=sorted(PRESETS))
    p_sweep.add_argument("--seeds", help="comma-separated seeds (default 0,1,2,3,4)")
    p_sweep.add_argument("--jobs", type=int, default=None, help="worker processes")
    _add_trial_flags(p_sweep)
    _add_output_flags(p_sweep)

    p_sum = sub.add_parser("summarize", help="aggregate a results file")
    p_sum.add_argument("results", help="results CSV or JSON file")
    p_sum.add_argument(
        "--group-by",
        default="dataset,g_mode,v_ltp,v_ltd",
        help=f"comma-separated keys from: {','.join(CSV_COLUMNS)}",
    )
    p_sum.add_argument("--out", default=None, help="write the table as CSV here")

    p_rank = sub.add_parser(
        "rank-features", help="print the importance ordering a trial would use"
    )
    _add_dataset_flags(p_rank)

    p_val = sub.add_parser("validate-config", help="parse-check a config file")
    p_val.add_argument("config", help="JSON file")
    p_val.add_argument("--kind", choices=("trial", "sweep", "auto"), default="auto")

    return parser


def _out_path(arg: str | None, default_name: str) -> str:
    path = arg or default_name
    if not os.path.isabs(path):
        path = os.path.join(os.environ.get(ENV_OUTPUT_DIR, "."), path)
    return path


def _out_format(args, path: str) -> str:
    if args.format:
        return args.format
    return "json" if path.endswith(".json") else "csv"


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _dataset_spec_from(args, base: dict | None) -> dict:
    d = dict(base or {})
    if args.dataset is not None:
        d["name"] = args.dataset
    if args.dataset_path is not None:
        d["path"] = args.dataset_path
        d.setdefault("name", os.path.splitext(os.path.basename(args.dataset_path))[0])
    if args.label_column is not None:
        col = args.label_column
        d["label_column"] = int(col) if col.lstrip("+-").isdigit() else col
    if args.delimiter is not None:
        d["delimiter"] = args.delimiter
    if args.test_fraction is not None:
        d["test_fraction"] = args.test_fraction
    if args.split_seed is not None:
        d["split_seed"] = args.split_seed
    if "name" not in d:
        raise InputError("no dataset given; use --dataset/--dataset-path or a config file")
    return d


def _trial_spec_from(args, config: dict | None) -> TrialSpec:
    d = dict(config or {})
    d["dataset"] = _dataset_spec_from(args, d.get("dataset"))
    for flag, key in (
        ("g_mode", "g_mode"),
        ("granularity", "granularity"),
        ("v_ltp", "v_ltp"),
        ("v_ltd", "v_ltd"),
        ("epochs", "epochs"),
        ("seed", "seed"),
    ):
        val = getattr(args, flag)
        if val is not None:
            d[key] = val

    fault = dict(d.get("fault") or {})
    if args.fault_kind is not None:
        fault["kind"] = args.fault_kind
    if args.fault_type is not None:
        fault["synapse_type"] = args.fault_type
    if args.position_policy is not None:
        fault["position_policy"] = args.position_policy
    if args.ratio is not None:
        fault["ratio"] = args.ratio
    d["fault"] = fault or None

    net = dict(d.get("network") or {})
    for name in _NET_FLAG_FIELDS:
        val = getattr(args, f"net_{name}")
        if val is not None:
            net[name] = int(val) if name in ("n_exc", "n_inh") else val
    d["network"] = net

    enc = dict(d.get("encoder") or {})
    if args.enc_intensity is not None:
        enc["intensity"] = args.enc_intensity
    d["encoder"] = enc

    plast = dict(d.get("plasticity") or {})
    for name in _PLAST_FLAG_FIELDS:
        val = getattr(args, f"plast_{name}")
        if val is not None:
            plast[name] = val
    d["plasticity"] = plast

    return TrialSpec.from_dict(d)


def _echo_config(payload: dict, out_path: str) -> None:
    text = json.dumps(payload, indent=1)
    print(text)
    echo_path = os.path.splitext(out_path)[0] + ".config.json"
    with open(echo_path, "w") as fh:
        fh.write(text + "\n")


def _cmd_run(args) -> int:
    config = _load_json(args.config) if args.config else None
    spec = _trial_spec_from(args, config)
    out = _out_path(args.out, "results.csv")
    _echo_config(spec.to_dict(), out)
    record = run_trial(spec)
    write_results([record], out, _out_format(args, out))
    print(f"accuracy {record.accuracy:.4f} on {record.n_test} test samples -> {out}")
    if record.evaluation_error:
        print(f"note: {record.evaluation_error}")
    return 0


def _parse_seeds(text: str | None) -> tuple[int, ...]:
    if text is None:
        return DEFAULT_SEEDS
    try:
        seeds = tuple(int(s) for s in text.split(",") if s.strip() != "")
    except ValueError as exc:
        raise InputError(f"bad --seeds value {text!r}") from exc
    if not seeds:
        raise InputError("seed list must not be empty")
    return seeds


def _sweep_grid_from(args) -> SweepGrid:
    if args.config and args.preset:
        raise InputError("give either --config or --preset, not both")
    if args.config:
        d = _load_json(args.config)
        base = _trial_spec_from(args, d.get("base"))
        d["base"] = base.to_dict()
        if args.seeds is not None:
            d["seeds"] = list(_parse_seeds(args.seeds))
        return SweepGrid.from_dict(d)
    if args.preset:
        base = _trial_spec_from(args, None)
        return PRESETS[args.preset](base, seeds=_parse_seeds(args.seeds))
    raise InputError("sweep needs --config or --preset")


def _cmd_sweep(args) -> int:
    grid = _sweep_grid_from(args)
    jobs = args.jobs if args.jobs is not None else int(os.environ.get(ENV_JOBS, "1"))
    out = _out_path(args.out, "results.csv")
    _echo_config(grid.to_dict(), out)
    records = run_sweep(grid, jobs=jobs)
    write_results(records, out, _out_format(args, out))
    print(f"{len(records)} trials -> {out}")
    return 0


def _cmd_summarize(args) -> int:
    group_by = [k.strip() for k in args.group_by.split(",") if k.strip()]
    records = read_results(args.results)
    table = summarize(records, group_by)
    header = group_by + ["mean_accuracy", "std_accuracy", "n"]
    widths = [max(len(h), 12) for h in header]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in table:
        cells = [str(row[k]) for k in group_by]
        cells += [f"{row['mean_accuracy']:.4f}", f"{row['std_accuracy']:.4f}", str(row["n"])]
        print("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    if args.out:
        import csv as _csv

        with open(args.out, "w", newline="") as fh:
            writer = _csv.DictWriter(fh, fieldnames=header)
            writer.writeheader()
            writer.writerows(table)
    return 0


def _cmd_rank_features(args) -> int:
    d = _dataset_spec_from(args, None)
    spec = DatasetSpec.from_dict(d)
    if spec.path is None:
        raise InputError("rank-features needs --dataset-path")
    ds = normalize_minmax(load_csv(spec.path, spec.label_column, spec.delimiter))
    train, _ = stratified_split(ds, spec.test_fraction, spec.split_seed)
    order = rank_important_columns(train.features)
    means = train.features.mean(axis=0)
    print("rank  column  name                      mean")
    for rank, col in enumerate(order):
        print(f"{rank:>4}  {col:>6}  {ds.column_names[col]:<24}  {means[col]:.4f}")
    return 0


def _cmd_validate_config(args) -> int:
    try:
        d = _load_json(args.config)
        kinds = []
        if args.kind in ("trial", "auto"):
            kinds.append(("trial", TrialSpec.from_dict))
        if args.kind in ("sweep", "auto"):
            kinds.append(("sweep", SweepGrid.from_dict))
        errors = []
        for label, parse in kinds:
            try:
                parse(d)
                print(f"OK: valid {label} config")
                return 0
            except (InputError, KeyError, TypeError) as exc:
                errors.append(f"not a {label} config: {exc}")
        print("; ".join(errors), file=sys.stderr)
        return 2
    except InputError as exc:
        print(str(exc), file=sys.stderr)
        return 2


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "summarize": _cmd_summarize,
        "rank-features": _cmd_rank_features,
        "validate-config": _cmd_validate_config,
    }
    try:
        return handlers[args.command](args)
    except SnnFaultError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

"""Deterministic memristive spiking-network simulator with fault injection.

Simulates a three-layer unsupervised spike-based classifier whose
input->excitatory synapses update through a non-linear, bounded
memristive STDP rule, and measures how dead neurons and stuck-at
synapses (SA0/SA1) at varying ratios and positions change test accuracy.
"""

from .datasets import Dataset, load_csv, normalize_minmax, stratified_split
from .decoder import MarkerMap, accuracy, assign_markers, classify
from .encoding import EncoderConfig, encode_poisson, encode_poisson_raster
from .experiment import (
    DatasetSpec,
    FaultSpec,
    SweepGrid,
    TrialRecord,
    TrialSpec,
    run_sweep,
    run_trial,
    summarize,
    write_results,
)
from .faults import (
    FaultPlan,
    build_fault_plan,
    enforce_faults,
    inject_faults,
    rank_important_columns,
)
from .kernels import available_backends, get_backend, run_sample
from .network import (
    Network,
    NetworkConfig,
    NeuronState,
    SpikeRecord,
    SynapseMatrix,
    build_network,
    lif_step,
    network_step,
    reset_for_sample,
    theta_step,
)
from .plasticity import (
    PlasticityParams,
    apply_stdp,
    compute_alpha,
    linear_delta,
    ltd_delta,
    ltp_delta,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetSpec",
    "EncoderConfig",
    "FaultPlan",
    "FaultSpec",
    "MarkerMap",
    "Network",
    "NetworkConfig",
    "NeuronState",
    "PlasticityParams",
    "SpikeRecord",
    "SweepGrid",
    "SynapseMatrix",
    "TrialRecord",
    "TrialSpec",
    "accuracy",
    "apply_stdp",
    "assign_markers",
    "available_backends",
    "build_fault_plan",
    "build_network",
    "classify",
    "compute_alpha",
    "encode_poisson",
    "encode_poisson_raster",
    "enforce_faults",
    "get_backend",
    "inject_faults",
    "lif_step",
    "linear_delta",
    "load_csv",
    "ltd_delta",
    "ltp_delta",
    "network_step",
    "normalize_minmax",
    "rank_important_columns",
    "reset_for_sample",
    "run_sample",
    "run_sweep",
    "run_trial",
    "stratified_split",
    "summarize",
    "theta_step",
    "write_results",
]

"""Fault plans: what breaks, where, and pinning broken elements in place.

Two element kinds can fail. A fault *neuron* is an excitatory neuron that
can no longer raise its membrane potential, so it never spikes again. A
fault *synapse* on the input->excitatory matrix is stuck at zero weight
(SA0, blocks everything) or at its own maximum weight (SA1, passes
everything). Synapse faults hit every excitatory neuron with the same
per-neuron count, either at independently drawn random columns or at the
columns carrying the highest-valued features ("important positions").
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigurationError, InputError
from .network import FAULT_NONE, FAULT_SA0, FAULT_SA1, Network

KIND_NEURON = "neuron"
KIND_SYNAPSE = "synapse"
SA0 = "SA0"
SA1 = "SA1"
POLICY_RANDOM = "random"
POLICY_IMPORTANT = "important"

_MASK_CODE = {SA0: FAULT_SA0, SA1: FAULT_SA1}

# Guards against 0.3 * 30 == 8.999... style representation error; never
# large enough to absorb a genuinely fractional count.
_EPS = 1e-9


def _floor_count(x: float) -> int:
    return int(math.floor(x + _EPS))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5 + _EPS))


@dataclass
class FaultPlan:
    """Fully resolved fault placement, reproducible from its own fields."""

    kind: str
    ratio: float
    seed: int
    n_exc: int
    n_input: int
    synapse_type: str | None = None
    position_policy: str | None = None
    neuron_indices: list[int] = field(default_factory=list)
    columns_per_neuron: list[list[int]] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not self.neuron_indices and not any(self.columns_per_neuron)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FaultPlan":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FaultPlan":
        return cls.from_dict(json.loads(text))


def rank_important_columns(train_features: np.ndarray) -> np.ndarray:
    """Columns ordered by mean value over the training set, descending.

    Ties break toward the lower index. Columns with large normalized
    values are the ones whose synapses matter most, so this ordering
    defines the "important positions".
    """
    feats = np.asarray(train_features, dtype=np.float64)
    if feats.ndim != 2:
        raise InputError(f"expected a 2-D feature matrix, got shape {feats.shape}")
    means = feats.mean(axis=0)
    return np.argsort(-means, kind="stable")


def build_fault_plan(
    kind: str,
    synapse_type: str | None,
    position_policy: str | None,
    ratio: float,
    n_exc: int,
    n_input: int,
    importance: np.ndarray | None = None,
    seed: int = 0,
) -> FaultPlan:
    """Resolve which elements fail. Counts are exact, never probabilistic.

    neuron kind: round(ratio * n_exc) distinct excitatory indices, drawn
    uniformly. synapse/random: floor(ratio * n_input) columns drawn
    independently for every excitatory neuron. synapse/important: the top
    floor(ratio * n_input) columns of ``importance``, identical for every
    neuron.
    """
    if not (0.0 <= ratio <= 1.0):
        raise InputError(f"ratio must be in [0, 1], got {ratio}")
    if kind not in (KIND_NEURON, KIND_SYNAPSE):
        raise InputError(f"kind must be neuron or synapse, got {kind!r}")

    plan = FaultPlan(
        kind=kind,
        ratio=ratio,
        seed=seed,
        n_exc=n_exc,
        n_input=n_input,
        synapse_type=synapse_type,
        position_policy=position_policy,
    )
    rng = np.random.default_rng(seed)

    if kind == KIND_NEURON:
        k = _round_half_up(ratio * n_exc)
        plan.neuron_indices = sorted(
            int(i) for i in rng.choice(n_exc, size=k, replace=False)
        )
        return plan

    if synapse_type not in _MASK_CODE:
        raise InputError(f"synapse_type must be SA0 or SA1, got {synapse_type!r}")
    if position_policy not in (POLICY_RANDOM, POLICY_IMPORTANT):
        raise InputError(
            f"position_policy must be random or important, got {position_policy!r}"
        )

    k = _floor_count(ratio * n_input)
    if position_policy == POLICY_IMPORTANT:
        if importance is None:
            raise InputError("important positions need an importance ordering")
        order = [int(i) for i in importance]
        if sorted(order) != list(range(n_input)):
            raise InputError(
                f"importance must be a permutation of 0..{n_input - 1}"
            )
        cols = sorted(order[:k])
        plan.columns_per_neuron = [list(cols) for _ in range(n_exc)]
    else:
        plan.columns_per_neuron = [
            sorted(int(c) for c in rng.choice(n_input, size=k, replace=False))
            for _ in range(n_exc)
        ]
    return plan


def inject_faults(net: Network, plan: FaultPlan) -> Network:
    """Mark fault neurons and pin fault synapses to their stuck values.

    Applied once before training starts. SA1 pins each synapse to its
    *own* w_max, which under random conductance bounds differs from 1.
    """
    cfg = net.config
    if plan.n_exc != cfg.n_exc or (
        plan.kind == KIND_SYNAPSE and plan.n_input != cfg.n_input
    ):
        raise ConfigurationError(
            f"plan built for ({plan.n_exc} exc, {plan.n_input} inputs) does not "
            f"match network ({cfg.n_exc} exc, {cfg.n_input} inputs)"
        )

    if plan.kind == KIND_NEURON:
        for j in plan.neuron_indices:
            if not (0 <= j < cfg.n_exc):
                raise ConfigurationError(f"neuron index {j} out of range")
            net.exc.is_fault[j] = True
            net.exc.v_m[j] = cfg.rest_potential
        return net

    code = _MASK_CODE[plan.synapse_type]
    for j, cols in enumerate(plan.columns_per_neuron):
        for i in cols:
            if not (0 <= i < cfg.n_input):
                raise ConfigurationError(f"column index {i} out of range")
            net.syn.fault_mask[i, j] = code
            net.syn.w[i, j] = 0.0 if code == FAULT_SA0 else net.syn.w_max[i, j]
    return net


def enforce_faults(net: Network) -> Network:
    """Re-pin every masked synapse to its stuck value.

    Plasticity already skips masked synapses; this is the cheap
    defense-in-depth pass run after every plasticity application.
    """
    mask = net.syn.fault_mask
    sa0 = mask == FAULT_SA0
    if sa0.any():
        net.syn.w[sa0] = 0.0
    sa1 = mask == FAULT_SA1
    if sa1.any():
        net.syn.w[sa1] = net.syn.w_max[sa1]
    return net

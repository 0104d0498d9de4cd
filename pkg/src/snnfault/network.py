"""Three-layer spiking network state and one-step dynamics.

Topology follows the classic unsupervised-classification wiring: a Poisson
input layer drives an excitatory layer through a fully connected plastic
synapse matrix; each excitatory neuron drives exactly one partner
inhibitory neuron, and every inhibitory neuron suppresses all excitatory
neurons *except* its partner. Inhibitory feedback lands one time step
after the spike that caused it, which is what makes the winner-take-all
competition stable under synchronous updates.

Neurons are leaky integrate-and-fire, advanced by forward Euler:

    v <- v + (dt / tau_m) * ((rest - v) + R * weighted_spike_sum)

Excitatory neurons carry an adaptive threshold ``theta`` that decays
toward its base value and jumps by ``theta_plus`` on every spike, so no
single neuron can monopolise the competition during training.

All per-layer state lives in numpy arrays; one call advances a whole
layer. This module is the plain-numpy reference path; ``kernels`` fuses
the same arithmetic into a jitted per-sample loop. The two must stay
operation-for-operation identical (the backend equivalence tests compare
them bit for bit), so any change here needs the mirror change there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InputError

LAYER_INPUT = "input"
LAYER_EXCITATORY = "excitatory"
LAYER_INHIBITORY = "inhibitory"

# fault_mask codes for SynapseMatrix
FAULT_NONE = 0
FAULT_SA0 = 1
FAULT_SA1 = 2

G_MODES = ("static", "random")
GRANULARITIES = ("per_synapse", "per_neuron")


@dataclass
class NetworkConfig:
    """All fixed numbers the simulation needs.

    The defaults form one consistent operating point on the millivolt
    scale. ``R`` converts the weighted spike sum into membrane current;
    at R = 60 a unit-weight input spike bumps an excitatory membrane by
    0.6 mV (dt/tau_m_exc = 1/100), so a neuron integrates tens of steps
    of evidence before racing past the 7 mV gap to threshold. With the
    0.01 mV threshold bump per spike, ``tau_theta`` = 4e5 ms puts the
    homeostatic equilibrium at an inter-spike interval comparable to the
    plasticity window, which is what keeps potentiation and depression
    event counts balanced during training; the handicap a neuron earns
    persists for hundreds of samples. ``w_exc_to_inh`` guarantees the
    partner relay fires on every excitatory spike, and ``w_inh_to_exc``
    makes one suppression hit cost roughly a whole climb, so at most a
    couple of neurons win any given presentation.
    """

    n_input: int
    n_exc: int = 10
    n_inh: int = 10
    dt: float = 1.0
    sample_duration: float = 350.0
    rest_potential: float = -65.0
    reset_potential: float = -65.0
    v_thres_exc: float = -58.0
    v_thres_inh: float = -40.0
    tau_m_exc: float = 100.0
    tau_m_inh: float = 10.0
    tau_theta: float = 4.0e5
    theta_plus: float = 0.01
    refractory_exc: float = 5.0
    refractory_inh: float = 2.0
    R: float = 60.0
    w_exc_to_inh: float = 100.0
    w_inh_to_exc: float = -100.0

    def __post_init__(self):
        if self.n_input < 1:
            raise ConfigurationError(f"n_input must be >= 1, got {self.n_input}")
        if self.n_exc < 1:
            raise ConfigurationError(f"n_exc must be >= 1, got {self.n_exc}")
        if self.n_exc != self.n_inh:
            raise ConfigurationError(
                f"one-to-one exc/inh pairing requires n_exc == n_inh, "
                f"got {self.n_exc} != {self.n_inh}"
            )
        for name in ("dt", "sample_duration", "tau_m_exc", "tau_m_inh", "tau_theta"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be > 0")
        if self.refractory_exc < 0 or self.refractory_inh < 0:
            raise ConfigurationError("refractory periods must be >= 0")
        steps = self.sample_duration / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise ConfigurationError(
                f"sample_duration ({self.sample_duration}) must be an integer "
                f"multiple of dt ({self.dt})"
            )
        if not (self.reset_potential <= self.rest_potential < self.v_thres_exc):
            raise ConfigurationError(
                "potentials must satisfy reset <= rest < v_thres_exc, got "
                f"reset={self.reset_potential}, rest={self.rest_potential}, "
                f"v_thres_exc={self.v_thres_exc}"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.sample_duration / self.dt))


@dataclass(frozen=True)
class SpikeRecord:
    """One spike event: when, which layer, which neuron."""

    time: float
    layer: str
    neuron_index: int


@dataclass
class NeuronState:
    """Vectorized state of one neuron layer.

    ``theta`` and ``last_spike_time`` exist only on the excitatory layer;
    ``last_spike_time`` holds -inf for neurons that have not fired in the
    current sample.
    """

    v_m: np.ndarray
    refractory_remaining: np.ndarray
    is_fault: np.ndarray
    spike_count_current_sample: np.ndarray
    theta: np.ndarray | None = None
    last_spike_time: np.ndarray | None = None

    @classmethod
    def excitatory(cls, n: int, config: NetworkConfig) -> "NeuronState":
        return cls(
            v_m=np.full(n, config.rest_potential, dtype=np.float64),
            refractory_remaining=np.zeros(n, dtype=np.float64),
            is_fault=np.zeros(n, dtype=bool),
            spike_count_current_sample=np.zeros(n, dtype=np.int64),
            theta=np.full(n, config.v_thres_exc, dtype=np.float64),
            last_spike_time=np.full(n, -np.inf, dtype=np.float64),
        )

    @classmethod
    def inhibitory(cls, n: int, config: NetworkConfig) -> "NeuronState":
        return cls(
            v_m=np.full(n, config.rest_potential, dtype=np.float64),
            refractory_remaining=np.zeros(n, dtype=np.float64),
            is_fault=np.zeros(n, dtype=bool),
            spike_count_current_sample=np.zeros(n, dtype=np.int64),
        )


@dataclass
class SynapseMatrix:
    """Plastic input->excitatory weights with per-synapse bounds and faults.

    Invariant for healthy synapses: w_min <= w <= w_max. A stuck-at-0
    synapse is pinned to exactly 0 (even when its drawn w_min is above 0:
    a dead device passes nothing); a stuck-at-1 synapse is pinned to its
    own w_max.
    """

    w: np.ndarray
    w_min: np.ndarray
    w_max: np.ndarray
    fault_mask: np.ndarray  # int8, FAULT_* codes


@dataclass
class Network:
    """Full mutable simulation state for one trial."""

    config: NetworkConfig
    g_mode: str
    granularity: str
    syn: SynapseMatrix
    exc: NeuronState
    inh: NeuronState
    # Summed inhibitory weight scheduled to hit each excitatory neuron on
    # the next step (the one-step feedback delay).
    pending_inh_weight: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.pending_inh_weight is None:
            self.pending_inh_weight = np.zeros(self.config.n_exc, dtype=np.float64)


def build_network(
    config: NetworkConfig,
    g_mode: str = "static",
    granularity: str = "per_synapse",
    rng_seed: int = 0,
) -> Network:
    """Construct a network with freshly drawn bounds and initial weights.

    ``static`` sets every synapse's bounds to [0, 1]. ``random`` draws
    w_min ~ U[0, 0.5) and w_max ~ U[0.5, 1), either independently per
    synapse or once per excitatory neuron, modelling device-to-device
    conductance spread. Initial weights are uniform inside each synapse's
    own bounds. Identical (config, mode, granularity, seed) always
    rebuilds bit-identical matrices.
    """
    if g_mode not in G_MODES:
        raise ConfigurationError(f"g_mode must be one of {G_MODES}, got {g_mode!r}")
    if granularity not in GRANULARITIES:
        raise ConfigurationError(
            f"granularity must be one of {GRANULARITIES}, got {granularity!r}"
        )

    rng = np.random.default_rng(rng_seed)
    shape = (config.n_input, config.n_exc)

    if g_mode == "static":
        w_min = np.zeros(shape, dtype=np.float64)
        w_max = np.ones(shape, dtype=np.float64)
    elif granularity == "per_synapse":
        w_min = rng.uniform(0.0, 0.5, size=shape)
        w_max = rng.uniform(0.5, 1.0, size=shape)
    else:  # per_neuron: one bound pair shared by all synapses into a neuron
        lo = rng.uniform(0.0, 0.5, size=config.n_exc)
        hi = rng.uniform(0.5, 1.0, size=config.n_exc)
        w_min = np.broadcast_to(lo, shape).copy()
        w_max = np.broadcast_to(hi, shape).copy()

    w = w_min + rng.uniform(size=shape) * (w_max - w_min)

    syn = SynapseMatrix(
        w=np.ascontiguousarray(w),
        w_min=np.ascontiguousarray(w_min),
        w_max=np.ascontiguousarray(w_max),
        fault_mask=np.zeros(shape, dtype=np.int8),
    )
    return Network(
        config=config,
        g_mode=g_mode,
        granularity=granularity,
        syn=syn,
        exc=NeuronState.excitatory(config.n_exc, config),
        inh=NeuronState.inhibitory(config.n_inh, config),
    )


def lif_step(
    state: NeuronState,
    input_current: np.ndarray,
    config: NetworkConfig,
    layer: str,
) -> np.ndarray:
    """Advance one layer by one Euler step; returns the spike mask.

    Refractory neurons skip integration and only count their timer down.
    Fault neurons never integrate and never spike, so their membrane
    stays at rest forever. ``input_current`` must already include the R
    scale. Mutates ``state`` in place.
    """
    if layer == LAYER_EXCITATORY:
        tau_m = config.tau_m_exc
        refractory = config.refractory_exc
        threshold = state.theta
    elif layer == LAYER_INHIBITORY:
        tau_m = config.tau_m_inh
        refractory = config.refractory_inh
        threshold = config.v_thres_inh
    else:
        raise InputError(f"lif_step applies to excitatory/inhibitory, got {layer!r}")

    coef = config.dt / tau_m
    in_refrac = state.refractory_remaining > 0.0
    integrate = ~(in_refrac | state.is_fault)

    v = state.v_m
    v[integrate] = v[integrate] + coef * (
        (config.rest_potential - v[integrate]) + input_current[integrate]
    )
    state.refractory_remaining[in_refrac] = np.maximum(
        state.refractory_remaining[in_refrac] - config.dt, 0.0
    )

    spiked = integrate & (v >= threshold)
    v[spiked] = config.reset_potential
    state.refractory_remaining[spiked] = refractory
    state.spike_count_current_sample[spiked] += 1
    return spiked


def theta_step(theta: np.ndarray, spiked: np.ndarray, config: NetworkConfig) -> np.ndarray:
    """One adaptive-threshold update for the excitatory layer (pure).

    theta decays toward its base value with time constant tau_theta and
    jumps by theta_plus on each spike.
    """
    coef = config.dt / config.tau_theta
    return theta + coef * (config.v_thres_exc - theta) + config.theta_plus * spiked.astype(
        np.float64
    )


def network_step(
    net: Network,
    input_spike_indices: np.ndarray,
    t: float,
) -> list[SpikeRecord]:
    """Advance the whole network by one step at time ``t`` (ms).

    Order inside a step: feedforward drive (plus last step's pending
    inhibition) -> excitatory update -> theta update -> one-to-one drive
    to inhibitory -> inhibitory update -> schedule suppression for the
    next step. The adaptive threshold is neuron dynamics, so it runs in
    every pass (training and evaluation alike); only synaptic plasticity
    is gated elsewhere. Returns every spike of this step, input layer
    included, in (layer, index) order.
    """
    cfg = net.config

    drive = net.pending_inh_weight.copy()
    for i in input_spike_indices:
        drive += net.syn.w[i]
    i_exc = cfg.R * drive

    exc_spiked = lif_step(net.exc, i_exc, cfg, LAYER_EXCITATORY)
    net.exc.theta = theta_step(net.exc.theta, exc_spiked, cfg)
    net.exc.last_spike_time[exc_spiked] = t

    partner_current = cfg.R * cfg.w_exc_to_inh
    i_inh = np.where(exc_spiked, partner_current, 0.0)
    inh_spiked = lif_step(net.inh, i_inh, cfg, LAYER_INHIBITORY)

    n_spk = int(inh_spiked.sum())
    if n_spk > 0:
        net.pending_inh_weight = cfg.w_inh_to_exc * (
            float(n_spk) - inh_spiked.astype(np.float64)
        )
    else:
        net.pending_inh_weight = np.zeros(cfg.n_exc, dtype=np.float64)

    records = [SpikeRecord(t, LAYER_INPUT, int(i)) for i in input_spike_indices]
    records += [SpikeRecord(t, LAYER_EXCITATORY, int(j)) for j in np.nonzero(exc_spiked)[0]]
    records += [SpikeRecord(t, LAYER_INHIBITORY, int(j)) for j in np.nonzero(inh_spiked)[0]]
    return records


def reset_for_sample(net: Network) -> Network:
    """Clear per-sample transient state before presenting a new sample.

    Membrane potentials return to rest, refractory timers and spike
    counts clear, pending inhibition and the spike-time memory clear.
    theta and the weights persist: they are the learned state.
    """
    cfg = net.config
    net.exc.v_m[:] = cfg.rest_potential
    net.exc.refractory_remaining[:] = 0.0
    net.exc.spike_count_current_sample[:] = 0
    net.exc.last_spike_time[:] = -np.inf
    net.inh.v_m[:] = cfg.rest_potential
    net.inh.refractory_remaining[:] = 0.0
    net.inh.spike_count_current_sample[:] = 0
    net.pending_inh_weight[:] = 0.0
    return net

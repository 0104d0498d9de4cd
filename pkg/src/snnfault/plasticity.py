"""Memristive STDP: timing-window pairing plus bounded non-linear updates.

A potentiation event moves a weight by

    dw = [W / (t_post - t_pre + 1)] * (alpha + w_min - w) * (1 - exp(-beta * v_ltp / 256))

and a depression event by

    dw = -[W / (t_pre - t_post + 1)] * (alpha - w_max + w) * (1 - exp(v_ltd / 256))

with alpha = (w_max - w_min) / (1 - exp(-v)) using each role's own v, and
W the pairing window in ms. The non-linearity factors v_ltp/v_ltd model
how strongly a device's conductance change depends on its current state;
at v = 0 both expressions degenerate (alpha is singular and the
exponential factor vanishes), so that case is served by a linear rule
that keeps the timing prefactor and swaps the state-dependent drive for
a constant learning rate.

As printed, the depression expression yields a *positive* dw for typical
operands regardless of the sign of v_ltd. The default
``enforce_role_sign`` mode therefore forces potentiation to be
non-negative and depression non-positive (magnitude kept);
``as_printed`` preserves the raw formula for fidelity experiments.

The scalar cores here are written in jit-compatible style on purpose:
``kernels`` compiles these exact functions, so the fused kernel and this
reference path share one definition of the arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .network import FAULT_NONE, LAYER_EXCITATORY, LAYER_INPUT, Network, SpikeRecord

SIGN_MODES = ("enforce_role_sign", "as_printed")

LTP = "LTP"
LTD = "LTD"


@dataclass
class PlasticityParams:
    """Knobs of the update rule; v values are usually swept in [-3, 3].

    ``linear_rate`` is the per-pairing step of the v = 0 linear rule, as
    a fraction of the synapse's bound span. The default of 1/64 moves a
    full-span synapse by ~0.016 per pairing: large enough for prototypes
    to form within tens of epochs, small enough that weights do not slam
    into their bounds and erase selectivity.
    """

    v_ltp: float = 0.0
    v_ltd: float = 0.0
    beta: float = 1.0
    window: float = 50.0
    linear_rate: float = 1.0 / 64.0
    ltd_sign_mode: str = "enforce_role_sign"

    def __post_init__(self):
        if self.window <= 0:
            raise InputError(f"window must be > 0, got {self.window}")
        if self.linear_rate <= 0:
            raise InputError(f"linear_rate must be > 0, got {self.linear_rate}")
        if self.ltd_sign_mode not in SIGN_MODES:
            raise InputError(
                f"ltd_sign_mode must be one of {SIGN_MODES}, got {self.ltd_sign_mode!r}"
            )


def compute_alpha(v: float, w_min: float, w_max: float) -> float:
    """State-dependence scale of the non-linear update.

    Singular at v = 0; callers must take the linear path there.
    """
    if v == 0.0:
        raise InputError("alpha is singular at v = 0; use the linear update path")
    return (w_max - w_min) / (1.0 - math.exp(-v))


def _ltp_delta_core(w, gap_ms, w_lo, w_hi, v_ltp, beta, window_ms, linear_rate, enforce_sign):
    # Shared scalar core; also compiled by kernels. Keep free of numpy.
    if v_ltp == 0.0:
        # Linear regime: a constant step per pairing, scaled by the device
        # range. No timing prefactor here; with one, the gap-0 pairing
        # (which only exists on the potentiation side) outweighs all
        # depression and every active synapse saturates.
        return linear_rate * (w_hi - w_lo)
    pref = window_ms / (gap_ms + 1.0)
    alpha = (w_hi - w_lo) / (1.0 - math.exp(-v_ltp))
    dw = pref * (alpha + w_lo - w) * (1.0 - math.exp(-beta * v_ltp / 256.0))
    if enforce_sign and dw < 0.0:
        dw = -dw
    return dw


def _ltd_delta_core(w, gap_ms, w_lo, w_hi, v_ltd, beta, window_ms, linear_rate, enforce_sign):
    # beta deliberately unused: only the potentiation side carries it.
    if v_ltd == 0.0:
        return -linear_rate * (w_hi - w_lo)
    pref = window_ms / (gap_ms + 1.0)
    alpha = (w_hi - w_lo) / (1.0 - math.exp(-v_ltd))
    dw = -pref * (alpha - w_hi + w) * (1.0 - math.exp(v_ltd / 256.0))
    if enforce_sign and dw > 0.0:
        dw = -dw
    return dw


def ltp_delta(
    w: float,
    t_pre: float,
    t_post: float,
    bounds: tuple[float, float],
    p: PlasticityParams,
) -> float:
    """Weight change for one potentiation pairing; 0.0 outside the window.

    Requires pre-before-post ordering: 0 <= t_post - t_pre <= window.
    With v_ltp == 0 the linear rule applies.
    """
    gap = t_post - t_pre
    if gap < 0.0 or gap > p.window:
        return 0.0
    return _ltp_delta_core(
        w, gap, bounds[0], bounds[1], p.v_ltp, p.beta, p.window, p.linear_rate,
        p.ltd_sign_mode == "enforce_role_sign",
    )


def ltd_delta(
    w: float,
    t_pre: float,
    t_post: float,
    bounds: tuple[float, float],
    p: PlasticityParams,
) -> float:
    """Weight change for one depression pairing; 0.0 outside the window.

    Requires post-before-pre ordering: 0 < t_pre - t_post <= window.
    With v_ltd == 0 the linear rule applies.
    """
    gap = t_pre - t_post
    if gap <= 0.0 or gap > p.window:
        return 0.0
    return _ltd_delta_core(
        w, gap, bounds[0], bounds[1], p.v_ltd, p.beta, p.window, p.linear_rate,
        p.ltd_sign_mode == "enforce_role_sign",
    )


def linear_delta(role: str, t_gap: float, p: PlasticityParams) -> float:
    """Constant-rate update used when the role's v factor is 0.

    Keeps the timing prefactor window/(gap+1); the sign comes from the
    role itself.
    """
    if role not in (LTP, LTD):
        raise InputError(f"role must be {LTP!r} or {LTD!r}, got {role!r}")
    pref = p.window / (t_gap + 1.0)
    dw = p.linear_rate * pref
    return dw if role == LTP else -dw


def apply_stdp(
    net: Network,
    spike_history: list[SpikeRecord],
    t: float,
    p: PlasticityParams,
) -> Network:
    """Apply every STDP update due at time ``t`` during training.

    ``spike_history`` must contain the input-layer spikes of the last
    window (inclusive) and the excitatory spikes of the current step;
    anything else in it is ignored. Pairing rules:

    * potentiation: each excitatory spike at ``t`` pairs with every input
      spike strictly before it and at most one window old, one update per
      pre spike, so repeated pre activity compounds;
    * depression: each input spike at ``t`` pairs with each neuron's most
      recent *earlier* spike when that lies inside the window.

    Same-step pre/post coincidences pair with neither rule. The two
    windows then mirror each other (pre strictly before post drives
    potentiation, pre strictly after drives depression), which keeps the
    expected potentiation and depression event counts equal under
    stationary input; an unpaired same-step term would bias every active
    synapse toward its ceiling.

    Every update is clamped to the synapse's own bounds immediately, and
    faulted synapses are never touched. Spike times must sit on the dt
    grid; window comparisons happen in step space so the boundary is
    exact for any dt.
    """
    cfg = net.config
    dt = cfg.dt
    t_step = int(round(t / dt))
    win_steps = int(round(p.window / dt))

    posts: list[int] = []
    pres: list[tuple[int, int]] = []
    for rec in spike_history:
        s = int(round(rec.time / dt))
        if rec.layer == LAYER_EXCITATORY:
            if s == t_step:
                posts.append(rec.neuron_index)
        elif rec.layer == LAYER_INPUT:
            if 0 <= t_step - s <= win_steps:
                pres.append((s, rec.neuron_index))  # gap 0 kept: LTD needs it
    if not pres:
        return net
    posts.sort()
    pres.sort()

    w = net.syn.w
    lo = net.syn.w_min
    hi = net.syn.w_max
    mask = net.syn.fault_mask
    enforce = p.ltd_sign_mode == "enforce_role_sign"

    for j in posts:
        for s, i in pres:
            if s == t_step or mask[i, j] != FAULT_NONE:
                continue
            gap_ms = (t_step - s) * dt
            dw = _ltp_delta_core(
                w[i, j], gap_ms, lo[i, j], hi[i, j],
                p.v_ltp, p.beta, p.window, p.linear_rate, enforce,
            )
            w[i, j] = min(max(w[i, j] + dw, lo[i, j]), hi[i, j])

    last = net.exc.last_spike_time
    for s, i in pres:
        if s != t_step:
            continue
        for j in range(cfg.n_exc):
            t_post = last[j]
            if not np.isfinite(t_post):
                continue
            gap_steps = t_step - int(round(t_post / dt))
            if gap_steps <= 0 or gap_steps > win_steps:
                continue
            if mask[i, j] != FAULT_NONE:
                continue
            gap_ms = gap_steps * dt
            dw = _ltd_delta_core(
                w[i, j], gap_ms, lo[i, j], hi[i, j],
                p.v_ltd, p.beta, p.window, p.linear_rate, enforce,
            )
            w[i, j] = min(max(w[i, j] + dw, lo[i, j]), hi[i, j])

    return net

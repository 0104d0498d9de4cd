"""Per-sample simulation kernels: jitted fast path, plain-numpy fallback.

One sample presentation is the hot loop of every experiment: hundreds of
time steps over small arrays, with sparse plasticity events in between.
Two interchangeable backends run it:

* ``numba``  - a fused loop over the whole presentation compiled with
  ``@njit`` (the default whenever numba imports);
* ``numpy``  - the reference path that advances step by step through
  ``network.network_step`` / ``plasticity.apply_stdp``.

Select with the ``SNNFAULT_BACKEND`` environment variable ("numba" or
"numpy") or the explicit ``backend=`` argument. Both paths execute the
same arithmetic in the same order, so seeded runs produce bit-identical
spike counts, weights and thresholds on either backend; the test suite
asserts exactly that. ``benchmarks/bench_backends.py`` compares their
speed.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import plasticity as _plasticity
from .errors import ConfigurationError, InputError
from .network import (
    LAYER_EXCITATORY,
    LAYER_INPUT,
    Network,
    network_step,
    reset_for_sample,
)
from .faults import enforce_faults
from .plasticity import PlasticityParams

BACKEND_ENV = "SNNFAULT_BACKEND"
_NO_SPIKE = -(10**9)  # step-index sentinel: far older than any window

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    numba = None
    _HAVE_NUMBA = False


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if _HAVE_NUMBA else ("numpy",)


def get_backend(name: str | None = None) -> str:
    """Resolve the backend: explicit argument > env var > default."""
    resolved = name or os.environ.get(BACKEND_ENV) or (
        "numba" if _HAVE_NUMBA else "numpy"
    )
    if resolved not in ("numba", "numpy"):
        raise InputError(
            f"unknown backend {resolved!r}; expected 'numba' or 'numpy'"
        )
    if resolved == "numba" and not _HAVE_NUMBA:
        raise InputError("numba backend requested but numba is not installed")
    return resolved


# --------------------------------------------------------------------------
# Fused kernel. The body mirrors network.network_step + plasticity.apply_stdp
# exactly; every arithmetic expression here has a twin there and the two must
# not drift apart.
# --------------------------------------------------------------------------

if _HAVE_NUMBA:
    _ltp_scalar = numba.njit(cache=True)(_plasticity._ltp_delta_core)
    _ltd_scalar = numba.njit(cache=True)(_plasticity._ltd_delta_core)
else:  # pragma: no cover
    _ltp_scalar = _plasticity._ltp_delta_core
    _ltd_scalar = _plasticity._ltd_delta_core


def _simulate_sample(
    w,
    w_lo,
    w_hi,
    mask,
    neuron_fault,
    theta,
    raster,
    train,
    dt,
    tau_exc,
    tau_inh,
    tau_theta,
    rest,
    v_reset,
    v_thres_exc,
    v_thres_inh,
    theta_plus,
    refrac_exc_ms,
    refrac_inh_ms,
    r_gain,
    w_exc_inh,
    w_inh_exc,
    v_ltp,
    v_ltd,
    beta,
    window_ms,
    linear_rate,
    enforce_sign,
):
    n_in = w.shape[0]
    n_exc = w.shape[1]
    n_steps = raster.shape[0]
    win_steps = int(round(window_ms / dt))
    coef_exc = dt / tau_exc
    coef_inh = dt / tau_inh
    coef_theta = dt / tau_theta
    partner_current = r_gain * w_exc_inh

    v_exc = np.full(n_exc, rest)
    v_inh = np.full(n_exc, rest)
    refrac_e = np.zeros(n_exc)
    refrac_i = np.zeros(n_exc)
    pending = np.zeros(n_exc)
    drive = np.zeros(n_exc)
    spiked_e = np.zeros(n_exc, np.uint8)
    spiked_i = np.zeros(n_exc, np.uint8)
    counts_e = np.zeros(n_exc, np.int64)
    counts_i = np.zeros(n_exc, np.int64)
    last_post = np.full(n_exc, _NO_SPIKE, np.int64)

    for ts in range(n_steps):
        # feedforward drive plus the inhibition scheduled last step
        for j in range(n_exc):
            drive[j] = pending[j]
        for i in range(n_in):
            if raster[ts, i] != 0:
                for j in range(n_exc):
                    drive[j] = drive[j] + w[i, j]

        # excitatory layer
        n_spk_e = 0
        for j in range(n_exc):
            fired = False
            if not neuron_fault[j]:
                if refrac_e[j] > 0.0:
                    rr = refrac_e[j] - dt
                    refrac_e[j] = rr if rr > 0.0 else 0.0
                else:
                    vj = v_exc[j]
                    vj = vj + coef_exc * ((rest - vj) + r_gain * drive[j])
                    if vj >= theta[j]:
                        vj = v_reset
                        refrac_e[j] = refrac_exc_ms
                        counts_e[j] += 1
                        last_post[j] = ts
                        fired = True
                    v_exc[j] = vj
            if fired:
                spiked_e[j] = 1
                n_spk_e += 1
            else:
                spiked_e[j] = 0

        # the adaptive threshold is neuron dynamics: it runs in every pass,
        # training and evaluation alike; only the synaptic updates below
        # are gated by train
        for j in range(n_exc):
            th = theta[j] + coef_theta * (v_thres_exc - theta[j])
            if spiked_e[j] == 1:
                th = th + theta_plus
            theta[j] = th

        # inhibitory layer, driven one-to-one by partner spikes
        n_spk_i = 0
        for j in range(n_exc):
            fired = False
            if refrac_i[j] > 0.0:
                rr = refrac_i[j] - dt
                refrac_i[j] = rr if rr > 0.0 else 0.0
            else:
                cur = partner_current if spiked_e[j] == 1 else 0.0
                vj = v_inh[j]
                vj = vj + coef_inh * ((rest - vj) + cur)
                if vj >= v_thres_inh:
                    vj = v_reset
                    refrac_i[j] = refrac_inh_ms
                    counts_i[j] += 1
                    fired = True
                v_inh[j] = vj
            spiked_i[j] = 1 if fired else 0
            if fired:
                n_spk_i += 1

        # suppression lands next step on everyone except the partner
        if n_spk_i > 0:
            cnt = float(n_spk_i)
            for k in range(n_exc):
                s = 1.0 if spiked_i[k] == 1 else 0.0
                pending[k] = w_inh_exc * (cnt - s)
        else:
            for k in range(n_exc):
                pending[k] = 0.0

        if not train:
            continue

        # potentiation: each spike now pairs with every input spike strictly
        # before it and at most one window old, one update per pre spike
        if n_spk_e > 0:
            s0 = ts - win_steps
            if s0 < 0:
                s0 = 0
            for j in range(n_exc):
                if spiked_e[j] == 0:
                    continue
                for s in range(s0, ts):
                    for i in range(n_in):
                        if raster[s, i] != 0 and mask[i, j] == 0:
                            gap_ms = (ts - s) * dt
                            dw = _ltp_scalar(
                                w[i, j], gap_ms, w_lo[i, j], w_hi[i, j],
                                v_ltp, beta, window_ms, linear_rate, enforce_sign,
                            )
                            x = w[i, j] + dw
                            w[i, j] = min(max(x, w_lo[i, j]), w_hi[i, j])

        # depression: each input spike now pairs with each neuron's most
        # recent earlier spike inside the window
        for i in range(n_in):
            if raster[ts, i] == 0:
                continue
            for j in range(n_exc):
                gap_steps = ts - last_post[j]
                if gap_steps <= 0 or gap_steps > win_steps:
                    continue
                if mask[i, j] != 0:
                    continue
                gap_ms = gap_steps * dt
                dw = _ltd_scalar(
                    w[i, j], gap_ms, w_lo[i, j], w_hi[i, j],
                    v_ltd, beta, window_ms, linear_rate, enforce_sign,
                )
                x = w[i, j] + dw
                w[i, j] = min(max(x, w_lo[i, j]), w_hi[i, j])

    return counts_e, counts_i


if _HAVE_NUMBA:
    _simulate_sample_jit = numba.njit(cache=True)(_simulate_sample)
else:  # pragma: no cover
    _simulate_sample_jit = None


def _run_sample_numba(
    net: Network, raster: np.ndarray, params: PlasticityParams, train: bool
) -> tuple[np.ndarray, np.ndarray]:
    cfg = net.config
    counts_e, counts_i = _simulate_sample_jit(
        net.syn.w,
        net.syn.w_min,
        net.syn.w_max,
        net.syn.fault_mask,
        net.exc.is_fault,
        net.exc.theta,
        raster,
        train,
        cfg.dt,
        cfg.tau_m_exc,
        cfg.tau_m_inh,
        cfg.tau_theta,
        cfg.rest_potential,
        cfg.reset_potential,
        cfg.v_thres_exc,
        cfg.v_thres_inh,
        cfg.theta_plus,
        cfg.refractory_exc,
        cfg.refractory_inh,
        cfg.R,
        cfg.w_exc_to_inh,
        cfg.w_inh_to_exc,
        params.v_ltp,
        params.v_ltd,
        params.beta,
        params.window,
        params.linear_rate,
        params.ltd_sign_mode == "enforce_role_sign",
    )
    return counts_e, counts_i


def _run_sample_numpy(
    net: Network, raster: np.ndarray, params: PlasticityParams, train: bool
) -> tuple[np.ndarray, np.ndarray]:
    cfg = net.config
    reset_for_sample(net)
    win_steps = int(round(params.window / cfg.dt))
    history: list = []  # input-layer records still inside the window
    for ts in range(raster.shape[0]):
        t = ts * cfg.dt
        idx = np.nonzero(raster[ts])[0]
        records = network_step(net, idx, t)
        if not train:
            continue
        exc_records = []
        for rec in records:
            if rec.layer == LAYER_INPUT:
                history.append(rec)
            elif rec.layer == LAYER_EXCITATORY:
                exc_records.append(rec)
        while history and ts - int(round(history[0].time / cfg.dt)) > win_steps:
            history.pop(0)
        _plasticity.apply_stdp(net, history + exc_records, t, params)
        enforce_faults(net)
    return (
        net.exc.spike_count_current_sample.copy(),
        net.inh.spike_count_current_sample.copy(),
    )


def run_sample(
    net: Network,
    raster: np.ndarray,
    params: PlasticityParams,
    train: bool,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Present one encoded sample to the network.

    Mutates the learned state (weights, thresholds) in place when
    ``train`` is true and returns (excitatory, inhibitory) per-neuron
    spike counts for the sample. Transient per-sample fields of ``net``
    are unspecified afterwards; only the numpy backend happens to leave
    them populated.
    """
    cfg = net.config
    if raster.shape != (cfg.n_steps, cfg.n_input):
        raise ConfigurationError(
            f"raster shape {raster.shape} does not match "
            f"(n_steps={cfg.n_steps}, n_input={cfg.n_input})"
        )
    if get_backend(backend) == "numba":
        return _run_sample_numba(net, raster, params, train)
    return _run_sample_numpy(net, raster, params, train)


def warmup(backend: str | None = None) -> None:
    """Trigger jit compilation ahead of timing-sensitive work."""
    if get_backend(backend) != "numba":
        return
    from .network import NetworkConfig, build_network

    cfg = NetworkConfig(n_input=2, n_exc=2, n_inh=2, sample_duration=5.0)
    net = build_network(cfg, rng_seed=0)
    raster = np.ones((cfg.n_steps, cfg.n_input), dtype=np.uint8)
    _run_sample_numba(net, raster, PlasticityParams(), True)

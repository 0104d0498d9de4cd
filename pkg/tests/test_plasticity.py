import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snnfault import (
    NetworkConfig,
    PlasticityParams,
    SpikeRecord,
    apply_stdp,
    build_network,
    compute_alpha,
    linear_delta,
    ltd_delta,
    ltp_delta,
)
from snnfault.errors import InputError
from snnfault.network import FAULT_SA0, LAYER_EXCITATORY, LAYER_INPUT

from oracle import alpha_oracle, ltd_oracle_as_printed, ltp_oracle, rel_err

# Frozen from the mpmath oracle (50 digits, rounded to double precision).
ALPHA_3_UNIT = 1.052395696491256
ALPHA_NEG3_UNIT = -0.052395696491255952
LTP_EXAMPLE = 0.029252749076893086  # w=0.5, gap=10, bounds (0,1), v=3, beta=1, W=50
LTD_EXAMPLE_AS_PRINTED = 0.029597571226252028  # same operands, v_ltd=3


def params(**kw):
    return PlasticityParams(**kw)


class TestComputeAlpha:
    def test_positive_v(self):
        assert math.isclose(compute_alpha(3.0, 0.0, 1.0), ALPHA_3_UNIT, rel_tol=1e-12)

    def test_negative_v_is_negative(self):
        a = compute_alpha(-3.0, 0.0, 1.0)
        assert math.isclose(a, ALPHA_NEG3_UNIT, rel_tol=1e-12)
        assert a < 0

    def test_zero_span(self):
        assert compute_alpha(2.0, 0.4, 0.4) == 0.0

    def test_singularity(self):
        with pytest.raises(InputError):
            compute_alpha(0.0, 0.0, 1.0)


class TestDeltas:
    def test_ltp_frozen_example(self):
        p = params(v_ltp=3.0)
        dw = ltp_delta(0.5, t_pre=0.0, t_post=10.0, bounds=(0.0, 1.0), p=p)
        assert math.isclose(dw, LTP_EXAMPLE, rel_tol=1e-12)

    def test_ltd_sign_anomaly_as_printed(self):
        # As printed, the depression formula yields a positive change here.
        p = params(v_ltd=3.0, ltd_sign_mode="as_printed")
        dw = ltd_delta(0.5, t_pre=10.0, t_post=0.0, bounds=(0.0, 1.0), p=p)
        assert math.isclose(dw, LTD_EXAMPLE_AS_PRINTED, rel_tol=1e-12)
        assert dw > 0

    def test_ltd_enforced_sign_is_negated_magnitude(self):
        p = params(v_ltd=3.0)
        dw = ltd_delta(0.5, t_pre=10.0, t_post=0.0, bounds=(0.0, 1.0), p=p)
        assert math.isclose(dw, -LTD_EXAMPLE_AS_PRINTED, rel_tol=1e-12)

    def test_ltd_zero_drive_term(self):
        # w chosen so alpha - w_max + w == 0 exactly
        p = params(v_ltd=3.0, ltd_sign_mode="as_printed")
        w = 1.0 - compute_alpha(3.0, 0.0, 1.0)
        assert ltd_delta(w, 10.0, 0.0, (0.0, 1.0), p) == pytest.approx(0.0, abs=1e-15)

    def test_ltp_drive_shrinks_with_weight(self):
        p = params(v_ltp=3.0)
        hi = ltp_delta(0.1, 0.0, 10.0, (0.0, 1.0), p)
        lo = ltp_delta(0.9, 0.0, 10.0, (0.0, 1.0), p)
        assert lo < hi

    def test_timing_prefactor_monotone(self):
        p = params(v_ltp=3.0)
        at_edge = ltp_delta(0.5, 0.0, p.window, (0.0, 1.0), p)
        at_zero = ltp_delta(0.5, 0.0, 0.0, (0.0, 1.0), p)
        assert abs(at_edge) < abs(at_zero)

    def test_window_rejection(self):
        p = params(v_ltp=3.0, v_ltd=3.0)
        assert ltp_delta(0.5, 0.0, p.window + 1.0, (0.0, 1.0), p) == 0.0
        assert ltp_delta(0.5, 10.0, 0.0, (0.0, 1.0), p) == 0.0  # post before pre
        assert ltd_delta(0.5, 0.0, 0.0, (0.0, 1.0), p) == 0.0  # simultaneous
        assert ltd_delta(0.5, p.window + 1.0, 0.0, (0.0, 1.0), p) == 0.0


class TestLinearRule:
    def test_constant_step_scaled_by_span(self):
        p = params(linear_rate=1 / 64)
        assert linear_delta("LTP", 0.0, p) == pytest.approx(1 / 64)
        assert linear_delta("LTD", 0.0, p) == pytest.approx(-1 / 64)
        # timing-independent by design
        assert linear_delta("LTP", 37.0, p) == linear_delta("LTP", 0.0, p)

    def test_role_validation(self):
        with pytest.raises(InputError):
            linear_delta("plasticity", 0.0, params())

    def test_deltas_route_to_linear_at_v_zero(self):
        p = params(linear_rate=0.02)
        assert ltp_delta(0.5, 0.0, 10.0, (0.0, 1.0), p) == pytest.approx(0.02)
        assert ltd_delta(0.5, 10.0, 0.0, (0.0, 1.0), p) == pytest.approx(-0.02)
        # span scaling
        assert ltp_delta(0.5, 0.0, 10.0, (0.25, 0.75), p) == pytest.approx(0.01)

    def test_params_validation(self):
        with pytest.raises(InputError):
            params(linear_rate=0.0)
        with pytest.raises(InputError):
            params(window=0.0)
        with pytest.raises(InputError):
            params(ltd_sign_mode="whatever")


def test_equation_oracle_grid():
    """1000 random parameter points against the mpmath oracle, < 1 s."""
    rng = np.random.default_rng(2024)
    n = 1000
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(n):
        v = 0.0
        while v == 0.0:
            v = rng.uniform(-3.0, 3.0)
        lo = rng.uniform(0.0, 0.5)
        hi = rng.uniform(0.5, 1.0)
        w = rng.uniform(lo, hi)
        gap = rng.uniform(1e-6, 50.0)
        beta = rng.uniform(0.5, 2.0)

        worst = max(worst, float(rel_err(compute_alpha(v, lo, hi), alpha_oracle(v, lo, hi))))

        p_print = params(v_ltp=v, v_ltd=v, beta=beta, ltd_sign_mode="as_printed")
        got = ltp_delta(w, 0.0, gap, (lo, hi), p_print)
        worst = max(worst, float(rel_err(got, ltp_oracle(w, gap, lo, hi, v, beta, 50.0))))

        got = ltd_delta(w, gap, 0.0, (lo, hi), p_print)
        worst = max(worst, float(rel_err(got, ltd_oracle_as_printed(w, gap, lo, hi, v, 50.0))))

        p_enf = params(v_ltp=v, v_ltd=v, beta=beta)
        got = ltd_delta(w, gap, 0.0, (lo, hi), p_enf)
        ref = ltd_oracle_as_printed(w, gap, lo, hi, v, 50.0)
        worst = max(worst, float(rel_err(got, -abs(ref))))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-9, f"worst relative error {worst}"
    assert elapsed < 1.0, f"oracle grid took {elapsed:.2f}s"


@settings(max_examples=300, deadline=None)
@given(
    v_ltp=st.floats(-3.0, 3.0),
    v_ltd=st.floats(-3.0, 3.0),
    w=st.floats(0.0, 1.0),
    lo=st.floats(0.0, 0.499),
    hi=st.floats(0.5, 1.0),
    gap=st.floats(0.0, 50.0),
)
def test_enforce_role_sign_guarantees(v_ltp, v_ltd, w, lo, hi, gap):
    w = lo + w * (hi - lo)
    p = params(v_ltp=v_ltp, v_ltd=v_ltd)
    assert ltp_delta(w, 0.0, gap, (lo, hi), p) >= 0.0
    if gap > 0.0:
        assert ltd_delta(w, gap, 0.0, (lo, hi), p) <= 0.0


# ---------------------------------------------------------------------------
# apply_stdp on a 2-neuron micro network
# ---------------------------------------------------------------------------


def micro_net(n_input=1):
    cfg = NetworkConfig(
        n_input=n_input, n_exc=1, n_inh=1, sample_duration=200.0, v_thres_exc=-58.0
    )
    return build_network(cfg, "static", rng_seed=5)


def records(pre_steps, post_steps, n_input_index=0):
    recs = [SpikeRecord(float(s), LAYER_INPUT, n_input_index) for s in pre_steps]
    recs += [SpikeRecord(float(s), LAYER_EXCITATORY, 0) for s in post_steps]
    return recs


class TestApplySTDP:
    def test_no_spikes_no_change(self):
        net = micro_net()
        w0 = net.syn.w.copy()
        apply_stdp(net, [], 100.0, params())
        assert np.array_equal(net.syn.w, w0)

    def test_three_pre_spikes_three_increments(self):
        net = micro_net()
        p = params(linear_rate=0.001)
        net.syn.w[0, 0] = 0.5
        t = 60.0
        apply_stdp(net, records([45, 50, 55], [t]), t, p)
        # three constant-step potentiations, applied sequentially and clamped
        assert net.syn.w[0, 0] == pytest.approx(0.5 + 3 * 0.001)

    def test_window_far_boundary_inclusive(self):
        p = params(linear_rate=0.001)
        t = 60.0
        net = micro_net()
        net.syn.w[0, 0] = 0.5
        apply_stdp(net, records([t - p.window], [t]), t, p)
        assert net.syn.w[0, 0] == pytest.approx(0.5 + 0.001), "gap == window is included"

        net = micro_net()
        net.syn.w[0, 0] = 0.5
        apply_stdp(net, records([t - p.window - 1.0], [t]), t, p)
        assert net.syn.w[0, 0] == pytest.approx(0.5), "gap == window + dt is excluded"

    def test_same_step_coincidence_pairs_with_neither_rule(self):
        p = params(linear_rate=0.001)
        t = 60.0
        net = micro_net()
        net.syn.w[0, 0] = 0.5
        net.exc.last_spike_time[0] = t
        apply_stdp(net, records([t], [t]), t, p)
        assert net.syn.w[0, 0] == pytest.approx(0.5)

    def test_ltd_against_most_recent_earlier_spike(self):
        p = params(linear_rate=0.001)
        t = 60.0
        net = micro_net()
        net.syn.w[0, 0] = 0.5
        net.exc.last_spike_time[0] = t - 10.0
        apply_stdp(net, records([t], []), t, p)
        assert net.syn.w[0, 0] == pytest.approx(0.5 - 0.001)

        # post spike too old -> nothing
        net = micro_net()
        net.syn.w[0, 0] = 0.5
        net.exc.last_spike_time[0] = t - p.window - 1.0
        apply_stdp(net, records([t], []), t, p)
        assert net.syn.w[0, 0] == pytest.approx(0.5)

    def test_masked_synapse_frozen(self):
        p = params(linear_rate=0.01)
        t = 60.0
        net = micro_net()
        net.syn.fault_mask[0, 0] = FAULT_SA0
        net.syn.w[0, 0] = 0.0
        net.exc.last_spike_time[0] = t - 5.0
        apply_stdp(net, records([40, 50, t], [t]), t, p)
        assert net.syn.w[0, 0] == 0.0

    def test_clamped_to_bounds(self):
        p = params(linear_rate=0.5)  # huge step
        t = 60.0
        net = micro_net()
        net.syn.w[0, 0] = 0.9
        apply_stdp(net, records([50, 52, 54], [t]), t, p)
        assert net.syn.w[0, 0] == 1.0

    @settings(max_examples=60, deadline=None)
    @given(
        v=st.floats(-3.0, 3.0),
        pre_offsets=st.lists(st.integers(1, 50), min_size=1, max_size=6),
        w0=st.floats(0.0, 1.0),
    )
    def test_clamp_safety_property(self, v, pre_offsets, w0):
        p = params(v_ltp=v, v_ltd=v, linear_rate=0.3)
        t = 80.0
        net = micro_net()
        net.syn.w[0, 0] = w0
        net.exc.last_spike_time[0] = t - 3.0
        pres = [t - o for o in pre_offsets] + [t]
        apply_stdp(net, records(pres, [t]), t, p)
        assert 0.0 <= net.syn.w[0, 0] <= 1.0

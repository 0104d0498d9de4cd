import numpy as np
import pytest

from snnfault import NetworkConfig, PlasticityParams, build_network
from snnfault import kernels
from snnfault.encoding import EncoderConfig, encode_poisson_raster
from snnfault.errors import ConfigurationError, InputError
from snnfault.faults import build_fault_plan, inject_faults


def cfg(**kw):
    base = dict(n_input=5, n_exc=4, n_inh=4, sample_duration=80.0)
    base.update(kw)
    return NetworkConfig(**base)


class TestBackendSelection:
    def test_default_prefers_numba(self):
        assert kernels.get_backend() == "numba"

    def test_explicit_argument(self):
        assert kernels.get_backend("numpy") == "numpy"

    def test_env_var(self, monkeypatch):
        monkeypatch.setenv(kernels.BACKEND_ENV, "numpy")
        assert kernels.get_backend() == "numpy"

    def test_argument_overrides_env(self, monkeypatch):
        monkeypatch.setenv(kernels.BACKEND_ENV, "numpy")
        assert kernels.get_backend("numba") == "numba"

    def test_unknown_rejected(self, monkeypatch):
        with pytest.raises(InputError):
            kernels.get_backend("fortran")
        monkeypatch.setenv(kernels.BACKEND_ENV, "cuda")
        with pytest.raises(InputError):
            kernels.get_backend()

    def test_available_backends(self):
        assert "numpy" in kernels.available_backends()


def simulate(backend, c, plan=None, v=(0.0, 0.0), n_samples=8, g_mode="random"):
    net = build_network(c, g_mode, rng_seed=31)
    if plan is not None:
        inject_faults(net, plan)
    p = PlasticityParams(v_ltp=v[0], v_ltd=v[1], linear_rate=0.02)
    enc = EncoderConfig(duration=c.sample_duration, dt=c.dt)
    rng = np.random.default_rng(99)
    counts = []
    for k in range(n_samples):
        x = rng.random(c.n_input)
        raster = encode_poisson_raster(x, enc, rng)
        train = k < n_samples - 2  # final two samples run as evaluation
        ce, ci = kernels.run_sample(net, raster, p, train=train, backend=backend)
        counts.append((ce.copy(), ci.copy()))
    return counts, net.syn.w.copy(), net.exc.theta.copy()


class TestBackendEquivalence:
    """The fused kernel must reproduce the op-level reference bit for bit."""

    @pytest.mark.parametrize("v", [(0.0, 0.0), (3.0, 3.0), (-3.0, -3.0), (2.0, 0.0)])
    def test_healthy_network(self, v):
        c = cfg()
        a = simulate("numba", c, v=v)
        b = simulate("numpy", c, v=v)
        for (ce1, ci1), (ce2, ci2) in zip(a[0], b[0]):
            assert np.array_equal(ce1, ce2)
            assert np.array_equal(ci1, ci2)
        assert np.array_equal(a[1], b[1])  # weights
        assert np.array_equal(a[2], b[2])  # thresholds

    def test_with_synapse_faults(self):
        c = cfg()
        plan = build_fault_plan("synapse", "SA1", "random", 0.4, c.n_exc, c.n_input, seed=3)
        a = simulate("numba", c, plan=plan)
        b = simulate("numpy", c, plan=plan)
        assert np.array_equal(a[1], b[1])
        for (ce1, _), (ce2, _) in zip(a[0], b[0]):
            assert np.array_equal(ce1, ce2)

    def test_with_neuron_faults(self):
        c = cfg()
        plan = build_fault_plan("neuron", None, None, 0.5, c.n_exc, c.n_input, seed=4)
        a = simulate("numba", c, plan=plan)
        b = simulate("numpy", c, plan=plan)
        assert np.array_equal(a[1], b[1])
        assert np.array_equal(a[2], b[2])

    def test_repeat_runs_bit_identical(self):
        c = cfg()
        a = simulate("numba", c)
        b = simulate("numba", c)
        assert np.array_equal(a[1], b[1])


def test_raster_shape_validated():
    c = cfg()
    net = build_network(c, rng_seed=0)
    with pytest.raises(ConfigurationError):
        kernels.run_sample(net, np.zeros((10, c.n_input), np.uint8), PlasticityParams(), True)


def test_warmup_runs():
    kernels.warmup()

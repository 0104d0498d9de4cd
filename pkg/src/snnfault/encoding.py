"""Rate coding of normalized features into per-step Bernoulli spike trains.

A feature x in [0, 1] drives its input neuron at rate x * intensity Hz,
realised as an independent Bernoulli draw per time step with
p = min(1, x * intensity * dt / 1000). This is the standard discrete
approximation of a Poisson process and is exact as dt -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass
class EncoderConfig:
    intensity: float = 500.0  # spikes per second at x = 1
    duration: float = 350.0  # ms, one presentation window
    dt: float = 1.0  # ms

    def __post_init__(self):
        if self.intensity < 0:
            raise InputError(f"intensity must be >= 0, got {self.intensity}")
        if self.duration <= 0 or self.dt <= 0:
            raise InputError("duration and dt must be > 0")
        steps = self.duration / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise InputError(
                f"duration ({self.duration}) must be an integer multiple of dt ({self.dt})"
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


def encode_poisson_raster(
    sample: np.ndarray, cfg: EncoderConfig, rng: np.random.Generator
) -> np.ndarray:
    """Encode one sample into a (n_steps, n_features) uint8 spike raster.

    Deterministic given the generator state; draws exactly one uniform
    block per call regardless of feature values.
    """
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1:
        raise InputError(f"sample must be 1-D, got shape {x.shape}")
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise InputError("features must lie in [0, 1]; normalize upstream")
    p = np.minimum(x * (cfg.intensity * cfg.dt / 1000.0), 1.0)
    u = rng.random((cfg.n_steps, x.size))
    return (u < p).astype(np.uint8)


def encode_poisson(
    sample: np.ndarray, cfg: EncoderConfig, rng: np.random.Generator
) -> list[np.ndarray]:
    """Per-neuron spike time lists (ms) for one presentation window."""
    raster = encode_poisson_raster(sample, cfg, rng)
    return [np.nonzero(raster[:, i])[0] * cfg.dt for i in range(raster.shape[1])]

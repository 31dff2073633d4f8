"""Detection front-ends: coherent AWGN, energy detection and differential BPSK.

Noise per real dimension has variance N0/2; with unit symbol energy this is
``1 / (2 * Es/N0)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .constellation import SignalSet

__all__ = [
    "Detection",
    "NoiseConfig",
    "ChannelModel",
    "sample_observation",
    "log_likelihood",
    "energy_logpdf",
    "differential_logpdf",
    "ENERGY_FLOOR",
]

#: z below this is evaluated at the floor (integrable 1/sqrt(z) singularity at 0)
ENERGY_FLOOR = 1e-300
_LOG_2PI = math.log(2 * math.pi)


class Detection(str, enum.Enum):
    COHERENT = "coherent"
    ENERGY = "energy"
    DIFFERENTIAL = "differential"


@dataclass(frozen=True)
class NoiseConfig:
    es_n0: float

    def __post_init__(self):
        if not self.es_n0 > 0:
            raise ValueError(f"Es/N0 must be positive, got {self.es_n0}")

    @property
    def sigma_sq(self) -> float:
        return 1.0 / (2.0 * self.es_n0)

    @classmethod
    def from_db(cls, esn0_db: float) -> "NoiseConfig":
        return cls(10.0 ** (esn0_db / 10.0))


@dataclass(frozen=True)
class ChannelModel:
    variant: Detection
    config: NoiseConfig

    def __post_init__(self):
        object.__setattr__(self, "variant", Detection(self.variant))

    @property
    def sigma_sq(self) -> float:
        return self.config.sigma_sq

    def check(self, signal_set: SignalSet) -> None:
        """Raise ValueError if this detector cannot be used with ``signal_set``."""
        if self.variant is Detection.ENERGY and not signal_set.is_binary_valued:
            raise ValueError("energy detection requires a PPM-type set (entries 0/1)")
        if self.variant is Detection.DIFFERENTIAL:
            pts = signal_set.points
            if pts.shape != (2, 1) or sorted(pts[:, 0]) != [-1.0, 1.0]:
                raise ValueError("differential detection requires the 2-point biPPM (BPSK) set")


def sample_observation(model: ChannelModel, x, rng: np.random.Generator) -> np.ndarray:
    """Noisy observation(s) of the point(s) ``x`` (shape ``(D,)`` or ``(N, D)``).

    Differential detection takes ``x = [s]`` with ``s = +-1`` and returns the
    scalar decision metric ``z = (s + n_k)(1 + n_{k-1})`` in the same shape.
    """
    x = np.asarray(x, dtype=float)
    sigma = math.sqrt(model.sigma_sq)
    if model.variant is Detection.DIFFERENTIAL:
        if x.shape[-1] != 1:
            raise ValueError("differential detection observes 1-dimensional symbols")
        noise = rng.standard_normal((2,) + x.shape) * sigma
        return (x + noise[0]) * (1.0 + noise[1])
    y = x + rng.standard_normal(x.shape) * sigma
    if model.variant is Detection.ENERGY:
        return y * y
    return y


def energy_logpdf(z, mu, sigma_sq):
    """log density of ``z = (mu + n)^2``, ``n ~ N(0, sigma_sq)``, for ``z >= 0``."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("energy observations must be non-negative")
    root = np.sqrt(np.maximum(z, ENERGY_FLOOR))
    mu = np.asarray(mu, dtype=float)
    a = -((root - mu) ** 2) / (2 * sigma_sq)
    b = -((root + mu) ** 2) / (2 * sigma_sq)
    return np.logaddexp(a, b) - 0.5 * _LOG_2PI - np.log(2 * math.sqrt(sigma_sq) * root)


def differential_logpdf(z, s, sigma_sq, n_nodes: int = 64):
    """log density of the differential metric given the information symbol ``s``."""
    if s not in (1, -1, 1.0, -1.0):
        raise ValueError(f"differential symbol must be +1 or -1, got {s}")
    return kernels.diff_logpdf(z, float(s), sigma_sq, n_nodes)


def log_likelihood(model: ChannelModel, observation, x):
    """log p(observation | x), summed over dimensions.

    Broadcasts over leading axes of ``observation`` / ``x``.
    """
    obs = np.asarray(observation, dtype=float)
    x = np.asarray(x, dtype=float)
    s2 = model.sigma_sq
    if model.variant is Detection.COHERENT:
        D = obs.shape[-1]
        return -0.5 * D * math.log(2 * math.pi * s2) - np.sum((obs - x) ** 2, axis=-1) / (2 * s2)
    if model.variant is Detection.ENERGY:
        return np.sum(energy_logpdf(obs, x, s2), axis=-1)
    s = np.broadcast_to(x[..., 0], obs.shape[:-1])
    z = np.broadcast_to(obs[..., 0], s.shape)
    if not np.all((s == 1.0) | (s == -1.0)):
        raise ValueError("differential symbols must be +1 or -1")
    out = np.empty(s.shape)
    for sign in (1.0, -1.0):
        sel = s == sign
        out[sel] = differential_logpdf(z[sel], sign, s2)
    return out[()] if out.ndim == 0 else out

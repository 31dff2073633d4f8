"""Monte-Carlo estimates of CM, bit-level and BICM capacities.

Each estimate is the sample mean of a per-sample log-likelihood ratio with
exact mixture densities in the denominator. Samples are drawn in fixed-size
blocks; block ``b`` of grid point ``g`` uses the Philox stream keyed by
``(seed, stream, g, b)``, and block statistics are merged in block order, so
results depend only on those keys and never on how work is split up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import kernels
from .channels import ChannelModel, Detection, sample_observation
from .constellation import Labeling, SignalSet, constrained_subset

__all__ = [
    "MiEstimate",
    "CapacityEstimate",
    "simulate",
    "cm_capacity",
    "bit_level_capacity",
    "bicm_capacity",
    "bicm_capacity_decomposed",
    "chain_rule_levels",
    "combined_std_error",
    "BLOCK_SIZE",
    "DEFAULT_SAMPLES",
    "MIN_SAMPLES",
    "MAX_SAMPLES",
]

BLOCK_SIZE = 1 << 15
DEFAULT_SAMPLES = 200_000
MIN_SAMPLES = 1_000
MAX_SAMPLES = 10_000_000
_LOG2E = 1.0 / math.log(2.0)


@dataclass(frozen=True)
class MiEstimate:
    value_bits: float
    std_error: float
    n_samples: int
    seed: int


@dataclass(frozen=True)
class CapacityEstimate:
    """CM, BICM and bit-level estimates computed from one common sample stream."""

    esn0: float
    cm: MiEstimate
    bicm: MiEstimate | None
    levels: tuple[MiEstimate, ...]


def combined_std_error(*estimates: MiEstimate) -> float:
    return math.sqrt(sum(e.std_error**2 for e in estimates))


def stream_rng(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for the substream ``key`` of ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _metrics(model: ChannelModel, signal_set: SignalSet, obs: np.ndarray) -> np.ndarray:
    """log p(obs | x_j) for every point, up to a per-sample additive constant."""
    pts = signal_set.points
    s2 = model.sigma_sq
    if model.variant is Detection.COHERENT:
        # all points have unit norm: -|y - x|^2 / 2s2 = y.x / s2 + const
        return obs @ pts.T / s2
    if model.variant is Detection.ENERGY:
        # 0/1 points: sum_i log p(z_i|x_i) = sum_i log p(z_i|0) + sum_{i: x_i=1} log[p(z_i|1)/p(z_i|0)]
        return kernels.energy_metrics(obs, 1.0 / s2) @ pts.T
    z = obs[:, 0]
    return np.stack([kernels.diff_logpdf(z, s, s2) for s in pts[:, 0]], axis=1)


def _merge(a, b):
    """Chan et al. pairwise merge of (count, mean, M2) statistics."""
    na, ma, qa = a
    nb, mb, qb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * (nb / n), qa + qb + delta * delta * (na * nb / n)


class _Driver:
    """Draws blocks of samples and caches their statistics for reuse when n grows."""

    def __init__(self, signal_set, model, seed, grid_index, stream, terms):
        model.check(signal_set)
        self.signal_set = signal_set
        self.model = model
        self.seed = int(seed)
        self.key = (int(stream), int(grid_index))
        self.terms = terms
        self._cache = {}

    def _block(self, index: int, size: int):
        key = (index, size)
        if key not in self._cache:
            rng = stream_rng(self.seed, *self.key, index)
            M = self.signal_set.size
            sym = rng.integers(M, size=size)
            obs = sample_observation(self.model, self.signal_set.points[sym], rng)
            vals = self.terms(_metrics(self.model, self.signal_set, obs), sym) * _LOG2E
            mean = vals.mean(axis=0)
            q = np.sum((vals - mean) ** 2, axis=0)
            self._cache[key] = (size, mean, q)
        return self._cache[key]

    def stats(self, n: int):
        full, rest = divmod(n, BLOCK_SIZE)
        sizes = [BLOCK_SIZE] * full + ([rest] if rest else [])
        acc = None
        for i, size in enumerate(sizes):
            blk = self._block(i, size)
            acc = blk if acc is None else _merge(acc, blk)
        count, mean, q = acc
        se = np.sqrt(q / (count - 1) / count)
        return mean, se


def _check_samples(n_samples):
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"n_samples must be at least {MIN_SAMPLES}, got {n_samples}")


def _run(driver: _Driver, n_samples, target_se, max_samples, watch):
    n = int(n_samples)
    while True:
        mean, se = driver.stats(n)
        if target_se is None or n >= max_samples or np.max(se[watch]) < target_se:
            return n, mean, se
        n = min(2 * n, int(max_samples))


def _labeled_terms(bits):
    m = bits.shape[1]

    def terms(metrics, sym):
        cm, levels = kernels.mi_terms(metrics, sym, bits)
        out = np.empty((cm.size, m + 2))
        out[:, 0] = cm
        out[:, 1] = levels.sum(axis=1)
        out[:, 2:] = levels
        return out

    return terms


def simulate(
    signal_set: SignalSet,
    labeling: Labeling | None,
    model: ChannelModel,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    grid_index: int = 0,
    stream: int = 0,
    target_se: float | None = None,
    max_samples: int = MAX_SAMPLES,
) -> CapacityEstimate:
    """CM, BICM and all bit-level capacities on shared samples.

    With ``target_se`` the sample count doubles until the CM and BICM
    standard errors drop below it or ``max_samples`` is reached.
    """
    _check_samples(n_samples)
    if labeling is None:
        bits = np.zeros((signal_set.size, 0), dtype=np.int8)
    else:
        if labeling.size != signal_set.size:
            raise ValueError("labeling size does not match the signal set")
        bits = labeling.bits
    driver = _Driver(signal_set, model, seed, grid_index, stream, _labeled_terms(bits))
    watch = [0, 1] if labeling is not None else [0]
    n, mean, se = _run(driver, n_samples, target_se, max(max_samples, n_samples), watch)

    def est(k):
        return MiEstimate(float(mean[k]), float(se[k]), n, int(seed))

    if labeling is None:
        return CapacityEstimate(model.config.es_n0, est(0), None, ())
    levels = tuple(est(2 + mu) for mu in range(bits.shape[1]))
    return CapacityEstimate(model.config.es_n0, est(0), est(1), levels)


def cm_capacity(signal_set, labeling, model, n_samples=DEFAULT_SAMPLES, seed=0, **kw) -> MiEstimate:
    """I(X;Y) in bits per symbol; ``labeling`` is not needed and may be None."""
    return simulate(signal_set, None, model, n_samples, seed, **kw).cm


def bit_level_capacity(signal_set, labeling, model, mu, n_samples=DEFAULT_SAMPLES, seed=0, **kw) -> MiEstimate:
    """I(B_mu;Y) for bit position ``mu`` (1 = most significant)."""
    if not 1 <= mu <= labeling.bits_per_symbol:
        raise ValueError(f"bit position must be in 1..{labeling.bits_per_symbol}, got {mu}")
    return simulate(signal_set, labeling, model, n_samples, seed, **kw).levels[mu - 1]


def bicm_capacity(signal_set, labeling, model, n_samples=DEFAULT_SAMPLES, seed=0, **kw) -> CapacityEstimate:
    """Sum of bit-level capacities; the result also carries the levels and CM."""
    if labeling is None:
        raise ValueError("BICM capacity needs a labeling")
    return simulate(signal_set, labeling, model, n_samples, seed, **kw)


def bicm_capacity_decomposed(
    signal_set, labeling, model, n_samples=DEFAULT_SAMPLES, seed=0, *, grid_index=0
) -> MiEstimate:
    """BICM capacity as m*C(X) - 1/2 sum_{mu,b} C(X_b^mu).

    Every term is an independent CM estimate on its own stream, so this is a
    separate estimator from the sum of bit levels in :func:`bicm_capacity`.
    """
    m = labeling.bits_per_symbol
    full = simulate(signal_set, None, model, n_samples, seed, grid_index=grid_index, stream=1).cm
    value = m * full.value_bits
    var = (m * full.std_error) ** 2
    for mu in range(1, m + 1):
        for b in (0, 1):
            subset = constrained_subset(signal_set, labeling, mu, b).as_signal_set()
            stream = 2 + 2 * (mu - 1) + b
            sub = simulate(subset, None, model, n_samples, seed, grid_index=grid_index, stream=stream).cm
            value -= 0.5 * sub.value_bits
            var += (0.5 * sub.std_error) ** 2
    return MiEstimate(value, math.sqrt(var), full.n_samples, int(seed))


def chain_rule_levels(
    signal_set, labeling, model, n_samples=DEFAULT_SAMPLES, seed=0, *, grid_index=0
) -> tuple[MiEstimate, ...]:
    """I(B_mu; Y | B_1..B_{mu-1}) for mu = 1..m (successive decoding levels)."""
    _check_samples(n_samples)
    M = signal_set.size
    m = labeling.bits_per_symbol
    labels = labeling.label_of

    def terms(metrics, sym):
        prev = logsumexp(metrics, axis=1) - math.log(M)
        out = np.empty((sym.size, m))
        for mu in range(1, m + 1):
            shift = m - mu
            prefix = labels >> shift
            same = prefix[None, :] == prefix[sym][:, None]
            cur = logsumexp(metrics, axis=1, b=same) - math.log(M >> mu)
            out[:, mu - 1] = cur - prev
            prev = cur
        return out

    driver = _Driver(signal_set, model, seed, grid_index, 0, terms)
    mean, se = driver.stats(int(n_samples))
    return tuple(MiEstimate(float(v), float(s), int(n_samples), int(seed)) for v, s in zip(mean, se))

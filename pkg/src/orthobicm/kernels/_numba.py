"""numba-compiled kernels; same contracts as the numpy versions in ``_numpy``."""

import math

import numpy as np
from numba import njit

from ._numpy import DIFF_TAIL, MAX_NODES, MAX_WIDTH, NODE_STEP

LOG2 = math.log(2.0)


@njit(cache=True)
def _lse_masked(row, bits_col, want):
    hi = -np.inf
    for j in range(row.size):
        if bits_col[j] == want and row[j] > hi:
            hi = row[j]
    acc = 0.0
    for j in range(row.size):
        if bits_col[j] == want:
            acc += math.exp(row[j] - hi)
    return hi + math.log(acc)


@njit(cache=True)
def mi_terms(metrics, sym, bits):
    N, M = metrics.shape
    m = bits.shape[1]
    cm = np.empty(N)
    levels = np.empty((N, m))
    logM = math.log(M)
    for n in range(N):
        row = metrics[n]
        hi = row.max()
        acc = 0.0
        for j in range(M):
            acc += math.exp(row[j] - hi)
        lse_all = hi + math.log(acc)
        k = sym[n]
        cm[n] = row[k] - lse_all + logM
        for mu in range(m):
            lse_b = _lse_masked(row, bits[:, mu], bits[k, mu])
            levels[n, mu] = lse_b - lse_all + LOG2
    return cm, levels


@njit(cache=True)
def energy_metrics(z, inv_var):
    out = np.empty_like(z)
    zf = z.ravel()
    of = out.ravel()
    for i in range(zf.size):
        a = math.sqrt(max(zf[i], 0.0)) * inv_var
        of[i] = a + math.log1p(math.exp(-2.0 * a)) - LOG2
    return out


@njit(cache=True)
def _node_count(span, width, n_min):
    need = math.ceil(span / (NODE_STEP * width)) + 1.0
    k = math.ceil(math.log2(max(need / n_min, 1.0)))
    return int(min(n_min * 2.0**k, max(MAX_NODES, n_min)))


@njit(cache=True)
def _diff_logpdf_scalar(zeta, tau2, n_min):
    two_tau2 = 2.0 * tau2
    r = math.sqrt(max(abs(zeta), 1e-300))
    r2 = r * r
    pref = -math.log(2.0 * math.pi * tau2)
    if zeta > 0:
        if r <= 0.5:
            e_min = (0.5 - r2) / two_tau2
            curv = (0.5 - 2.0 * r2) / tau2
        else:
            e_min = (r - 1.0) ** 2 / two_tau2
            curv = r * (2.0 * r - 1.0) / tau2
        k = two_tau2 * (e_min + DIFF_TAIL)
        root = math.sqrt(max(2.0 * r2 + 2.0 * k - 1.0, 0.0))
        t_hi = math.acosh(max((1.0 + root) / (2.0 * r), 1.0))
        t_lo = math.acosh(max((1.0 - root) / (2.0 * r), 1.0))
        width = min(1.0 / math.sqrt(max(curv, 1e-300)), math.sqrt(2.0 * math.sqrt(tau2) / r), MAX_WIDTH)
        n = _node_count(t_hi - t_lo, width, n_min)
        h = (t_hi - t_lo) / (n - 1)
        acc = 0.0
        for i in range(n):
            c = math.cosh(t_lo + (t_hi - t_lo) * (i / (n - 1)))
            q = 2.0 * r2 * c * c + 1.0 - r2
            lin = 2.0 * r * c
            g = 0.5 * (math.exp(-((q - lin) / two_tau2 - e_min)) + math.exp(-((q + lin) / two_tau2 - e_min)))
            if i == 0 or i == n - 1:
                g *= 0.5
            acc += g
        return pref - e_min + math.log(2.0 * h * acc)
    e_min = (r2 + 0.5) / two_tau2
    half = math.sqrt(tau2 * DIFF_TAIL)
    t_lo = math.asinh((1.0 - 2.0 * half) / (2.0 * r))
    t_hi = math.asinh((1.0 + 2.0 * half) / (2.0 * r))
    width = min(math.sqrt(tau2 / (2.0 * r2 + 0.5)), MAX_WIDTH)
    n = _node_count(t_hi - t_lo, width, n_min)
    h = (t_hi - t_lo) / (n - 1)
    acc = 0.0
    for i in range(n):
        sh = math.sinh(t_lo + (t_hi - t_lo) * (i / (n - 1)))
        g = math.exp(-((2.0 * r2 * sh * sh - 2.0 * r * sh + r2 + 1.0) / two_tau2 - e_min))
        if i == 0 or i == n - 1:
            g *= 0.5
        acc += g
    return pref - e_min + math.log(h * acc)


@njit(cache=True)
def _diff_logpdf(z, sign, sigma_sq, n_min):
    out = np.empty(z.size)
    tau2 = 0.5 * sigma_sq
    for i in range(z.size):
        out[i] = _diff_logpdf_scalar(sign * z[i], tau2, n_min)
    return out


def diff_logpdf(z, sign, sigma_sq, n_nodes=64):
    z = np.asarray(z, dtype=float)
    return _diff_logpdf(np.ascontiguousarray(z).ravel(), float(sign), float(sigma_sq), int(n_nodes)).reshape(z.shape)

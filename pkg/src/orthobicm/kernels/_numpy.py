"""Pure-numpy reference implementations of the hot kernels."""

import numpy as np
from scipy.special import logsumexp

LOG2 = np.log(2.0)
#: log-integrand drop (nats) at which the differential-detection quadrature is truncated
DIFF_TAIL = 50.0
#: largest trapezoid step, in units of the integrand's mode width
NODE_STEP = 0.5
MAX_NODES = 1 << 16
#: cap on the mode width; the double-exponential tails need a step of order 0.1 regardless
MAX_WIDTH = 0.3


def mi_terms(metrics, sym, bits):
    """Per-sample information terms in nats.

    ``metrics[n, j]`` is log p(y_n | x_j) up to a per-sample constant, ``sym``
    the transmitted indices and ``bits`` the (M, m) label bit table. Returns
    ``(cm, levels)`` with ``cm[n] = log p(y|x) - log p(y)`` and
    ``levels[n, mu] = log p(y|b_mu) - log p(y)``.
    """
    N, M = metrics.shape
    m = bits.shape[1]
    lse_all = logsumexp(metrics, axis=1)
    rows = np.arange(N)
    cm = metrics[rows, sym] - lse_all + np.log(M)
    levels = np.empty((N, m))
    for mu in range(m):
        one = bits[:, mu] == 1
        lse1 = logsumexp(metrics[:, one], axis=1)
        lse0 = logsumexp(metrics[:, ~one], axis=1)
        lse_b = np.where(bits[sym, mu] == 1, lse1, lse0)
        levels[:, mu] = lse_b - lse_all + LOG2
    return cm, levels


def energy_metrics(z, inv_var):
    """log[p(z|1) / p(z|0)] + 1/(2 sigma^2) = log cosh(sqrt(z)/sigma^2), elementwise."""
    a = np.sqrt(np.maximum(z, 0.0)) * inv_var
    return a + np.log1p(np.exp(-2.0 * a)) - LOG2


def _pos_setup(r, tau2):
    """Truncated t-range, mode exponent and mode width for zeta = r^2 > 0."""
    r2 = r * r
    two_tau2 = 2.0 * tau2
    e_min = np.where(r <= 0.5, 0.5 - r2, (r - 1.0) ** 2) / two_tau2
    k = two_tau2 * (e_min + DIFF_TAIL)
    root = np.sqrt(np.maximum(2.0 * r2 + 2.0 * k - 1.0, 0.0))
    t_hi = np.arccosh(np.maximum((1.0 + root) / (2.0 * r), 1.0))
    t_lo = np.arccosh(np.maximum((1.0 - root) / (2.0 * r), 1.0))
    # curvature of the exponent at the mode, guarded by the quartic term near r = 1/2
    curv = np.where(r <= 0.5, 0.5 - 2.0 * r2, r * (2.0 * r - 1.0)) / tau2
    width = np.minimum(1.0 / np.sqrt(np.maximum(curv, 1e-300)), np.sqrt(2.0 * np.sqrt(tau2) / r))
    return t_lo, t_hi, e_min, np.minimum(width, MAX_WIDTH)


def _neg_setup(r, tau2):
    """Same for zeta = -r^2 < 0."""
    r2 = r * r
    e_min = (r2 + 0.5) / (2.0 * tau2)
    half = np.sqrt(tau2 * DIFF_TAIL)
    t_lo = np.arcsinh((1.0 - 2.0 * half) / (2.0 * r))
    t_hi = np.arcsinh((1.0 + 2.0 * half) / (2.0 * r))
    width = np.sqrt(tau2 / (2.0 * r2 + 0.5))
    return t_lo, t_hi, e_min, np.minimum(width, MAX_WIDTH)


def node_count(span, width, n_min):
    """Trapezoid nodes: at least ``n_min`` and a step of at most ``NODE_STEP`` mode widths.

    Rounded up to ``n_min * 2**k`` so that samples can share grids; capped at ``MAX_NODES``.
    """
    need = np.ceil(span / (NODE_STEP * width)) + 1.0
    k = np.ceil(np.log2(np.maximum(need / n_min, 1.0)))
    return np.minimum(n_min * 2.0 ** k, max(MAX_NODES, n_min)).astype(np.int64)


def _pos_sum(r, tau2, t_lo, t_hi, e_min, n):
    grid = np.linspace(0.0, 1.0, n)
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    two_tau2 = 2.0 * tau2
    r2 = (r * r)[:, None]
    t = t_lo[:, None] + (t_hi - t_lo)[:, None] * grid
    h = (t_hi - t_lo) / (n - 1)
    c = np.cosh(t)
    q = 2.0 * r2 * c * c + 1.0 - r2
    lin = 2.0 * r[:, None] * c
    e1 = (q - lin) / two_tau2 - e_min[:, None]
    e2 = (q + lin) / two_tau2 - e_min[:, None]
    s = np.sum(w * 0.5 * (np.exp(-e1) + np.exp(-e2)), axis=1)
    # even integrand: integral over t >= 0 counted twice
    return np.log(2.0 * h * s)


def _neg_sum(r, tau2, t_lo, t_hi, e_min, n):
    grid = np.linspace(0.0, 1.0, n)
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    r2 = (r * r)[:, None]
    t = t_lo[:, None] + (t_hi - t_lo)[:, None] * grid
    h = (t_hi - t_lo) / (n - 1)
    sh = np.sinh(t)
    e = (2.0 * r2 * sh * sh - 2.0 * r[:, None] * sh + r2 + 1.0) / (2.0 * tau2) - e_min[:, None]
    return np.log(h * np.sum(w * np.exp(-e), axis=1))


def diff_logpdf(z, sign, sigma_sq, n_nodes=64):
    """log p(z | s) for z = (s + n1)(1 + n2), n1, n2 ~ N(0, sigma_sq) independent.

    With u = 1 + (n1+n2)/2 and v = (n1-n2)/2 (independent, variance
    sigma_sq/2) the product is u^2 - v^2. Hyperbolic coordinates turn the
    density into a smooth one-dimensional integral whose log-integrand is a
    quadratic in cosh t (z > 0) or sinh t (z < 0); its mode, width and the
    truncation points are closed form, and a trapezoid rule on the truncated
    range converges spectrally. ``n_nodes`` is the minimum node count; small
    |z| stretch the range and get more. z = 0 is evaluated at |z| = 1e-300.
    """
    z = np.asarray(z, dtype=float)
    zeta = (sign * z).ravel()
    tau2 = 0.5 * sigma_sq
    r = np.sqrt(np.maximum(np.abs(zeta), 1e-300))
    out = np.empty_like(r)
    pref = -np.log(2.0 * np.pi * tau2)
    for mask, setup, body in ((zeta > 0, _pos_setup, _pos_sum), (zeta <= 0, _neg_setup, _neg_sum)):
        if not np.any(mask):
            continue
        idx = np.nonzero(mask)[0]
        t_lo, t_hi, e_min, width = setup(r[idx], tau2)
        counts = node_count(t_hi - t_lo, width, n_nodes)
        for n in np.unique(counts):
            sel = counts == n
            out[idx[sel]] = pref - e_min[sel] + body(r[idx[sel]], tau2, t_lo[sel], t_hi[sel], e_min[sel], int(n))
    return out.reshape(z.shape)

"""Hot inner loops of the Monte-Carlo estimator.

The numba versions are used when numba imports and ``ORTHOBICM_DISABLE_NUMBA``
is unset (or ``0``); otherwise the pure-numpy versions. Both produce the same
numbers up to floating-point summation order.
"""

import os

import numpy as np

from . import _numpy

BACKEND = "numpy"
if os.environ.get("ORTHOBICM_DISABLE_NUMBA", "0") in ("", "0"):
    try:
        from . import _numba
    except ImportError:  # numba missing or broken
        _numba = None
    else:
        BACKEND = "numba"

if BACKEND == "numba":
    _impl = _numba
else:
    _impl = _numpy


def mi_terms(metrics, sym, bits):
    return _impl.mi_terms(np.ascontiguousarray(metrics, dtype=float), np.asarray(sym, dtype=np.int64),
                          np.ascontiguousarray(bits, dtype=np.int8))


def energy_metrics(z, inv_var):
    return _impl.energy_metrics(np.ascontiguousarray(z, dtype=float), float(inv_var))


def diff_logpdf(z, sign, sigma_sq, n_nodes=64):
    return _impl.diff_logpdf(z, sign, sigma_sq, n_nodes)


def available_backends():
    """All importable backends, regardless of the env flag (for tests and benchmarks)."""
    out = {"numpy": _numpy}
    try:
        from . import _numba as nb
    except ImportError:
        return out
    out["numba"] = nb
    return out

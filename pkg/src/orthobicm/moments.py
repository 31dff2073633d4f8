"""Mean / covariance summaries of equiprobable point sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["MomentSummary", "covariance", "moments"]


@dataclass(frozen=True)
class MomentSummary:
    mean: np.ndarray
    mean_sq_norm: float
    trace_cov: float
    trace_cov_sq: float


def _as_points(points) -> np.ndarray:
    try:
        pts = np.asarray(getattr(points, "points", points), dtype=float)
    except ValueError as exc:  # ragged input
        raise ValueError("points must be vectors of one common dimension") from exc
    if pts.size == 0:
        raise ValueError("need at least one point")
    if pts.ndim != 2:
        raise ValueError("points must be vectors of one common dimension")
    return pts


def covariance(points) -> np.ndarray:
    """Population covariance (1/n, no Bessel correction) of row vectors."""
    pts = _as_points(points)
    centered = pts - pts.mean(axis=0)
    return centered.T @ centered / pts.shape[0]


def moments(points) -> MomentSummary:
    """Moment summary of equiprobable ``points`` (array, list or SignalSet)."""
    pts = _as_points(points)
    mean = pts.mean(axis=0)
    K = covariance(pts)
    # K is symmetric, so trace(K @ K) is its squared Frobenius norm
    return MomentSummary(
        mean=mean,
        mean_sq_norm=float(mean @ mean),
        trace_cov=float(np.trace(K)),
        trace_cov_sq=float(np.sum(K * K)),
    )

"""Second-order low-SNR expansion of CM / BICM capacity.

Capacity near Es/N0 = 0 is ``(c1*x + c2*x**2) / ln 2`` bits with ``x = Es/N0``.
Coefficients are kept in nats; bits only appear in the derived summaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constellation import Labeling, SignalSet, constrained_subset
from .moments import moments

__all__ = [
    "TaylorCoefficients",
    "WidebandSummary",
    "TangentLine",
    "cm_coefficients",
    "bicm_coefficients",
    "wideband_summary",
    "slope_db_from_linear",
    "tangent_line",
    "is_wideband_optimal",
    "closed_form",
    "DB_PER_OCTAVE",
]

LN2 = math.log(2.0)
#: 10*log10(2): the "3 dB" in bits per 3 dB
DB_PER_OCTAVE = 10.0 * math.log10(2.0)


@dataclass(frozen=True)
class TaylorCoefficients:
    c1: float
    c2: float
    scheme: str  # "CM" or "BICM"

    def capacity_bits(self, esn0):
        """Second-order approximation of the capacity in bits per symbol."""
        x = np.asarray(esn0, dtype=float)
        return (self.c1 * x + self.c2 * x * x) / LN2


def cm_coefficients(signal_set: SignalSet) -> TaylorCoefficients:
    mom = moments(signal_set.points)
    return TaylorCoefficients(mom.trace_cov, -mom.trace_cov_sq, "CM")


def bicm_coefficients(signal_set: SignalSet, labeling: Labeling) -> TaylorCoefficients:
    full = moments(signal_set.points)
    c1 = c2 = 0.0
    for mu in range(1, labeling.bits_per_symbol + 1):
        for b in (0, 1):
            sub = moments(constrained_subset(signal_set, labeling, mu, b).points)
            c1 += full.trace_cov - sub.trace_cov
            c2 += sub.trace_cov_sq - full.trace_cov_sq
    return TaylorCoefficients(0.5 * c1, 0.5 * c2, "BICM")


def closed_form(scheme: str, mode: str, M: int, labeling: str | None = None) -> TaylorCoefficients:
    """Closed-form coefficients of (bi)PPM, independent of the trace computation.

    ``scheme`` is ``"ppm"`` or ``"bippm"``, ``mode`` is ``"CM"`` or ``"BICM"``;
    BICM biPPM needs ``labeling`` in ``{"natural", "near-gray"}``.
    """
    m = math.log2(M)
    if scheme == "ppm":
        if mode == "CM":
            return TaylorCoefficients(1 - 1 / M, -(1 - 1 / M) / M, mode)
        return TaylorCoefficients(m / M, (m / M) * (1 - 3 / M), mode)
    if scheme == "bippm":
        D = M / 2
        if mode == "CM":
            return TaylorCoefficients(1.0, -1 / D, mode)
        if labeling == "near-gray":
            return TaylorCoefficients(m / D, -m / D**2, mode)
        if labeling == "natural":
            return TaylorCoefficients(1 / D, m / D - (1 / D) * (1 + 1 / D), mode)
        raise ValueError(f"unknown biPPM labeling {labeling!r}")
    raise ValueError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class WidebandSummary:
    ebno_lim_linear: float
    ebno_lim_db: float
    s0_linear: float | None
    slope_per_dim_3db: float | None
    dim: int

    @property
    def slope_defined(self) -> bool:
        return self.slope_per_dim_3db is not None


def wideband_summary(coeffs: TaylorCoefficients, dim: int) -> WidebandSummary:
    """Limit Eb/N0 and wideband slopes; slopes are None when c2 vanishes."""
    c1, c2 = coeffs.c1, coeffs.c2
    if not c1 > 0:
        raise ValueError(f"c1 must be positive, got {c1}")
    ebno = LN2 / c1
    if abs(c2) <= 1e-14 * max(1.0, c1 * c1):
        s0 = slope = None
    else:
        s0 = -(c1**3) / (c2 * LN2**2)
        slope = -(c1**2) / (dim * c2)
    return WidebandSummary(ebno, 10 * math.log10(ebno), s0, slope, dim)


def slope_db_from_linear(s0_linear: float, ebno_lim_linear: float, dim: int) -> float:
    """Bits/dim per 3 dB from the linear-scale slope (tangent-rescaling route)."""
    per_db = math.log(10) / 10 * ebno_lim_linear * s0_linear
    return per_db * DB_PER_OCTAVE / dim


@dataclass(frozen=True)
class TangentLine:
    start_db: float
    stop_db: float
    slope: float  # bits/dim per 3 dB

    @property
    def points(self):
        return ((self.start_db, 0.0), (self.stop_db, self.slope * (self.stop_db - self.start_db) / 3.0))


def tangent_line(summary: WidebandSummary, span_db: float = 3.0) -> TangentLine | None:
    """Wideband tangent through ``(ebno_lim_db, 0)``; None if the slope is undefined."""
    if not summary.slope_defined:
        return None
    return TangentLine(summary.ebno_lim_db, summary.ebno_lim_db + span_db, summary.slope_per_dim_3db)


def is_wideband_optimal(coeffs: TaylorCoefficients, dim: int, rtol: float = 1e-12) -> bool:
    """c1 = 1 and c2 = -1/D: zero mean and a proper constellation."""
    return math.isclose(coeffs.c1, 1.0, rel_tol=rtol) and math.isclose(coeffs.c2, -1.0 / dim, rel_tol=rtol)

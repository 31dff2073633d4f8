"""Wideband and Monte-Carlo capacity analysis of CM and BICM with (bi)orthogonal PPM."""

from .channels import ChannelModel, Detection, NoiseConfig, log_likelihood, sample_observation
from .constellation import (
    ConstrainedSubset,
    Labeling,
    SignalSet,
    constrained_subset,
    labeling_natural,
    labeling_near_gray,
    make_bippm,
    make_ppm,
)
from .mi import (
    CapacityEstimate,
    MiEstimate,
    bicm_capacity,
    bicm_capacity_decomposed,
    bit_level_capacity,
    cm_capacity,
    simulate,
)
from .moments import MomentSummary, moments
from .sweep import SweepSpec, min_ebno, render_table, run_sweep, shannon_reference
from .wideband import (
    TaylorCoefficients,
    WidebandSummary,
    bicm_coefficients,
    cm_coefficients,
    tangent_line,
    wideband_summary,
)

__version__ = "0.1.0"

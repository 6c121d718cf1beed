"""Ergodic capacity analysis and statistical-CSI design for RIS-assisted MIMO links."""

from ._validation import DimensionError, NumericError, RiscapError, ValidationError
from .capacity import (
    CapacityEstimate,
    EigenTriplet,
    c_app_mc,
    c_app_quadrature,
    c_high_snr_upper,
    c_jen1,
    c_jen2,
    eigen_triplet,
    exact_capacity_mc,
)
from .channel import ChannelRealization, SteeringSet, sample_realization, steering_set, trial_rng
from .config import SystemConfig
from .experiments import ExperimentSpec, parse_config, run_experiment
from .optimize import JointOptimizer, alternating_optimize

__version__ = "0.1.0"

__all__ = [
    "CapacityEstimate", "ChannelRealization", "DimensionError", "EigenTriplet", "ExperimentSpec",
    "JointOptimizer", "NumericError", "RiscapError", "SteeringSet", "SystemConfig", "ValidationError",
    "alternating_optimize", "c_app_mc", "c_app_quadrature", "c_high_snr_upper", "c_jen1", "c_jen2",
    "eigen_triplet", "exact_capacity_mc", "parse_config", "run_experiment", "sample_realization",
    "steering_set", "trial_rng",
]

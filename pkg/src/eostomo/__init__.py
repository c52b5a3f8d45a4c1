"""Quantum tomography of mid-infrared fields via electro-optic sampling.

The package builds band-limited electric-field and Hilbert-quadrature
detection modes, propagates Gaussian states through a linearized
electro-optic detection chain and evaluates coupling and mode-matching
figures of merit.
"""

__version__ = "0.1.0"

from .chain import (DetectionOperator, arbitrary_phase_quadrature, balanced_transmission,
                    beam_splitter_variant, detect, detected_E_operator, detected_H_operator,
                    interaction_kernel, multiplexed_EH, readout_from_transform)
from .constants import PhysicalConstants, omega_to_thz, thz_to_omega
from .errors import (BasisTooSmallError, ConfigurationError, DomainError, EostomoError,
                     GridMismatchError, InfeasibleConstraintError, InvariantViolation,
                     NonCommutingError, RangeError, UndefinedMatchingError)
from .field import (FrequencyGrid, SpectralMode, bandlimited_E, bandlimited_H, electric_mode_at,
                    hilbert_of, norm2, overlap, sampling_profile, time_waveform)
from .gaussian import (BogoliubovTransform, GaussianState, ModeBasis, detection_moments, husimi_q,
                       joint_moments, sample_shots, squeezed_signal, variance_delta)
from .metrics import (ChainConfig, Optimum, SweepResult, bandwidth_sweep, coupling_intensity,
                      mode_matching, optimize_bandwidth)
from .optics import CrystalParams, MidInfraredIndex, SellmeierIndex, Waveplate
from .ports import Port, PortConfig
from .probes import ProbePulse

__all__ = [
    "BasisTooSmallError", "BogoliubovTransform", "ChainConfig", "ConfigurationError", "CrystalParams",
    "DetectionOperator", "DomainError", "EostomoError", "FrequencyGrid", "GaussianState",
    "GridMismatchError", "InfeasibleConstraintError", "InvariantViolation", "MidInfraredIndex",
    "ModeBasis", "NonCommutingError", "Optimum", "PhysicalConstants", "Port", "PortConfig",
    "ProbePulse", "RangeError", "SellmeierIndex", "SpectralMode", "SweepResult",
    "UndefinedMatchingError", "Waveplate", "arbitrary_phase_quadrature", "balanced_transmission",
    "bandlimited_E", "bandlimited_H", "bandwidth_sweep", "beam_splitter_variant", "coupling_intensity",
    "detect", "detected_E_operator", "detected_H_operator", "detection_moments", "electric_mode_at",
    "hilbert_of", "husimi_q", "interaction_kernel", "joint_moments", "mode_matching", "multiplexed_EH",
    "norm2", "omega_to_thz", "optimize_bandwidth", "overlap", "readout_from_transform", "sample_shots",
    "sampling_profile", "squeezed_signal", "thz_to_omega", "time_waveform", "variance_delta",
]

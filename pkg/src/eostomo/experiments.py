"""Experiment pipelines built from the chain, state and metric layers.

Each pipeline returns plain result objects holding numpy arrays; file output
and plotting live in :mod:`eostomo.io`, :mod:`eostomo.plotting` and
:mod:`eostomo.cli`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chain import (DetectionOperator, arbitrary_phase_quadrature, beam_splitter_variant, detect,
                    multiplexed_EH)
from .constants import thz_to_omega
from .errors import DomainError, RangeError
from .field import FrequencyGrid, bandlimited_E, bandlimited_H, sampling_profile
from .gaussian import GaussianState, ModeBasis, husimi_q, joint_moments, sample_shots, squeezed_signal
from .kernels import waveform_kernel
from .metrics import (ChainConfig, Optimum, SweepResult, bandwidth_sweep, coupling_intensity,
                      mode_matching, optimize_bandwidth)
from .ports import PortConfig
from .probes import DEFAULT_PHOTON_NUMBER, ProbePulse

FS = 1e-15


# -- multiplexed probe ---------------------------------------------------------

@dataclass(frozen=True)
class MultiplexLayout:
    """Two-part probe and the matching three-port readout.

    The E part is a flat sinc probe on ``[e_low, e_high]``; the H part is a
    delocalized probe centred at ``h_center``.  The E port covers everything
    below ``e_split`` and the two H ports are split at ``h_center``.  Keeping a
    gap of at least ``omega_m`` between the two probe parts stops pairs that
    straddle the E/H boundary from leaking into the band-limited readouts.
    """

    e_low: float = thz_to_omega(80.0)
    e_high: float = thz_to_omega(260.0)
    e_split: float = thz_to_omega(280.0)
    h_center: float = thz_to_omega(340.0)
    h_bandwidth: float = thz_to_omega(80.0)
    e_photon_number: float = DEFAULT_PHOTON_NUMBER
    h_photon_number: float = DEFAULT_PHOTON_NUMBER
    h_taper: float = 0.55

    def __post_init__(self):
        if not 0 < self.e_low < self.e_high <= self.e_split < self.h_center - 0.5 * self.h_bandwidth + 1e-3:
            raise DomainError("multiplex layout needs e_low < e_high <= e_split <= lower edge of the H probe")

    def probe(self, grid: FrequencyGrid) -> ProbePulse:
        e = ProbePulse.sinc(grid, 0.5 * (self.e_low + self.e_high), self.e_high - self.e_low,
                            self.e_photon_number)
        h = ProbePulse.delocalized(grid, self.h_center, self.h_bandwidth, self.h_photon_number,
                                   taper=self.h_taper)
        return ProbePulse.superpose(e, h)

    def ports(self) -> PortConfig:
        return PortConfig.multiplexed(self.e_split, self.h_center)


# -- waveforms -----------------------------------------------------------------

@dataclass(frozen=True)
class WaveformResult:
    """Sampling profiles on a common time axis (seconds)."""

    times: np.ndarray
    e_bl: np.ndarray
    h_bl: np.ndarray
    e_detected: np.ndarray
    h_detected: np.ndarray

    COLUMNS = ("t_fs", "e_bl", "h_bl", "e_detected", "h_detected")

    def rows(self):
        return np.column_stack([self.times / FS, self.e_bl, self.h_bl, self.e_detected, self.h_detected])


def _unit_peak(profile: np.ndarray) -> np.ndarray:
    peak = np.max(np.abs(profile), initial=0.0)
    return profile / peak if peak > 0 else profile


def run_waveforms(chain: ChainConfig, times: np.ndarray, e_bandwidth: float | None = None,
                  h_bandwidth: float | None = None) -> WaveformResult:
    """Ideal and detected sampling profiles, each scaled to unit peak.

    Args:
        chain: Chain configuration (the probe families come from here).
        times: Sample times in seconds; may be empty.
        e_bandwidth: E probe bandwidth (default: the family's full bandwidth).
        h_bandwidth: H probe bandwidth (default: the family's full bandwidth).
    """
    times = np.asarray(times, dtype=float).reshape(-1)
    n_mir = chain.crystal.n_mir
    e_t = bandlimited_E(0.0, chain.omega_m, chain.grid, n_mir, chain.constants)
    h_t = bandlimited_H(0.0, chain.omega_m, chain.grid, n_mir, chain.constants)
    e_op = chain.detect("E", chain.probe("E", e_bandwidth or chain.full_bandwidth("E")))
    h_op = chain.detect("H", chain.probe("H", h_bandwidth or chain.full_bandwidth("H")))
    profiles = [sampling_profile(m, times, n_mir, chain.constants)
                for m in (e_t, h_t, e_op.signal_mode, h_op.signal_mode)]
    return WaveformResult(times, *(_unit_peak(p) for p in profiles))


# -- sweep ---------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRun:
    """A bandwidth sweep together with its constrained optimum."""

    sweep: SweepResult
    optimum: Optimum


def run_sweep(chain: ChainConfig, quadrature: str, constraint: str,
              bandwidth_list: Sequence[float] | None = None, gamma_floor: float | None = None) -> SweepRun:
    """Sweep the probe bandwidth and locate the mode-matching-constrained optimum.

    Raises:
        InfeasibleConstraintError: if no bandwidth meets the mode-matching floor.
    """
    sweep = bandwidth_sweep(quadrature, constraint, bandwidth_list, chain_config=chain)
    mode = "explicit" if gamma_floor is not None else "full_band_reference"
    optimum = optimize_bandwidth(quadrature, constraint, mode, chain, gamma_floor,
                                 bandwidth_list=bandwidth_list)
    return SweepRun(sweep, optimum)


# -- tomography ----------------------------------------------------------------

def basis_overlaps(op: DetectionOperator, basis: ModeBasis, times: np.ndarray) -> np.ndarray:
    """Projections ``c_j(t) = sum_k conj(g_jk) a_k(t) dw`` for a delayed readout.

    The delay only multiplies the signal coefficients by ``exp(-i W (t - t0))``,
    so all times come out of one transform.

    Returns:
        Complex array of shape ``(len(times), len(basis))``.
    """
    grid = op.grid
    times = np.asarray(times, dtype=float).reshape(-1)
    out = np.empty((times.size, len(basis)), dtype=complex)
    for j, mode in enumerate(basis.modes):
        weights = np.conj(mode.coeffs) * op.a_coeffs
        out[:, j] = waveform_kernel(weights, grid.omegas, times - op.t, sign=-1.0) * grid.delta_omega
    return out


def _quadrature_vectors(c: np.ndarray) -> np.ndarray:
    v = np.empty(c.shape[:-1] + (2 * c.shape[-1],))
    v[..., 0::2] = c.real
    v[..., 1::2] = -c.imag
    return v


def variance_trace(state: GaussianState, op_1: DetectionOperator, times: np.ndarray,
                   op_2: DetectionOperator | None = None) -> np.ndarray:
    """Signal-induced (co)variance change of delayed readouts over a time scan.

    Out-of-basis and shot-noise terms are vacuum in both the state and the
    reference, so they cancel and only ``v(t)^T (cov - I/2) v(t)`` remains.
    """
    v1 = _quadrature_vectors(basis_overlaps(op_1, state.basis, times))
    v2 = v1 if op_2 is None else _quadrature_vectors(basis_overlaps(op_2, state.basis, times))
    excess = state.cov - 0.5 * np.eye(state.cov.shape[0])
    return np.einsum("ti,ij,tj->t", v1, excess, v2)


def ideal_variance_trace(state: GaussianState, quadrature: str, chain: ChainConfig,
                         times: np.ndarray) -> np.ndarray:
    """Variance change of the ideal band-limited quadrature with unit norm."""
    fn = bandlimited_E if quadrature == "E" else bandlimited_H
    target = fn(0.0, chain.omega_m, chain.grid, chain.crystal.n_mir, chain.constants).normalized()
    ideal = DetectionOperator(chain.grid, target.coeffs, np.zeros(chain.grid.n_points), 1.0, quadrature)
    return variance_trace(state, ideal, times)


@dataclass(frozen=True)
class TomographyResult:
    """Time scan of the multiplexed E/H readout on a Gaussian signal.

    Attributes:
        times: Probe delays in seconds.
        dV_E, dV_H: Variance changes of the E and H readouts.
        dC_EH: Change of their covariance.
        pred_E, pred_H: Coupling-rescaled variance change of the ideal modes.
        theta_E, theta_H: Band-limited coupling intensities.
        gamma_E, gamma_H: Mode matching at zero delay.
        husimi_time: Delay at which the state is reconstructed.
        reconstructed_cov: Single-mode ``(x, p)`` covariance rebuilt from the
            detected moments.
        alpha: Husimi grid points (complex).
        q: Husimi function on ``alpha``.
        shots: Joint ``(e, h)`` samples or ``None``.
        shot_moments: Analytic ``(mean, cov)`` the shots are drawn from.
    """

    times: np.ndarray
    dV_E: np.ndarray
    dV_H: np.ndarray
    dC_EH: np.ndarray
    pred_E: np.ndarray
    pred_H: np.ndarray
    theta_E: float
    theta_H: float
    gamma_E: float
    gamma_H: float
    husimi_time: float
    reconstructed_cov: np.ndarray
    alpha: np.ndarray
    q: np.ndarray
    shots: np.ndarray | None = None
    shot_moments: tuple | None = field(default=None, repr=False)

    COLUMNS = ("t_fs", "dV_E", "dV_H", "dC_EH", "pred_E", "pred_H")

    def rows(self):
        return np.column_stack([self.times / FS, self.dV_E, self.dV_H, self.dC_EH, self.pred_E, self.pred_H])

    def husimi_rows(self):
        a = self.alpha.reshape(-1)
        return np.column_stack([a.real, a.imag, self.q.reshape(-1)])

    def shot_rows(self):
        if self.shots is None:
            return np.zeros((0, 3))
        return np.column_stack([np.arange(self.shots.shape[0]), self.shots])


def reconstruct_mode(dV_E: float, dV_H: float, dC_EH: float, theta_E: float, theta_H: float) -> np.ndarray:
    """Single-mode covariance from detected moments rescaled by the couplings.

    The E readout plays the role of ``x`` and the H readout of ``p``; the
    signal-induced moments are divided by the coupling so that a perfectly
    matched readout returns the state of the matched mode.
    """
    if not theta_E > 0 or not theta_H > 0:
        raise DomainError("couplings must be positive to rescale the detected moments")
    scale = np.array([1.0 / np.sqrt(theta_E), 1.0 / np.sqrt(theta_H)])
    excess = np.array([[dV_E, dC_EH], [dC_EH, dV_H]]) * np.outer(scale, scale)
    return 0.5 * np.eye(2) + excess


def husimi_grid(extent: float = 4.0, n: int = 81) -> np.ndarray:
    """Square grid of complex amplitudes ``alpha`` on ``[-extent, extent]^2``."""
    if not extent > 0 or n < 2:
        raise DomainError("Husimi grid needs a positive extent and at least two points per axis")
    axis = np.linspace(-extent, extent, int(n))
    re, im = np.meshgrid(axis, axis, indexing="xy")
    return re + 1j * im


def run_tomography(chain: ChainConfig, times: np.ndarray, omega0: float = thz_to_omega(20.0),
                   sigma: float = thz_to_omega(4.0), r: float = 0.5,
                   layout: MultiplexLayout | None = None, n_shots: int = 0, seed: int = 0,
                   husimi_time: float = 0.0, alpha: np.ndarray | None = None) -> TomographyResult:
    """Multiplexed E/H time scan on a squeezed Gaussian signal.

    Args:
        chain: Crystal, constants, grid and ``omega_m``.
        times: Probe delays in seconds.
        omega0, sigma, r: Signal centre, width and squeezing strength.
        layout: Probe and port layout (default :class:`MultiplexLayout`).
        n_shots: Joint samples to draw at ``husimi_time`` (0 for none).
        seed: Seed of the counter-based sampler.
        husimi_time: Delay at which the Husimi function and shots are taken.
        alpha: Husimi grid (default :func:`husimi_grid`).

    Raises:
        NonCommutingError: if the layout's E and H ports overlap.
    """
    layout = layout or MultiplexLayout()
    times = np.asarray(times, dtype=float).reshape(-1)
    probe = layout.probe(chain.grid)
    op_e, op_h = multiplexed_EH(probe, chain.crystal, layout.ports(), 0.0, chain.constants)
    _, state = squeezed_signal(omega0, sigma, r, chain.grid)

    dv_e = variance_trace(state, op_e, times)
    dv_h = variance_trace(state, op_h, times)
    dc = variance_trace(state, op_e, times, op_h)
    theta_e, _ = coupling_intensity(op_e, chain.omega_m)
    theta_h, _ = coupling_intensity(op_h, chain.omega_m)
    pred_e = theta_e * ideal_variance_trace(state, "E", chain, times)
    pred_h = theta_h * ideal_variance_trace(state, "H", chain, times)
    gamma_e = mode_matching(op_e, chain.target("E"), chain.omega_m)
    gamma_h = mode_matching(op_h, chain.target("H"), chain.omega_m)

    at = np.array([husimi_time])
    point = [float(variance_trace(state, op_e, at)[0]), float(variance_trace(state, op_h, at)[0]),
             float(variance_trace(state, op_e, at, op_h)[0])]
    cov = reconstruct_mode(*point, theta_e, theta_h)
    mode_state = GaussianState(np.zeros(2), cov, check=False)
    alpha = husimi_grid() if alpha is None else np.asarray(alpha, dtype=complex)
    q = husimi_q(mode_state, 0, alpha)

    shots = moments = None
    if n_shots:
        e_t, h_t = op_e.shifted(husimi_time), op_h.shifted(husimi_time)
        moments = joint_moments(state, e_t, h_t)
        shots = sample_shots(state, e_t, h_t, n_shots, seed)
    return TomographyResult(times, dv_e, dv_h, dc, pred_e, pred_h, theta_e, theta_h, gamma_e, gamma_h,
                            husimi_time, cov, alpha, q, shots, moments)


def oscillation_peak(times: np.ndarray, trace: np.ndarray):
    """Dominant positive frequency of a trace (rad/s) and the FFT bin width."""
    times = np.asarray(times, dtype=float)
    if times.size < 4:
        raise RangeError("need at least four samples to locate an oscillation")
    dt = float(times[1] - times[0])
    spectrum = np.abs(np.fft.rfft(trace - np.mean(trace)))
    freqs = 2 * np.pi * np.fft.rfftfreq(times.size, dt)
    k = int(np.argmax(spectrum[1:])) + 1
    return float(freqs[k]), float(freqs[1])


# -- appendix variants ---------------------------------------------------------

@dataclass(frozen=True)
class BeamSplitterResult:
    """E and H arm readouts behind a beam splitter."""

    transmission: float
    theta_E_full: float
    theta_H_full: float
    theta_E_arm: float
    theta_H_arm: float

    COLUMNS = ("transmission", "theta_E_full", "theta_H_full", "theta_E_arm", "theta_H_arm", "sum_rule")

    @property
    def sum_rule(self) -> float:
        """``theta_E_arm / theta_E + theta_H_arm / theta_H``; one when intensity is conserved."""
        total = 0.0
        if self.theta_E_full > 0:
            total += self.theta_E_arm / self.theta_E_full
        if self.theta_H_full > 0:
            total += self.theta_H_arm / self.theta_H_full
        return total

    def rows(self):
        return np.array([[self.transmission, self.theta_E_full, self.theta_H_full, self.theta_E_arm,
                          self.theta_H_arm, self.sum_rule]])


def run_beam_splitter(chain: ChainConfig, probe: ProbePulse | None = None,
                      transmission: float | None = None) -> BeamSplitterResult:
    """Split the post-crystal probe between an E arm and an H arm.

    ``transmission = 1`` sends everything to the H arm and reduces to the
    single H readout; ``transmission = 0`` is the single E readout.
    """
    probe = probe or chain.probe("H", chain.full_bandwidth("H"))
    ports_e = PortConfig.electric()
    ports_h = PortConfig.hilbert(probe.central_frequency)
    full_e = detect(probe, chain.crystal, ports_e, chain.t, chain.constants, label="E")
    full_h = detect(probe, chain.crystal, ports_h, chain.t, chain.constants, label="H")
    theta_e, _ = coupling_intensity(full_e, chain.omega_m)
    theta_h, _ = coupling_intensity(full_h, chain.omega_m)
    if transmission is not None and transmission in (0.0, 1.0):
        t = float(transmission)
        return BeamSplitterResult(t, theta_e, theta_h, (1.0 - t) * theta_e, t * theta_h)
    op_e, op_h, t = beam_splitter_variant(probe, chain.crystal, transmission, chain.t, ports_e, ports_h,
                                          chain.constants, chain.omega_m)
    arm_e, _ = coupling_intensity(op_e, chain.omega_m)
    arm_h, _ = coupling_intensity(op_h, chain.omega_m)
    return BeamSplitterResult(t, theta_e, theta_h, arm_e, arm_h)


@dataclass(frozen=True)
class PhaseScanResult:
    """Variance of the rotated quadrature readout for a list of phases.

    Attributes:
        phis: Quadrature angles.
        theta: Band-limited coupling of each readout.
        dV_mean: Time-averaged variance change over the scan window.
        dV_norm: ``dV_mean / theta``.
        dV_peak: Variance change at zero delay.
        gamma_E, gamma_H: Mode matching to the ideal quadratures.
        reference: Same quantities for the multiplexed E and H readouts.
    """

    phis: np.ndarray
    theta: np.ndarray
    dV_mean: np.ndarray
    dV_norm: np.ndarray
    dV_peak: np.ndarray
    gamma_E: np.ndarray
    gamma_H: np.ndarray
    reference: dict

    COLUMNS = ("phi", "theta", "dV_mean", "dV_norm", "dV_peak", "gamma_E", "gamma_H")

    def rows(self):
        return np.column_stack([self.phis, self.theta, self.dV_mean, self.dV_norm, self.dV_peak,
                                self.gamma_E, self.gamma_H])


def run_phase_scan(chain: ChainConfig, phis: Sequence[float], times: np.ndarray,
                   omega0: float = thz_to_omega(20.0), sigma: float = thz_to_omega(4.0), r: float = 0.5,
                   layout: MultiplexLayout | None = None) -> PhaseScanResult:
    """Rotated-quadrature readouts on the multiplexed probe, compared with E/H.

    The probe is split at the H carrier into two ports whose readout phases
    are tuned with quarter and half plates.  The multiplexed E and H readouts
    of the same probe serve as the reference.
    """
    layout = layout or MultiplexLayout()
    times = np.asarray(times, dtype=float).reshape(-1)
    probe = layout.probe(chain.grid)
    _, state = squeezed_signal(omega0, sigma, r, chain.grid)
    zero = np.array([0.0])
    t_e, t_h = chain.target("E"), chain.target("H")

    def summarize(op):
        theta, _ = coupling_intensity(op, chain.omega_m)
        trace = variance_trace(state, op, times)
        mean = float(np.mean(trace)) if trace.size else 0.0
        return (theta, mean, mean / theta, float(variance_trace(state, op, zero)[0]),
                mode_matching(op, t_e, chain.omega_m), mode_matching(op, t_h, chain.omega_m))

    rows = []
    for phi in phis:
        op = arbitrary_phase_quadrature(probe, chain.crystal, float(phi), 0.0, layout.h_center,
                                        chain.constants)
        rows.append(summarize(op))
    rows = np.array(rows, dtype=float).reshape(-1, 6)
    op_e, op_h = multiplexed_EH(probe, chain.crystal, layout.ports(), 0.0, chain.constants)
    keys = ("theta", "dV_mean", "dV_norm", "dV_peak", "gamma_E", "gamma_H")
    reference = {name: dict(zip(keys, summarize(op))) for name, op in (("E", op_e), ("H", op_h))}
    return PhaseScanResult(np.asarray(phis, dtype=float), *rows.T, reference)


def scan_times(t_min_fs: float = -200.0, t_max_fs: float = 200.0, n: int = 801) -> np.ndarray:
    """Evenly spaced probe delays in seconds."""
    if n < 0:
        raise DomainError("number of time samples must be non-negative")
    return np.linspace(t_min_fs, t_max_fs, int(n)) * FS

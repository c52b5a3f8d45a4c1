"""Electro-optic detection chain.

A strong probe polarized along ``z`` drives second-order mixing in the crystal
that scatters the signal field (polarized along ``s``) into the probe band.
Spectral filters split the probe band into ports; each port passes a waveplate
and a Wollaston prism, and the photon-number difference of the two outputs is
normalized by the port's photon number.  To first order in the mixing, each
port difference is linear in the signal ladder operators; the signal-side
coefficients of the resulting observable are computed by
:func:`eostomo.kernels.detection_kernel`.

For output frequency ``w`` and signal frequency ``W`` the linearized readout
weight is

``kappa C(w, W) [u(w) conj(LO(w)) beta(w - W) - conj(u(w)) LO(w) conj(beta(w + W))]``

summed over the output bins, where ``u`` is the port weight, ``LO`` the local
oscillator (the probe itself unless a distinct ellipsometry filter is set),
``beta`` the probe amplitude and ``C`` the product of the three field
prefactors and the phase-matching factor.  The second term is written on the
output bin ``w - W`` so that sum- and difference-frequency contributions share
the same frequency pair, which makes a purely in-phase readout of a real probe
cancel exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .constants import PhysicalConstants, omega_to_thz
from .errors import ConfigurationError, DomainError, GridMismatchError, NonCommutingError
from .field import FrequencyGrid, SpectralMode
from .gaussian import BogoliubovTransform
from .kernels import detection_kernel
from .optics import CrystalParams
from .ports import PortConfig, readout_weights
from .probes import ProbePulse

SIGNAL_BAND_WARNING = "probe spectrum overlaps the signal band; self-mixing of the probe is not modeled"


@dataclass(frozen=True, eq=False)
class DetectionOperator:
    """Hermitian observable produced by a balanced readout.

    The observable is ``(1/sqrt 2) sum_k (a_k a_k + conj(a_k) a_k^dagger) dw``
    over the signal (input) modes plus the shot-noise term carried by the
    output ports, ``(1/sqrt 2) sum_k (p_k a_out,k + h.c.) dw``.  With this
    convention a readout normalized to unit total weight has vacuum variance 1/2.

    Attributes:
        grid: Frequency grid.
        a_coeffs: Signal-side annihilation coefficients.
        port_coeffs: Output-side (local-oscillator weighted) coefficients.
        normalization: Sum of the mean photon numbers of the detecting ports.
        label: Free-form description.
        t: Sampling time.
    """

    grid: FrequencyGrid
    a_coeffs: np.ndarray
    port_coeffs: np.ndarray
    normalization: float
    label: str = ""
    t: float = 0.0
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        a = np.array(self.a_coeffs, dtype=complex)
        p = np.array(self.port_coeffs, dtype=complex)
        if a.shape != (self.grid.n_points,) or p.shape != (self.grid.n_points,):
            raise GridMismatchError("operator coefficients must match the grid length")
        if not self.normalization > 0:
            raise DomainError("normalization must be positive")
        a.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "a_coeffs", a)
        object.__setattr__(self, "port_coeffs", p)

    @property
    def b_coeffs(self) -> np.ndarray:
        """Creation-part coefficients (the mirror of ``a_coeffs``)."""
        return np.conj(self.a_coeffs)

    @property
    def signal_mode(self) -> SpectralMode:
        return SpectralMode(self.grid, self.a_coeffs)

    @property
    def signal_weight(self) -> float:
        return float(np.sum(np.abs(self.a_coeffs) ** 2) * self.grid.delta_omega)

    @property
    def shot_weight(self) -> float:
        return float(np.sum(np.abs(self.port_coeffs) ** 2) * self.grid.delta_omega)

    @property
    def total_weight(self) -> float:
        return self.signal_weight + self.shot_weight

    def vacuum_variance(self) -> float:
        return 0.5 * self.total_weight

    def scaled(self, factor: float, signal_only: bool = False, label: str | None = None) -> "DetectionOperator":
        """Copy with coefficients multiplied by ``factor``."""
        ports = self.port_coeffs if signal_only else self.port_coeffs * factor
        return DetectionOperator(self.grid, self.a_coeffs * factor, ports, self.normalization,
                                 self.label if label is None else label, self.t, dict(self.meta))

    def normalized(self) -> "DetectionOperator":
        """Copy rescaled to unit total weight (vacuum variance 1/2)."""
        return self.scaled(1.0 / np.sqrt(self.total_weight))

    def shifted(self, t: float) -> "DetectionOperator":
        """Same readout with the probe delayed to time ``t``.

        A probe delay multiplies every signal and port coefficient by
        ``exp(-i w (t - t0))``, so a time scan needs only one kernel evaluation.
        """
        w = self.grid.omegas
        phase = np.exp(-1j * w * (t - self.t))
        return DetectionOperator(self.grid, self.a_coeffs * phase, self.port_coeffs * phase,
                                 self.normalization, self.label, t, dict(self.meta))

    def negated(self) -> "DetectionOperator":
        return self.scaled(-1.0)

    def commutator(self, other: "DetectionOperator") -> float:
        """Imaginary number ``[O1, O2] / i`` evaluated on the detected (output) modes."""
        if other.grid != self.grid:
            raise GridMismatchError("operators live on different grids")
        return float(np.imag(np.vdot(other.port_coeffs, self.port_coeffs)) * self.grid.delta_omega)

    def signal_commutator(self, other: "DetectionOperator") -> float:
        """Same pairing restricted to the signal coefficients."""
        return float(np.imag(np.vdot(other.a_coeffs, self.a_coeffs)) * self.grid.delta_omega)


@dataclass
class _Prepared:
    grid: FrequencyGrid
    w_h: np.ndarray
    w_i: np.ndarray
    beta_h: np.ndarray
    beta_i: np.ndarray
    s_h: np.ndarray
    s_i: np.ndarray
    kn_h: np.ndarray
    kn_i: np.ndarray
    kappa: float


def coupling_constant(probe: ProbePulse, crystal: CrystalParams, constants: PhysicalConstants) -> float:
    """``kappa = -4 pi lambda L / hbar`` with ``lambda = A eps0 d / 2``."""
    lam = crystal.coupling_lambda(probe.central_frequency, constants.cross_section_A, constants.epsilon_0)
    return -4.0 * np.pi * lam * crystal.length_L / constants.hbar


def _prepare(probe: ProbePulse, crystal: CrystalParams, constants: PhysicalConstants) -> _Prepared:
    grid = probe.grid
    w_h, w_i = grid.omegas, grid.edges
    n_h, n_i = crystal.n_nir(w_h), crystal.n_nir(w_i)
    return _Prepared(
        grid=grid, w_h=w_h, w_i=w_i,
        beta_h=probe.amplitude(w_h), beta_i=probe.amplitude(w_i),
        s_h=constants.field_prefactor(w_h, n_h), s_i=constants.field_prefactor(w_i, n_i),
        kn_h=w_h * n_h / constants.c, kn_i=w_i * n_i / constants.c,
        kappa=coupling_constant(probe, crystal, constants),
    )


def _signal_bins(probe: ProbePulse, lo: ProbePulse | None, signal_max: float | None) -> int:
    grid = probe.grid
    if signal_max is None:
        lo_lo, lo_hi = probe.support()
        if lo is not None:
            l2, h2 = lo.support()
            lo_lo, lo_hi = min(lo_lo, l2), max(lo_hi, h2)
        signal_max = lo_hi - lo_lo + 2 * grid.delta_omega
    return int(min(grid.n_points, max(1, grid.index_below(signal_max) + 1)))


def _warn_overlap(probe: ProbePulse, signal_max: float):
    if probe.support()[0] < signal_max:
        warnings.warn(SIGNAL_BAND_WARNING, RuntimeWarning, stacklevel=3)


def detect(probe: ProbePulse, crystal: CrystalParams, ports: PortConfig, t: float = 0.0,
           constants: PhysicalConstants | None = None, lo: ProbePulse | None = None,
           signal_max: float | None = None, label: str = "") -> DetectionOperator:
    """Linearized balanced readout of an arbitrary port layout.

    Args:
        probe: Probe driving the crystal.
        crystal: Crystal parameters.
        ports: Filter/waveplate layout.
        t: Sampling time (probe delay).
        constants: Physical constants.
        lo: Optional distinct local oscillator for the ellipsometry; defaults
            to the probe itself.
        signal_max: Highest signal frequency evaluated; defaults to the full
            span of the probe autocorrelation.
        label: Description stored on the operator.

    Raises:
        ConfigurationError: if a port receives no probe light.
    """
    constants = constants or PhysicalConstants()
    grid = probe.grid
    if lo is not None and lo.grid != grid:
        raise GridMismatchError("local oscillator and probe live on different grids")
    ports.validate(grid)
    prep = _prepare(probe, crystal, constants)
    if lo is None:
        lo_h, lo_i = prep.beta_h, prep.beta_i
    else:
        lo_h, lo_i = lo.amplitude(prep.w_h), lo.amplitude(prep.w_i)
    lo_power = np.abs(lo_h) ** 2
    u_h, counts = readout_weights(ports, prep.w_h, lo_power, prep.w_h, grid.delta_omega)
    u_i, _ = readout_weights(ports, prep.w_i, lo_power, prep.w_h, grid.delta_omega)
    if not counts:
        raise ConfigurationError("no detecting port in the layout")

    n_sig = _signal_bins(probe, lo, signal_max)
    omega_sig = prep.w_h[:n_sig]
    n_mir = crystal.n_mir(omega_sig)
    s_sig = constants.field_prefactor(omega_sig, n_mir)
    kn_sig = omega_sig * n_mir / constants.c

    a_h = u_h * np.conj(lo_h)
    f = detection_kernel(
        n_sig, np.ascontiguousarray(a_h), np.ascontiguousarray(np.conj(prep.beta_h)), prep.s_h, prep.kn_h,
        np.ascontiguousarray(prep.beta_i), np.ascontiguousarray(np.conj(u_i) * lo_i), prep.s_i, prep.kn_i,
        s_sig, kn_sig, crystal.length_L, crystal.phase_matching,
    )
    coeffs = np.zeros(grid.n_points, dtype=complex)
    coeffs[:n_sig] = prep.kappa * grid.delta_omega * f * np.exp(-1j * omega_sig * t)
    port_coeffs = a_h * np.exp(-1j * prep.w_h * t)
    meta = {"port_photon_numbers": counts, "signal_bins": n_sig}
    return DetectionOperator(grid, coeffs, port_coeffs, float(sum(counts)), label, t, meta)


def detected_E_operator(probe: ProbePulse, crystal: CrystalParams, ports: PortConfig | None = None,
                        t: float = 0.0, constants: PhysicalConstants | None = None,
                        lo: ProbePulse | None = None, signal_max: float | None = None) -> DetectionOperator:
    """Electric-field readout.

    The default layout is one port covering the whole probe with a
    quarter-wave plate at 45 degrees, which reads the quadrature of the
    signal-induced ellipticity; a flat-phase probe then yields a sampled
    electric field.
    """
    ports = ports if ports is not None else PortConfig.electric()
    return detect(probe, crystal, ports, t, constants, lo, signal_max, label="E")


def detected_H_operator(probe: ProbePulse, crystal: CrystalParams, ports: PortConfig | None = None,
                        t: float = 0.0, constants: PhysicalConstants | None = None,
                        lo: ProbePulse | None = None, signal_max: float | None = None) -> DetectionOperator:
    """Hilbert-quadrature readout.

    The default layout splits the probe at its carrier into two in-phase ports
    (half-wave plates at 22.5 degrees) and subtracts the upper port.  Frequency
    pairs on the same side of the carrier then cancel and only pairs straddling
    the carrier survive, weighted by ``sign(w)``: the Hilbert transform of the
    sampled field.
    """
    ports = ports if ports is not None else PortConfig.hilbert(probe.central_frequency)
    return detect(probe, crystal, ports, t, constants, lo, signal_max, label="H")


def multiplexed_EH(probe: ProbePulse, crystal: CrystalParams, ports: PortConfig | None = None,
                   t: float = 0.0, constants: PhysicalConstants | None = None,
                   signal_max: float | None = None):
    """Simultaneous E and H readouts on disjoint spectral ports.

    Returns:
        ``(op_E, op_H)``, whose detected-mode commutator vanishes.

    Raises:
        NonCommutingError: if the E and H ports share spectral bins.
    """
    ports = ports if ports is not None else PortConfig.multiplexed()
    e_ports, h_ports = ports.select("E"), ports.select("H")
    for pe in e_ports:
        for ph in h_ports:
            if pe.omega_min < ph.omega_max and ph.omega_min < pe.omega_max:
                raise NonCommutingError("E and H ports overlap in frequency")
    op_e = detect(probe, crystal, e_ports, t, constants, None, signal_max, label="E")
    op_h = detect(probe, crystal, h_ports, t, constants, None, signal_max, label="H")
    return op_e, op_h


def balanced_transmission(theta_E: float, theta_H: float) -> float:
    """Fraction of the light sent to the H arm so arm photon numbers scale as ``theta_E / theta_H``.

    A weaker coupling gets proportionally more photons:
    ``T_H / T_E = theta_E / theta_H``.
    """
    if not theta_E > 0 or not theta_H > 0:
        raise DomainError("coupling intensities must be positive")
    return theta_E / (theta_E + theta_H)


def beam_splitter_variant(probe: ProbePulse, crystal: CrystalParams, transmission: float | None = None,
                          t: float = 0.0, ports_E: PortConfig | None = None,
                          ports_H: PortConfig | None = None, constants: PhysicalConstants | None = None,
                          omega_m: float | None = None, signal_max: float | None = None):
    """E and H readouts on the two outputs of a beam splitter after the crystal.

    ``transmission`` is the power fraction routed to the H arm; the E arm gets
    the rest.  An arm receiving the fraction ``T`` sees the signal coefficients
    scaled by ``sqrt(T)`` while its shot noise (normalized by its own photon
    number) is unchanged, so its coupling intensity is ``T`` times the unsplit
    one.  When ``transmission`` is omitted it is chosen by
    :func:`balanced_transmission` from the unsplit couplings inside ``omega_m``.

    Returns:
        ``(op_E, op_H, transmission)``.

    Raises:
        DomainError: if ``transmission`` is not in ``(0, 1)``.
    """
    ports_E = ports_E if ports_E is not None else PortConfig.electric()
    ports_H = ports_H if ports_H is not None else PortConfig.hilbert(probe.central_frequency)
    full_e = detect(probe, crystal, ports_E, t, constants, None, signal_max, label="E")
    full_h = detect(probe, crystal, ports_H, t, constants, None, signal_max, label="H")
    if transmission is None:
        band = full_e.grid.omegas <= (omega_m if omega_m is not None else np.inf)
        dw = full_e.grid.delta_omega
        theta_e = float(np.sum(np.abs(full_e.a_coeffs[band]) ** 2) * dw)
        theta_h = float(np.sum(np.abs(full_h.a_coeffs[band]) ** 2) * dw)
        transmission = balanced_transmission(theta_e, theta_h)
    if not 0.0 < transmission < 1.0:
        raise DomainError(f"transmission must lie in (0, 1), got {transmission!r}")
    op_e = full_e.scaled(np.sqrt(1.0 - transmission), signal_only=True, label="E arm")
    op_h = full_h.scaled(np.sqrt(transmission), signal_only=True, label="H arm")
    return op_e, op_h, transmission


def arbitrary_phase_quadrature(probe: ProbePulse, crystal: CrystalParams, phi: float, t: float = 0.0,
                               split: float | None = None, constants: PhysicalConstants | None = None,
                               signal_max: float | None = None) -> DetectionOperator:
    """Readout of the rotated quadrature ``X(phi)`` with two tunable ports.

    The probe is split at ``split`` (default: its carrier).  The lower and
    upper ports use balanced readout phases ``pi/2 - phi`` and ``pi/2 + phi``
    (each realized by a quarter plate at 45 degrees followed by a half plate),
    so ``phi = 0`` reads both halves in quadrature (the electric field) and
    ``phi = pi/2`` is the in-phase, sign-flipped Hilbert readout.
    """
    split = probe.central_frequency if split is None else split
    ports = PortConfig.phase_pair(split, phi)
    return detect(probe, crystal, ports, t, constants, None, signal_max, label=f"X({phi:.4g})")


def interaction_kernel(probe: ProbePulse, crystal: CrystalParams, grid: FrequencyGrid | None = None,
                       constants: PhysicalConstants | None = None, signal_max: float | None = None,
                       mode_indices=None, t: float = 0.0, max_modes: int = 1500) -> BogoliubovTransform:
    """Mode mixing of the signal polarization caused by the probe.

    The first-order mixing generator couples every pair of modes ``(w, v)``
    through the probe at ``w - v`` (sum/difference frequency generation) and at
    ``w + v`` (pair creation), weighted by the field prefactors and the
    phase-matching factor.  Exponentiating the generator gives a transform that
    agrees with first-order perturbation theory and is exactly symplectic.

    Args:
        probe: Probe pulse.
        crystal: Crystal parameters.
        grid: Must equal the probe grid when given.
        constants: Physical constants.
        signal_max: Upper edge of the low-frequency (signal) block of modes;
            defaults to the probe bandwidth span.
        mode_indices: Explicit grid bins to include; defaults to the signal
            block plus the probe band widened by ``signal_max`` on both sides.
        t: Probe delay.
        max_modes: Guard against accidentally huge dense matrices.

    Returns:
        :class:`BogoliubovTransform` whose ``omegas`` label the kept modes.
    """
    constants = constants or PhysicalConstants()
    grid = grid or probe.grid
    if grid != probe.grid:
        raise GridMismatchError("probe and kernel grid differ")
    w = grid.omegas
    if signal_max is None:
        lo_w, hi_w = probe.support()
        signal_max = hi_w - lo_w + grid.delta_omega
    if mode_indices is None:
        lo_w, hi_w = probe.support()
        keep = (w <= signal_max) | ((w >= lo_w - signal_max) & (w <= hi_w + signal_max))
        mode_indices = np.flatnonzero(keep)
    idx = np.asarray(mode_indices, dtype=int)
    if idx.size > max_modes:
        raise ConfigurationError(f"{idx.size} modes requested; raise max_modes to allow dense matrices this large")
    _warn_overlap(probe, signal_max)
    om = w[idx]
    nir_threshold = np.max(om[om <= signal_max]) if np.any(om <= signal_max) else 0.0

    def index(x):
        x = np.abs(x)
        return np.where(x <= nir_threshold, crystal.n_mir(x), crystal.n_nir(x))

    def wave_number(x):
        return x * index(x) / constants.c

    def prefactor(x):
        x = np.abs(x)
        return np.where(x > 0, constants.field_prefactor(x, index(x)), 0.0)

    def probe_tilde(p):
        amp = probe.amplitude(np.abs(p)) * np.exp(1j * np.abs(p) * t)
        return np.where(p > 0, amp, np.where(p < 0, np.conj(amp), 0.0))

    kappa = coupling_constant(probe, crystal, constants)
    dw = grid.delta_omega
    wo, wi = om[:, None], om[None, :]
    s_o, s_i = prefactor(om)[:, None], prefactor(om)[None, :]

    def pm(k_mismatch):
        if not crystal.phase_matching:
            return 1.0
        return np.sinc(k_mismatch * crystal.length_L / (2 * np.pi))

    diff = wo - wi
    dk_x = wave_number(diff) + wave_number(wi) - wave_number(wo)
    x_mat = kappa * dw * np.sign(diff) * s_o * s_i * prefactor(diff) * pm(dk_x) * probe_tilde(diff)
    summ = wo + wi
    dk_y = wave_number(summ) - wave_number(wi) - wave_number(wo)
    y_mat = -kappa * dw * s_o * s_i * prefactor(summ) * pm(dk_y) * probe_tilde(summ)

    gen = np.block([[x_mat, y_mat], [np.conj(y_mat), np.conj(x_mat)]])
    s = expm(gen)
    m = om.size
    return BogoliubovTransform(s[:m, :m], s[:m, m:], omegas=om)


def first_order_generator(transform: BogoliubovTransform):
    """Matrix logarithm blocks ``(X, Y)`` of a transform close to identity."""
    from scipy.linalg import logm

    m = transform.n_modes
    full = np.block([[transform.alpha, transform.beta], [np.conj(transform.beta), np.conj(transform.alpha)]])
    gen = logm(full)
    return gen[:m, :m], gen[:m, m:]


def readout_from_transform(transform: BogoliubovTransform, probe: ProbePulse, ports: PortConfig,
                           grid: FrequencyGrid | None = None):
    """Input-side coefficients of a port readout computed through a full transform.

    Returns the coefficients (per unit-normalized discrete mode, in the
    ``omegas`` order of ``transform``) on annihilation operators of the
    balanced-readout observable, including the probe-band shot-noise part.
    """
    grid = grid or probe.grid
    om = transform.omegas
    lo = probe.amplitude(om)
    lo_power_h = np.abs(probe.amplitude(grid.omegas)) ** 2
    u, _ = readout_weights(ports, om, lo_power_h, grid.omegas, grid.delta_omega)
    w = u * np.conj(lo) * np.sqrt(grid.delta_omega)
    return w @ transform.alpha + np.conj(w @ transform.beta)


def describe(op: DetectionOperator) -> str:
    """One-line summary of an operator."""
    return (f"{op.label}: signal weight {op.signal_weight:.4g}, shot weight {op.shot_weight:.4g}, "
            f"t = {op.t:.3e} s, highest signal bin {omega_to_thz(op.grid.omegas[op.meta.get('signal_bins', 1) - 1]):.1f} THz")

"""Coupling intensity, mode matching, bandwidth sweeps and probe optimization."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .chain import DetectionOperator, detected_E_operator, detected_H_operator
from .constants import PhysicalConstants, omega_to_thz, thz_to_omega
from .errors import (DomainError, EostomoError, InfeasibleConstraintError, RangeError,
                     UndefinedMatchingError)
from .field import FrequencyGrid, SpectralMode, bandlimited_E, bandlimited_H
from .optics import CrystalParams
from .ports import PortConfig
from .probes import DEFAULT_CORE_WIDTH, DEFAULT_PHOTON_NUMBER, ProbePulse

QUADRATURES = ("E", "H")
CONSTRAINTS = ("constant_photon_number", "constant_intensity")
FLOOR_MODES = ("full_band_reference", "explicit")


def coupling_intensity(detected: DetectionOperator, omega_m: float):
    """Detection weight on the signal band and on all signal frequencies.

    Returns:
        ``(theta_bl, theta_full)`` with ``theta_bl`` summing ``|a_k|^2 dw`` over
        ``w_k <= omega_m``.
    """
    a = detected.a_coeffs
    dw = detected.grid.delta_omega
    band = detected.grid.omegas <= omega_m
    theta_bl = float(np.sum(np.abs(a[band]) ** 2) * dw)
    theta_full = float(np.sum(np.abs(a) ** 2) * dw)
    return theta_bl, theta_full


def mode_matching(detected, target: SpectralMode, omega_m: float) -> float:
    """Normalized in-phase overlap of the band-limited detected profile with a target.

    ``gamma = |Re <target_BL, a_BL>| / sqrt(theta_target theta_bl)``.  Only the
    real part counts because the electric field and its Hilbert partner differ
    by a constant phase; a readout of one quadrature must not score on the
    other.

    Raises:
        UndefinedMatchingError: if either band-limited weight is zero.
    """
    coeffs = detected.coeffs if isinstance(detected, SpectralMode) else detected.a_coeffs
    band = target.grid.omegas <= omega_m
    a = np.where(band, coeffs, 0)
    tgt = np.where(band, target.coeffs, 0)
    dw = target.grid.delta_omega
    theta_bl = float(np.sum(np.abs(a) ** 2) * dw)
    theta_t = float(np.sum(np.abs(tgt) ** 2) * dw)
    if theta_bl <= 0 or theta_t <= 0:
        raise UndefinedMatchingError("mode matching is undefined for a zero-weight profile")
    value = abs(np.real(np.vdot(tgt, a) * dw)) / np.sqrt(theta_bl * theta_t)
    return float(min(value, 1.0))


@dataclass(frozen=True)
class ChainConfig:
    """Everything needed to turn a probe bandwidth into a detection operator.

    Attributes:
        grid: Frequency grid.
        crystal: Crystal parameters.
        constants: Physical constants.
        photon_number: Probe photons at the full bandwidth.
        omega_m: Signal band edge.
        t: Sampling time.
        e_center: Carrier of the E probe (sinc family).
        e_full_bandwidth: Full bandwidth of the E probe family.
        h_center: Carrier of the H probe (delocalized family).
        h_full_bandwidth: Full bandwidth of the H probe family.
        h_taper: Sideband tilt of the H probe.
        h_core_width: Carrier regularization of the H probe.
    """

    grid: FrequencyGrid = field(default_factory=lambda: FrequencyGrid.from_thz(500.0, 5120))
    crystal: CrystalParams = field(default_factory=CrystalParams)
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    photon_number: float = DEFAULT_PHOTON_NUMBER
    omega_m: float = thz_to_omega(40.0)
    t: float = 0.0
    e_center: float = thz_to_omega(320.0)
    e_full_bandwidth: float = thz_to_omega(300.0)
    h_center: float = thz_to_omega(340.0)
    h_full_bandwidth: float = thz_to_omega(160.0)
    h_taper: float = 0.55
    h_core_width: float = DEFAULT_CORE_WIDTH

    def full_bandwidth(self, quadrature: str) -> float:
        _check_quadrature(quadrature)
        return self.e_full_bandwidth if quadrature == "E" else self.h_full_bandwidth

    def photons_at(self, quadrature: str, bandwidth: float, constraint: str) -> float:
        """Probe photon number at ``bandwidth`` under a resource constraint.

        ``constant_intensity`` keeps the peak spectral intensity of the
        full-band probe, so the photon number scales as ``B_full / B``: a
        narrower pulse of the same peak power fits more photons below the
        damage threshold.
        """
        _check_constraint(constraint)
        if constraint == "constant_photon_number":
            return self.photon_number
        return self.photon_number * self.full_bandwidth(quadrature) / bandwidth

    def probe(self, quadrature: str, bandwidth: float, photon_number: float | None = None) -> ProbePulse:
        n = self.photon_number if photon_number is None else photon_number
        if quadrature == "E":
            return ProbePulse.sinc(self.grid, self.e_center, bandwidth, n)
        _check_quadrature(quadrature)
        return ProbePulse.delocalized(self.grid, self.h_center, bandwidth, n, self.h_taper, self.h_core_width)

    def detect(self, quadrature: str, probe: ProbePulse) -> DetectionOperator:
        if quadrature == "E":
            return detected_E_operator(probe, self.crystal, PortConfig.electric(), self.t, self.constants)
        return detected_H_operator(probe, self.crystal, PortConfig.hilbert(probe.central_frequency), self.t,
                                   self.constants)

    def target(self, quadrature: str) -> SpectralMode:
        fn = bandlimited_E if quadrature == "E" else bandlimited_H
        return fn(self.t, self.omega_m, self.grid, self.crystal.n_mir, self.constants)

    def with_(self, **changes) -> "ChainConfig":
        return replace(self, **changes)


def _check_quadrature(q):
    if q not in QUADRATURES:
        raise DomainError(f"quadrature must be one of {QUADRATURES}, got {q!r}")


def _check_constraint(c):
    if c not in CONSTRAINTS:
        raise DomainError(f"constraint must be one of {CONSTRAINTS}, got {c!r}")


@dataclass(frozen=True)
class SweepResult:
    """Bandwidth-indexed coupling and mode-matching record.

    Points that could not be evaluated carry NaN.
    """

    bandwidths: np.ndarray
    theta_bl: np.ndarray
    theta_full: np.ndarray
    gamma: np.ndarray
    constraint_tag: str
    quadrature: str = "E"
    photon_numbers: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.bandwidths)
        for name in ("theta_bl", "theta_full", "gamma"):
            if len(getattr(self, name)) != n:
                raise DomainError("sweep arrays must have equal length")
        g = np.asarray(self.gamma)
        ok = np.isfinite(g)
        if np.any(g[ok] < 0) or np.any(g[ok] > 1 + 1e-9):
            raise DomainError("mode matching outside [0, 1]")

    @property
    def noise_gap(self) -> np.ndarray:
        """``theta_full - theta_bl``: weight admitted from outside the signal band."""
        return np.asarray(self.theta_full) - np.asarray(self.theta_bl)

    @property
    def bandwidths_thz(self) -> np.ndarray:
        return omega_to_thz(np.asarray(self.bandwidths))

    def rows(self):
        """CSV rows ``(bandwidth_thz, theta_bl, theta_full, gamma, constraint)``."""
        for b, tb, tf, g in zip(self.bandwidths_thz, self.theta_bl, self.theta_full, self.gamma):
            yield float(b), float(tb), float(tf), float(g), self.constraint_tag


@dataclass(frozen=True)
class SweepPoint:
    bandwidth: float
    theta_bl: float
    theta_full: float
    gamma: float


def evaluate_point(quadrature: str, constraint: str, bandwidth: float, chain: ChainConfig,
                   probe_family: Callable | None = None) -> SweepPoint:
    """Coupling and mode matching of one probe bandwidth."""
    photons = chain.photons_at(quadrature, bandwidth, constraint)
    probe = (probe_family(bandwidth, photons) if probe_family is not None
             else chain.probe(quadrature, bandwidth, photons))
    op = chain.detect(quadrature, probe)
    theta_bl, theta_full = coupling_intensity(op, chain.omega_m)
    gamma = mode_matching(op, chain.target(quadrature), chain.omega_m)
    return SweepPoint(bandwidth, theta_bl, theta_full, gamma)


def default_bandwidths(chain: ChainConfig, quadrature: str, n: int = 40, lo_thz: float = 10.0) -> np.ndarray:
    """``n`` log-spaced bandwidths from ``lo_thz`` to the full bandwidth."""
    hi = omega_to_thz(chain.full_bandwidth(quadrature))
    return thz_to_omega(np.geomspace(lo_thz, hi, n))


def bandwidth_sweep(quadrature: str, constraint: str, bandwidth_list: Sequence[float] | None = None,
                    probe_family: Callable | None = None, chain_config: ChainConfig | None = None) -> SweepResult:
    """Coupling intensity and mode matching across probe bandwidths.

    Args:
        quadrature: ``"E"`` or ``"H"``.
        constraint: ``"constant_photon_number"`` or ``"constant_intensity"``.
        bandwidth_list: Increasing bandwidths in rad/s; defaults to
            :func:`default_bandwidths`.
        probe_family: Optional ``(bandwidth, photon_number) -> ProbePulse``.
        chain_config: Chain settings.

    Returns:
        :class:`SweepResult`; points outside the grid are NaN.
    """
    _check_quadrature(quadrature)
    _check_constraint(constraint)
    chain = chain_config or ChainConfig()
    bws = np.asarray(default_bandwidths(chain, quadrature) if bandwidth_list is None else bandwidth_list,
                     dtype=float).reshape(-1)
    if bws.size > 1 and np.any(np.diff(bws) <= 0):
        raise DomainError("bandwidth list must be strictly increasing")
    tb = np.full(bws.size, np.nan)
    tf = np.full(bws.size, np.nan)
    gm = np.full(bws.size, np.nan)
    photons = np.full(bws.size, np.nan)
    for i, b in enumerate(bws):
        try:
            point = evaluate_point(quadrature, constraint, b, chain, probe_family)
        except RangeError:
            continue
        tb[i], tf[i], gm[i] = point.theta_bl, point.theta_full, point.gamma
        photons[i] = chain.photons_at(quadrature, b, constraint)
    return SweepResult(bws, tb, tf, gm, constraint, quadrature, photons)


@dataclass(frozen=True)
class Optimum:
    """Result of :func:`optimize_bandwidth`."""

    bandwidth: float
    theta: float
    gamma: float
    gamma_floor: float
    sweep: SweepResult = field(repr=False)

    def __iter__(self):
        return iter((self.bandwidth, self.theta, self.gamma))

    def as_dict(self) -> dict:
        return {
            "bandwidth_thz": float(omega_to_thz(self.bandwidth)),
            "theta": float(self.theta),
            "gamma": float(self.gamma),
            "gamma_floor": float(self.gamma_floor),
            "quadrature": self.sweep.quadrature,
            "constraint": self.sweep.constraint_tag,
        }


def optimize_bandwidth(quadrature: str, constraint: str, gamma_floor_mode: str = "full_band_reference",
                       chain_config: ChainConfig | None = None, gamma_floor: float | None = None,
                       bandwidth_list: Sequence[float] | None = None,
                       probe_family: Callable | None = None) -> Optimum:
    """Maximize the band-limited coupling subject to a mode-matching floor.

    The floor is the mode matching of the full-bandwidth probe
    (``full_band_reference``) or the explicit ``gamma_floor``.  A grid search
    over the sweep picks the best feasible point; golden-section search then
    refines inside the neighbouring bracket, and when a neighbour is
    infeasible the feasibility boundary is located by root finding.

    Raises:
        InfeasibleConstraintError: if no sweep point meets the floor.
    """
    if gamma_floor_mode not in FLOOR_MODES:
        raise DomainError(f"gamma_floor_mode must be one of {FLOOR_MODES}")
    chain = chain_config or ChainConfig()
    sweep = bandwidth_sweep(quadrature, constraint, bandwidth_list, probe_family, chain)
    if gamma_floor_mode == "explicit":
        if gamma_floor is None:
            raise DomainError("explicit mode needs gamma_floor")
        floor = float(gamma_floor)
    else:
        floor = evaluate_point(quadrature, constraint, chain.full_bandwidth(quadrature), chain, probe_family).gamma

    bws, theta, gamma = sweep.bandwidths, sweep.theta_bl, sweep.gamma
    valid = np.isfinite(gamma)
    feasible = valid & (gamma >= floor - 1e-12)
    if not np.any(feasible):
        if not np.any(valid):
            raise InfeasibleConstraintError("no sweep point could be evaluated", None)
        k = int(np.nanargmax(np.where(valid, gamma, -np.inf)))
        raise InfeasibleConstraintError(
            f"no bandwidth reaches gamma >= {floor:.6f}; closest is {omega_to_thz(bws[k]):.3f} THz "
            f"with gamma {gamma[k]:.6f}", (float(bws[k]), float(theta[k]), float(gamma[k])))

    i = int(np.argmax(np.where(feasible, theta, -np.inf)))
    best = (float(bws[i]), float(theta[i]), float(gamma[i]))

    def point(b_thz):
        return evaluate_point(quadrature, constraint, thz_to_omega(b_thz), chain, probe_family)

    def consider(p):
        nonlocal best
        if p.gamma >= floor - 1e-12 and p.theta_bl > best[1]:
            best = (float(p.bandwidth), float(p.theta_bl), float(p.gamma))

    b = omega_to_thz(bws)
    lo_idx, hi_idx = max(i - 1, 0), min(i + 1, bws.size - 1)
    left, right = b[lo_idx], b[hi_idx]
    try:
        for j in (lo_idx, hi_idx):
            if j != i and valid[j] and not feasible[j]:
                edge = brentq(lambda x: point(x).gamma - floor, min(b[j], b[i]), max(b[j], b[i]), xtol=1e-3)
                p_edge = point(edge)
                if p_edge.gamma < floor:
                    # step onto the feasible side of the boundary
                    step = 2e-3 if b[j] < b[i] else -2e-3
                    p_edge = point(edge + step)
                consider(p_edge)
                if b[j] < b[i]:
                    left = edge
                else:
                    right = edge
        if right - left > 1e-6 and left < b[i] < right:
            res = minimize_scalar(lambda x: -point(x).theta_bl, bracket=(left, b[i], right),
                                  method="golden", options={"xtol": 1e-4})
            if left <= res.x <= right:
                consider(point(res.x))
    except (ValueError, EostomoError):
        pass
    return Optimum(best[0], best[1], best[2], floor, sweep)

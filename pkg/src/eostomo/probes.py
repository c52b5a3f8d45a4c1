"""Coherent near-infrared probe pulses.

A probe is described by an analytic spectral amplitude so it can be evaluated
both on the bin centres of the grid and on the bin edges (the chain needs the
probe at ``w - Omega`` for every signal bin ``Omega``, which falls on the edges).
The amplitude is scaled so that ``sum |beta(w_k)|^2 dw`` equals the photon
number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constants import THZ, TWO_PI
from .errors import ConfigurationError, DomainError, RangeError
from .field import FrequencyGrid, SpectralMode

DEFAULT_PHOTON_NUMBER = 5e9
DEFAULT_CORE_WIDTH = TWO_PI * THZ * 0.1

SHAPE_TAGS = ("sinc", "delocalized", "delocalized-odd-phase", "custom", "superposition")


def _rect(center: float, bandwidth: float):
    half = 0.5 * bandwidth

    def amp(w):
        w = np.asarray(w, dtype=float)
        return np.where(np.abs(w - center) <= half, 1.0 + 0j, 0j)

    return amp


def _cusp(center: float, bandwidth: float, taper: float, core_width: float, odd_phase: bool):
    half = 0.5 * bandwidth

    def amp(w):
        x = np.asarray(w, dtype=float) - center
        ax = np.abs(x)
        a = (1.0 + taper * ax / half) * (ax * ax + core_width * core_width) ** -0.25
        a = np.where(ax <= half, a, 0.0).astype(complex)
        if odd_phase:
            a = a * np.exp(0.5j * np.pi * np.sign(x))
        return a

    return amp


@dataclass(frozen=True, eq=False)
class ProbePulse:
    """Strong coherent probe.

    Attributes:
        grid: Frequency grid the probe is normalized on.
        photon_number: Mean photon number of the pulse.
        shape_tag: Family the pulse belongs to.
        central_frequency: Carrier frequency in rad/s.
        bandwidth: Full spectral width in rad/s (0 when not meaningful).
        profile: Unnormalized amplitude, callable ``w -> complex``.
    """

    grid: FrequencyGrid
    photon_number: float
    shape_tag: str
    central_frequency: float
    bandwidth: float
    profile: Callable = field(repr=False)
    _scale: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.photon_number > 0:
            raise DomainError(f"photon_number must be positive, got {self.photon_number!r}")
        if self.shape_tag not in SHAPE_TAGS:
            raise ConfigurationError(f"unknown probe shape {self.shape_tag!r}")
        raw = self.profile(self.grid.omegas)
        norm = float(np.sum(np.abs(raw) ** 2) * self.grid.delta_omega)
        if norm <= 0:
            raise ConfigurationError("probe spectrum has no support on the grid")
        object.__setattr__(self, "_scale", np.sqrt(self.photon_number / norm))

    # -- constructors -------------------------------------------------------
    @classmethod
    def sinc(cls, grid: FrequencyGrid, center: float, bandwidth: float,
             photon_number: float = DEFAULT_PHOTON_NUMBER) -> "ProbePulse":
        """Flat-phase rectangular spectrum of full width ``bandwidth`` (a sinc in time)."""
        _check_band(grid, center, bandwidth)
        return cls(grid, photon_number, "sinc", center, bandwidth, _rect(center, bandwidth))

    @classmethod
    def delocalized(cls, grid: FrequencyGrid, center: float, bandwidth: float,
                    photon_number: float = DEFAULT_PHOTON_NUMBER, taper: float = 0.55,
                    core_width: float | None = None, odd_phase: bool = False) -> "ProbePulse":
        """Carrier-dominated probe whose amplitude falls as ``|w - center|^(-1/2)``.

        The inverse square-root profile makes the autocorrelation between the
        lower and upper halves of the spectrum independent of the lag, which is
        what a Hilbert-quadrature readout needs.  ``taper`` tilts the sidebands
        by ``1 + taper |x| / (bandwidth / 2)`` to pre-compensate phase matching,
        and ``core_width`` (default 0.1 THz) regularizes the carrier.  With
        ``odd_phase`` the upper sideband gets a ``+pi/2`` phase and the lower one
        ``-pi/2``.
        """
        _check_band(grid, center, bandwidth)
        if core_width is None:
            core_width = DEFAULT_CORE_WIDTH
        if core_width <= 0:
            raise DomainError("core_width must be positive")
        tag = "delocalized-odd-phase" if odd_phase else "delocalized"
        return cls(grid, photon_number, tag, center, bandwidth,
                   _cusp(center, bandwidth, taper, core_width, odd_phase))

    @classmethod
    def custom(cls, grid: FrequencyGrid, spectrum, photon_number: float = DEFAULT_PHOTON_NUMBER,
               central_frequency: float | None = None) -> "ProbePulse":
        """Probe from a callable or from coefficients on the bin centres.

        Coefficient arrays are linearly interpolated (real and imaginary parts)
        onto the bin edges.
        """
        if callable(spectrum):
            profile = spectrum
        else:
            values = np.asarray(spectrum.coeffs if isinstance(spectrum, SpectralMode) else spectrum,
                                dtype=complex)
            if values.shape != (grid.n_points,):
                raise ConfigurationError("custom probe spectrum must match the grid length")
            w = grid.omegas

            def profile(x, _w=w, _v=values):
                x = np.asarray(x, dtype=float)
                return (np.interp(x, _w, _v.real, left=0.0, right=0.0)
                        + 1j * np.interp(x, _w, _v.imag, left=0.0, right=0.0))
        weights = np.abs(profile(grid.omegas)) ** 2
        if central_frequency is None:
            central_frequency = float(np.sum(weights * grid.omegas) / max(np.sum(weights), 1e-300))
        return cls(grid, photon_number, "custom", central_frequency, 0.0, profile)

    @classmethod
    def superpose(cls, *probes: "ProbePulse") -> "ProbePulse":
        """Coherent sum of probes, keeping each part's absolute amplitude."""
        if not probes:
            raise ConfigurationError("superpose needs at least one probe")
        grid = probes[0].grid
        if any(p.grid != grid for p in probes):
            raise ConfigurationError("probes live on different grids")
        parts = tuple(probes)

        def profile(w, _parts=parts):
            return sum(p.amplitude(w) for p in _parts)

        total = float(np.sum(np.abs(profile(grid.omegas)) ** 2) * grid.delta_omega)
        center = float(np.average([p.central_frequency for p in parts],
                                  weights=[p.photon_number for p in parts]))
        return cls(grid, total, "superposition", center, 0.0, profile)

    # -- evaluation ---------------------------------------------------------
    def amplitude(self, omega) -> np.ndarray:
        """Photon-number scaled amplitude ``beta(w)``."""
        return self._scale * np.asarray(self.profile(np.asarray(omega, dtype=float)), dtype=complex)

    @property
    def spectrum(self) -> SpectralMode:
        """Unit-norm spectrum on the bin centres."""
        return SpectralMode(self.grid, self.amplitude(self.grid.omegas) / np.sqrt(self.photon_number))

    def with_photon_number(self, photon_number: float) -> "ProbePulse":
        """Same spectral shape carrying a different photon number."""
        return ProbePulse(self.grid, photon_number, self.shape_tag, self.central_frequency,
                          self.bandwidth, self.profile)

    def support(self) -> tuple[float, float]:
        """Lowest and highest bin centre with non-zero amplitude."""
        w = self.grid.omegas
        nz = np.flatnonzero(self.amplitude(w))
        return float(w[nz[0]]), float(w[nz[-1]])


def _check_band(grid: FrequencyGrid, center: float, bandwidth: float):
    if not bandwidth > 0:
        raise DomainError(f"probe bandwidth must be positive, got {bandwidth!r}")
    lo, hi = center - 0.5 * bandwidth, center + 0.5 * bandwidth
    if lo <= 0 or hi > grid.omega_max:
        raise RangeError(
            f"probe band [{lo / (TWO_PI * THZ):.4g}, {hi / (TWO_PI * THZ):.4g}] THz not inside the grid"
        )

"""Discretized field conventions, quadrature modes and overlaps.

Only positive angular frequencies are stored.  A mode with coefficients ``c_k``
stands for the Hermitian observable ``sum_k (c_k a_k + conj(c_k) a_k^dagger) dw``;
the creation half is the negative-frequency mirror ``a_{-w} = a_w^dagger`` and is
never stored explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np

from .constants import PhysicalConstants, omega_to_thz, thz_to_omega
from .errors import DomainError, GridMismatchError, RangeError
from .kernels import waveform_kernel

IndexLike = Union[float, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of positive angular frequencies ``w_k = (k + 1/2) dw``.

    Attributes:
        n_points: Number of bins.
        omega_max: Upper edge of the grid in rad/s, equal to ``n_points * dw``.
    """

    n_points: int
    omega_max: float

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise DomainError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if not np.isfinite(self.omega_max) or self.omega_max <= 0:
            raise DomainError(f"omega_max must be positive, got {self.omega_max!r}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "omega_max", float(self.omega_max))

    @classmethod
    def from_thz(cls, f_max_thz: float, n_points: int) -> "FrequencyGrid":
        """Build a grid whose upper edge is ``f_max_thz`` (ordinary frequency)."""
        return cls(n_points=n_points, omega_max=thz_to_omega(f_max_thz))

    @property
    def delta_omega(self) -> float:
        return self.omega_max / self.n_points

    @property
    def omegas(self) -> np.ndarray:
        """Bin centres ``(k + 1/2) dw``."""
        return (np.arange(self.n_points) + 0.5) * self.delta_omega

    @property
    def edges(self) -> np.ndarray:
        """Integer points ``m dw`` for ``m = 0..n_points`` (bin edges)."""
        return np.arange(self.n_points + 1) * self.delta_omega

    @property
    def thz(self) -> np.ndarray:
        return omega_to_thz(self.omegas)

    def index_below(self, omega: float) -> int:
        """Number of bin centres strictly below ``omega``."""
        return int(np.clip(np.ceil(omega / self.delta_omega - 0.5), 0, self.n_points))

    def zeros(self) -> "SpectralMode":
        return SpectralMode(self, np.zeros(self.n_points, dtype=complex))


@dataclass(frozen=True, eq=False)
class SpectralMode:
    """Complex coefficients over a :class:`FrequencyGrid`.

    The coefficients carry units of ``1/sqrt(rad/s)`` so that
    ``sum |c_k|^2 dw`` is dimensionless.
    """

    grid: FrequencyGrid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.shape != (self.grid.n_points,):
            raise GridMismatchError(
                f"coefficient vector has shape {coeffs.shape}, grid expects ({self.grid.n_points},)"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def __add__(self, other: "SpectralMode") -> "SpectralMode":
        _check_same_grid(self, other)
        return SpectralMode(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralMode") -> "SpectralMode":
        _check_same_grid(self, other)
        return SpectralMode(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "SpectralMode":
        return SpectralMode(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralMode":
        return SpectralMode(self.grid, -self.coeffs)

    def norm2(self) -> float:
        return norm2(self)

    def normalized(self) -> "SpectralMode":
        n2 = norm2(self)
        if n2 <= 0:
            raise DomainError("cannot normalize a zero mode")
        return SpectralMode(self.grid, self.coeffs / np.sqrt(n2))

    def band_limited(self, omega_m: float) -> "SpectralMode":
        """Copy with every coefficient above ``omega_m`` set to zero."""
        return SpectralMode(self.grid, np.where(self.grid.omegas <= omega_m, self.coeffs, 0))


def _check_same_grid(a: SpectralMode, b: SpectralMode):
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")


def _index_values(refractive_index: IndexLike, omegas: np.ndarray) -> np.ndarray:
    if callable(refractive_index):
        n = np.asarray(refractive_index(omegas), dtype=float)
    else:
        n = np.full(omegas.shape, float(refractive_index))
    n = np.broadcast_to(n, omegas.shape)
    if not np.all(np.isfinite(n)) or np.any(n <= 0):
        raise DomainError("refractive index must be positive over the grid")
    return n


def norm2(mode: SpectralMode) -> float:
    """Squared norm ``sum |c_k|^2 dw``."""
    return float(np.sum(np.abs(mode.coeffs) ** 2) * mode.grid.delta_omega)


def overlap(a: SpectralMode, b: SpectralMode) -> complex:
    """Normal-ordered commutator pairing ``sum conj(a_k) b_k dw``.

    Raises:
        GridMismatchError: if the two modes live on different grids.
    """
    _check_same_grid(a, b)
    return complex(np.vdot(a.coeffs, b.coeffs) * a.grid.delta_omega)


def electric_mode_at(t: float, x: float = 0.0, refractive_index: IndexLike = 1.0,
                     grid: FrequencyGrid | None = None,
                     constants: PhysicalConstants | None = None) -> SpectralMode:
    """Coefficients of the electric-field operator at time ``t`` and position ``x``.

    ``c_k = -i sqrt(hbar w_k / (4 pi eps0 c n A)) exp(-i w_k (t - n x / c))``.

    Args:
        t: Time in seconds.
        x: Position in metres.
        refractive_index: Constant index or a callable ``w -> n``.
        grid: Frequency grid.
        constants: Physical constants (SI by default).

    Raises:
        DomainError: if the index is not positive on the grid.
    """
    if grid is None:
        raise DomainError("a frequency grid is required")
    constants = constants or PhysicalConstants()
    w = grid.omegas
    n = _index_values(refractive_index, w)
    amp = constants.field_prefactor(w, n)
    phase = np.exp(-1j * w * (t - n * x / constants.c))
    return SpectralMode(grid, -1j * amp * phase)


def hilbert_of(mode: SpectralMode) -> SpectralMode:
    """Hilbert quadrature: multiply every positive-frequency coefficient by ``i``.

    The stored frequencies are all positive, so ``i sign(w) = i``; the mirror
    half implicitly picks up ``-i``.
    """
    return SpectralMode(mode.grid, 1j * mode.coeffs)


def bandlimited_E(t: float, omega_m: float, grid: FrequencyGrid, refractive_index: IndexLike = 1.0,
                  constants: PhysicalConstants | None = None) -> SpectralMode:
    """Electric-field mode at time ``t`` restricted to ``w <= omega_m``.

    Raises:
        RangeError: if ``omega_m`` is not in ``(0, grid.omega_max]``.
    """
    if not 0 < omega_m <= grid.omega_max * (1 + 1e-12):
        raise RangeError(
            f"omega_m = {omega_to_thz(omega_m):.6g} THz outside grid (0, {omega_to_thz(grid.omega_max):.6g}] THz"
        )
    return electric_mode_at(t, 0.0, refractive_index, grid, constants).band_limited(omega_m)


def bandlimited_H(t: float, omega_m: float, grid: FrequencyGrid, refractive_index: IndexLike = 1.0,
                  constants: PhysicalConstants | None = None) -> SpectralMode:
    """Hilbert partner of :func:`bandlimited_E`."""
    return hilbert_of(bandlimited_E(t, omega_m, grid, refractive_index, constants))


def mirror(coeffs: np.ndarray) -> np.ndarray:
    """Map annihilation coefficients to the creation (negative-frequency) half.

    Applying the map twice returns the input.
    """
    return np.conj(coeffs)


def signed_spectrum(mode: SpectralMode):
    """Return ``(omega, coeff)`` over both signs of frequency, sorted ascending."""
    w = mode.grid.omegas
    return np.concatenate([-w[::-1], w]), np.concatenate([mirror(mode.coeffs)[::-1], mode.coeffs])


class Waveform(NamedTuple):
    """Time-domain rendering of a mode.

    Attributes:
        field: Real waveform ``w(t) + conj(w(t))`` including the mirror half.
        analytic: Positive-frequency part ``w(t)``.
    """

    field: np.ndarray
    analytic: np.ndarray


def time_waveform(mode: SpectralMode, t_samples) -> Waveform:
    """Temporal mode function ``w(t) = sum_k c_k exp(+i w_k t) dw``.

    The exponent sign is chosen so that a mode built at time ``t0`` (whose
    coefficients carry ``exp(-i w t0)``) is centred at ``t0``.
    """
    t = np.atleast_1d(np.asarray(t_samples, dtype=float))
    if t.size == 0:
        empty = np.zeros(0)
        return Waveform(empty, empty.astype(complex))
    analytic = waveform_kernel(mode.coeffs, mode.grid.omegas, t) * mode.grid.delta_omega
    return Waveform(2.0 * analytic.real, analytic)


def sampling_profile(mode: SpectralMode, t_samples, refractive_index: IndexLike = 1.0,
                     constants: PhysicalConstants | None = None) -> np.ndarray:
    """Real kernel ``h(t)`` such that the mode's observable equals ``int h(t) E(t) dt``.

    This is the profile drawn for detection modes: the band-limited electric
    field gives an even, peaked kernel and its Hilbert partner an odd one.
    """
    t = np.atleast_1d(np.asarray(t_samples, dtype=float))
    if t.size == 0:
        return np.zeros(0)
    constants = constants or PhysicalConstants()
    w = mode.grid.omegas
    amp = constants.field_prefactor(w, _index_values(refractive_index, w))
    transfer = 1j * mode.coeffs / amp
    return waveform_kernel(transfer, w, t).real * mode.grid.delta_omega / np.pi

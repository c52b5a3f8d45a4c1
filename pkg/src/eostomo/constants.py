"""Physical constants and unit helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants as _sc

from .errors import DomainError

TWO_PI = 2.0 * np.pi
THZ = 1e12


def _as_output(values):
    return float(values) if values.ndim == 0 else values


def thz_to_omega(f_thz):
    """Convert an ordinary frequency in THz to angular frequency in rad/s."""
    return _as_output(TWO_PI * THZ * np.asarray(f_thz, dtype=float))


def omega_to_thz(omega):
    """Convert angular frequency in rad/s to ordinary frequency in THz."""
    return _as_output(np.asarray(omega, dtype=float) / (TWO_PI * THZ))


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants entering the field quantization.

    Attributes:
        hbar: Reduced Planck constant in J s.
        c: Vacuum speed of light in m/s.
        cross_section_A: Transverse area of the quantization volume in m^2.
        epsilon_0: Vacuum permittivity in F/m.
    """

    hbar: float = _sc.hbar
    c: float = _sc.c
    cross_section_A: float = 4.5e-11
    epsilon_0: float = _sc.epsilon_0

    def __post_init__(self):
        for name in ("hbar", "c", "cross_section_A", "epsilon_0"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be strictly positive, got {value!r}")

    @classmethod
    def natural(cls) -> "PhysicalConstants":
        """Units with hbar = c = A = epsilon_0 = 1, used by oracle tests."""
        return cls(hbar=1.0, c=1.0, cross_section_A=1.0, epsilon_0=1.0)

    def field_prefactor(self, omega, n):
        """Single-photon field amplitude ``sqrt(hbar w / (4 pi eps0 c n A))``.

        Args:
            omega: Angular frequency (scalar or array).
            n: Refractive index at ``omega``.

        Returns:
            Amplitude with the same shape as the broadcast inputs.
        """
        omega = np.asarray(omega, dtype=float)
        return np.sqrt(self.hbar * omega / (4.0 * np.pi * self.epsilon_0 * self.c * n * self.cross_section_A))

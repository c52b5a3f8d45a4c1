"""Material and polarization optics: refractive indices, crystal, waveplates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constants import THZ, TWO_PI
from .errors import ConfigurationError, DomainError

_C_UM_THZ = 299.792458  # speed of light in um * THz


@dataclass(frozen=True)
class SellmeierIndex:
    """Single-pole Sellmeier index ``n^2 = a + b lam^2 / (lam^2 - c)`` (lam in um).

    The defaults are a widely used ZnTe fit for the near infrared.  Frequencies
    are clamped to 90 % of the resonance so the expression stays finite far
    outside the band where it is used.
    """

    a: float = 4.27
    b: float = 3.01
    c_um2: float = 0.142

    def __call__(self, omega):
        f_pole = _C_UM_THZ / np.sqrt(self.c_um2) if self.c_um2 > 0 else np.inf
        f_thz = np.clip(np.asarray(omega, dtype=float) / (TWO_PI * THZ), 1e-6, 0.9 * f_pole)
        lam2 = (_C_UM_THZ / f_thz) ** 2
        return np.sqrt(self.a + self.b * lam2 / (lam2 - self.c_um2))


@dataclass(frozen=True)
class MidInfraredIndex:
    """Slowly varying mid-infrared index with a smooth hand-over to the NIR fit.

    The index rises linearly from ``n_low`` at ``f_low`` to ``n_high`` at
    ``f_high`` (clamped outside).  Between ``blend_start`` and ``blend_stop`` it
    is blended linearly into ``nir`` evaluated no lower than ``nir_floor`` so that
    signal frequencies far above the mid infrared see the near-infrared index.
    """

    n_low: float = 2.55
    n_high: float = 2.59
    f_low_thz: float = 10.0
    f_high_thz: float = 40.0
    blend_start_thz: float = 40.0
    blend_stop_thz: float = 100.0
    nir_floor_thz: float = 60.0
    nir: SellmeierIndex = field(default_factory=SellmeierIndex)

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        f = omega / (TWO_PI * THZ)
        ramp = np.clip((f - self.f_low_thz) / (self.f_high_thz - self.f_low_thz), 0.0, 1.0)
        low = self.n_low + (self.n_high - self.n_low) * ramp
        high = self.nir(np.maximum(omega, TWO_PI * THZ * self.nir_floor_thz))
        s = np.clip((f - self.blend_start_thz) / (self.blend_stop_thz - self.blend_start_thz), 0.0, 1.0)
        return (1.0 - s) * low + s * high


@dataclass(frozen=True)
class CrystalParams:
    """Electro-optic crystal.

    Attributes:
        length_L: Crystal length in metres.
        r41: Electro-optic coefficient in m/V.
        n_mir: Signal-band index, callable ``w -> n``.
        n_nir: Probe-band index, callable ``w -> n``.
        phase_matching: Include the ``sinc(dk L / 2)`` factor.
    """

    length_L: float = 7e-6
    r41: float = 4e-12
    n_mir: Callable = field(default_factory=MidInfraredIndex)
    n_nir: Callable = field(default_factory=SellmeierIndex)
    phase_matching: bool = True

    def __post_init__(self):
        if not self.length_L > 0:
            raise DomainError(f"crystal length must be positive, got {self.length_L!r}")
        if not np.isfinite(self.r41):
            raise DomainError("r41 must be finite")
        probe = TWO_PI * THZ * np.array([150.0, 300.0, 450.0])
        signal = TWO_PI * THZ * np.array([1.0, 20.0, 40.0])
        for name, fn, w in (("n_nir", self.n_nir, probe), ("n_mir", self.n_mir, signal)):
            n = np.asarray(fn(w), dtype=float)
            if np.any(n <= 1) or np.any(n >= 4):
                raise DomainError(f"{name} must lie in (1, 4); got {n}")

    def nonlinear_d(self, omega_ref: float) -> float:
        """Effective coefficient ``d = -n^4 r41`` at the probe reference frequency."""
        return -float(self.n_nir(omega_ref)) ** 4 * self.r41

    def coupling_lambda(self, omega_ref: float, cross_section: float, epsilon_0: float) -> float:
        """Interaction strength ``lambda = A eps0 d / 2``."""
        return 0.5 * cross_section * epsilon_0 * self.nonlinear_d(omega_ref)

    def with_(self, **changes) -> "CrystalParams":
        """Copy with some fields replaced."""
        params = {k: getattr(self, k) for k in ("length_L", "r41", "n_mir", "n_nir", "phase_matching")}
        params.update(changes)
        return CrystalParams(**params)


def rotation(theta: float) -> np.ndarray:
    """Rotation of the (z, s) polarization basis into a frame at angle ``theta``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


def retarder(retardance: float, angle: float) -> np.ndarray:
    """Jones matrix of a linear retarder with its fast axis at ``angle`` from z."""
    core = np.diag([1.0, np.exp(1j * retardance)])
    return rotation(-angle) @ core @ rotation(angle)


@dataclass(frozen=True)
class Waveplate:
    """Waveplate in front of the Wollaston prism.

    ``kind`` is ``"half"``, ``"quarter"`` or ``"none"``; ``"compound"`` stacks a
    quarter plate at ``angle`` followed by a half plate at ``angle2`` and can
    realize any balanced readout phase.
    """

    kind: str = "none"
    angle: float = 0.0
    angle2: float = 0.0

    def __post_init__(self):
        if self.kind not in ("half", "quarter", "none", "compound"):
            raise ConfigurationError(f"unknown waveplate kind {self.kind!r}")
        for a in (self.angle, self.angle2):
            if not 0.0 <= a < np.pi:
                raise ConfigurationError(f"waveplate angle {a!r} outside [0, pi)")

    def jones(self) -> np.ndarray:
        if self.kind == "half":
            return retarder(np.pi, self.angle)
        if self.kind == "quarter":
            return retarder(np.pi / 2, self.angle)
        if self.kind == "compound":
            return retarder(np.pi, self.angle2) @ retarder(np.pi / 2, self.angle)
        return np.eye(2, dtype=complex)


def readout_coefficient(jones: np.ndarray) -> complex:
    """Weight of the signal amplitude in the balanced difference ``N_z - N_s``.

    With a strong local oscillator in ``z`` and a weak signal in ``s`` the
    linearized difference is ``c conj(lo) s + h.c.`` with
    ``c = conj(J_zz) J_zs - conj(J_sz) J_ss``.
    """
    return complex(np.conj(jones[0, 0]) * jones[0, 1] - np.conj(jones[1, 0]) * jones[1, 1])


def probe_imbalance(jones: np.ndarray) -> float:
    """``|J_zz|^2 - |J_sz|^2``; zero when the probe is split evenly."""
    return float(abs(jones[0, 0]) ** 2 - abs(jones[1, 0]) ** 2)


def compound_for_phase(phase: float) -> Waveplate:
    """Quarter + half plate pair whose balanced readout coefficient is ``exp(-i phase)``.

    A quarter plate at 45 degrees followed by a half plate at angle ``h`` gives a
    balanced readout with coefficient ``-i exp(4 i h)``; the half-plate angle is
    chosen accordingly.
    """
    target = (np.pi / 2 - phase) / 4.0
    h = float(np.mod(target, np.pi / 2))
    plate = Waveplate("compound", np.pi / 4, h)
    return plate

"""Spectral-filter ports in front of the balanced detectors.

Each port collects the probe light between ``omega_min`` (inclusive) and
``omega_max`` (exclusive), passes it through a waveplate and a Wollaston prism
and reports the photon-number difference of the two outputs, normalized by the
port's mean photon number.  ``sign`` flips the difference (``N_s - N_z``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constants import THZ, TWO_PI, thz_to_omega
from .errors import ConfigurationError, NonCommutingError, RangeError
from .field import FrequencyGrid
from .optics import Waveplate, compound_for_phase, probe_imbalance, readout_coefficient

QUARTER_45 = Waveplate("quarter", np.pi / 4)
HALF_22_5 = Waveplate("half", np.pi / 8)


@dataclass(frozen=True)
class Port:
    """One filter window with its polarization analysis.

    Attributes:
        omega_min: Lower edge in rad/s (inclusive).
        omega_max: Upper edge in rad/s (exclusive), may be ``inf``.
        waveplate: Waveplate in front of the Wollaston prism.
        sign: ``+1`` for ``N_z - N_s`` and ``-1`` for ``N_s - N_z``.
        role: Free label, ``"E"`` or ``"H"`` for multiplexed readouts.
    """

    omega_min: float
    omega_max: float
    waveplate: Waveplate = QUARTER_45
    sign: int = 1
    role: str | None = None

    def __post_init__(self):
        if not self.omega_min < self.omega_max:
            raise ConfigurationError(f"port band [{self.omega_min}, {self.omega_max}) is empty")
        if self.omega_min < 0:
            raise RangeError("port lower edge must be non-negative")
        if self.sign not in (1, -1):
            raise ConfigurationError("port sign must be +1 or -1")

    @property
    def detecting(self) -> bool:
        """False for ports without a waveplate, which are not read out."""
        return self.waveplate.kind != "none"

    def coefficient(self) -> complex:
        """Signed balanced-readout coefficient of this port."""
        jones = self.waveplate.jones()
        if abs(probe_imbalance(jones)) > 1e-9:
            raise ConfigurationError(
                f"waveplate {self.waveplate} does not split the probe evenly; the readout is not balanced"
            )
        return self.sign * readout_coefficient(jones)

    def contains(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return (omega >= self.omega_min) & (omega < self.omega_max)


@dataclass(frozen=True)
class PortConfig:
    """Ordered, non-overlapping list of ports."""

    ports: tuple = field(default_factory=tuple)

    def __post_init__(self):
        ports = tuple(self.ports)
        if not ports:
            raise ConfigurationError("at least one port is required")
        for p in ports:
            if not isinstance(p, Port):
                raise ConfigurationError(f"expected Port, got {type(p).__name__}")
        for a, b in zip(ports, ports[1:]):
            if a.omega_min > b.omega_min:
                raise ConfigurationError("ports must be ordered by frequency")
            if b.omega_min < a.omega_max:
                raise NonCommutingError(
                    f"ports [{a.omega_min / (TWO_PI * THZ):.4g}, {a.omega_max / (TWO_PI * THZ):.4g}) and "
                    f"[{b.omega_min / (TWO_PI * THZ):.4g}, {b.omega_max / (TWO_PI * THZ):.4g}) THz overlap"
                )
        object.__setattr__(self, "ports", ports)

    def __iter__(self):
        return iter(self.ports)

    def __len__(self):
        return len(self.ports)

    def validate(self, grid: FrequencyGrid):
        """Check that every port edge lies within the grid."""
        for p in self.ports:
            if p.omega_min > grid.omega_max or (np.isfinite(p.omega_max) and p.omega_max > grid.omega_max * (1 + 1e-12)):
                raise RangeError("port boundary outside the frequency grid")

    def select(self, role: str) -> "PortConfig":
        """Ports carrying the given role label."""
        chosen = tuple(p for p in self.ports if p.role == role)
        if not chosen:
            raise ConfigurationError(f"no port is assigned to role {role!r}")
        return PortConfig(chosen)

    # -- standard layouts ---------------------------------------------------
    @classmethod
    def electric(cls, omega_min: float = 0.0, omega_max: float = np.inf) -> "PortConfig":
        """Single quadrature-readout port (quarter-wave plate at 45 degrees)."""
        return cls((Port(omega_min, omega_max, QUARTER_45, 1, "E"),))

    @classmethod
    def hilbert(cls, split: float, omega_min: float = 0.0, omega_max: float = np.inf) -> "PortConfig":
        """Two in-phase ports split at the probe carrier, upper port subtracted."""
        return cls((
            Port(omega_min, split, HALF_22_5, 1, "H"),
            Port(split, omega_max, HALF_22_5, -1, "H"),
        ))

    @classmethod
    def multiplexed(cls, e_split: float = thz_to_omega(280.0), h_split: float = thz_to_omega(340.0)) -> "PortConfig":
        """Three-port layout: E below ``e_split``, H pair split at ``h_split``."""
        if not e_split < h_split:
            raise ConfigurationError("the E band must lie below the H carrier")
        return cls((
            Port(0.0, e_split, QUARTER_45, 1, "E"),
            Port(e_split, h_split, HALF_22_5, 1, "H"),
            Port(h_split, np.inf, HALF_22_5, -1, "H"),
        ))

    @classmethod
    def phase_pair(cls, split: float, phi: float) -> "PortConfig":
        """Two ports whose balanced readout phases select the quadrature ``phi``."""
        lower = compound_for_phase(np.pi / 2 - phi)
        upper = compound_for_phase(np.pi / 2 + phi)
        return cls((Port(0.0, split, lower, 1, "X"), Port(split, np.inf, upper, 1, "X")))


def readout_weights(ports: PortConfig | Sequence[Port], omega, lo_power_h: np.ndarray,
                    omega_h: np.ndarray, delta_omega: float):
    """Readout weight ``u(w) = coefficient / sqrt(N_port)`` at arbitrary frequencies.

    Args:
        ports: Port layout.
        omega: Frequencies at which ``u`` is wanted.
        lo_power_h: ``|LO(w_k)|^2`` on the bin centres ``omega_h``.
        omega_h: Bin centres.
        delta_omega: Bin width.

    Returns:
        ``(u, photon_numbers)`` where ``photon_numbers`` lists ``N_port`` of each
        detecting port.

    Raises:
        ConfigurationError: if a detecting port receives no probe light.
    """
    omega = np.asarray(omega, dtype=float)
    u = np.zeros(omega.shape, dtype=complex)
    counts = []
    for p in ports:
        if not p.detecting:
            continue
        n_port = float(np.sum(lo_power_h[p.contains(omega_h)]) * delta_omega)
        if n_port <= 0:
            raise ConfigurationError(
                f"port [{p.omega_min / (TWO_PI * THZ):.4g}, {p.omega_max / (TWO_PI * THZ):.4g}) THz receives no probe light"
            )
        counts.append(n_port)
        u[p.contains(omega)] = p.coefficient() / np.sqrt(n_port)
    return u, counts

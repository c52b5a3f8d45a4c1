"""Experiment configuration.

A configuration is a JSON document with the blocks below; every block and
every key is optional and unknown keys are rejected.  Frequencies are given in
THz, times in fs, lengths in um and the electro-optic coefficient in pm/V; the
builders convert to SI.

.. code-block:: json

    {
      "grid": {"omega_max_thz": 500, "n_points": 5120},
      "constants": {"cross_section_m2": 4.5e-11},
      "crystal": {"length_um": 7, "r41_pm_per_v": 4, "phase_matching": true},
      "probe": {"photon_number": 5e9, "e_center_thz": 320, "e_full_bandwidth_thz": 300,
                "h_center_thz": 340, "h_full_bandwidth_thz": 160},
      "ports": {"e_split_thz": 280, "h_split_thz": 340},
      "signal": {"omega0_thz": 20, "sigma_thz": 4, "r": 0.5},
      "sweep": {"quadrature": "E", "constraint": "constant_intensity"},
      "tomography": {"t_min_fs": -200, "t_max_fs": 200, "n_times": 801, "shots": 0},
      "variant": {"name": "phase_scan", "phi_list": [0, 1.5707963267948966]},
      "output": {"directory": "eostomo_out", "formats": ["csv", "svg"]}
    }
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .constants import PhysicalConstants, thz_to_omega
from .errors import ConfigurationError, EostomoError
from .experiments import MultiplexLayout
from .field import FrequencyGrid
from .metrics import CONSTRAINTS, QUADRATURES, ChainConfig
from .optics import CrystalParams, MidInfraredIndex, SellmeierIndex


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridBlock(_Block):
    omega_max_thz: float = Field(500.0, gt=0)
    n_points: int = Field(5120, ge=8)


class ConstantsBlock(_Block):
    cross_section_m2: float = Field(4.5e-11, gt=0)


class SellmeierBlock(_Block):
    a: float = 4.27
    b: float = 3.01
    c_um2: float = Field(0.142, ge=0)


class MidInfraredBlock(_Block):
    n_low: float = Field(2.55, gt=1, lt=4)
    n_high: float = Field(2.59, gt=1, lt=4)


class CrystalBlock(_Block):
    length_um: float = Field(7.0, gt=0)
    r41_pm_per_v: float = 4.0
    phase_matching: bool = True
    nir: SellmeierBlock = SellmeierBlock()
    mir: MidInfraredBlock = MidInfraredBlock()


class ProbeBlock(_Block):
    photon_number: float = Field(5e9, gt=0)
    e_center_thz: float = Field(320.0, gt=0)
    e_full_bandwidth_thz: float = Field(300.0, gt=0)
    h_center_thz: float = Field(340.0, gt=0)
    h_full_bandwidth_thz: float = Field(160.0, gt=0)
    h_taper: float = Field(0.55, ge=0)
    h_core_width_thz: float = Field(0.1, gt=0)
    mux_e_low_thz: float = Field(80.0, gt=0)
    mux_e_high_thz: float = Field(260.0, gt=0)
    mux_h_bandwidth_thz: float = Field(80.0, gt=0)


class PortsBlock(_Block):
    e_split_thz: float = Field(280.0, gt=0)
    h_split_thz: float = Field(340.0, gt=0)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.e_split_thz < self.h_split_thz:
            raise ValueError("e_split_thz must lie below h_split_thz")
        return self


class SignalBlock(_Block):
    omega0_thz: float = Field(20.0, gt=0)
    sigma_thz: float = Field(4.0, gt=0)
    r: float = 0.5
    omega_m_thz: float | None = Field(None, gt=0)

    @property
    def band_edge_thz(self) -> float:
        """Signal band edge; twice the signal centre when not given."""
        return self.omega_m_thz if self.omega_m_thz is not None else 2.0 * self.omega0_thz


class SweepBlock(_Block):
    quadrature: Literal["E", "H"] = "E"
    constraint: Literal["constant_photon_number", "constant_intensity"] = "constant_intensity"
    bandwidths_thz: list[float] | None = None
    n_points: int = Field(40, ge=1)
    min_thz: float = Field(10.0, gt=0)
    gamma_floor: float | None = Field(None, ge=0, le=1)

    @field_validator("bandwidths_thz")
    @classmethod
    def _positive(cls, v):
        if v is not None and any(not b > 0 for b in v):
            raise ValueError("bandwidths must be positive")
        return v


class TomographyBlock(_Block):
    t_min_fs: float = -200.0
    t_max_fs: float = 200.0
    n_times: int = Field(801, ge=0)
    husimi_extent: float = Field(4.0, gt=0)
    husimi_points: int = Field(81, ge=2)
    husimi_time_fs: float = 0.0
    shots: int = Field(0, ge=0)
    seed: int = Field(0, ge=0)


class WaveformsBlock(_Block):
    t_min_fs: float = -100.0
    t_max_fs: float = 100.0
    n_times: int = Field(401, ge=0)


class VariantBlock(_Block):
    name: Literal["beam_splitter", "phase_scan"] = "phase_scan"
    phi_list: list[float] = [0.0, float(np.pi / 4), float(np.pi / 2), float(np.pi), float(3 * np.pi / 2)]
    transmission: float | None = Field(None, ge=0, le=1)


class OutputBlock(_Block):
    directory: str = "eostomo_out"
    formats: list[Literal["csv", "svg"]] = ["csv", "svg"]


class ExperimentConfig(_Block):
    """Validated experiment configuration."""

    grid: GridBlock = GridBlock()
    constants: ConstantsBlock = ConstantsBlock()
    crystal: CrystalBlock = CrystalBlock()
    probe: ProbeBlock = ProbeBlock()
    ports: PortsBlock = PortsBlock()
    signal: SignalBlock = SignalBlock()
    sweep: SweepBlock = SweepBlock()
    tomography: TomographyBlock = TomographyBlock()
    waveforms: WaveformsBlock = WaveformsBlock()
    variant: VariantBlock = VariantBlock()
    output: OutputBlock = OutputBlock()

    # -- builders ---------------------------------------------------------------
    def frequency_grid(self) -> FrequencyGrid:
        return FrequencyGrid.from_thz(self.grid.omega_max_thz, self.grid.n_points)

    def crystal_params(self) -> CrystalParams:
        nir = SellmeierIndex(self.crystal.nir.a, self.crystal.nir.b, self.crystal.nir.c_um2)
        mir = MidInfraredIndex(n_low=self.crystal.mir.n_low, n_high=self.crystal.mir.n_high, nir=nir)
        return CrystalParams(self.crystal.length_um * 1e-6, self.crystal.r41_pm_per_v * 1e-12, mir, nir,
                             self.crystal.phase_matching)

    def chain(self) -> ChainConfig:
        p = self.probe
        return ChainConfig(
            grid=self.frequency_grid(),
            crystal=self.crystal_params(),
            constants=PhysicalConstants(cross_section_A=self.constants.cross_section_m2),
            photon_number=p.photon_number,
            omega_m=thz_to_omega(self.signal.band_edge_thz),
            e_center=thz_to_omega(p.e_center_thz),
            e_full_bandwidth=thz_to_omega(p.e_full_bandwidth_thz),
            h_center=thz_to_omega(p.h_center_thz),
            h_full_bandwidth=thz_to_omega(p.h_full_bandwidth_thz),
            h_taper=p.h_taper,
            h_core_width=thz_to_omega(p.h_core_width_thz),
        )

    def layout(self) -> MultiplexLayout:
        p = self.probe
        return MultiplexLayout(
            e_low=thz_to_omega(p.mux_e_low_thz), e_high=thz_to_omega(p.mux_e_high_thz),
            e_split=thz_to_omega(self.ports.e_split_thz), h_center=thz_to_omega(self.ports.h_split_thz),
            h_bandwidth=thz_to_omega(p.mux_h_bandwidth_thz), e_photon_number=p.photon_number,
            h_photon_number=p.photon_number, h_taper=p.h_taper,
        )

    def validate_physics(self) -> "ExperimentConfig":
        """Build every domain object once so invalid combinations fail before any computation."""
        chain = self.chain()
        for q in QUADRATURES:
            chain.probe(q, chain.full_bandwidth(q))
        self.layout().probe(chain.grid)
        if self.sweep.constraint not in CONSTRAINTS:
            raise ConfigurationError(f"unknown constraint {self.sweep.constraint!r}")
        return self

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def override(self, **dotted) -> "ExperimentConfig":
        """Copy with ``block.key`` entries replaced; ``None`` values are skipped."""
        data = self.model_dump(mode="python")
        for key, value in dotted.items():
            if value is None:
                continue
            block, _, name = key.partition(".")
            if block not in data or name not in data[block]:
                raise ConfigurationError(f"unknown configuration key {key!r}")
            data[block][name] = value
        return load_config_dict(data)


def load_config_dict(data: dict) -> ExperimentConfig:
    """Validate a configuration mapping.

    Raises:
        ConfigurationError: on unknown keys, wrong types or inconsistent values.
    """
    try:
        cfg = ExperimentConfig.model_validate(data)
        return cfg.validate_physics()
    except ValidationError as exc:
        raise ConfigurationError(_summarize(exc)) from exc
    except EostomoError as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(str(exc)) from exc


def load_config(path: str | Path | None) -> ExperimentConfig:
    """Read a JSON configuration file (defaults when ``path`` is ``None``).

    Raises:
        ConfigurationError: if the file is missing, not JSON or invalid.
    """
    if path is None:
        return load_config_dict({})
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config root must be an object")
    return load_config_dict(data)


def _summarize(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"])
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)

import numpy as np
import pytest

from eostomo.constants import thz_to_omega
from eostomo.errors import ConfigurationError, DomainError, NonCommutingError, RangeError
from eostomo.field import FrequencyGrid
from eostomo.optics import (CrystalParams, MidInfraredIndex, SellmeierIndex, Waveplate, compound_for_phase,
                            probe_imbalance, readout_coefficient, retarder)
from eostomo.ports import Port, PortConfig, readout_weights
from eostomo.probes import ProbePulse


@pytest.fixture(scope="module")
def grid():
    return FrequencyGrid.from_thz(500.0, 1000)


# -- indices and crystal ------------------------------------------------------

def test_sellmeier_in_physical_range():
    n = SellmeierIndex()(thz_to_omega(np.array([200.0, 300.0, 400.0])))
    assert np.all((n > 2.6) & (n < 3.0))
    # normal dispersion in the near infrared
    assert np.all(np.diff(n) > 0)


def test_mid_infrared_index_ramp_and_handover():
    idx = MidInfraredIndex()
    assert idx(thz_to_omega(5.0)) == pytest.approx(2.55)
    assert idx(thz_to_omega(40.0)) == pytest.approx(2.59)
    far = thz_to_omega(200.0)
    assert idx(far) == pytest.approx(SellmeierIndex()(far))
    assert np.all(np.isfinite(idx(thz_to_omega(np.linspace(0, 500, 101)))))


@pytest.mark.parametrize("kwargs", [{"length_L": 0.0}, {"r41": np.nan}, {"n_nir": lambda w: 0.5 + 0 * w}])
def test_crystal_rejects_bad_parameters(kwargs):
    with pytest.raises(DomainError):
        CrystalParams(**kwargs)


def test_crystal_with_keeps_other_fields():
    c = CrystalParams().with_(length_L=1e-5)
    assert c.length_L == 1e-5 and c.r41 == CrystalParams().r41


def test_nonlinear_coefficient_sign():
    c = CrystalParams()
    assert c.nonlinear_d(thz_to_omega(300.0)) < 0


# -- waveplates ---------------------------------------------------------------

def test_retarder_is_unitary():
    j = retarder(0.7, 0.3)
    np.testing.assert_allclose(j @ j.conj().T, np.eye(2), atol=1e-14)


def test_quarter_plate_at_45_reads_quadrature():
    jones = Waveplate("quarter", np.pi / 4).jones()
    assert readout_coefficient(jones) == pytest.approx(-1j)
    assert probe_imbalance(jones) == pytest.approx(0.0, abs=1e-14)


def test_half_plate_at_22_5_reads_in_phase():
    jones = Waveplate("half", np.pi / 8).jones()
    assert readout_coefficient(jones) == pytest.approx(1.0)
    assert probe_imbalance(jones) == pytest.approx(0.0, abs=1e-14)


def test_no_plate_is_unbalanced():
    assert probe_imbalance(Waveplate().jones()) == pytest.approx(1.0)


@pytest.mark.parametrize("phase", np.linspace(-np.pi, np.pi, 9))
def test_compound_plate_realizes_phase(phase):
    jones = compound_for_phase(phase).jones()
    assert readout_coefficient(jones) == pytest.approx(np.exp(-1j * phase), abs=1e-12)
    assert probe_imbalance(jones) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("kwargs", [{"kind": "full"}, {"kind": "half", "angle": -0.1},
                                    {"kind": "half", "angle": np.pi}])
def test_waveplate_validation(kwargs):
    with pytest.raises(ConfigurationError):
        Waveplate(**kwargs)


# -- ports --------------------------------------------------------------------

def test_port_coefficients():
    e = PortConfig.electric().ports[0]
    assert e.coefficient() == pytest.approx(-1j)
    lower, upper = PortConfig.hilbert(thz_to_omega(340.0)).ports
    assert lower.coefficient() == pytest.approx(1.0)
    assert upper.coefficient() == pytest.approx(-1.0)


def test_phase_pair_coefficients():
    phi = 0.4
    lower, upper = PortConfig.phase_pair(thz_to_omega(300.0), phi).ports
    assert lower.coefficient() == pytest.approx(np.exp(-1j * (np.pi / 2 - phi)))
    assert upper.coefficient() == pytest.approx(np.exp(-1j * (np.pi / 2 + phi)))


def test_unbalanced_port_rejected():
    with pytest.raises(ConfigurationError):
        Port(0.0, 1.0, Waveplate("half", 0.0)).coefficient()


def test_overlapping_ports_rejected():
    with pytest.raises(NonCommutingError):
        PortConfig((Port(0.0, 2.0), Port(1.0, 3.0)))


def test_unordered_ports_rejected():
    with pytest.raises(ConfigurationError):
        PortConfig((Port(2.0, 3.0), Port(0.0, 1.0)))


@pytest.mark.parametrize("args", [(1.0, 1.0), (2.0, 1.0)])
def test_empty_port_band(args):
    with pytest.raises(ConfigurationError):
        Port(*args)


def test_negative_port_edge():
    with pytest.raises(RangeError):
        Port(-1.0, 1.0)


def test_empty_layout_and_missing_role():
    with pytest.raises(ConfigurationError):
        PortConfig(())
    with pytest.raises(ConfigurationError):
        PortConfig.electric().select("H")


def test_multiplexed_layout_order():
    with pytest.raises(ConfigurationError):
        PortConfig.multiplexed(thz_to_omega(350.0), thz_to_omega(340.0))
    ports = PortConfig.multiplexed()
    assert [p.role for p in ports] == ["E", "H", "H"]


def test_port_outside_grid(grid):
    cfg = PortConfig((Port(thz_to_omega(100.0), thz_to_omega(600.0)),))
    with pytest.raises(RangeError):
        cfg.validate(grid)


def test_readout_weights_normalization(grid):
    lo = np.ones(grid.n_points)
    split = thz_to_omega(250.0)
    u, counts = readout_weights(PortConfig.hilbert(split), grid.omegas, lo, grid.omegas, grid.delta_omega)
    assert counts == pytest.approx([split, grid.omega_max - split], rel=1e-3)
    # every port contributes unit total readout weight
    for sel, n in zip((grid.omegas < split, grid.omegas >= split), counts):
        assert np.sum(np.abs(u[sel]) ** 2) * grid.delta_omega == pytest.approx(1.0, rel=1e-12)


def test_dark_port_rejected(grid):
    lo = np.where(grid.omegas < thz_to_omega(100.0), 1.0, 0.0)
    with pytest.raises(ConfigurationError):
        readout_weights(PortConfig.hilbert(thz_to_omega(200.0)), grid.omegas, lo, grid.omegas,
                        grid.delta_omega)


# -- probes -------------------------------------------------------------------

@pytest.mark.parametrize("factory", [
    lambda g: ProbePulse.sinc(g, thz_to_omega(320.0), thz_to_omega(100.0), 3e9),
    lambda g: ProbePulse.delocalized(g, thz_to_omega(340.0), thz_to_omega(160.0), 3e9),
    lambda g: ProbePulse.delocalized(g, thz_to_omega(340.0), thz_to_omega(160.0), 3e9, odd_phase=True),
])
def test_probe_photon_number(grid, factory):
    probe = factory(grid)
    beta = probe.amplitude(grid.omegas)
    assert np.sum(np.abs(beta) ** 2) * grid.delta_omega == pytest.approx(3e9, rel=1e-12)
    assert probe.spectrum.norm2() == pytest.approx(1.0, rel=1e-12)


def test_sinc_probe_is_flat(grid):
    probe = ProbePulse.sinc(grid, thz_to_omega(320.0), thz_to_omega(100.0))
    lo, hi = probe.support()
    assert lo == pytest.approx(thz_to_omega(270.25), rel=1e-3)
    assert hi == pytest.approx(thz_to_omega(369.75), rel=1e-3)
    inside = probe.amplitude(grid.omegas)[(grid.omegas > lo) & (grid.omegas < hi)]
    np.testing.assert_allclose(np.abs(inside), np.abs(inside[0]))


def test_delocalized_probe_peaks_at_carrier(grid):
    probe = ProbePulse.delocalized(grid, thz_to_omega(340.0), thz_to_omega(160.0), taper=0.0)
    x = thz_to_omega(np.array([10.0, 40.0]))
    a = np.abs(probe.amplitude(thz_to_omega(340.0) + x))
    # inverse square-root sidebands: four times the detuning halves the amplitude
    assert a[0] / a[1] == pytest.approx(2.0, rel=1e-3)
    sym = probe.amplitude(thz_to_omega(340.0) - x)
    np.testing.assert_allclose(np.abs(sym), a)


def test_odd_phase_probe(grid):
    probe = ProbePulse.delocalized(grid, thz_to_omega(340.0), thz_to_omega(160.0), odd_phase=True)
    up = probe.amplitude(thz_to_omega(360.0))
    down = probe.amplitude(thz_to_omega(320.0))
    assert np.angle(up) == pytest.approx(np.pi / 2)
    assert np.angle(down) == pytest.approx(-np.pi / 2)


def test_custom_probe_interpolates_to_edges(grid):
    spec = np.exp(-(((grid.omegas - thz_to_omega(300.0)) / thz_to_omega(30.0)) ** 2)).astype(complex)
    probe = ProbePulse.custom(grid, spec)
    assert probe.central_frequency == pytest.approx(thz_to_omega(300.0), rel=1e-3)
    edges = grid.edges[1:-1]
    amp = probe.amplitude(edges)
    mid = probe.amplitude(grid.omegas)
    np.testing.assert_allclose(amp, 0.5 * (mid[:-1] + mid[1:]), rtol=1e-12)


def test_superposition_adds_photon_numbers(grid):
    a = ProbePulse.sinc(grid, thz_to_omega(150.0), thz_to_omega(100.0), 1e9)
    b = ProbePulse.sinc(grid, thz_to_omega(350.0), thz_to_omega(100.0), 2e9)
    s = ProbePulse.superpose(a, b)
    assert s.photon_number == pytest.approx(3e9, rel=1e-12)
    np.testing.assert_allclose(s.amplitude(grid.omegas), a.amplitude(grid.omegas) + b.amplitude(grid.omegas))


def test_with_photon_number(grid):
    p = ProbePulse.sinc(grid, thz_to_omega(300.0), thz_to_omega(100.0), 1e9).with_photon_number(4e9)
    assert np.sum(np.abs(p.amplitude(grid.omegas)) ** 2) * grid.delta_omega == pytest.approx(4e9)


@pytest.mark.parametrize("center, width", [(300.0, 0.0), (300.0, 700.0), (480.0, 100.0), (20.0, 100.0)])
def test_probe_band_checks(grid, center, width):
    with pytest.raises((DomainError, RangeError)):
        ProbePulse.sinc(grid, thz_to_omega(center), thz_to_omega(width))


def test_probe_validation(grid):
    with pytest.raises(DomainError):
        ProbePulse.sinc(grid, thz_to_omega(300.0), thz_to_omega(100.0), photon_number=0.0)
    with pytest.raises(ConfigurationError):
        ProbePulse.custom(grid, np.zeros(grid.n_points))
    with pytest.raises(ConfigurationError):
        ProbePulse.custom(grid, np.ones(3))
    with pytest.raises(ConfigurationError):
        ProbePulse.superpose()

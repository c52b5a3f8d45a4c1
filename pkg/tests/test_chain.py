import numpy as np
import pytest

from eostomo.chain import (DetectionOperator, arbitrary_phase_quadrature, balanced_transmission,
                           beam_splitter_variant, coupling_constant, describe, detect, detected_E_operator,
                           detected_H_operator, first_order_generator, interaction_kernel, multiplexed_EH,
                           readout_from_transform)
from eostomo.constants import PhysicalConstants, thz_to_omega
from eostomo.errors import ConfigurationError, DomainError, GridMismatchError
from eostomo.experiments import MultiplexLayout
from eostomo.field import FrequencyGrid
from eostomo.metrics import ChainConfig
from eostomo.optics import Waveplate
from eostomo.ports import Port, PortConfig
from eostomo.probes import ProbePulse


@pytest.fixture(scope="module")
def e_probe(coarse_chain):
    return coarse_chain.probe("E", thz_to_omega(120.0))


@pytest.fixture(scope="module")
def h_probe(coarse_chain):
    return coarse_chain.probe("H", thz_to_omega(80.0))


# -- operator basics ----------------------------------------------------------

def test_operator_shape_and_normalization_checks(small_grid):
    with pytest.raises(GridMismatchError):
        DetectionOperator(small_grid, np.zeros(3), np.zeros(small_grid.n_points), 1.0)
    with pytest.raises(DomainError):
        DetectionOperator(small_grid, np.zeros(64), np.zeros(64), 0.0)


def test_normalized_operator_has_half_vacuum_variance(coarse_chain, e_probe):
    op = coarse_chain.detect("E", e_probe).normalized()
    assert op.vacuum_variance() == pytest.approx(0.5, rel=1e-12)
    assert op.total_weight == pytest.approx(1.0, rel=1e-12)


def test_readout_shot_weight_is_one_per_port(coarse_chain, e_probe, h_probe):
    assert coarse_chain.detect("E", e_probe).shot_weight == pytest.approx(1.0, rel=1e-12)
    assert coarse_chain.detect("H", h_probe).shot_weight == pytest.approx(2.0, rel=1e-12)


def test_shifted_equals_delayed_probe(coarse_chain, e_probe):
    t = 37e-15
    direct = detected_E_operator(e_probe, coarse_chain.crystal, t=t)
    moved = detected_E_operator(e_probe, coarse_chain.crystal).shifted(t)
    np.testing.assert_allclose(moved.a_coeffs, direct.a_coeffs, rtol=1e-10, atol=1e-12 * np.max(abs(direct.a_coeffs)))
    np.testing.assert_allclose(moved.port_coeffs, direct.port_coeffs, rtol=1e-10)
    assert moved.t == t


def test_scaled_signal_only(coarse_chain, e_probe):
    op = coarse_chain.detect("E", e_probe)
    half = op.scaled(0.5, signal_only=True)
    assert half.signal_weight == pytest.approx(0.25 * op.signal_weight)
    assert half.shot_weight == pytest.approx(op.shot_weight)
    np.testing.assert_array_equal(op.negated().a_coeffs, -op.a_coeffs)


def test_describe_mentions_label(coarse_chain, e_probe):
    assert describe(coarse_chain.detect("E", e_probe)).startswith("E:")


def test_coupling_constant_linear_in_length(e_probe):
    crystal = ChainConfig().crystal
    k1 = coupling_constant(e_probe, crystal, PhysicalConstants())
    k2 = coupling_constant(e_probe, crystal.with_(length_L=2 * crystal.length_L), PhysicalConstants())
    assert k2 == pytest.approx(2 * k1)


def test_detection_linear_in_length_without_phase_matching(coarse_chain, e_probe):
    crystal = coarse_chain.crystal.with_(phase_matching=False)
    a1 = detected_E_operator(e_probe, crystal).a_coeffs
    a2 = detected_E_operator(e_probe, crystal.with_(length_L=3 * crystal.length_L)).a_coeffs
    np.testing.assert_allclose(a2, 3 * a1, rtol=1e-12, atol=0)


def test_thin_crystal_limit_is_linear(coarse_chain, e_probe):
    crystal = coarse_chain.crystal.with_(length_L=1e-8)
    a1 = detected_E_operator(e_probe, crystal).a_coeffs
    a2 = detected_E_operator(e_probe, crystal.with_(length_L=2e-8)).a_coeffs
    assert np.max(np.abs(a2 - 2 * a1)) < 1e-4 * np.max(np.abs(a2))


def test_coupling_scales_with_photon_number(coarse_chain, e_probe):
    # the signal coefficients carry |beta|^2 / sqrt(N_port), which grows like sqrt(N)
    a1 = coarse_chain.detect("E", e_probe).a_coeffs
    a4 = coarse_chain.detect("E", e_probe.with_photon_number(4 * e_probe.photon_number)).a_coeffs
    np.testing.assert_allclose(a4, 2 * a1, rtol=1e-12)


# -- layouts ------------------------------------------------------------------

def test_no_detecting_port(coarse_chain, e_probe):
    with pytest.raises(ConfigurationError):
        detect(e_probe, coarse_chain.crystal, PortConfig((Port(0.0, np.inf, Waveplate("none")),)))


def test_local_oscillator_grid_mismatch(coarse_chain, e_probe):
    other = ProbePulse.sinc(FrequencyGrid.from_thz(400.0, 200), thz_to_omega(300.0), thz_to_omega(100.0))
    with pytest.raises(GridMismatchError):
        detect(e_probe, coarse_chain.crystal, PortConfig.electric(), lo=other)


def test_distinct_local_oscillator_equal_to_probe(coarse_chain, e_probe):
    a = detect(e_probe, coarse_chain.crystal, PortConfig.electric()).a_coeffs
    b = detect(e_probe, coarse_chain.crystal, PortConfig.electric(), lo=e_probe).a_coeffs
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_multiplexed_ports_commute(chain):
    layout = MultiplexLayout()
    op_e, op_h = multiplexed_EH(layout.probe(chain.grid), chain.crystal, layout.ports())
    assert op_e.commutator(op_h) == 0.0
    assert not np.any((op_e.port_coeffs != 0) & (op_h.port_coeffs != 0))


def test_multiplexed_overlap_rejected(coarse_chain, e_probe):
    ports = PortConfig((Port(0.0, thz_to_omega(300.0), role="E"),
                        Port(thz_to_omega(300.0), np.inf, role="H")))
    multiplexed_EH(e_probe, coarse_chain.crystal, ports)
    shared = PortConfig((Port(0.0, thz_to_omega(300.0), role="E"),))
    with pytest.raises(ConfigurationError):
        multiplexed_EH(e_probe, coarse_chain.crystal, shared)


def test_quadrature_phase_relations(coarse_chain, h_probe):
    crystal = coarse_chain.crystal
    split = h_probe.central_frequency
    x0 = arbitrary_phase_quadrature(h_probe, crystal, 0.0)
    x_pi = arbitrary_phase_quadrature(h_probe, crystal, np.pi)
    x_half = arbitrary_phase_quadrature(h_probe, crystal, np.pi / 2)
    h = detected_H_operator(h_probe, crystal, PortConfig.hilbert(split))
    scale = np.max(np.abs(x0.a_coeffs))
    np.testing.assert_allclose(x_pi.a_coeffs, -x0.a_coeffs, atol=1e-12 * scale)
    # the in-phase pair with the upper port subtracted is the Hilbert readout
    np.testing.assert_allclose(x_half.a_coeffs, h.a_coeffs, atol=1e-12 * scale)


# -- beam splitter ------------------------------------------------------------

def test_balanced_transmission():
    assert balanced_transmission(10.0, 1.0) == pytest.approx(10.0 / 11.0)
    with pytest.raises(DomainError):
        balanced_transmission(0.0, 1.0)


def test_beam_splitter_halves(coarse_chain, h_probe):
    full_e = coarse_chain.detect("E", h_probe)
    full_h = coarse_chain.detect("H", h_probe)
    op_e, op_h, t = beam_splitter_variant(h_probe, coarse_chain.crystal, 0.5)
    assert t == 0.5
    assert op_e.signal_weight == pytest.approx(0.5 * full_e.signal_weight, rel=1e-12)
    assert op_h.signal_weight == pytest.approx(0.5 * full_h.signal_weight, rel=1e-12)
    assert op_e.shot_weight == pytest.approx(full_e.shot_weight)


def test_beam_splitter_balances_arms(coarse_chain, h_probe):
    om = coarse_chain.omega_m
    op_e, op_h, t = beam_splitter_variant(h_probe, coarse_chain.crystal, omega_m=om)
    band = coarse_chain.grid.omegas <= om
    dw = coarse_chain.grid.delta_omega
    th_e = np.sum(np.abs(op_e.a_coeffs[band]) ** 2) * dw
    th_h = np.sum(np.abs(op_h.a_coeffs[band]) ** 2) * dw
    assert th_e == pytest.approx(th_h, rel=1e-10)
    assert 0 < t < 1


@pytest.mark.parametrize("t", [0.0, 1.0, -0.1, 1.5])
def test_beam_splitter_rejects_degenerate_transmission(coarse_chain, h_probe, t):
    with pytest.raises(DomainError):
        beam_splitter_variant(h_probe, coarse_chain.crystal, t)


# -- full mode-mixing transform -----------------------------------------------

def test_zero_nonlinearity_gives_identity(coarse_chain, e_probe):
    tr = interaction_kernel(e_probe, coarse_chain.crystal.with_(r41=0.0))
    np.testing.assert_allclose(tr.alpha, np.eye(tr.n_modes), atol=1e-15)
    np.testing.assert_allclose(tr.beta, 0.0, atol=1e-15)


def test_transform_is_symplectic(coarse_chain, h_probe):
    tr = interaction_kernel(h_probe, coarse_chain.crystal)
    assert tr.symplectic_error() < 1e-10
    x, y = first_order_generator(tr)
    assert np.max(np.abs(x)) > 0 and np.max(np.abs(y)) > 0
    # the generator of a Bogoliubov transform is anti-Hermitian in its X block
    np.testing.assert_allclose(x, -x.conj().T, rtol=0, atol=1e-10 * np.max(np.abs(x)))


def test_transform_first_order_in_coupling(coarse_chain, e_probe):
    small = coarse_chain.crystal.with_(r41=coarse_chain.crystal.r41 * 1e-3)
    x1, _ = first_order_generator(interaction_kernel(e_probe, small))
    x2, _ = first_order_generator(interaction_kernel(e_probe, small.with_(r41=2 * small.r41)))
    np.testing.assert_allclose(x2, 2 * x1, rtol=0, atol=1e-6 * np.max(np.abs(x2)))


def test_mode_limit(coarse_chain, e_probe):
    with pytest.raises(ConfigurationError):
        interaction_kernel(e_probe, coarse_chain.crystal, max_modes=10)


def test_probe_in_signal_band_warns(coarse_chain):
    probe = ProbePulse.sinc(coarse_chain.grid, thz_to_omega(200.0), thz_to_omega(300.0))
    with pytest.warns(RuntimeWarning):
        interaction_kernel(probe, coarse_chain.crystal, signal_max=thz_to_omega(60.0), max_modes=400)


def _route_mismatch(n_bins, quadrature):
    grid = FrequencyGrid.from_thz(500.0, n_bins)
    cfg = ChainConfig(grid=grid)
    probe = cfg.probe(quadrature, thz_to_omega(60.0))
    op = cfg.detect(quadrature, probe)
    ports = PortConfig.electric() if quadrature == "E" else PortConfig.hilbert(probe.central_frequency)
    tr = interaction_kernel(probe, cfg.crystal)
    via_transform = readout_from_transform(tr, probe, ports)
    idx = np.searchsorted(grid.omegas, tr.omegas)
    sig = idx < op.meta["signal_bins"]
    direct = op.a_coeffs[idx[sig]] * np.sqrt(grid.delta_omega)
    return np.linalg.norm(via_transform[sig] - direct) / np.linalg.norm(direct)


@pytest.mark.parametrize("quadrature", ["E", "H"])
def test_two_routes_converge_with_grid(quadrature):
    coarse, fine = _route_mismatch(250, quadrature), _route_mismatch(500, quadrature)
    # the discrepancy is a discretization error that shrinks with the bin width
    assert fine < 0.65 * coarse
    if quadrature == "E":
        assert fine < 0.02

"""Gaussian states over a finite orthonormal mode basis.

Conventions:
    * Quadratures are ordered ``(x_1, p_1, ..., x_M, p_M)`` with
      ``b_j = (x_j + i p_j) / sqrt(2)``, so the vacuum covariance is ``I / 2``.
    * A basis mode ``g`` defines ``b = sum_k g_k a_k dw``.
    * An observable with signal coefficients ``a`` is
      ``O = (1/sqrt 2) sum_k (a_k a_k + h.c.) dw``; its projection onto the
      basis is ``c_j = sum_k conj(g_jk) a_k dw`` and it reads
      ``O = sum_j (Re c_j x_j - Im c_j p_j) + (out-of-basis vacuum terms)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (BasisTooSmallError, DomainError, GridMismatchError, InvariantViolation,
                     NonCommutingError, RangeError)
from .field import FrequencyGrid, SpectralMode

SYMMETRY_TOL = 1e-12
UNCERTAINTY_TOL = 1e-10


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for ``(x, p)`` interleaved ordering."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True, eq=False)
class ModeBasis:
    """Orthonormal set of spectral modes.

    Raises:
        InvariantViolation: if the Gram matrix deviates from identity by more
            than ``gram_tolerance``.
    """

    modes: tuple
    gram_tolerance: float = 1e-10

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise DomainError("a mode basis needs at least one mode")
        grid = modes[0].grid
        if any(m.grid != grid for m in modes):
            raise GridMismatchError("basis modes live on different grids")
        object.__setattr__(self, "modes", modes)
        gram = self.gram()
        err = np.max(np.abs(gram - np.eye(len(modes))))
        if err > self.gram_tolerance:
            raise InvariantViolation(f"basis is not orthonormal (max Gram deviation {err:.3g})")

    @classmethod
    def orthonormalize(cls, modes: Sequence[SpectralMode], gram_tolerance: float = 1e-10) -> "ModeBasis":
        """Gram-Schmidt (via QR in the weighted inner product) over ``modes``."""
        grid = modes[0].grid
        mat = np.stack([m.coeffs for m in modes], axis=1) * np.sqrt(grid.delta_omega)
        q, r = np.linalg.qr(mat)
        q = q * np.sign(np.real(np.diag(r)))[None, :].astype(complex) / np.sqrt(grid.delta_omega)
        return cls(tuple(SpectralMode(grid, q[:, j]) for j in range(q.shape[1])), gram_tolerance)

    @property
    def grid(self) -> FrequencyGrid:
        return self.modes[0].grid

    def __len__(self):
        return len(self.modes)

    def gram(self) -> np.ndarray:
        mat = np.stack([m.coeffs for m in self.modes])
        return mat.conj() @ mat.T * self.grid.delta_omega

    def project(self, coeffs: np.ndarray):
        """Return ``(c, residual_vector)`` for signal coefficients ``coeffs``."""
        mat = np.stack([m.coeffs for m in self.modes])
        c = mat.conj() @ coeffs * self.grid.delta_omega
        residual = coeffs - mat.T @ c
        return c, residual


def _quadrature_vector(c: np.ndarray) -> np.ndarray:
    v = np.empty(2 * c.size)
    v[0::2] = c.real
    v[1::2] = -c.imag
    return v


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of an ``M``-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray
    basis: ModeBasis | None = None
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise DomainError("mean must have length 2M and cov shape (2M, 2M)")
        if self.basis is not None and len(self.basis) != mean.size // 2:
            raise DomainError("basis size does not match the number of modes")
        if np.max(np.abs(cov - cov.T), initial=0.0) > SYMMETRY_TOL * max(1.0, np.max(np.abs(cov))):
            raise InvariantViolation("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if self.check:
            lowest = self.uncertainty_margin()
            if lowest < -UNCERTAINTY_TOL:
                raise InvariantViolation(f"uncertainty relation violated (eigenvalue {lowest:.3g})")

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def uncertainty_margin(self) -> float:
        """Smallest eigenvalue of ``cov + (i/2) Omega``; non-negative for physical states."""
        herm = self.cov + 0.5j * symplectic_form(self.n_modes)
        return float(np.min(np.linalg.eigvalsh(herm)))

    @classmethod
    def vacuum(cls, n_modes: int = 1, basis: ModeBasis | None = None) -> "GaussianState":
        if basis is not None:
            n_modes = len(basis)
        return cls(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes), basis)

    @classmethod
    def coherent(cls, alphas, basis: ModeBasis | None = None) -> "GaussianState":
        """Coherent state with ``<b_j> = alphas[j]``."""
        alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
        mean = np.empty(2 * alphas.size)
        mean[0::2] = np.sqrt(2.0) * alphas.real
        mean[1::2] = np.sqrt(2.0) * alphas.imag
        return cls(mean, 0.5 * np.eye(2 * alphas.size), basis)

    @classmethod
    def squeezed(cls, r: float, angle: float = 0.0, basis: ModeBasis | None = None) -> "GaussianState":
        """Single-mode squeezed vacuum; ``angle = 0`` squeezes ``x``."""
        rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
        cov = rot @ np.diag([np.exp(-2 * r), np.exp(2 * r)]) @ rot.T / 2.0
        return cls(np.zeros(2), cov, basis)

    def vacuum_like(self) -> "GaussianState":
        """Vacuum on the same basis."""
        return GaussianState.vacuum(self.n_modes, self.basis)

    def transformed(self, transform: "BogoliubovTransform") -> "GaussianState":
        """State after the Heisenberg-picture mixing ``transform``."""
        s = transform.to_real()
        if s.shape[0] != self.mean.size:
            raise DomainError("transform size does not match the state")
        return GaussianState(s @ self.mean, s @ self.cov @ s.T, self.basis)

    def mode_block(self, mode_index: int):
        """``(mean, cov)`` of a single mode."""
        if not 0 <= mode_index < self.n_modes:
            raise RangeError(f"mode index {mode_index} outside 0..{self.n_modes - 1}")
        sl = slice(2 * mode_index, 2 * mode_index + 2)
        return self.mean[sl].copy(), self.cov[sl, sl].copy()


@dataclass(frozen=True, eq=False)
class BogoliubovTransform:
    """Linear mode mixing ``b' = alpha b + beta b^dagger``.

    Attributes:
        alpha: Coefficients on annihilation operators.
        beta: Coefficients on creation operators.
        omegas: Optional frequencies labelling the modes.
    """

    alpha: np.ndarray
    beta: np.ndarray
    omegas: np.ndarray | None = None
    tolerance: float = field(default=1e-9, repr=False)

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=complex)
        beta = np.array(self.beta, dtype=complex)
        if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1] or beta.shape != alpha.shape:
            raise DomainError("alpha and beta must be square matrices of equal shape")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        if self.tolerance is not None:
            err = self.symplectic_error()
            if err > self.tolerance:
                raise InvariantViolation(f"transform is not symplectic (error {err:.3g})")

    @property
    def n_modes(self) -> int:
        return self.alpha.shape[0]

    @classmethod
    def identity(cls, n_modes: int) -> "BogoliubovTransform":
        return cls(np.eye(n_modes), np.zeros((n_modes, n_modes)))

    @classmethod
    def single_mode_squeezer(cls, r: float) -> "BogoliubovTransform":
        """Squeezes ``x`` by ``exp(-r)``."""
        return cls(np.array([[np.cosh(r)]]), np.array([[-np.sinh(r)]]))

    @classmethod
    def beam_splitter(cls, transmissivity: float) -> "BogoliubovTransform":
        """Real two-mode beam splitter with power transmissivity ``transmissivity``."""
        t, r = np.sqrt(transmissivity), np.sqrt(1.0 - transmissivity)
        return cls(np.array([[t, r], [-r, t]]), np.zeros((2, 2)))

    def symplectic_error(self) -> float:
        """Largest violation of ``aa^+ - bb^+ = I`` and ``ab^T = ba^T``."""
        a, b = self.alpha, self.beta
        e1 = np.max(np.abs(a @ a.conj().T - b @ b.conj().T - np.eye(self.n_modes)))
        e2 = np.max(np.abs(a @ b.T - b @ a.T))
        return float(max(e1, e2))

    def compose(self, first: "BogoliubovTransform") -> "BogoliubovTransform":
        """Transform equal to applying ``first`` and then ``self``."""
        a1, b1, a2, b2 = first.alpha, first.beta, self.alpha, self.beta
        return BogoliubovTransform(a2 @ a1 + b2 @ b1.conj(), a2 @ b1 + b2 @ a1.conj(), self.omegas)

    def to_real(self) -> np.ndarray:
        """Real symplectic matrix acting on interleaved ``(x, p)`` quadratures."""
        a, b = self.alpha, self.beta
        plus, minus = a + b, a - b
        m = self.n_modes
        s = np.empty((2 * m, 2 * m))
        s[0::2, 0::2] = plus.real
        s[0::2, 1::2] = -minus.imag
        s[1::2, 0::2] = plus.imag
        s[1::2, 1::2] = minus.real
        return s


def squeezed_signal(Omega0: float, sigma_G: float, r: float, grid: FrequencyGrid):
    """Squeezed vacuum in the spectral mode ``G(W) ~ sqrt(W) exp(-(W0 - W)^2 / (4 s^2))``.

    Returns:
        ``(mode, state)``: the unit-norm mode and its single-mode state with
        covariance ``diag(exp(-2r), exp(2r)) / 2``.

    Raises:
        DomainError: for non-positive centre or width.
        RangeError: if the spectrum is not contained in the grid.
    """
    if not Omega0 > 0 or not sigma_G > 0 or not np.isfinite(r):
        raise DomainError("Omega0 and sigma_G must be positive and r finite")
    if sigma_G > Omega0 or Omega0 + 6 * sigma_G > grid.omega_max or 2 * sigma_G < grid.delta_omega:
        raise RangeError("squeezed-signal spectrum does not fit the grid support")
    w = grid.omegas
    g = np.sqrt(w) * np.exp(-((Omega0 - w) ** 2) / (4.0 * sigma_G**2))
    mode = SpectralMode(grid, g.astype(complex)).normalized()
    basis = ModeBasis((mode,))
    return mode, GaussianState.squeezed(r, 0.0, basis)


# -- moments of detection operators ------------------------------------------

def _operator_parts(op):
    """Signal coefficients, port coefficients and grid of an observable."""
    if isinstance(op, SpectralMode):
        return op.coeffs, None, op.grid
    return op.a_coeffs, op.port_coeffs, op.grid


def _decompose(state: GaussianState, op, max_residual_fraction: float):
    if state.basis is None:
        raise DomainError("the state needs a mode basis to evaluate spectral observables")
    a, ports, grid = _operator_parts(op)
    if grid != state.basis.grid:
        raise GridMismatchError("operator and basis live on different grids")
    c, residual = state.basis.project(a)
    dw = grid.delta_omega
    signal_weight = float(np.sum(np.abs(a) ** 2) * dw)
    shot_weight = 0.0 if ports is None else float(np.sum(np.abs(ports) ** 2) * dw)
    residual_weight = max(signal_weight - float(np.sum(np.abs(c) ** 2)), 0.0)
    total = signal_weight + shot_weight
    if total > 0 and residual_weight > max_residual_fraction * total:
        raise BasisTooSmallError(
            f"{residual_weight / total:.3f} of the operator weight lies outside the basis"
        )
    return _quadrature_vector(c), residual, ports, residual_weight + shot_weight


def detection_moments(state: GaussianState, op, max_residual_fraction: float = 0.5):
    """Mean and variance of a detection observable on a Gaussian state.

    The part of the operator outside the state's basis (and the shot-noise part
    carried by the readout ports) sees vacuum and adds half its weight to the
    variance.

    Args:
        state: Gaussian state with a :class:`ModeBasis`.
        op: :class:`~eostomo.chain.DetectionOperator` or a plain
            :class:`SpectralMode` (pure field observable).
        max_residual_fraction: Largest tolerated out-of-basis fraction of the
            operator's total weight.

    Returns:
        ``(mean, variance)``.

    Raises:
        BasisTooSmallError: if the out-of-basis weight is too large.
    """
    v, _, _, vac_weight = _decompose(state, op, max_residual_fraction)
    return float(v @ state.mean), float(v @ state.cov @ v + 0.5 * vac_weight)


def variance_delta(state: GaussianState, op, vacuum_op_baseline=None,
                   max_residual_fraction: float = 0.5) -> float:
    """``Var_state(op) - Var_vacuum(baseline)`` with ``baseline = op`` by default."""
    baseline = op if vacuum_op_baseline is None else vacuum_op_baseline
    _, var = detection_moments(state, op, max_residual_fraction)
    _, var0 = detection_moments(state.vacuum_like(), baseline, max_residual_fraction)
    return var - var0


def joint_moments(state: GaussianState, op_1, op_2, max_residual_fraction: float = 0.5):
    """Mean vector and symmetrized covariance matrix of two observables."""
    v1, r1, p1, w1 = _decompose(state, op_1, max_residual_fraction)
    v2, r2, p2, w2 = _decompose(state, op_2, max_residual_fraction)
    dw = state.basis.grid.delta_omega
    cross = float(v1 @ state.cov @ v2) + 0.5 * float(np.real(np.vdot(r1, r2)) * dw)
    if p1 is not None and p2 is not None:
        cross += 0.5 * float(np.real(np.vdot(p1, p2)) * dw)
    mean = np.array([v1 @ state.mean, v2 @ state.mean])
    cov = np.array([[v1 @ state.cov @ v1 + 0.5 * w1, cross], [cross, v2 @ state.cov @ v2 + 0.5 * w2]])
    return mean, cov


def husimi_covariance(state: GaussianState, mode_index: int = 0):
    """Mean and covariance of the Husimi function of one mode in ``(x, p)``."""
    mean, cov = state.mode_block(mode_index)
    return mean, cov + 0.5 * np.eye(2)


def husimi_q(state: GaussianState, mode_index: int, alpha_grid) -> np.ndarray:
    """Husimi function ``Q(alpha) = <alpha| rho |alpha> / pi`` of one mode.

    ``Q`` is a Gaussian in ``(x, p) = sqrt(2) (Re alpha, Im alpha)`` with
    covariance ``cov + I/2``; as a density in ``d^2 alpha`` it integrates to one.

    Raises:
        InvariantViolation: if ``cov + I/2`` is not positive definite.
    """
    mean, qcov = husimi_covariance(state, mode_index)
    eig = np.linalg.eigvalsh(qcov)
    if np.min(eig) <= 0:
        raise InvariantViolation("Husimi covariance is not positive definite")
    alpha = np.asarray(alpha_grid, dtype=complex)
    d = np.stack([np.sqrt(2.0) * alpha.real - mean[0], np.sqrt(2.0) * alpha.imag - mean[1]], axis=-1)
    inv = np.linalg.inv(qcov)
    quad = np.einsum("...i,ij,...j->...", d, inv, d)
    return np.exp(-0.5 * quad) / (np.pi * np.sqrt(np.linalg.det(qcov)))


def _port_supports_overlap(op_1, op_2) -> bool:
    p1, p2 = op_1.port_coeffs, op_2.port_coeffs
    return bool(np.any((p1 != 0) & (p2 != 0)))


def sample_shots(state: GaussianState, op_E, op_H, n_shots: int, seed: int,
                 max_residual_fraction: float = 0.5) -> np.ndarray:
    """Draw joint ``(e, h)`` outcomes of two commuting readouts.

    Uses a Philox counter-based generator keyed by ``seed`` so results are
    reproducible bit for bit.

    Returns:
        Array of shape ``(n_shots, 2)``.

    Raises:
        NonCommutingError: if the two readouts share detector bins.
    """
    if int(n_shots) != n_shots or n_shots < 1:
        raise DomainError("n_shots must be a positive integer")
    if _port_supports_overlap(op_E, op_H):
        raise NonCommutingError("the two readouts share spectral ports and cannot be measured jointly")
    mean, cov = joint_moments(state, op_E, op_H, max_residual_fraction)
    chol = np.linalg.cholesky(cov)
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    z = rng.standard_normal((int(n_shots), 2))
    return mean[None, :] + z @ chol.T

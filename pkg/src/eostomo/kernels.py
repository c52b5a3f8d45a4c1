"""Hot loops of the simulator, with numba and numpy implementations.

Two kernels dominate the run time:

* :func:`detection_kernel` correlates the probe spectrum with the readout
  local oscillator for every signal frequency, weighting each frequency pair by
  the field prefactors and the phase-matching factor.  The cost is
  O(n_signal * n_probe).
* :func:`waveform_kernel` evaluates a spectral sum on an arbitrary set of time
  samples, O(n_times * n_bins).

Each kernel exists as an explicit loop compiled with numba and as a vectorized
numpy routine.  The public names dispatch to the backend chosen in
:mod:`eostomo._accel`.
"""

from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA, njit

__all__ = [
    "detection_kernel",
    "detection_kernel_numpy",
    "detection_kernel_numba",
    "waveform_kernel",
    "waveform_kernel_numpy",
    "waveform_kernel_numba",
]


def _support(*arrays):
    """Index range ``[lo, hi)`` outside which every array vanishes."""
    mask = np.zeros(arrays[0].shape[0], dtype=bool)
    for arr in arrays:
        mask |= arr != 0
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return 0, 0
    return int(idx[0]), int(idx[-1]) + 1


@njit
def _detection_loop(n_signal, a_h, qc_h, s_h, kn_h, p_i, bm_i, s_i, kn_i, s_sig, kn_sig,
                    half_length, phase_matching, k_lo, k_hi, m_lo, m_hi, out):
    for j in range(n_signal):
        start = max(k_lo, m_lo + j, j + 1)
        stop = min(k_hi, m_hi + j)
        acc_re = 0.0
        acc_im = 0.0
        for k in range(start, stop):
            m = k - j
            term = a_h[k] * p_i[m] - bm_i[m] * qc_h[k]
            if term == 0:
                continue
            weight = s_h[k] * s_i[m]
            if phase_matching:
                x = (kn_i[m] + kn_sig[j] - kn_h[k]) * half_length
                if x != 0.0:
                    weight *= np.sin(x) / x
            acc_re += weight * term.real
            acc_im += weight * term.imag
        out[j] = s_sig[j] * (acc_re + 1j * acc_im)
    return out


def _prepare(a_h, qc_h, p_i, bm_i):
    k_lo, k_hi = _support(a_h, qc_h)
    m_lo, m_hi = _support(p_i, bm_i)
    return k_lo, k_hi, max(m_lo, 1), m_hi


def detection_kernel_numba(n_signal, a_h, qc_h, s_h, kn_h, p_i, bm_i, s_i, kn_i, s_sig, kn_sig,
                           length, phase_matching=True):
    """Compiled loop version of :func:`detection_kernel`."""
    out = np.zeros(n_signal, dtype=np.complex128)
    k_lo, k_hi, m_lo, m_hi = _prepare(a_h, qc_h, p_i, bm_i)
    return _detection_loop(int(n_signal), a_h, qc_h, s_h, kn_h, p_i, bm_i, s_i, kn_i, s_sig, kn_sig,
                           0.5 * float(length), bool(phase_matching), k_lo, k_hi, m_lo, m_hi, out)


def detection_kernel_numpy(n_signal, a_h, qc_h, s_h, kn_h, p_i, bm_i, s_i, kn_i, s_sig, kn_sig,
                           length, phase_matching=True):
    """Vectorized numpy version of :func:`detection_kernel`."""
    out = np.zeros(n_signal, dtype=np.complex128)
    k_lo, k_hi, m_lo, m_hi = _prepare(a_h, qc_h, p_i, bm_i)
    half_length = 0.5 * float(length)
    for j in range(int(n_signal)):
        start = max(k_lo, m_lo + j, j + 1)
        stop = min(k_hi, m_hi + j)
        if stop <= start:
            continue
        k = np.arange(start, stop)
        m = k - j
        term = a_h[k] * p_i[m] - bm_i[m] * qc_h[k]
        weight = s_h[k] * s_i[m]
        if phase_matching:
            weight = weight * np.sinc((kn_i[m] + kn_sig[j] - kn_h[k]) * half_length / np.pi)
        out[j] = s_sig[j] * np.dot(weight, term)
    return out


def detection_kernel(n_signal, a_h, qc_h, s_h, kn_h, p_i, bm_i, s_i, kn_i, s_sig, kn_sig,
                     length, phase_matching=True):
    """First-order signal coefficients of a balanced electro-optic readout.

    Output bins live on the half-offset grid ``w_k = (k + 1/2) dw`` and the
    probe is evaluated on the integer grid ``m dw``, so that for signal bin
    ``j`` the probe partner of output ``k`` sits at ``m = k - j``.  The result is

    ``f_j = s_sig[j] * sum_k s_h[k] s_i[m] PM(k, m, j) (a_h[k] p_i[m] - bm_i[m] qc_h[k])``

    with ``PM = sinc((kn_i[m] + kn_sig[j] - kn_h[k]) L / 2)`` (unnormalized sinc).

    Args:
        n_signal: Number of signal bins to evaluate.
        a_h: ``u * conj(LO)`` on the half grid (sum-frequency readout weight).
        qc_h: ``conj(probe)`` on the half grid.
        s_h: Field prefactor on the half grid.
        kn_h: Wave number ``w n(w) / c`` on the half grid.
        p_i: Probe amplitude on the integer grid (index 0 is DC).
        bm_i: ``conj(u) * LO`` on the integer grid.
        s_i: Field prefactor on the integer grid.
        kn_i: Wave number on the integer grid.
        s_sig: Field prefactor of the signal bins.
        kn_sig: Wave number of the signal bins.
        length: Crystal length.
        phase_matching: Include the sinc factor when True.

    Returns:
        Complex array of length ``n_signal`` (without the coupling constant).
    """
    impl = detection_kernel_numba if USE_NUMBA else detection_kernel_numpy
    return impl(n_signal, a_h, qc_h, s_h, kn_h, p_i, bm_i, s_i, kn_i, s_sig, kn_sig, length, phase_matching)


@njit
def _waveform_loop(coeffs, omegas, times, sign, out):
    for i in range(times.shape[0]):
        acc = 0j
        t = times[i]
        for k in range(omegas.shape[0]):
            c = coeffs[k]
            if c == 0:
                continue
            phase = sign * omegas[k] * t
            acc += c * (np.cos(phase) + 1j * np.sin(phase))
        out[i] = acc
    return out


def waveform_kernel_numba(coeffs, omegas, times, sign=1.0):
    """Compiled loop version of :func:`waveform_kernel`."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    omegas = np.ascontiguousarray(omegas, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    out = np.zeros(times.shape[0], dtype=np.complex128)
    return _waveform_loop(coeffs, omegas, times, float(sign), out)


def waveform_kernel_numpy(coeffs, omegas, times, sign=1.0, chunk=256):
    """Vectorized numpy version of :func:`waveform_kernel` (chunked in time)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    omegas = np.asarray(omegas, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    nz = coeffs != 0
    coeffs, omegas = coeffs[nz], omegas[nz]
    out = np.zeros(times.shape[0], dtype=np.complex128)
    for start in range(0, times.shape[0], chunk):
        t = times[start:start + chunk]
        out[start:start + chunk] = np.exp(1j * sign * np.outer(t, omegas)) @ coeffs
    return out


def waveform_kernel(coeffs, omegas, times, sign=1.0):
    """Evaluate ``sum_k coeffs[k] exp(i sign omegas[k] t)`` at every time sample."""
    if USE_NUMBA:
        return waveform_kernel_numba(coeffs, omegas, times, sign)
    return waveform_kernel_numpy(coeffs, omegas, times, sign)


if not HAVE_NUMBA:  # pragma: no cover
    detection_kernel_numba = detection_kernel_numpy
    waveform_kernel_numba = waveform_kernel_numpy

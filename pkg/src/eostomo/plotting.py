"""SVG figures derived from result objects.

Figures are rendered with the non-interactive backend, a fixed hash salt and
no date stamp, so repeated runs produce identical SVG files.
"""

from __future__ import annotations

import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .constants import omega_to_thz  # noqa: E402
from .io import atomic_write_text  # noqa: E402

_RC = {"svg.hashsalt": "eostomo", "svg.fonttype": "path", "figure.dpi": 100}


def _save(fig, path: str | Path) -> Path:
    buf = io.StringIO()
    with plt.rc_context(_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return atomic_write_text(path, buf.getvalue())


def plot_waveforms(result, path: str | Path) -> Path:
    """Ideal and detected sampling profiles."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        t = result.times / 1e-15
        ax.plot(t, result.e_bl, label="E band-limited")
        ax.plot(t, result.h_bl, label="H band-limited")
        ax.plot(t, result.e_detected, "--", label="E detected")
        ax.plot(t, result.h_detected, "--", label="H detected")
        ax.set_xlabel("time (fs)")
        ax.set_ylabel("profile (unit peak)")
        ax.legend(fontsize=8)
        fig.tight_layout()
    return _save(fig, path)


def plot_sweep(run, path: str | Path) -> Path:
    """Coupling intensities and mode matching against probe bandwidth."""
    sweep = run.sweep
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
        b = sweep.bandwidths_thz
        ax1.plot(b, sweep.theta_bl, label="theta band-limited")
        ax1.plot(b, sweep.theta_full, label="theta full")
        ax1.axvline(omega_to_thz(run.optimum.bandwidth), color="k", lw=0.8, ls=":")
        ax1.set_ylabel("coupling intensity")
        ax1.legend(fontsize=8)
        ax2.plot(b, sweep.gamma, color="C2")
        ax2.axhline(run.optimum.gamma_floor, color="k", lw=0.8, ls=":")
        ax2.set_xlabel("probe bandwidth (THz)")
        ax2.set_ylabel("mode matching")
        fig.suptitle(f"{sweep.quadrature} / {sweep.constraint_tag}", fontsize=9)
        fig.tight_layout()
    return _save(fig, path)


def plot_tomography(result, path: str | Path) -> Path:
    """Detected variance changes overlaid on the rescaled single-mode prediction."""
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.8))
        t = result.times / 1e-15
        ax1.plot(t, result.dV_E, color="C0", label="E detected")
        ax1.plot(t, result.pred_E, color="C0", ls="--", label="E rescaled")
        ax1.plot(t, result.dV_H, color="C3", label="H detected")
        ax1.plot(t, result.pred_H, color="C3", ls="--", label="H rescaled")
        ax1.plot(t, result.dC_EH, color="C2", lw=0.8, label="E-H covariance")
        ax1.set_xlabel("delay (fs)")
        ax1.set_ylabel("variance change")
        ax1.legend(fontsize=7)
        n = int(round(np.sqrt(result.alpha.size)))
        ax2.contourf(result.alpha.real.reshape(n, n), result.alpha.imag.reshape(n, n),
                     result.q.reshape(n, n), levels=20)
        ax2.set_aspect("equal")
        ax2.set_xlabel("Re alpha")
        ax2.set_ylabel("Im alpha")
        fig.tight_layout()
    return _save(fig, path)


def plot_phase_scan(result, path: str | Path) -> Path:
    """Normalized variance change against the quadrature angle."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(result.phis, result.dV_peak / result.theta, "o-", label="X(phi) at zero delay")
        ax.axhline(result.reference["E"]["dV_peak"] / result.reference["E"]["theta"], color="C0", ls=":",
                   label="multiplexed E")
        ax.axhline(result.reference["H"]["dV_peak"] / result.reference["H"]["theta"], color="C3", ls=":",
                   label="multiplexed H")
        ax.set_xlabel("phi (rad)")
        ax.set_ylabel("variance change / coupling")
        ax.legend(fontsize=8)
        fig.tight_layout()
    return _save(fig, path)

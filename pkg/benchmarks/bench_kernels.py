"""Timing comparison of the numba and numpy kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

The kernel section calls both implementations directly on synthetic inputs of
the default grid size and checks that they agree.  With ``--end-to-end`` the
full-band electric mode-matching evaluation is also timed in two fresh
interpreters, one with ``EOSTOMO_DISABLE_NUMBA=1``.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from eostomo._accel import HAVE_NUMBA
from eostomo.kernels import (detection_kernel_numba, detection_kernel_numpy, waveform_kernel_numba,
                             waveform_kernel_numpy)

N_BINS = 5120
N_SIGNAL = 800
N_TIMES = 2001


def detection_inputs(rng, n_bins=N_BINS, n_signal=N_SIGNAL):
    c = lambda n: rng.normal(size=n) + 1j * rng.normal(size=n)  # noqa: E731
    r = lambda n: rng.uniform(0.5, 2.0, size=n)  # noqa: E731
    a_h, qc_h = c(n_bins), c(n_bins)
    p_i, bm_i = c(n_bins + 1), c(n_bins + 1)
    # realistic supports: the probe and readout occupy a band well inside the grid
    a_h[: n_bins // 8] = 0
    qc_h[: n_bins // 8] = 0
    p_i[3 * n_bins // 4:] = 0
    bm_i[3 * n_bins // 4:] = 0
    return dict(n_signal=n_signal, a_h=a_h, qc_h=qc_h, s_h=r(n_bins), kn_h=r(n_bins) * 1e7, p_i=p_i,
                bm_i=bm_i, s_i=r(n_bins + 1), kn_i=r(n_bins + 1) * 1e7, s_sig=r(n_signal),
                kn_sig=r(n_signal) * 1e7, length=7e-6)


def best_of(func, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = func()
        times.append(time.perf_counter() - start)
    return min(times), result


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    det = detection_inputs(rng)
    coeffs = rng.normal(size=N_BINS) + 1j * rng.normal(size=N_BINS)
    omegas = (np.arange(N_BINS) + 0.5) * 6.1e11
    times = np.linspace(-3e-13, 3e-13, N_TIMES)

    cases = {
        "detection_kernel": (lambda: detection_kernel_numpy(**det), lambda: detection_kernel_numba(**det)),
        "waveform_kernel": (lambda: waveform_kernel_numpy(coeffs, omegas, times),
                            lambda: waveform_kernel_numba(coeffs, omegas, times)),
    }
    print(f"numba available: {HAVE_NUMBA}")
    print(f"{'kernel':<18} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8} {'max rel diff':>13}")
    for name, (slow, fast) in cases.items():
        compile_start = time.perf_counter()
        fast()
        compile_time = time.perf_counter() - compile_start
        t_np, ref = best_of(slow, repeat)
        t_nb, out = best_of(fast, repeat)
        diff = np.max(np.abs(out - ref)) / np.max(np.abs(ref))
        print(f"{name:<18} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f} {diff:>13.2e}"
              f"   (first call {compile_time:.2f} s)")


SNIPPET = """
import time
from eostomo.config import load_config
from eostomo.metrics import evaluate_point
chain = load_config(None).chain()
start = time.perf_counter()
point = evaluate_point("E", "constant_photon_number", chain.full_bandwidth("E"), chain)
print(f"{time.perf_counter() - start:.3f} {point.gamma:.12f}")
"""


def bench_end_to_end():
    print("\nfull-band electric mode matching (fresh interpreter, includes JIT/cache load)")
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, EOSTOMO_DISABLE_NUMBA=flag)
        proc = subprocess.run([sys.executable, "-c", SNIPPET], env=env, capture_output=True, text=True,
                              check=True)
        seconds, gamma = proc.stdout.split()
        print(f"  {label:<6} {float(seconds):8.3f} s   gamma = {gamma}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--end-to-end", action="store_true")
    args = parser.parse_args(argv)
    bench_kernels(args.repeat)
    if args.end_to_end:
        bench_end_to_end()


if __name__ == "__main__":
    main()

"""Command-line front end.

Subcommands ``waveforms``, ``sweep``, ``tomography`` and ``variant`` each read
an optional JSON configuration, apply command-line overrides, run the matching
pipeline and write CSV (plus SVG and JSON) files and a ``manifest.json`` into
the output directory.

Exit codes: 0 success, 2 configuration error, 3 infeasible constraint,
4 numerical invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, load_config
from .constants import thz_to_omega
from .errors import (ConfigurationError, DomainError, EostomoError, InfeasibleConstraintError,
                     InvariantViolation, RangeError)
from .experiments import (BeamSplitterResult, PhaseScanResult, TomographyResult, WaveformResult,
                          run_beam_splitter, run_phase_scan, run_tomography, run_waveforms, scan_times)
from .io import write_csv, write_json, write_manifest
from .metrics import bandwidth_sweep, optimize_bandwidth

OUT_ENV = "EOSTOMO_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 2, 3, 4

log = logging.getLogger("eostomo")


def _output_dir(args, cfg: ExperimentConfig) -> Path:
    if args.out:
        return Path(args.out)
    if os.environ.get(OUT_ENV):
        return Path(os.environ[OUT_ENV])
    return Path(cfg.output.directory)


def _emit(out: Path, cfg: ExperimentConfig, stem: str, columns, rows, plot=None, result=None) -> list[Path]:
    files = []
    if "csv" in cfg.output.formats:
        files.append(write_csv(out / f"{stem}.csv", columns, rows))
    if plot is not None and "svg" in cfg.output.formats:
        files.append(plot(result, out / f"{stem}.svg"))
    return files


def _plotting():
    from . import plotting

    return plotting


def cmd_waveforms(cfg: ExperimentConfig, out: Path) -> list[Path]:
    """Ideal and detected sampling profiles."""
    w = cfg.waveforms
    times = scan_times(w.t_min_fs, w.t_max_fs, w.n_times)
    result = run_waveforms(cfg.chain(), times)
    return _emit(out, cfg, "waveforms", WaveformResult.COLUMNS, result.rows(),
                 _plotting().plot_waveforms if times.size else None, result)


def cmd_sweep(cfg: ExperimentConfig, out: Path) -> list[Path]:
    """Bandwidth sweep, optimum JSON and figure.

    The sweep CSV is written before the optimization so it is kept even when
    the constraint turns out to be infeasible.
    """
    s = cfg.sweep
    chain = cfg.chain()
    bws = None if s.bandwidths_thz is None else thz_to_omega(np.asarray(s.bandwidths_thz, dtype=float))
    if bws is None:
        hi = float(cfg.probe.e_full_bandwidth_thz if s.quadrature == "E" else cfg.probe.h_full_bandwidth_thz)
        bws = thz_to_omega(np.geomspace(min(s.min_thz, hi), hi, s.n_points))
    bws = np.atleast_1d(bws)
    sweep = bandwidth_sweep(s.quadrature, s.constraint, bws, chain_config=chain)
    stem = f"sweep_{s.quadrature}_{s.constraint}"
    files = _emit(out, cfg, stem, ("bandwidth_thz", "theta_bl", "theta_full", "gamma"),
                  [r[:4] for r in sweep.rows()])
    mode = "explicit" if s.gamma_floor is not None else "full_band_reference"
    optimum = optimize_bandwidth(s.quadrature, s.constraint, mode, chain, s.gamma_floor, bandwidth_list=bws)
    files.append(write_json(out / f"{stem}_optimum.json", optimum.as_dict()))
    if "svg" in cfg.output.formats:
        from .experiments import SweepRun

        files.append(_plotting().plot_sweep(SweepRun(sweep, optimum), out / f"{stem}.svg"))
    return files


def cmd_tomography(cfg: ExperimentConfig, out: Path) -> list[Path]:
    """Multiplexed time scan, Husimi grid and optional shots."""
    tm, sig = cfg.tomography, cfg.signal
    from .experiments import husimi_grid

    result = run_tomography(
        cfg.chain(), scan_times(tm.t_min_fs, tm.t_max_fs, tm.n_times),
        thz_to_omega(sig.omega0_thz), thz_to_omega(sig.sigma_thz), sig.r, cfg.layout(),
        n_shots=tm.shots, seed=tm.seed, husimi_time=tm.husimi_time_fs * 1e-15,
        alpha=husimi_grid(tm.husimi_extent, tm.husimi_points),
    )
    files = _emit(out, cfg, "tomography", TomographyResult.COLUMNS, result.rows(),
                  _plotting().plot_tomography if result.times.size else None, result)
    files += _emit(out, cfg, "husimi", ("re_alpha", "im_alpha", "q"), result.husimi_rows())
    if tm.shots:
        files += _emit(out, cfg, "shots", ("shot_index", "e", "h"), result.shot_rows())
    summary = {
        "theta_E": result.theta_E, "theta_H": result.theta_H,
        "gamma_E": result.gamma_E, "gamma_H": result.gamma_H,
        "reconstructed_cov": result.reconstructed_cov,
    }
    files.append(write_json(out / "tomography_summary.json", summary))
    return files


def cmd_variant(cfg: ExperimentConfig, out: Path) -> list[Path]:
    """Beam-splitter or phase-scan pipeline."""
    v = cfg.variant
    chain = cfg.chain()
    if v.name == "beam_splitter":
        result = run_beam_splitter(chain, transmission=v.transmission)
        return _emit(out, cfg, "variant_beam_splitter", BeamSplitterResult.COLUMNS, result.rows())
    if not v.phi_list:
        raise ConfigurationError("phase_scan needs at least one phase")
    tm, sig = cfg.tomography, cfg.signal
    result = run_phase_scan(chain, v.phi_list, scan_times(tm.t_min_fs, tm.t_max_fs, tm.n_times),
                            thz_to_omega(sig.omega0_thz), thz_to_omega(sig.sigma_thz), sig.r, cfg.layout())
    files = _emit(out, cfg, "variant_phase_scan", PhaseScanResult.COLUMNS, result.rows(),
                  _plotting().plot_phase_scan, result)
    files.append(write_json(out / "variant_phase_scan_reference.json", result.reference))
    return files


COMMANDS = {"waveforms": cmd_waveforms, "sweep": cmd_sweep, "tomography": cmd_tomography,
            "variant": cmd_variant}


def _phi_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid phase list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eostomo", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or the config value)")
    common.add_argument("--seed", type=int, help="sampler seed")
    common.add_argument("--shots", type=int, help="number of joint samples")
    sub.add_parser("waveforms", parents=[common], help="sampling profiles")
    sp = sub.add_parser("sweep", parents=[common], help="bandwidth sweep and optimum")
    sp.add_argument("--quadrature", choices=("E", "H"))
    sp.add_argument("--constraint", choices=("constant_photon_number", "constant_intensity"))
    sub.add_parser("tomography", parents=[common], help="multiplexed time scan")
    vp = sub.add_parser("variant", parents=[common], help="beam-splitter or phase-scan pipeline")
    vp.add_argument("variant", choices=("beam_splitter", "phase_scan"))
    vp.add_argument("--phi-list", type=_phi_list, help="comma-separated phases in rad")
    vp.add_argument("--transmission", type=float, help="power fraction sent to the H arm")
    return parser


def _configure(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    overrides = {"tomography.seed": args.seed, "tomography.shots": args.shots}
    if args.command == "sweep":
        overrides.update({"sweep.quadrature": args.quadrature, "sweep.constraint": args.constraint})
    if args.command == "variant":
        overrides.update({"variant.name": args.variant, "variant.phi_list": args.phi_list,
                          "variant.transmission": args.transmission})
    return cfg.override(**overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _configure(args)
        out = _output_dir(args, cfg)
        log.info("running %s into %s", args.command, out)
        files = COMMANDS[args.command](cfg, out)
        seed = cfg.tomography.seed if args.command == "tomography" else None
        write_manifest(out, args.command, cfg.digest(), seed, files)
    except InfeasibleConstraintError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigurationError, DomainError, RangeError, EostomoError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

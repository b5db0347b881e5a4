"""Command-line front end: ``bimodal {fit,synth,solve,sweep,find-optimum}``.

Exit codes: 0 success, 1 usage or I/O error, 2 fit did not converge,
3 degenerate steady state.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import config, model, pipeline, spectra, sweep
from .errors import BimodalError, DegenerateSteadyStateError, VacuumStateWarning
from .model import THZ

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_DEGENERATE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="run configuration (JSON)")
    p.add_argument("--truncation", type=int, help="Fock levels kept per mode (overrides the config)")
    p.add_argument("--log-base", choices=["2", "e", "10"], help="base of the logarithmic negativity")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bimodal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit scattering/absorption spectra and derive the mode table")
    p.add_argument("--scat", required=True, help="scattering spectrum CSV")
    p.add_argument("--abs", required=True, dest="abs_", help="absorption spectrum CSV")
    p.add_argument("--purcell-f", required=True, nargs=2, type=float, metavar=("F1", "F2"))
    p.add_argument("--out", required=True, help="characterization JSON to write")
    p.add_argument("--dipole-cm", type=float, default=model.DEFAULT_DIPOLE)
    p.add_argument("--epsilon-host", type=float, default=2.25)
    p.add_argument("--omega-qe-thz", type=float, help="emitter frequency for gamma_fs (default: mode midpoint)")
    p.add_argument("--window", type=float, default=3.0, help="fit window in linewidths around each peak")
    p.add_argument("--label", default="fitted")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("synth", help="write a synthetic spectrum CSV for a published antenna")
    p.add_argument("--table1", type=int, required=True, metavar="DELTA_L_NM")
    p.add_argument("--channel", choices=spectra.CHANNELS, default="scat")
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--noise", type=float, default=0.0, help="relative Gaussian noise")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("solve", help="steady state and observables of one configuration")
    _common(p)
    p.add_argument("--out", help="output .json or .csv (default: JSON on stdout)")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("sweep", help="parameter sweep to CSV tables")
    _common(p)
    p.add_argument("--preset", choices=sweep.PRESETS)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("find-optimum", help="emitter frequency that maximizes E_N")
    _common(p)
    p.add_argument("--out", help="output JSON (default: stdout)")
    p.add_argument("--force", action="store_true")
    return parser


def _writable(path, force: bool) -> Path:
    path = Path(path)
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists (use --force)")
    return path


def _emit(payload: dict, out, force: bool) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        _writable(out, force).write_text(text, encoding="utf-8")


def _load(args) -> config.RunConfig:
    return config.load(args.config, truncation=args.truncation, log_base=args.log_base)


def cmd_fit(args) -> int:
    scat = spectra.read_spectrum_csv(args.scat, "scat")
    absn = spectra.read_spectrum_csv(args.abs_, "abs")
    out = _writable(args.out, args.force)
    fit_s = spectra.fit_two_lorentzians(scat, window=args.window)
    fit_a = spectra.fit_two_lorentzians(absn, window=args.window)
    omega_qe = args.omega_qe_thz * THZ if args.omega_qe_thz else 0.5 * sum(fit_s.omega0)
    emitter = model.EmitterModel(omega_qe=omega_qe, dipole_d=args.dipole_cm, epsilon_host=args.epsilon_host)
    converged = fit_s.converged and fit_a.converged
    ant = spectra.characterize(fit_s, fit_a, args.purcell_f, emitter, args.label, require_converged=False)
    doc = model.antenna_to_dict(ant)
    doc["source"] = {
        "converged": converged,
        "omega_qe_thz_over_2pi": omega_qe / THZ,
        "epsilon_host": args.epsilon_host,
        "fits": {
            f.channel: {
                "omega0_thz_over_2pi": [w / THZ for w in f.omega0],
                "gamma_thz_over_2pi": [g / THZ for g in f.gamma],
                "rms_residual": f.rms_residual,
                "iterations": f.iterations,
                "converged": f.converged,
            }
            for f in (fit_s, fit_a)
        },
    }
    out.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    if not converged:
        print("bimodal: fit did not converge; results flagged in 'source'", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_synth(args) -> int:
    ant = model.table1_antenna(args.table1)
    params = spectra.params_for_antenna(ant, args.channel)
    g = max(params.gamma)
    grid = np.linspace(min(params.omega0) - 4 * g, max(params.omega0) + 4 * g, args.points)
    series = spectra.synth_spectrum(params, grid, args.noise, args.seed)
    spectra.write_spectrum_csv(series, _writable(args.out, args.force))
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _load(args)
    emitter, _ = pipeline.resolve_emitter(cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", VacuumStateWarning)
        obs = pipeline.evaluate(cfg.antenna, emitter, cfg.space, cfg.log_base)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    row = {"omega_qe_thz_over_2pi": emitter.omega_qe / THZ}
    row.update({k: obs[k] for k in cfg.outputs})
    if args.out and str(args.out).endswith(".csv"):
        path = _writable(args.out, args.force)
        path.write_text(
            ",".join(row) + "\n" + ",".join(repr(float(v)) for v in row.values()) + "\n", encoding="utf-8"
        )
    else:
        _emit(row, args.out, args.force)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    spec = sweep.preset(args.preset, cfg) if args.preset else sweep.spec_from_config(cfg)
    sweep.check_overwrite(args.out, spec, cfg.outputs, args.force)
    result = sweep.run_sweep(spec, cfg, workers=max(1, args.workers))
    files = sweep.write_sweep(result, cfg, args.out, force=args.force, workers=args.workers)
    print(f"wrote {len(files)} files to {args.out} in {result.wall_time_s:.1f} s")
    return EXIT_OK


def cmd_find_optimum(args) -> int:
    cfg = _load(args)
    opt = pipeline.find_optimum(cfg.antenna, cfg.emitter, cfg.space, cfg.log_base)
    _emit(
        {
            "omega_qe_opt_thz_over_2pi": opt.omega_qe_opt / THZ,
            "omega_qe_opt_rad_per_s": opt.omega_qe_opt,
            "e_n_max": opt.e_n_max,
            "midpoint_thz_over_2pi": opt.midpoint / THZ,
            "shift_thz_over_2pi": (opt.omega_qe_opt - opt.midpoint) / THZ,
            "tolerance_thz_over_2pi": opt.tolerance / THZ,
            "shifted_from_midpoint": opt.shifted,
            "evaluations": opt.evaluations,
        },
        args.out,
        args.force,
    )
    return EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "synth": cmd_synth,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "find-optimum": cmd_find_optimum,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DegenerateSteadyStateError as exc:
        print(f"bimodal: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (BimodalError, OSError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"bimodal: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Declarative parameter grids, built-in figure presets and CSV/manifest output."""

from __future__ import annotations

import itertools
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, _accel, pipeline
from .config import OBSERVABLES, RunConfig
from .errors import ConfigError, VacuumStateWarning
from .model import THZ, AntennaModel, EmitterModel, table1_antenna

AXIS_NAMES = ("pump_per_s", "omega_qe_thz_over_2pi", "dipole_cm", "theta_deg", "table1_delta_l_nm")
DEFAULT_SCALE = {"pump_per_s": "log"}
PRESETS = ("fig4", "fig5", "fig6a", "fig6b", "fig7")
TABLE1_LENGTHS = (0, 12, 24, 81, 93, 105)


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigError(f"unknown sweep axis {self.name!r}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigError(f"axis {self.name} has no values")
        if self.name in ("pump_per_s", "omega_qe_thz_over_2pi", "dipole_cm"):
            if any(v <= 0 for v in values) and not (self.name == "pump_per_s" and self.scale == "linear"):
                raise ConfigError(f"axis {self.name} must be positive")
        object.__setattr__(self, "values", values)

    @classmethod
    def grid(cls, name: str, start: float, stop: float, num: int, scale: str | None = None) -> "SweepAxis":
        scale = scale or DEFAULT_SCALE.get(name, "linear")
        if num < 2:
            raise ConfigError(f"axis {name} needs at least 2 grid points")
        if scale == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"log axis {name} needs positive bounds")
            values = np.geomspace(start, stop, num)
        else:
            values = np.linspace(start, stop, num)
        return cls(name, tuple(values), scale)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepAxis":
        if "values" in d:
            return cls(d["name"], tuple(d["values"]), d.get("scale", DEFAULT_SCALE.get(d["name"], "linear")))
        try:
            return cls.grid(d["name"], d["start"], d["stop"], d["num"], d.get("scale"))
        except KeyError as exc:
            raise ConfigError(f"sweep axis {d['name']} needs start, stop and num (missing {exc})") from None


@dataclass(frozen=True)
class SweepSpec:
    """One or two grid axes; every other quantity comes from the run configuration.

    ``overrides`` fixes emitter fields (model units) before the grid is
    applied; ``optimal_omega`` places omega_qe at the E_N optimum of each
    antenna first.
    """

    name: str
    axes: tuple[SweepAxis, ...]
    overrides: dict = field(default_factory=dict)
    optimal_omega: bool = False

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("a sweep has one or two axes")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise ConfigError("sweep axes must differ")
        if self.optimal_omega and any(a.name == "omega_qe_thz_over_2pi" for a in self.axes):
            raise ConfigError("omega_qe cannot be both swept and optimized")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a.values) for a in self.axes)

    def points(self):
        return list(itertools.product(*(a.values for a in self.axes)))


@dataclass
class SweepResult:
    spec: SweepSpec
    table: dict[str, np.ndarray]  # observable -> values in grid order (last axis fastest)
    optima: dict = field(default_factory=dict)  # antenna label -> omega_qe_opt in rad/s
    wall_time_s: float = 0.0


def preset(name: str, cfg: RunConfig) -> SweepSpec:
    """Built-in grids behind the published figures.

    fig4  pump x omega_qe, dipole along x (theta = 0)
    fig5  dipole magnitude x orientation at the optimum, P = 1 GHz
    fig6a 181-point orientation scan at the optimum, P = 0.1 GHz
    fig6b pump x the six published antennas, each at its own optimum
    fig7  pump scan for the photon-number statistics
    """
    ant = cfg.antenna
    lo, hi = (m.omega / THZ for m in sorted(ant.modes, key=lambda m: m.omega))
    if name == "fig4":
        return SweepSpec(
            name,
            (SweepAxis.grid("pump_per_s", 1e7, 1e10, 16), SweepAxis.grid("omega_qe_thz_over_2pi", lo, hi, 41)),
            overrides={"theta_deg": 0.0},
        )
    if name == "fig5":
        return SweepSpec(
            name,
            (SweepAxis.grid("dipole_cm", 1e-30, 3e-28, 26, "log"), SweepAxis.grid("theta_deg", 0.0, 180.0, 37)),
            overrides={"pump": 1e9},
            optimal_omega=True,
        )
    if name == "fig6a":
        return SweepSpec(
            name, (SweepAxis.grid("theta_deg", 0.0, 180.0, 181),), overrides={"pump": 1e8}, optimal_omega=True
        )
    if name == "fig6b":
        return SweepSpec(
            name,
            (SweepAxis.grid("pump_per_s", 1e7, 1e10, 16), SweepAxis("table1_delta_l_nm", TABLE1_LENGTHS)),
            optimal_omega=True,
        )
    if name == "fig7":
        return SweepSpec(name, (SweepAxis.grid("pump_per_s", 1e6, 1e11, 26),))
    raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


def spec_from_config(cfg: RunConfig) -> SweepSpec:
    block = cfg.raw.get("sweep")
    if block is None:
        raise ConfigError("config has no 'sweep' block; pass --preset or add one")
    return SweepSpec(block.get("name", "sweep"), tuple(SweepAxis.from_dict(a) for a in block["axes"]))


# ---------------------------------------------------------------- execution


def _apply(emitter: EmitterModel, antenna: AntennaModel, name: str, value: float):
    if name == "pump_per_s":
        return emitter.replace(pump=value), antenna
    if name == "omega_qe_thz_over_2pi":
        return emitter.replace(omega_qe=value * THZ), antenna
    if name == "dipole_cm":
        return emitter.replace(dipole_d=value), antenna
    if name == "theta_deg":
        return emitter.replace(theta_deg=value), antenna
    return emitter, table1_antenna(int(value))


def _job(args):
    antenna, emitter, space, log_base = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", VacuumStateWarning)
        return pipeline.evaluate(antenna, emitter, space, log_base)


def build_jobs(spec: SweepSpec, cfg: RunConfig) -> tuple[list, dict]:
    """Per-point (antenna, emitter, space, log_base) tuples in grid order, plus optima used."""
    base = cfg.emitter.replace(**spec.overrides) if spec.overrides else cfg.emitter
    optima: dict[str, float] = {}
    resolve_opt = spec.optimal_omega or cfg.omega_qe_mode == "optimal"

    def emitter_for(antenna: AntennaModel, emitter: EmitterModel) -> EmitterModel:
        swept_omega = any(a.name == "omega_qe_thz_over_2pi" for a in spec.axes)
        if swept_omega:
            return emitter
        if resolve_opt:
            if antenna.label not in optima:
                optima[antenna.label] = pipeline.find_optimum(antenna, base, cfg.space, cfg.log_base).omega_qe_opt
            return emitter.replace(omega_qe=optima[antenna.label])
        if cfg.omega_qe_mode == "midpoint":
            return emitter.replace(omega_qe=antenna.midpoint)
        return emitter

    jobs = []
    for point in spec.points():
        emitter, antenna = base, cfg.antenna
        for axis, value in zip(spec.axes, point):
            if axis.name == "table1_delta_l_nm":
                emitter, antenna = _apply(emitter, antenna, axis.name, value)
        emitter = emitter_for(antenna, emitter)
        for axis, value in zip(spec.axes, point):
            if axis.name != "table1_delta_l_nm":
                emitter, antenna = _apply(emitter, antenna, axis.name, value)
        jobs.append((antenna, emitter, cfg.space, cfg.log_base))
    return jobs, optima


def run_sweep(spec: SweepSpec, cfg: RunConfig, workers: int = 1) -> SweepResult:
    """Evaluate every grid point; results are assembled in grid order for any worker count."""
    t0 = time.perf_counter()
    jobs, optima = build_jobs(spec, cfg)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_job(j) for j in jobs]
    table = {k: np.array([r[k] for r in rows]) for k in OBSERVABLES}
    return SweepResult(spec=spec, table=table, optima=optima, wall_time_s=time.perf_counter() - t0)


# ------------------------------------------------------------------ output


def _fmt(x: float) -> str:
    return repr(float(x))


def output_files(spec: SweepSpec, outputs) -> list[str]:
    return [f"{spec.name}_{name}.csv" for name in outputs] + ["manifest.json"]


def check_overwrite(out_dir, spec: SweepSpec, outputs, force: bool = False) -> None:
    out_dir = Path(out_dir)
    clashes = [f for f in output_files(spec, outputs) if (out_dir / f).exists()]
    if clashes and not force:
        raise FileExistsError(f"{out_dir}: would overwrite {', '.join(clashes)} (use --force)")


def write_sweep(result: SweepResult, cfg: RunConfig, out_dir, force: bool = False, workers: int = 1) -> list[Path]:
    """One CSV per requested observable plus ``manifest.json``."""
    spec = result.spec
    out_dir = Path(out_dir)
    check_overwrite(out_dir, spec, cfg.outputs, force)
    out_dir.mkdir(parents=True, exist_ok=True)
    points = spec.points()
    axis_names = [a.name for a in spec.axes]
    written = []
    for name in cfg.outputs:
        path = out_dir / f"{spec.name}_{name}.csv"
        lines = [",".join(axis_names + [name])]
        for point, value in zip(points, result.table[name]):
            lines.append(",".join([_fmt(v) for v in point] + [_fmt(value)]))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    manifest = {
        "preset": spec.name,
        "config_sha256": cfg.sha256,
        "grids": {a.name: {"scale": a.scale, "values": list(a.values)} for a in spec.axes},
        "overrides": {k: v for k, v in spec.overrides.items()},
        "omega_qe_opt_thz_over_2pi": {k: v / THZ for k, v in result.optima.items()},
        "mode_levels": list(cfg.space.mode_levels),
        "log_base": cfg.log_base,
        "points": len(points),
        "workers": workers,
        "backend": _accel.backend_name(),
        "version": __version__,
        "wall_time_s": result.wall_time_s,
        "files": [p.name for p in written],
    }
    mpath = out_dir / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    written.append(mpath)
    return written

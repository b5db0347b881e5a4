"""Device point -> observables, and the search for the entanglement-optimal emitter frequency."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import entangle, steady
from .config import OBSERVABLES, RunConfig
from .errors import VacuumStateError, VacuumStateWarning
from .model import AntennaModel, EmitterModel
from .qspace import SpaceDescriptor

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
COARSE_POINTS = 41


def evaluate(
    antenna: AntennaModel,
    emitter: EmitterModel,
    space: SpaceDescriptor = SpaceDescriptor(),
    log_base=2,
) -> dict[str, float]:
    """All steady-state and far-field observables of one configuration.

    Keys follow ``config.OBSERVABLES``. A photonic vacuum (no pump, or no
    coupling) yields zero entanglement quantities, a NaN photon-number
    ratio and a VacuumStateWarning.
    """
    result = steady.steady_state(space, antenna, emitter)
    rate = steady.emission_rate(result, antenna)
    stats = steady.photon_statistics(result)
    p = stats.p_total
    out = {
        "rate": rate.total,
        "rate_1": rate.per_mode[0],
        "rate_2": rate.per_mode[1],
        "n_1": stats.n_mean[0],
        "n_2": stats.n_mean[1],
        "p_0": float(p[0]),
        "p_1": float(p[1]),
        "p_2": float(p[2]),
        "log10_p2_over_p1": math.log10(p[2] / p[1]) if p[1] > 0 and p[2] > 0 else math.nan,
        "p_e": result.observables["p_e"],
        "residual": result.residual,
    }
    try:
        ff = entangle.far_field_from_steady(result.rho, space, antenna.efficiencies)
    except VacuumStateError:
        warnings.warn("photonic steady state is the vacuum; entanglement reported as 0", VacuumStateWarning, 2)
        out.update(e_n=0.0, p_bell=0.0, phi_star=0.0, p_10=0.0, p_01=0.0, discarded_weight=0.0)
    else:
        bell = entangle.bell_overlap(ff)
        out.update(
            e_n=entangle.log_negativity(ff, base=log_base),
            p_bell=bell.p_bell,
            phi_star=bell.phi_star,
            p_10=bell.p_10,
            p_01=bell.p_01,
            discarded_weight=ff.discarded_weight,
        )
    return {k: float(out[k]) for k in OBSERVABLES}


@dataclass(frozen=True)
class OptimumResult:
    omega_qe_opt: float
    e_n_max: float
    midpoint: float
    tolerance: float
    shifted: bool  # optimum further than the tolerance from the midpoint
    evaluations: int


def search_interval(antenna: AntennaModel) -> tuple[float, float]:
    omegas = [m.omega for m in antenna.modes]
    g_max = max(m.gamma_total for m in antenna.modes)
    return min(omegas) - g_max, max(omegas) + g_max


def find_optimum(
    antenna: AntennaModel,
    emitter: EmitterModel,
    space: SpaceDescriptor = SpaceDescriptor(),
    log_base=2,
    coarse_points: int = COARSE_POINTS,
) -> OptimumResult:
    """Maximize E_N over omega_qe on [min w_j - G_max, max w_j + G_max].

    A coarse uniform scan brackets the global maximum, then golden-section
    search refines it to 1e-4 of the mode splitting (or of the narrower
    linewidth when the modes are degenerate).
    """
    lo, hi = search_interval(antenna)
    split = abs(antenna.modes[1].omega - antenna.modes[0].omega)
    tol = 1e-4 * (split if split > 0 else min(m.gamma_total for m in antenna.modes))
    count = 0

    def objective(w):
        nonlocal count
        count += 1
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", VacuumStateWarning)
            return evaluate(antenna, emitter.replace(omega_qe=float(w)), space, log_base)["e_n"]

    grid = np.linspace(lo, hi, coarse_points)
    values = np.array([objective(w) for w in grid])
    k = int(np.argmax(values))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, coarse_points - 1)]
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = objective(d)
    best_w, best_f = (c, fc) if fc >= fd else (d, fd)
    if values[k] > best_f:
        best_w, best_f = grid[k], values[k]
    mid = antenna.midpoint
    return OptimumResult(
        omega_qe_opt=float(best_w),
        e_n_max=float(best_f),
        midpoint=mid,
        tolerance=tol,
        shifted=bool(abs(best_w - mid) > tol),
        evaluations=count,
    )


def resolve_emitter(cfg: RunConfig) -> tuple[EmitterModel, OptimumResult | None]:
    """Emitter with ``omega_qe`` fixed; solves the optimum when the config asks for it."""
    if cfg.omega_qe_mode != "optimal":
        return cfg.emitter, None
    opt = find_optimum(cfg.antenna, cfg.emitter, cfg.space, cfg.log_base)
    return cfg.emitter.replace(omega_qe=opt.omega_qe_opt), opt

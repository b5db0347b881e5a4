"""Device parameters, dipole-orientation couplings, Hamiltonian and collapse channels.

Units: angular frequencies and couplings in rad/s, rates in 1/s, dipole
moments in C*m. JSON files carry the "value/2pi in THz" convention of the
published mode table and are converted on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import NamedTuple

import numpy as np
from scipy import constants

from . import qspace
from .qspace import SpaceDescriptor

THZ = 2.0 * math.pi * 1e12  # (value/2pi in THz) -> rad/s
DEFAULT_DIPOLE = 6e-29
DEFAULT_AXES = (135.0, 45.0)


@dataclass(frozen=True)
class ModeRecord:
    """One lossy nanoantenna mode."""

    omega: float
    gamma_scat: float
    gamma_abs: float
    kappa_max: float
    purcell_f: float = float("nan")

    def __post_init__(self):
        if not self.gamma_scat > 0:
            raise ValueError("gamma_scat must be positive")
        if self.gamma_abs < 0:
            raise ValueError("gamma_abs must be non-negative")
        if self.kappa_max < 0:
            raise ValueError("kappa_max must be non-negative")

    @property
    def gamma_total(self) -> float:
        return self.gamma_scat + self.gamma_abs

    @property
    def efficiency(self) -> float:
        return self.gamma_scat / self.gamma_total

    @classmethod
    def from_thz(cls, omega, gamma_scat, gamma_abs, kappa, purcell_f=float("nan")) -> "ModeRecord":
        return cls(omega * THZ, gamma_scat * THZ, gamma_abs * THZ, kappa * THZ, purcell_f)


@dataclass(frozen=True)
class AntennaModel:
    """Two orthogonally addressable modes.

    ``kappa_max`` of each mode is the coupling to a dipole of magnitude
    ``reference_dipole`` aligned with that mode's axis.
    """

    label: str
    modes: tuple[ModeRecord, ModeRecord]
    mode_axes_deg: tuple[float, float] = DEFAULT_AXES
    reference_dipole: float = DEFAULT_DIPOLE

    def __post_init__(self):
        modes = tuple(self.modes)
        if len(modes) != 2:
            raise ValueError(f"an antenna has exactly two modes, got {len(modes)}")
        axes = tuple(float(a) for a in self.mode_axes_deg)
        if abs(_cosd(axes[0] - axes[1])) > 1e-12:
            raise ValueError(f"mode axes must be orthogonal, got {axes}")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "mode_axes_deg", axes)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.modes[0].omega + self.modes[1].omega)

    @property
    def efficiencies(self) -> tuple[float, float]:
        return (self.modes[0].efficiency, self.modes[1].efficiency)

    def with_kappas(self, kappas) -> "AntennaModel":
        modes = tuple(replace(m, kappa_max=float(k)) for m, k in zip(self.modes, kappas))
        return replace(self, modes=modes)


@dataclass(frozen=True)
class EmitterModel:
    omega_qe: float
    dipole_d: float = DEFAULT_DIPOLE
    theta_deg: float = 90.0
    gamma_d: float = 1e11
    pump: float = 1e9
    epsilon_host: float = 2.25

    def __post_init__(self):
        if self.dipole_d <= 0:
            raise ValueError("dipole_d must be positive")
        if self.gamma_d < 0 or self.pump < 0:
            raise ValueError("rates must be non-negative")
        if self.epsilon_host < 1:
            raise ValueError("epsilon_host must be >= 1")

    def replace(self, **changes) -> "EmitterModel":
        return replace(self, **changes)


class Channel(NamedTuple):
    op: np.ndarray
    rate: float


def _cosd(angle_deg: float) -> float:
    """cos of an angle in degrees, exactly zero at odd multiples of 90."""
    r = math.fmod(float(angle_deg), 360.0)
    if r < 0:
        r += 360.0
    if r in (90.0, 270.0):
        return 0.0
    return math.cos(math.radians(r))


def gamma_fs(emitter: EmitterModel) -> float:
    """Weisskopf-Wigner spontaneous emission rate in the host medium, 1/s."""
    if emitter.omega_qe <= 0:
        raise ValueError("omega_qe must be positive")
    num = emitter.omega_qe**3 * math.sqrt(emitter.epsilon_host) * emitter.dipole_d**2
    return num / (3.0 * math.pi * constants.epsilon_0 * constants.hbar * constants.c**3)


def effective_couplings(antenna: AntennaModel, theta_deg: float, dipole_d: float | None = None):
    """Signed couplings (kappa_1, kappa_2) for a dipole at angle ``theta_deg``.

    The dipole is projected onto the two mode axes; couplings scale linearly
    with the dipole magnitude relative to ``antenna.reference_dipole``.
    """
    scale = 1.0 if dipole_d is None else dipole_d / antenna.reference_dipole
    return tuple(
        m.kappa_max * scale * _cosd(theta_deg - axis) for m, axis in zip(antenna.modes, antenna.mode_axes_deg)
    )


def build_hamiltonian(space: SpaceDescriptor, antenna: AntennaModel, emitter: EmitterModel) -> np.ndarray:
    """RWA Hamiltonian in the frame rotating at omega_qe, hbar = 1, rad/s."""
    kappas = effective_couplings(antenna, emitter.theta_deg, emitter.dipole_d)
    sm = qspace.sigma_minus(space)
    sp = sm.conj().T
    h = np.zeros((space.dim, space.dim), dtype=complex)
    for j, (mode, kappa) in enumerate(zip(antenna.modes, kappas), start=1):
        a = qspace.annihilation(space, j)
        ad = a.conj().T
        h += (mode.omega - emitter.omega_qe) * (ad @ a)
        h += kappa * (sp @ a + ad @ sm)
    return h


def build_collapse_channels(space: SpaceDescriptor, antenna: AntennaModel, emitter: EmitterModel) -> list[Channel]:
    """Pump, free-space decay, dephasing and the two mode decays; zero rates dropped."""
    sm = qspace.sigma_minus(space)
    sp = sm.conj().T
    candidates = [
        (sp, emitter.pump),
        (sm, gamma_fs(emitter)),
        (sp @ sm, emitter.gamma_d),
    ]
    for j, mode in enumerate(antenna.modes, start=1):
        candidates.append((qspace.annihilation(space, j), mode.gamma_total))
    channels = []
    for op, rate in candidates:
        if rate < 0:
            raise ValueError(f"negative rate {rate}")
        if rate > 0:
            channels.append(Channel(op, float(rate)))
    return channels


# ---------------------------------------------------------------- JSON forms


def mode_from_dict(d: dict) -> ModeRecord:
    return ModeRecord.from_thz(
        d["omega_thz_over_2pi"],
        d["gamma_scat_thz_over_2pi"],
        d["gamma_abs_thz_over_2pi"],
        d["kappa_thz_over_2pi"],
        d.get("purcell_f", d.get("purcell_factor", float("nan"))),
    )


def mode_to_dict(m: ModeRecord) -> dict:
    out = {
        "omega_thz_over_2pi": m.omega / THZ,
        "gamma_scat_thz_over_2pi": m.gamma_scat / THZ,
        "gamma_abs_thz_over_2pi": m.gamma_abs / THZ,
        "kappa_thz_over_2pi": m.kappa_max / THZ,
        "efficiency": m.efficiency,
    }
    if not math.isnan(m.purcell_f):
        out["purcell_f"] = m.purcell_f
    return out


def antenna_from_dict(d: dict) -> AntennaModel:
    return AntennaModel(
        label=d.get("label", "antenna"),
        modes=tuple(mode_from_dict(m) for m in d["modes"]),
        mode_axes_deg=tuple(d.get("mode_axes_deg", DEFAULT_AXES)),
        reference_dipole=d.get("reference_dipole_cm", DEFAULT_DIPOLE),
    )


def antenna_to_dict(a: AntennaModel) -> dict:
    return {
        "label": a.label,
        "modes": [mode_to_dict(m) for m in a.modes],
        "mode_axes_deg": list(a.mode_axes_deg),
        "reference_dipole_cm": a.reference_dipole,
    }


@lru_cache(maxsize=1)
def _table1_raw() -> dict:
    text = resources.files("bimodal").joinpath("data/table1.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_table1() -> dict[int, AntennaModel]:
    """The six published antennas keyed by length difference in nm."""
    raw = _table1_raw()
    out = {}
    for entry in raw["antennas"]:
        d = dict(entry, reference_dipole_cm=raw["reference_dipole_cm"], mode_axes_deg=raw["mode_axes_deg"])
        out[entry["delta_l_nm"]] = antenna_from_dict(d)
    return out


def table1_efficiencies_percent() -> dict[int, tuple[float, float]]:
    return {
        e["delta_l_nm"]: tuple(m["efficiency_percent"] for m in e["modes"]) for e in _table1_raw()["antennas"]
    }


def table1_antenna(delta_l_nm: int) -> AntennaModel:
    table = load_table1()
    try:
        return table[int(delta_l_nm)]
    except KeyError:
        raise KeyError(f"no published antenna with dL={delta_l_nm} nm; choose from {sorted(table)}") from None


def default_emitter(antenna: AntennaModel, **changes) -> EmitterModel:
    """Emitter at the mid frequency of the two modes, published defaults otherwise."""
    return EmitterModel(omega_qe=antenna.midpoint, **changes)

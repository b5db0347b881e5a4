"""From the photonic steady state to the entanglement of the radiated light.

Pipeline: trace out the emitter, condition on at least one photon, weight
the single-photon block by the mode efficiencies, then take the logarithmic
negativity of the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qspace
from .errors import VacuumStateError

EN_ZERO_TOL = 1e-9
LOG_BASES = {2: 2.0, "2": 2.0, "e": math.e, 10: 10.0, "10": 10.0}


@dataclass(frozen=True)
class FarFieldState:
    rho_ff: np.ndarray
    eta: tuple[float, float]
    mode_levels: tuple[int, int] = (4, 4)
    discarded_weight: float = 0.0  # weight of the conditioned state outside {|10>, |01>}


@dataclass(frozen=True)
class BellOverlap:
    p_bell: float
    phi_star: float
    p_10: float
    p_01: float


def _levels(rho: np.ndarray, mode_levels) -> tuple[int, int]:
    if mode_levels is None:
        m = math.isqrt(rho.shape[0])
        if m * m != rho.shape[0]:
            raise ValueError("pass mode_levels for unequal truncations")
        return (m, m)
    return tuple(mode_levels)


def project_out_vacuum(rho_ph: np.ndarray, mode_levels=None) -> np.ndarray:
    """Remove |00> and renormalize: the state given that a detector clicks."""
    rho_ph = np.asarray(rho_ph, dtype=complex)
    _levels(rho_ph, mode_levels)
    out = rho_ph.copy()
    out[0, :] = 0.0
    out[:, 0] = 0.0
    tr = float(np.real(np.trace(out)))
    if not tr > 1e-300:
        raise VacuumStateError("state has no weight outside the vacuum")
    return out / tr


def far_field_transform(rho_tilde: np.ndarray, eta, mode_levels=None) -> FarFieldState:
    """Apply T = sqrt(eta1)|10><10| + sqrt(eta2)|01><01| and renormalize."""
    rho_tilde = np.asarray(rho_tilde, dtype=complex)
    levels = _levels(rho_tilde, mode_levels)
    eta = (float(eta[0]), float(eta[1]))
    if not all(0.0 < e <= 1.0 for e in eta):
        raise ValueError(f"efficiencies must lie in (0, 1], got {eta}")
    i10 = levels[1]  # |n1=1, n2=0>
    i01 = 1
    t = np.zeros(rho_tilde.shape[0])
    t[i10] = math.sqrt(eta[0])
    t[i01] = math.sqrt(eta[1])
    out = t[:, None] * rho_tilde * t[None, :]
    tr = float(np.real(np.trace(out)))
    if not tr > 0.0:
        raise VacuumStateError("no single-photon weight survives the far-field map")
    outside = np.real(np.diag(rho_tilde)).copy()
    outside[[i10, i01]] = 0.0
    discarded = float(np.sum(outside))  # summed directly: trace - kept cancels at the 1e-10 level
    return FarFieldState(rho_ff=out / tr, eta=eta, mode_levels=levels, discarded_weight=max(discarded, 0.0))


def log_negativity(state: FarFieldState | np.ndarray, base=2, mode_levels=None) -> float:
    """log_base of the trace norm of the mode-2 partial transpose.

    Values below 1e-9 (and trace norms within 1e-12 of one) are reported as 0.
    """
    if isinstance(state, FarFieldState):
        rho, levels = state.rho_ff, state.mode_levels
    else:
        rho = np.asarray(state, dtype=complex)
        levels = _levels(rho, mode_levels)
    try:
        b = LOG_BASES[base]
    except KeyError:
        raise ValueError(f"log base must be one of 2, 'e', 10; got {base!r}") from None
    norm = qspace.trace_norm(qspace.partial_transpose_mode2(rho, levels))
    if norm <= 1.0 + 1e-12:
        return 0.0
    value = math.log(norm) / math.log(b)
    return 0.0 if value < EN_ZERO_TOL else value


def bell_overlap(state: FarFieldState | np.ndarray, mode_levels=None) -> BellOverlap:
    """Largest overlap with (|10> + e^{i phi}|01>)/sqrt(2) and the maximizing phi."""
    if isinstance(state, FarFieldState):
        rho, levels = state.rho_ff, state.mode_levels
    else:
        rho = np.asarray(state, dtype=complex)
        levels = _levels(rho, mode_levels)
    i10, i01 = levels[1], 1
    p10 = float(np.real(rho[i10, i10]))
    p01 = float(np.real(rho[i01, i01]))
    coh = rho[i10, i01]
    phi = float(-np.angle(coh)) if abs(coh) > 0 else 0.0
    return BellOverlap(p_bell=0.5 * (p10 + p01) + float(abs(coh)), phi_star=phi, p_10=p10, p_01=p01)


def bell_state(phi: float, mode_levels=(4, 4)) -> np.ndarray:
    """Density matrix of (|10> + e^{i phi}|01>)/sqrt(2) on the photonic space."""
    m1, m2 = mode_levels
    psi = np.zeros(m1 * m2, dtype=complex)
    psi[m2] = 1.0 / math.sqrt(2.0)
    psi[1] = np.exp(1j * phi) / math.sqrt(2.0)
    return qspace.projector(psi)


def far_field_from_steady(rho_full: np.ndarray, space: qspace.SpaceDescriptor, eta) -> FarFieldState:
    """Trace out the emitter, drop the vacuum and apply the efficiency map."""
    rho_ph = qspace.partial_trace_emitter(rho_full, space)
    rho_tilde = project_out_vacuum(rho_ph, space.mode_levels)
    return far_field_transform(rho_tilde, eta, space.mode_levels)

"""Liouvillian, stationary state, RK4 reference integrator and steady observables.

Density matrices are vectorized column-major (``rho.reshape(-1, order="F")``),
so ``kron(A, B) @ vec(X) == vec(B @ X @ A.T)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import qspace
from .errors import BimodalError, DegenerateSteadyStateError, DimensionError, NotHermitianError, StepSizeError
from .model import AntennaModel, EmitterModel, build_collapse_channels, build_hamiltonian, gamma_fs
from .qspace import SpaceDescriptor

RESIDUAL_RTOL = 1e-8
TRACE_DRIFT_TOL = 1e-8
SINGULAR_RTOL = 1e-13
DIRECT_STEP_LIMIT = 4096


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    d = dim if dim is not None else math.isqrt(v.size)
    return np.asarray(v).reshape(d, d, order="F")


def build_liouvillian(H: np.ndarray, channels) -> np.ndarray:
    """Matrix of  rho -> -i[H, rho] + sum_c rate (c rho c^H - 1/2 {c^H c, rho}).

    Written as  I (x) K + conj(K) (x) I + sum_c rate conj(c) (x) c  with the
    effective generator  K = -iH - 1/2 sum_c rate c^H c.
    """
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    if H.shape != (d, d):
        raise DimensionError(f"Hamiltonian must be square, got {H.shape}")
    if qspace.hermiticity_error(H) > 1e-12 * max(1.0, float(np.max(np.abs(H)))):
        raise NotHermitianError("Hamiltonian is not Hermitian")
    K = -1j * H
    ops, rates = [], []
    for op, rate in channels:
        op = np.asarray(op, dtype=complex)
        if op.shape != (d, d):
            raise DimensionError(f"collapse operator has shape {op.shape}, expected {(d, d)}")
        if rate < 0:
            raise ValueError(f"negative rate {rate}")
        K = K - 0.5 * rate * (op.conj().T @ op)
        ops.append(op)
        rates.append(float(rate))
    # Assemble kron(A, B)[(p, q), (r, s)] = A[p, r] B[q, s] as a 4-index tensor.
    if ops:
        stack = np.stack(ops).reshape(len(ops), d * d)
        jump = (np.asarray(rates)[:, None] * stack.conj()).T @ stack  # [(p, r), (q, s)]
        L4 = np.ascontiguousarray(jump.reshape(d, d, d, d).transpose(0, 2, 1, 3))
    else:
        L4 = np.zeros((d, d, d, d), dtype=complex)
    Kc = K.conj()
    for p in range(d):
        L4[p, :, p, :] += K
        L4[:, p, :, p] += Kc
    return L4.reshape(d * d, d * d)


def master_rhs(H: np.ndarray, channels, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the master equation evaluated directly on ``rho``."""
    out = -1j * (H @ rho - rho @ H)
    for op, rate in channels:
        cd = op.conj().T
        cdc = cd @ op
        out = out + rate * (op @ rho @ cd - 0.5 * (cdc @ rho + rho @ cdc))
    return out


@dataclass
class SteadyResult:
    rho: np.ndarray
    residual: float
    space: SpaceDescriptor | None = None
    observables: dict[str, float] = field(default_factory=dict)
    method: str = "lu"


def _trace_row(d: int) -> np.ndarray:
    return vec(np.eye(d, dtype=complex))


def _null_space_solution(L: np.ndarray, d: int) -> tuple[np.ndarray, str]:
    _, s, vh = np.linalg.svd(L)
    tol = SINGULAR_RTOL * s[0] * L.shape[0]
    nullity = int(np.sum(s <= tol))
    if nullity > 1:
        raise DegenerateSteadyStateError(f"Liouvillian has a {nullity}-dimensional null space")
    return unvec(vh[-1].conj(), d), "svd"


def solve_steady(L: np.ndarray, space: SpaceDescriptor | None = None) -> SteadyResult:
    """Stationary state from L with its first row replaced by the trace functional.

    Uses partial-pivot LU; a near-singular factorization falls back to the
    SVD null space, and a null space of dimension > 1 raises
    DegenerateSteadyStateError.
    """
    L = np.asarray(L, dtype=complex)
    n = L.shape[0]
    d = math.isqrt(n)
    if L.shape != (n, n) or d * d != n:
        raise DimensionError(f"Liouvillian must be (d^2, d^2), got {L.shape}")
    if space is not None and space.dim != d:
        raise DimensionError(f"Liouvillian acts on dimension {d}, space has {space.dim}")
    scale = float(np.max(np.abs(L))) or 1.0
    A = L.copy()
    A[0, :] = scale * _trace_row(d)
    b = np.zeros(n, dtype=complex)
    b[0] = scale

    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
            pivots = np.abs(np.diag(lu))
            singular = pivots.min() <= SINGULAR_RTOL * pivots.max()
        except scipy.linalg.LinAlgWarning:
            singular = True
    if singular:
        rho, method = _null_space_solution(L, d)
    else:
        rho = unvec(scipy.linalg.lu_solve((lu, piv), b, check_finite=False), d)
        method = "lu"

    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    residual = float(np.max(np.abs((L @ vec(rho))[1:])))
    if residual > RESIDUAL_RTOL * max(1.0, scale):
        raise BimodalError(f"steady-state residual {residual:.3e} above tolerance")
    result = SteadyResult(rho=rho, residual=residual, space=space, method=method)
    if space is not None:
        result.observables.update(_populations(rho, space))
    return result


def _populations(rho: np.ndarray, space: SpaceDescriptor) -> dict[str, float]:
    p_e = float(np.real(np.trace(rho @ qspace.excited_projector(space))))
    return {
        "p_e": p_e,
        "p_g": float(np.real(np.trace(rho))) - p_e,
        "n_1": float(np.real(np.trace(rho @ qspace.number_operator(space, 1)))),
        "n_2": float(np.real(np.trace(rho @ qspace.number_operator(space, 2)))),
    }


def steady_state(space: SpaceDescriptor, antenna: AntennaModel, emitter: EmitterModel) -> SteadyResult:
    """Build H and the channels for a device point and solve for its stationary state."""
    H = build_hamiltonian(space, antenna, emitter)
    channels = build_collapse_channels(space, antenna, emitter)
    return solve_steady(build_liouvillian(H, channels), space)


# ------------------------------------------------------------------ RK4


def characteristic_rate(H: np.ndarray, channels) -> float:
    """Largest of the channel rates and the Hamiltonian matrix elements."""
    rates = [rate for _, rate in channels]
    return max([float(np.max(np.abs(H)))] + rates)


def _rk4_direct(L: np.ndarray, v: np.ndarray, h: float, steps: int) -> np.ndarray:
    for _ in range(steps):
        k1 = L @ v
        k2 = L @ (v + 0.5 * h * k1)
        k3 = L @ (v + 0.5 * h * k2)
        k4 = L @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return v


def _rk4_squared(L: np.ndarray, v: np.ndarray, h: float, doublings: int) -> np.ndarray:
    # One RK4 step of a linear system is v -> (I + E) v with
    # E = hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24. Squaring (I + E) is carried
    # out on E alone, E <- 2E + E^2, which keeps rounding relative to E.
    n = L.shape[0]
    hL = h * L
    eye = np.eye(n, dtype=complex)
    E = hL / 4.0
    E = hL @ (eye + E) / 3.0
    E = hL @ (eye + E) / 2.0
    E = hL @ (eye + E)
    for _ in range(doublings):
        E = 2.0 * E + E @ E
    return v + E @ v


def evolve_rk4(H, channels, rho0, t_final: float, dt: float | None = None, max_halvings: int = 6) -> np.ndarray:
    """Classical RK4 integration of the master equation from ``rho0`` to ``t_final``.

    ``dt`` defaults to 0.02 over the characteristic rate and may not exceed
    0.1 over it. Long runs take 2**k equal steps and evaluate the k-fold
    product of the one-step map by repeated squaring, which is the same
    sequence of RK4 steps. The step is halved while the trace drifts more
    than 1e-8.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    if t_final == 0:
        return rho0.copy()
    H = np.asarray(H, dtype=complex)
    L = build_liouvillian(H, channels)
    if not np.any(L):
        return rho0.copy()
    rate = characteristic_rate(H, channels)
    dt_max = 0.1 / rate
    if dt is None:
        dt = 0.02 / rate
    elif dt > dt_max * (1 + 1e-12):
        raise ValueError(f"dt={dt:.3e} exceeds the stability bound {dt_max:.3e}")
    d = rho0.shape[0]
    v0 = vec(rho0)
    tr0 = np.trace(rho0)
    for _ in range(max_halvings + 1):
        steps = math.ceil(t_final / dt - 1e-9)
        if steps <= DIRECT_STEP_LIMIT:
            v = _rk4_direct(L, v0, t_final / steps, steps)
        else:
            k = math.ceil(math.log2(t_final / dt))
            v = _rk4_squared(L, v0, t_final / 2**k, k)
        rho = unvec(v, d)
        drift = abs(np.trace(rho) - tr0)
        if drift <= TRACE_DRIFT_TOL:
            return rho
        dt = 0.5 * dt
    raise StepSizeError(f"trace drift {drift:.3e} persists after {max_halvings} step halvings")


# ------------------------------------------------------------- observables


@dataclass(frozen=True)
class EmissionRate:
    total: float
    per_mode: tuple[float, float]


@dataclass(frozen=True)
class PhotonStatistics:
    n_mean: tuple[float, float]
    p_total: np.ndarray  # p_total[n] = probability of n photons in both modes together


def _space_of(result: SteadyResult) -> SpaceDescriptor:
    if result.space is None:
        raise ValueError("steady result carries no SpaceDescriptor")
    return result.space


def mean_photon_numbers(result: SteadyResult) -> tuple[float, float]:
    space = _space_of(result)
    return tuple(float(np.real(np.trace(result.rho @ qspace.number_operator(space, j)))) for j in (1, 2))


def emission_rate(result: SteadyResult, antenna: AntennaModel) -> EmissionRate:
    """Far-field photon rate  sum_j gamma_scat_j <a_j^dag a_j>."""
    n = mean_photon_numbers(result)
    per_mode = tuple(m.gamma_scat * nj for m, nj in zip(antenna.modes, n))
    return EmissionRate(total=float(sum(per_mode)), per_mode=per_mode)


def photon_statistics(result: SteadyResult) -> PhotonStatistics:
    space = _space_of(result)
    pops = np.real(np.diag(result.rho))
    totals = qspace.total_photon_numbers(space)
    p_total = np.bincount(totals, weights=pops, minlength=sum(space.mode_levels) - 1)
    return PhotonStatistics(n_mean=mean_photon_numbers(result), p_total=p_total)


def excitation_balance(result: SteadyResult, antenna: AntennaModel, emitter: EmitterModel) -> float:
    """Relative violation of  P p_g = gamma_fs p_e + sum_j Gamma_j <n_j>."""
    space = _space_of(result)
    p_e = float(np.real(np.trace(result.rho @ qspace.excited_projector(space))))
    p_g = 1.0 - p_e
    n = mean_photon_numbers(result)
    inflow = emitter.pump * p_g
    outflow = gamma_fs(emitter) * p_e + sum(m.gamma_total * nj for m, nj in zip(antenna.modes, n))
    return abs(inflow - outflow) / inflow

"""Operator algebra on the truncated space  mode1 (x) mode2 (x) emitter.

Operators and density matrices are plain complex ``numpy`` arrays. A
:class:`SpaceDescriptor` fixes the factor ordering and truncation; every
embedding in this module follows it, so basis index

    i = (n1 * M2 + n2) * 2 + s,        s = 0 -> |g>,  s = 1 -> |e>

where ``M2`` is the number of Fock levels kept for mode 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionError, InvalidStateError, NotHermitianError

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-9

GROUND, EXCITED = 0, 1


@dataclass(frozen=True)
class SpaceDescriptor:
    """Truncation of the two bosonic modes; the emitter is always two-level.

    ``mode_levels=(4, 4)`` keeps photon numbers 0..3 in each mode.
    """

    mode_levels: tuple[int, int] = (4, 4)
    emitter_levels: int = 2

    def __post_init__(self):
        levels = tuple(int(n) for n in self.mode_levels)
        if len(levels) != 2:
            raise ValueError(f"need exactly two modes, got {len(levels)}")
        if min(levels) < 2:
            raise ValueError(f"each mode needs at least 2 Fock levels, got {levels}")
        if self.emitter_levels != 2:
            raise ValueError("the emitter is a two-level system")
        object.__setattr__(self, "mode_levels", levels)

    @classmethod
    def uniform(cls, levels: int) -> "SpaceDescriptor":
        return cls((levels, levels))

    @property
    def photonic_dim(self) -> int:
        return self.mode_levels[0] * self.mode_levels[1]

    @property
    def dim(self) -> int:
        return self.photonic_dim * self.emitter_levels

    def index(self, n1: int, n2: int, s: int) -> int:
        return (n1 * self.mode_levels[1] + n2) * 2 + s

    def photonic_index(self, n1: int, n2: int) -> int:
        return n1 * self.mode_levels[1] + n2


def _ladder(levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, levels, dtype=float)), 1).astype(complex)


def _embed(space: SpaceDescriptor, op1=None, op2=None, op_qe=None) -> np.ndarray:
    m1, m2 = space.mode_levels
    f1 = np.eye(m1, dtype=complex) if op1 is None else op1
    f2 = np.eye(m2, dtype=complex) if op2 is None else op2
    f3 = np.eye(2, dtype=complex) if op_qe is None else op_qe
    return np.kron(np.kron(f1, f2), f3)


def identity(space: SpaceDescriptor) -> np.ndarray:
    return np.eye(space.dim, dtype=complex)


def annihilation(space: SpaceDescriptor, mode_index: int) -> np.ndarray:
    """Annihilation operator of mode 1 or 2 on the full space (hard Fock cutoff)."""
    if mode_index == 1:
        return _embed(space, op1=_ladder(space.mode_levels[0]))
    if mode_index == 2:
        return _embed(space, op2=_ladder(space.mode_levels[1]))
    raise ValueError(f"mode_index must be 1 or 2, got {mode_index!r}")


def sigma_minus(space: SpaceDescriptor) -> np.ndarray:
    """Emitter lowering operator |g><e| on the full space."""
    lower = np.zeros((2, 2), dtype=complex)
    lower[GROUND, EXCITED] = 1.0
    return _embed(space, op_qe=lower)


def sigma_plus(space: SpaceDescriptor) -> np.ndarray:
    return sigma_minus(space).conj().T


def number_operator(space: SpaceDescriptor, mode_index: int) -> np.ndarray:
    a = annihilation(space, mode_index)
    return a.conj().T @ a


def excited_projector(space: SpaceDescriptor) -> np.ndarray:
    sm = sigma_minus(space)
    return sm.conj().T @ sm


def excitation_number(space: SpaceDescriptor) -> np.ndarray:
    """sigma_+ sigma_- + a1^dag a1 + a2^dag a2; conserved by the RWA Hamiltonian."""
    return excited_projector(space) + number_operator(space, 1) + number_operator(space, 2)


def total_photon_numbers(space: SpaceDescriptor) -> np.ndarray:
    """n1 + n2 for every full-space basis index."""
    m1, m2 = space.mode_levels
    n1, n2, _ = np.meshgrid(np.arange(m1), np.arange(m2), np.arange(2), indexing="ij")
    return (n1 + n2).ravel()


def _require_square(m: np.ndarray, dim: int | None, what: str) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{what} must be a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise DimensionError(f"{what} has dimension {m.shape[0]}, expected {dim}")
    return m


def partial_trace_emitter(rho: np.ndarray, space: SpaceDescriptor) -> np.ndarray:
    """Trace out the emitter, leaving the mode1 (x) mode2 state."""
    rho = _require_square(rho, space.dim, "rho")
    d = space.photonic_dim
    return np.einsum("iaja->ij", rho.reshape(d, 2, d, 2))


def partial_transpose_mode2(rho_ph: np.ndarray, mode_levels: tuple[int, int]) -> np.ndarray:
    """Transpose the mode-2 indices of a two-mode photonic operator."""
    m1, m2 = mode_levels
    rho_ph = _require_square(rho_ph, m1 * m2, "photonic state")
    return rho_ph.reshape(m1, m2, m1, m2).transpose(0, 3, 2, 1).reshape(m1 * m2, m1 * m2)


def hermiticity_error(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _require_hermitian(m: np.ndarray) -> np.ndarray:
    m = _require_square(m, None, "matrix")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    err = hermiticity_error(m)
    if err > HERMITIAN_ATOL * scale:
        raise NotHermitianError(f"matrix is not Hermitian (max |m - m^H| = {err:.3e})")
    return m


def hermitian_eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvectors by cyclic Jacobi rotations."""
    m = _require_hermitian(m)
    sym = 0.5 * (m + m.conj().T)
    w, v, _ = _kernels.jacobi_eigh(sym)
    return w, v


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    return hermitian_eigh(m)[0]


def trace_norm(m: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(hermitian_eigenvalues(m))))


def check_density_matrix(rho: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Raise InvalidStateError unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = _require_square(rho, dim, "density matrix")
    herm = hermiticity_error(rho)
    if herm > HERMITIAN_ATOL:
        raise InvalidStateError(f"not Hermitian: max |rho - rho^H| = {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise InvalidStateError(f"trace is {tr}, expected 1")
    lam_min = hermitian_eigenvalues(rho)[0]
    if lam_min < -PSD_ATOL:
        raise InvalidStateError(f"not positive semidefinite: min eigenvalue {lam_min:.3e}")
    return rho


def ket(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def embed_photonic_state(rho_ph: np.ndarray, rho_qe: np.ndarray) -> np.ndarray:
    """rho_ph (x) rho_qe in the fixed ordering."""
    return np.kron(rho_ph, rho_qe)

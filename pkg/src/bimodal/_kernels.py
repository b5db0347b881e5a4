"""Hot numerical kernels, each in a numba flavour and a numpy flavour.

The public names at the bottom (``jacobi_eigh``, ``two_lorentzian_power``,
``two_lorentzian_jacobian``) are bound to whichever backend ``_accel``
selected. Both flavours stay importable so tests and the benchmark can
compare them directly.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import USE_NUMBA, njit

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


# --------------------------------------------------------------------------
# Cyclic complex Jacobi eigensolver for Hermitian matrices
# --------------------------------------------------------------------------
#
# Each rotation acts on the (p, q) plane with
#
#     G = [[c,            s           ],
#          [-s*conj(e),   c*conj(e)   ]]      e = a_pq / |a_pq|
#
# i.e. a phase that makes a_pq real followed by the real Jacobi rotation of
# Numerical Recipes. A <- G^H A G zeroes a_pq; V <- V G accumulates vectors.


def _rotation(app, aqq, apq):
    mag = abs(apq)
    theta = (aqq - app) / (2.0 * mag)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    return c, s, (apq / mag).conjugate()


def _jacobi_eigh_loop(m, tol, max_sweeps):
    n = m.shape[0]
    a = m.copy()
    v = np.eye(n, dtype=np.complex128)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = 0.0
        total = 0.0
        for i in range(n):
            for j in range(n):
                sq = a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
                total += sq
                if i != j:
                    off += sq
        off = math.sqrt(off)
        total = math.sqrt(total)
        if off <= tol * total or total == 0.0:
            sweeps -= 1
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ec = (apq / mag).conjugate()
                gqp = -s * ec
                gqq = c * ec
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * c + akq * gqp
                    a[k, q] = akp * s + akq * gqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk + gqp.conjugate() * aqk
                    a[q, k] = s * apk + gqq.conjugate() * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * c + vkq * gqp
                    v[k, q] = vkp * s + vkq * gqq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(w)
    return w[order], v[:, order], sweeps


def jacobi_eigh_numpy(m, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Row/column-sliced version of the cyclic Jacobi sweep."""
    a = np.array(m, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    offdiag = ~np.eye(n, dtype=bool)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        total = float(np.sqrt(np.sum(np.abs(a) ** 2)))
        off = float(np.sqrt(np.sum(np.abs(a[offdiag]) ** 2)))  # summed directly: no cancellation
        if off <= tol * total or total == 0.0:
            sweeps -= 1
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0:
                    continue
                c, s, ec = _rotation(a[p, p].real, a[q, q].real, complex(apq))
                g = np.array([[c, s], [-s * ec, c * ec]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps


# --------------------------------------------------------------------------
# Two-oscillator power model  P(w) = sum_j E_j^2 / ((w0_j^2 - w^2)^2 + (G_j w)^2)
# --------------------------------------------------------------------------
# params layout: [w0_1, gamma_1, amp_1, w0_2, gamma_2, amp_2]


def _power_loop(omega, params):
    out = np.zeros(omega.shape[0])
    for i in range(omega.shape[0]):
        w2 = omega[i] * omega[i]
        acc = 0.0
        for j in range(2):
            w0 = params[3 * j]
            g = params[3 * j + 1]
            e = params[3 * j + 2]
            re = w0 * w0 - w2
            im = g * omega[i]
            acc += e * e / (re * re + im * im)
        out[i] = acc
    return out


def _jacobian_loop(omega, params, rel_step):
    npts = omega.shape[0]
    npar = params.shape[0]
    jac = np.empty((npts, npar))
    work = params.copy()
    for k in range(npar):
        h = rel_step * abs(params[k])
        if h == 0.0:
            h = rel_step
        for i in range(npts):
            w2 = omega[i] * omega[i]
            diff = 0.0
            for sign in (1.0, -1.0):
                work[k] = params[k] + sign * h
                acc = 0.0
                for j in range(2):
                    re = work[3 * j] * work[3 * j] - w2
                    im = work[3 * j + 1] * omega[i]
                    acc += work[3 * j + 2] * work[3 * j + 2] / (re * re + im * im)
                diff += sign * acc
            jac[i, k] = diff / (2.0 * h)
        work[k] = params[k]
    return jac


def two_lorentzian_power_numpy(omega, params):
    omega = np.asarray(omega, dtype=float)
    p = np.asarray(params, dtype=float).reshape(2, 3)
    w0, g, e = p[:, 0:1], p[:, 1:2], p[:, 2:3]
    denom = (w0**2 - omega**2) ** 2 + (g * omega) ** 2
    return np.sum(e**2 / denom, axis=0)


def two_lorentzian_jacobian_numpy(omega, params, rel_step=1e-6):
    params = np.asarray(params, dtype=float)
    h = rel_step * np.abs(params)
    h[h == 0.0] = rel_step
    jac = np.empty((np.size(omega), params.size))
    for k in range(params.size):
        up = params.copy()
        down = params.copy()
        up[k] += h[k]
        down[k] -= h[k]
        jac[:, k] = (two_lorentzian_power_numpy(omega, up) - two_lorentzian_power_numpy(omega, down)) / (
            2.0 * h[k]
        )
    return jac


# --------------------------------------------------------------------------
# Compiled variants and dispatch
# --------------------------------------------------------------------------

_jacobi_eigh_jit = njit(_jacobi_eigh_loop)
_power_jit = njit(_power_loop)
_jacobian_jit = njit(_jacobian_loop)


def jacobi_eigh_numba(m, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    if _jacobi_eigh_jit is None:
        raise RuntimeError("numba is not available")
    return _jacobi_eigh_jit(np.ascontiguousarray(m, dtype=np.complex128), float(tol), int(max_sweeps))


def two_lorentzian_power_numba(omega, params):
    if _power_jit is None:
        raise RuntimeError("numba is not available")
    return _power_jit(np.ascontiguousarray(omega, dtype=np.float64), np.ascontiguousarray(params, dtype=np.float64))


def two_lorentzian_jacobian_numba(omega, params, rel_step=1e-6):
    if _jacobian_jit is None:
        raise RuntimeError("numba is not available")
    return _jacobian_jit(
        np.ascontiguousarray(omega, dtype=np.float64),
        np.ascontiguousarray(params, dtype=np.float64),
        float(rel_step),
    )


if USE_NUMBA:
    jacobi_eigh = jacobi_eigh_numba
    two_lorentzian_power = two_lorentzian_power_numba
    two_lorentzian_jacobian = two_lorentzian_jacobian_numba
else:
    jacobi_eigh = jacobi_eigh_numpy
    two_lorentzian_power = two_lorentzian_power_numpy
    two_lorentzian_jacobian = two_lorentzian_jacobian_numpy

"""Two-oscillator fits of scattering/absorption spectra and the mode parameters they imply.

Each resonance is a driven damped oscillator with complex amplitude

    A(w) = E / (w0^2 - w^2 + i G w)

and a spectrum is modelled as the incoherent sum  P(w) = |A_1(w)|^2 + |A_2(w)|^2.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks, peak_widths

from . import _kernels
from .errors import FitError
from .model import THZ, AntennaModel, EmitterModel, ModeRecord, gamma_fs

CHANNELS = ("scat", "abs")
MIN_POINTS = 16
CSV_HEADER = ("omega_thz_over_2pi", "power")
CENTER_MISMATCH = 0.02


@dataclass(frozen=True)
class SpectrumSeries:
    channel: str
    omega: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"channel must be one of {CHANNELS}, got {self.channel!r}")
        omega = np.asarray(self.omega, dtype=float)
        power = np.asarray(self.power, dtype=float)
        if omega.ndim != 1 or omega.shape != power.shape:
            raise ValueError("omega and power must be 1-d arrays of equal length")
        if omega.size < MIN_POINTS:
            raise ValueError(f"a spectrum needs at least {MIN_POINTS} points, got {omega.size}")
        if np.any(np.diff(omega) <= 0):
            raise ValueError("omega must be strictly increasing")
        if np.any(power < 0):
            raise ValueError("powers must be non-negative")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "power", power)


@dataclass(frozen=True)
class LorentzianFitResult:
    """Two resonances of one channel, modes sorted by centre frequency (rad/s)."""

    omega0: tuple[float, float]
    gamma: tuple[float, float]
    amp: tuple[float, float]
    channel: str = "scat"
    rms_residual: float = 0.0
    converged: bool = True
    iterations: int = 0
    cost_history: tuple[float, ...] = field(default=(), repr=False)

    def as_vector(self) -> np.ndarray:
        return np.array(
            [self.omega0[0], self.gamma[0], self.amp[0], self.omega0[1], self.gamma[1], self.amp[1]], dtype=float
        )


def lorentzian_amplitude(omega, omega0, gamma, amp):
    """Complex steady-state amplitude of a driven damped oscillator."""
    omega = np.asarray(omega, dtype=float)
    return amp / (omega0**2 - omega**2 + 1j * gamma * omega)


def model_power(omega, params) -> np.ndarray:
    """Sum of the two squared oscillator amplitudes; ``params`` as in ``as_vector``."""
    if isinstance(params, LorentzianFitResult):
        params = params.as_vector()
    return _kernels.two_lorentzian_power(np.asarray(omega, dtype=float), np.asarray(params, dtype=float))


def params_for_antenna(antenna: AntennaModel, channel: str) -> LorentzianFitResult:
    """Oscillator parameters with unit peak height for one channel of an antenna."""
    widths = [m.gamma_scat if channel == "scat" else m.gamma_abs for m in antenna.modes]
    omegas = [m.omega for m in antenna.modes]
    return LorentzianFitResult(
        omega0=tuple(omegas),
        gamma=tuple(widths),
        amp=tuple(g * w for g, w in zip(widths, omegas)),
        channel=channel,
    )


def synth_spectrum(params: LorentzianFitResult, grid, noise_rel: float = 0.0, seed=None, channel=None) -> SpectrumSeries:
    """Sample the model on ``grid`` with multiplicative Gaussian noise."""
    grid = np.asarray(grid, dtype=float)
    power = model_power(grid, params)
    if noise_rel > 0:
        rng = np.random.default_rng(seed)
        power = np.clip(power * (1.0 + noise_rel * rng.standard_normal(grid.size)), 0.0, None)
    return SpectrumSeries(channel=channel or params.channel, omega=grid, power=power)


# ------------------------------------------------------------------ fitting


def initial_guess(series: SpectrumSeries) -> LorentzianFitResult:
    """Two most prominent local maxima, half-prominence widths, matching drive strengths."""
    peaks, props = find_peaks(series.power, prominence=0.0)
    if peaks.size < 2:
        raise FitError(f"fewer than two peaks detected in the {series.channel} spectrum")
    top = peaks[np.argsort(props["prominences"])[::-1][:2]]
    top = np.sort(top)
    widths_idx, _, left, right = peak_widths(series.power, top, rel_height=0.5)
    index = np.arange(series.omega.size)
    omega0, gamma, amp = [], [], []
    for k, i in enumerate(top):
        w0 = series.omega[i]
        g = float(np.interp(right[k], index, series.omega) - np.interp(left[k], index, series.omega))
        if not g > 0:
            g = float(series.omega[min(i + 1, index[-1])] - series.omega[max(i - 1, 0)])
        omega0.append(float(w0))
        gamma.append(g)
        amp.append(math.sqrt(series.power[i]) * g * w0)
    return LorentzianFitResult(omega0=tuple(omega0), gamma=tuple(gamma), amp=tuple(amp), channel=series.channel)


def _window_mask(omega, init: LorentzianFitResult, window: float) -> np.ndarray:
    mask = np.zeros(omega.size, dtype=bool)
    for w0, g in zip(init.omega0, init.gamma):
        mask |= np.abs(omega - w0) <= window * g
    if mask.sum() < MIN_POINTS:
        mask[:] = True
    return mask


def fit_two_lorentzians(
    series: SpectrumSeries,
    init: LorentzianFitResult | None = None,
    window: float = 3.0,
    max_iter: int = 200,
    ftol: float = 1e-12,
    rel_step: float = 1e-6,
) -> LorentzianFitResult:
    """Levenberg-Marquardt least squares of the two-oscillator power model.

    Frequencies are rescaled by the mean grid frequency and powers by their
    maximum before fitting. The Jacobian is a central difference with
    relative step ``rel_step``. Stops when an accepted step changes the cost
    by less than ``ftol`` relative, when no damping yields a decrease, or
    after ``max_iter`` iterations (reported as not converged).
    """
    if init is None:
        init = initial_guess(series)
    mask = _window_mask(series.omega, init, window)
    w_ref = float(np.mean(series.omega))
    p_ref = float(np.max(series.power[mask])) or 1.0
    u = series.omega[mask] / w_ref
    y = series.power[mask] / p_ref
    x = init.as_vector() / np.array([w_ref, w_ref, w_ref**2 * math.sqrt(p_ref)] * 2)

    def residual(params):
        return _kernels.two_lorentzian_power(u, params) - y

    r = residual(x)
    cost = 0.5 * float(r @ r)
    history = [cost]
    lam = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if cost == 0.0:
            converged = True
            break
        jac = _kernels.two_lorentzian_jacobian(u, x, rel_step)
        jtj = jac.T @ jac
        grad = jac.T @ r
        diag = np.diag(jtj).copy()
        diag[diag == 0.0] = 1.0
        accepted = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            x_new = x + step
            r_new = residual(x_new)
            cost_new = 0.5 * float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            converged = True  # no damped step lowers the cost any further
            break
        rel_change = (cost - cost_new) / cost
        x, r, cost = x_new, r_new, cost_new
        history.append(cost)
        lam = max(lam / 10.0, 1e-15)
        if rel_change < ftol:
            converged = True
            break

    phys = x * np.array([w_ref, w_ref, w_ref**2 * math.sqrt(p_ref)] * 2)
    modes = sorted(((phys[0], abs(phys[1]), abs(phys[2])), (phys[3], abs(phys[4]), abs(phys[5]))))
    lo, hi = series.omega[0], series.omega[-1]
    in_range = all(lo <= m[0] <= hi for m in modes)
    return LorentzianFitResult(
        omega0=(float(modes[0][0]), float(modes[1][0])),
        gamma=(float(modes[0][1]), float(modes[1][1])),
        amp=(float(modes[0][2]), float(modes[1][2])),
        channel=series.channel,
        rms_residual=float(math.sqrt(np.mean(r**2)) * p_ref),
        converged=bool(converged and in_range),
        iterations=it,
        cost_history=tuple(history),
    )


# ---------------------------------------------------- characterization


def characterize(
    fit_scat: LorentzianFitResult,
    fit_abs: LorentzianFitResult,
    purcell_f,
    emitter: EmitterModel,
    label: str = "fitted",
    require_converged: bool = True,
) -> AntennaModel:
    """Mode table from a scattering fit, an absorption fit and partial Purcell factors.

    kappa_j = sqrt(f_j Gamma_j gamma_fs / (4 eta_j)) with Gamma_j the total
    width and eta_j its scattering fraction; the centre frequency is taken
    from the scattering fit.
    """
    for fit in (fit_scat, fit_abs):
        if require_converged and not fit.converged:
            raise FitError(f"{fit.channel} fit did not converge")
    g_fs = gamma_fs(emitter)
    modes = []
    for j in range(2):
        w_s, w_a = fit_scat.omega0[j], fit_abs.omega0[j]
        if abs(w_s - w_a) > CENTER_MISMATCH * w_s:
            raise FitError(
                f"mode {j + 1}: scattering and absorption centres differ by "
                f"{100 * abs(w_s - w_a) / w_s:.2f}% (limit {100 * CENTER_MISMATCH:.0f}%)"
            )
        f = float(purcell_f[j])
        if not f > 0:
            raise ValueError("partial Purcell factors must be positive")
        g_scat, g_abs = fit_scat.gamma[j], fit_abs.gamma[j]
        g_tot = g_scat + g_abs
        eta = g_scat / g_tot
        kappa = math.sqrt(f * g_tot * g_fs / (4.0 * eta))
        modes.append(ModeRecord(omega=w_s, gamma_scat=g_scat, gamma_abs=g_abs, kappa_max=kappa, purcell_f=f))
    return AntennaModel(label=label, modes=tuple(modes), reference_dipole=emitter.dipole_d)


@dataclass(frozen=True)
class PurcellFactors:
    f_cqed: float
    contributions: tuple[float, float]
    f_class: float


def purcell_cqed(antenna: AntennaModel, emitter: EmitterModel) -> PurcellFactors:
    """Cavity-QED enhancement at the emitter frequency next to the classical one."""
    g_fs = gamma_fs(emitter)
    scale = emitter.dipole_d / antenna.reference_dipole
    contrib = []
    for m in antenna.modes:
        kappa = m.kappa_max * scale
        lorentz = (m.gamma_total / 2.0) ** 2 + (m.omega - emitter.omega_qe) ** 2
        contrib.append(m.efficiency * kappa**2 * m.gamma_total / (lorentz * g_fs))
    f_class = 1.0 + sum(m.purcell_f for m in antenna.modes)
    return PurcellFactors(f_cqed=1.0 + sum(contrib), contributions=tuple(contrib), f_class=f_class)


# ------------------------------------------------------------------ files


def read_spectrum_csv(path, channel: str) -> SpectrumSeries:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(CSV_HEADER)}")
        rows = [(float(a), float(b)) for a, b in (row for row in reader if row)]
    data = np.array(rows, dtype=float).reshape(-1, 2)
    return SpectrumSeries(channel=channel, omega=data[:, 0] * THZ, power=data[:, 1])


def write_spectrum_csv(series: SpectrumSeries, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for w, p in zip(series.omega, series.power):
            writer.writerow((repr(float(w / THZ)), repr(float(p))))

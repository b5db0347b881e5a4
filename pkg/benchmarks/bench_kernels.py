"""Time the numba kernels against their numpy twins and check they agree.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]

Both variants are called directly, so the ``BIMODAL_DISABLE_NUMBA`` flag
does not matter here. The first numba call (compile or cache load) is
excluded from the timings.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from bimodal import _kernels as K


def random_hermitian(n: int, rng) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def best_of(fn, repeat: int) -> float:
    fn()  # warm-up
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)

    print(f"{'kernel':<28}{'numpy':>12}{'numba':>12}{'speed-up':>10}{'max diff':>12}")
    for n in (8, 16, 32):
        m = random_hermitian(n, rng)
        t_np = best_of(lambda: K.jacobi_eigh_numpy(m), args.repeat)
        t_nb = best_of(lambda: K.jacobi_eigh_numba(m), args.repeat)
        diff = np.max(np.abs(np.sort(K.jacobi_eigh_numpy(m)[0]) - np.sort(K.jacobi_eigh_numba(m)[0])))
        print(f"{f'jacobi eigh n={n}':<28}{t_np * 1e3:>10.3f}ms{t_nb * 1e3:>10.3f}ms{t_np / t_nb:>9.1f}x{diff:>12.1e}")

    params = np.array([1.0, 0.05, 0.8, 1.04, 0.06, 0.5])  # omega0, gamma, amp for two modes (scaled units)
    for npts in (401, 4001):
        w = np.linspace(0.8, 1.2, npts)
        rows = [
            ("power", K.two_lorentzian_power_numpy, K.two_lorentzian_power_numba),
            ("jacobian", K.two_lorentzian_jacobian_numpy, K.two_lorentzian_jacobian_numba),
        ]
        for label, f_np, f_nb in rows:
            t_np = best_of(lambda: f_np(w, params), args.repeat)
            t_nb = best_of(lambda: f_nb(w, params), args.repeat)
            diff = np.max(np.abs(f_np(w, params) - f_nb(w, params)))
            print(f"{f'lorentzian {label} n={npts}':<28}{t_np * 1e3:>10.3f}ms{t_nb * 1e3:>10.3f}ms"
                  f"{t_np / t_nb:>9.1f}x{diff:>12.1e}")


if __name__ == "__main__":
    main()

import math

import numpy as np
import pytest

from bimodal import model, qspace, steady
from bimodal.errors import DegenerateSteadyStateError, DimensionError, NotHermitianError, StepSizeError
from bimodal.model import Channel
from bimodal.qspace import SpaceDescriptor


def random_density(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def device(dl=0, levels=(4, 4), **changes):
    sp = SpaceDescriptor(levels)
    ant = model.table1_antenna(dl)
    em = model.default_emitter(ant, **changes)
    return sp, ant, em


def test_vec_convention():
    x = np.arange(9.0).reshape(3, 3)
    a = np.random.default_rng(0).normal(size=(3, 3))
    b = np.random.default_rng(1).normal(size=(3, 3))
    assert np.allclose(np.kron(a, b) @ steady.vec(x), steady.vec(b @ x @ a.T))
    assert np.array_equal(steady.unvec(steady.vec(x)), x)


def test_single_photon_decay_generator():
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    gamma = 2.5
    L = steady.build_liouvillian(np.zeros((2, 2)), [(a, gamma)])
    out = steady.unvec(L @ steady.vec(np.diag([0.0, 1.0])))
    assert np.allclose(out, gamma * np.diag([1.0, -1.0]))


def test_no_channels_fixes_commuting_states():
    rng = np.random.default_rng(2)
    h = rng.normal(size=(4, 4))
    h = h + h.T
    w, v = np.linalg.eigh(h)
    rho = v @ np.diag([0.1, 0.2, 0.3, 0.4]) @ v.T
    L = steady.build_liouvillian(h, [])
    assert np.max(np.abs(L @ steady.vec(rho))) <= 1e-12


def test_liouvillian_matches_direct_rhs():
    sp, ant, em = device(levels=(2, 3), theta_deg=20.0)
    h = model.build_hamiltonian(sp, ant, em)
    ch = model.build_collapse_channels(sp, ant, em)
    L = steady.build_liouvillian(h, ch)
    rng = np.random.default_rng(3)
    for _ in range(3):
        x = rng.normal(size=(sp.dim, sp.dim)) + 1j * rng.normal(size=(sp.dim, sp.dim))
        got = steady.unvec(L @ steady.vec(x))
        assert np.max(np.abs(got - steady.master_rhs(h, ch, x))) <= 1e-12 * np.max(np.abs(L)) * np.max(np.abs(x))


def test_liouvillian_flow_is_trace_free_and_hermitian():
    sp, ant, em = device(levels=(3, 3), theta_deg=60.0)
    L = steady.build_liouvillian(model.build_hamiltonian(sp, ant, em), model.build_collapse_channels(sp, ant, em))
    rng = np.random.default_rng(4)
    scale = np.max(np.abs(L))
    for _ in range(3):
        x = rng.normal(size=(sp.dim, sp.dim)) + 1j * rng.normal(size=(sp.dim, sp.dim))
        x = x + x.conj().T
        y = steady.unvec(L @ steady.vec(x))
        assert abs(np.trace(y)) <= 1e-10 * scale * np.max(np.abs(x))
        assert np.max(np.abs(y - y.conj().T)) <= 1e-10 * scale * np.max(np.abs(x))


def test_liouvillian_input_checks():
    with pytest.raises(NotHermitianError):
        steady.build_liouvillian(np.array([[0, 1], [0, 0]]), [])
    with pytest.raises(DimensionError):
        steady.build_liouvillian(np.eye(2), [(np.eye(3), 1.0)])
    with pytest.raises(ValueError):
        steady.build_liouvillian(np.eye(2), [(np.eye(2), -1.0)])


@pytest.mark.parametrize("pump", [1e6, 1e8, 1e10])
def test_decoupled_emitter_population(pump):
    sp, ant, em = device(pump=pump)
    ant = ant.with_kappas((0.0, 0.0))
    res = steady.steady_state(sp, ant, em)
    g = model.gamma_fs(em)
    assert res.observables["p_e"] == pytest.approx(pump / (pump + g), rel=1e-10)
    expected = np.zeros((sp.dim, sp.dim))
    expected[0, 0], expected[1, 1] = g / (pump + g), pump / (pump + g)
    assert np.max(np.abs(res.rho - expected)) <= 1e-12


def test_no_pump_gives_ground_state():
    sp, ant, em = device(pump=0.0, theta_deg=30.0)
    res = steady.steady_state(sp, ant, em)
    ground = np.zeros((sp.dim, sp.dim))
    ground[0, 0] = 1.0
    assert np.max(np.abs(res.rho - ground)) <= 1e-12


def test_table_antenna_photon_numbers():
    sp, ant, em = device(pump=1e9)
    res = steady.steady_state(sp, ant, em)
    qspace.check_density_matrix(res.rho)
    n1, n2 = steady.mean_photon_numbers(res)
    assert 1e-6 <= n1 <= 1e-4 and 1e-6 <= n2 <= 1e-4
    L = steady.build_liouvillian(model.build_hamiltonian(sp, ant, em), model.build_collapse_channels(sp, ant, em))
    assert res.residual <= steady.RESIDUAL_RTOL * max(1.0, np.max(np.abs(L)))


def test_degenerate_manifold_raises():
    with pytest.raises(DegenerateSteadyStateError):
        steady.solve_steady(steady.build_liouvillian(np.diag([0.0, 1.0, 2.0]), []))


def test_solve_dimension_checks():
    with pytest.raises(DimensionError):
        steady.solve_steady(np.zeros((5, 5)))
    with pytest.raises(DimensionError):
        steady.solve_steady(np.zeros((16, 16)), SpaceDescriptor((2, 2)))


def test_rk4_zero_generator_returns_input():
    rho0 = random_density(4, np.random.default_rng(5))
    out = steady.evolve_rk4(np.zeros((4, 4)), [], rho0, 1.0)
    assert np.array_equal(out, rho0)


@pytest.mark.parametrize("t_final", [0.3, 2.0, 40.0])
def test_rk4_exponential_decay(t_final):
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    rho0 = np.diag([0.0, 1.0]).astype(complex)
    gamma = 1.7
    rho = steady.evolve_rk4(np.zeros((2, 2)), [Channel(a, gamma)], rho0, t_final)
    assert abs(rho[1, 1].real - math.exp(-gamma * t_final)) <= 1e-8


def test_rk4_squaring_matches_direct_steps():
    sp, ant, em = device(levels=(2, 2), theta_deg=10.0)
    h = model.build_hamiltonian(sp, ant, em)
    ch = model.build_collapse_channels(sp, ant, em)
    L = steady.build_liouvillian(h, ch)
    v0 = steady.vec(random_density(sp.dim, np.random.default_rng(6)))
    step = 0.05 / steady.characteristic_rate(h, ch)
    direct = steady._rk4_direct(L, v0, step, 64)
    squared = steady._rk4_squared(L, v0, step, 6)
    assert np.max(np.abs(direct - squared)) <= 1e-12


def test_rk4_rejects_large_step_and_negative_time():
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(ValueError):
        steady.evolve_rk4(np.zeros((2, 2)), [(a, 1.0)], np.eye(2) / 2, 1.0, dt=0.2)
    with pytest.raises(ValueError):
        steady.evolve_rk4(np.zeros((2, 2)), [(a, 1.0)], np.eye(2) / 2, -1.0)


def test_rk4_step_size_error(monkeypatch):
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    monkeypatch.setattr(steady, "TRACE_DRIFT_TOL", -1.0)
    with pytest.raises(StepSizeError):
        steady.evolve_rk4(np.zeros((2, 2)), [(a, 1.0)], np.eye(2) / 2, 1.0, max_halvings=1)


def test_rk4_oracle_small_space():
    sp, ant, em = device(levels=(2, 2), theta_deg=0.0)
    h = model.build_hamiltonian(sp, ant, em)
    ch = model.build_collapse_channels(sp, ant, em)
    res = steady.solve_steady(steady.build_liouvillian(h, ch), sp)
    rho0 = np.zeros((sp.dim, sp.dim), dtype=complex)
    rho0[0, 0] = 1.0
    rho = steady.evolve_rk4(h, ch, rho0, 50.0 / min(r for _, r in ch))
    assert np.max(np.abs(rho - res.rho)) <= 1e-6


def test_emission_rate_cases():
    sp, ant, em = device(pump=0.0)
    assert steady.emission_rate(steady.steady_state(sp, ant, em), ant).total == 0.0
    sp, ant, em = device(pump=1e9, theta_deg=45.0)
    r = steady.emission_rate(steady.steady_state(sp, ant, em), ant)
    assert r.per_mode[0] == pytest.approx(0.0, abs=1e-12 * r.total)
    assert r.per_mode[1] == pytest.approx(r.total)
    assert r.total > 0


def test_photon_statistics_consistency():
    sp, ant, em = device(pump=1e9, theta_deg=90.0)
    res = steady.steady_state(sp, ant, em)
    stats = steady.photon_statistics(res)
    assert len(stats.p_total) == 7
    assert abs(stats.p_total.sum() - 1.0) <= 1e-10
    assert stats.p_total[1] == pytest.approx(sum(stats.n_mean), rel=1e-6)


@pytest.mark.parametrize("dl,theta,pump", [(12, 0.0, 1e8), (81, 123.0, 5e9), (105, 90.0, 1e10)])
def test_excitation_balance(dl, theta, pump):
    sp, ant, em = device(dl, pump=pump, theta_deg=theta)
    res = steady.steady_state(sp, ant, em)
    assert steady.excitation_balance(res, ant, em) <= 1e-8


def test_rate_monotone_in_pump():
    sp, ant, em = device(levels=(3, 3))
    rates = [
        steady.emission_rate(steady.steady_state(sp, ant, em.replace(pump=p)), ant).total
        for p in np.geomspace(1e6, 1e10, 20)
    ]
    assert all(b >= a for a, b in zip(rates, rates[1:]))

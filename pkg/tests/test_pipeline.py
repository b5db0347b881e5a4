import math
import warnings

import pytest

from bimodal import config, model, pipeline
from bimodal.errors import VacuumStateWarning
from bimodal.model import THZ, AntennaModel, ModeRecord
from bimodal.qspace import SpaceDescriptor


def test_evaluate_keys_and_anchor_values():
    ant = model.table1_antenna(0)
    obs = pipeline.evaluate(ant, model.default_emitter(ant))
    assert tuple(obs) == config.OBSERVABLES
    assert 1e8 < obs["rate"] < 1e10
    assert obs["rate"] == pytest.approx(obs["rate_1"] + obs["rate_2"])
    assert obs["p_0"] + obs["p_1"] + obs["p_2"] == pytest.approx(1.0, abs=1e-12)
    assert 0.5 < obs["e_n"] <= 1.0
    assert -13 <= obs["log10_p2_over_p1"] <= -7


def test_vacuum_warns_and_reports_zero():
    ant = model.table1_antenna(0)
    with pytest.warns(VacuumStateWarning):
        obs = pipeline.evaluate(ant, model.default_emitter(ant, pump=0.0))
    for k in ("rate", "n_1", "n_2", "p_1", "p_2", "e_n", "p_bell", "p_e"):
        assert obs[k] == 0.0
    assert math.isnan(obs["log10_p2_over_p1"])


def test_decoupled_debug_population():
    ant = model.table1_antenna(0).with_kappas((0.0, 0.0))
    em = model.default_emitter(ant, pump=3e8)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", VacuumStateWarning)
        obs = pipeline.evaluate(ant, em)
    assert obs["p_e"] == pytest.approx(3e8 / (3e8 + model.gamma_fs(em)), rel=1e-10)


def test_symmetric_antenna_optimum_at_midpoint():
    m1 = ModeRecord.from_thz(380.0, 15.0, 17.0, 2.0)
    m2 = ModeRecord.from_thz(395.0, 15.0, 17.0, 2.0)
    ant = AntennaModel("sym", (m1, m2))
    opt = pipeline.find_optimum(ant, model.default_emitter(ant), SpaceDescriptor((2, 2)))
    assert abs(opt.omega_qe_opt - ant.midpoint) <= opt.tolerance
    assert not opt.shifted
    assert opt.tolerance == pytest.approx(1e-4 * 15.0 * THZ)


def test_search_interval():
    ant = model.table1_antenna(0)
    lo, hi = pipeline.search_interval(ant)
    assert lo == pytest.approx((358 - 34.9) * THZ) and hi == pytest.approx((374 + 34.9) * THZ)


def test_asymmetric_antenna_optimum_shifted():
    ant = model.table1_antenna(24)
    opt = pipeline.find_optimum(ant, model.default_emitter(ant), SpaceDescriptor((2, 2)))
    assert opt.shifted
    lo, hi = pipeline.search_interval(ant)
    assert lo <= opt.omega_qe_opt <= hi


def test_resolve_emitter():
    cfg = config.from_dict({"antenna": {"table1_delta_l_nm": 0}, "emitter": {"omega_qe_thz_over_2pi": 361.5}})
    em, opt = pipeline.resolve_emitter(cfg)
    assert opt is None and em.omega_qe == pytest.approx(361.5 * THZ)

import numpy as np
import pytest

from twolevel.core import ModelError, ModeSet, TimeGrid, TwoLevelParams, TwoLevelState
from twolevel.dephasing import compare_models, decoherence_exponent, dephasing_coherence
from twolevel.evolution import propagate
from twolevel.kernel import kernel_from_modes
from twolevel.oracle import dephasing_oracle
from twolevel.volterra import solve_u


def spread_modes(K=50):
    return ModeSet(0.05 + 0.04 * np.arange(K), np.full(K, 0.04))


def test_initial_value_and_bounds():
    res = dephasing_coherence(spread_modes(), TimeGrid(40.0, 4000))
    assert res.coherence_magnitude[0] == 1.0
    assert np.all((res.coherence_magnitude >= 0) & (res.coherence_magnitude <= 1))
    assert res.population_drift == 0.0


def test_closed_form_exponent():
    m = ModeSet([0.7, 1.9, 2.4], [0.1, 0.05, 0.2])
    grid = TimeGrid(20.0, 500)
    for s in (1.0, 0.5):
        res = dephasing_coherence(m, grid, s)
        assert np.allclose(res.coherence_magnitude, np.exp(-decoherence_exponent(m, grid.times, s)), rtol=1e-13, atol=0)


def test_short_time_quadratic_onset():
    m = ModeSet([0.7, 1.9, 2.4], [0.1, 0.05, 0.2])
    coeff = 2 * np.sum(m.couplings**2)
    t = np.array([1e-3, 2e-3, 4e-3])
    D = dephasing_coherence(m, TimeGrid(4e-3, 4)).coherence_magnitude
    D = D[[1, 2, 4]]
    est = (1 - D) / t**2
    assert np.allclose(est, coeff, rtol=1e-4)


def test_single_mode_periodic():
    w = 1.3
    m = ModeSet([w], [0.2])
    period = 2 * np.pi / w
    grid = TimeGrid(3 * period, 3000)
    D = dephasing_coherence(m, grid).coherence_magnitude
    assert np.max(np.abs(D[:1001] - D[1000:2001])) < 1e-12
    assert D[1000] == pytest.approx(1.0, abs=1e-12)
    assert D.min() < 0.9


def test_two_modes_factorise():
    a, b = ModeSet([0.8], [0.15]), ModeSet([1.7], [0.25])
    both = ModeSet([0.8, 1.7], [0.15, 0.25])
    grid = TimeGrid(15.0, 300)
    Da = dephasing_coherence(a, grid).coherence_magnitude
    Db = dephasing_coherence(b, grid).coherence_magnitude
    assert np.allclose(dephasing_coherence(both, grid).coherence_magnitude, Da * Db, rtol=1e-13)


def test_population_constant_in_trajectory():
    res = dephasing_coherence(spread_modes(), TimeGrid(40.0, 4000))
    tr = res.trajectory(TwoLevelState(0.3, 0.2), omega0=1.0)
    assert np.max(np.abs(tr.rho_ee - tr.rho_ee[0])) == 0.0


def test_scale_option_validated():
    with pytest.raises(ModelError):
        dephasing_coherence(spread_modes(), TimeGrid(1.0, 10), z_coupling_scale=2.0)


@pytest.mark.parametrize("m", [ModeSet([1.0], [0.1]), ModeSet([0.9, 1.6], [0.15, 0.1])], ids=["K1", "K2"])
def test_matches_oracle(m):
    grid = TimeGrid(12.0, 120)
    closed = dephasing_coherence(m, grid).coherence_magnitude * 0.5
    brute = dephasing_oracle(m, 30, grid, TwoLevelState(0.5, 0.5))
    assert np.max(np.abs(closed - brute)) < 1e-6


def test_half_scale_matches_oracle():
    m = ModeSet([1.0], [0.3])
    grid = TimeGrid(8.0, 80)
    closed = dephasing_coherence(m, grid, 0.5).coherence_magnitude
    brute = dephasing_oracle(m, 30, grid, TwoLevelState(0.5, 0.5), z_coupling_scale=0.5) / 0.5
    assert np.max(np.abs(closed - brute)) < 1e-6


class TestCompare:
    def test_many_modes_contrast(self):
        m = spread_modes()
        grid = TimeGrid(40.0, 4000)
        a = solve_u(kernel_from_modes(m), TwoLevelParams(1.0), grid)
        rep = compare_models(propagate(a, TwoLevelState(0.5, 0.5)), dephasing_coherence(m, grid))
        assert rep.T2_sigma_z is not None and rep.T2_sigma_z > 0
        assert rep.population_drift_sigma_z <= 1e-12
        assert rep.T1_sigma_pm is not None and rep.T2_sigma_pm is not None
        assert rep.T1_sigma_pm / rep.T2_sigma_pm == pytest.approx(0.5, abs=0.02)
        rows = {q: (a_, b_) for q, a_, b_ in rep.table()}
        assert rows["population 1/e time"][1] is None
        assert set(rep.as_dict()) >= {"T2_sigma_pm", "T2_sigma_z"}

    def test_single_resonant_mode_both_recohere(self):
        m = ModeSet([1.0], [0.2])
        grid = TimeGrid(2 * np.pi / 0.2, 4000)
        a = solve_u(kernel_from_modes(m), TwoLevelParams(1.0), grid)
        tr = propagate(a, TwoLevelState(0.5, 0.5))
        d = dephasing_coherence(m, grid)
        assert abs(tr.abs_rho_eg[-1]) == pytest.approx(0.5, abs=1e-4)
        assert d.coherence_magnitude.max() == pytest.approx(1.0)
        assert d.coherence_magnitude.min() == pytest.approx(np.exp(-8 * 0.2**2), rel=1e-4)

    def test_grid_mismatch(self):
        m = ModeSet([1.0], [0.2])
        a = solve_u(kernel_from_modes(m), TwoLevelParams(1.0), TimeGrid(5.0, 500))
        with pytest.raises(ModelError):
            compare_models(propagate(a, TwoLevelState(0.5, 0.5)), dephasing_coherence(m, TimeGrid(5.0, 400)))

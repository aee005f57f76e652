import numpy as np
import pytest

import friedrichs as fr
from friedrichs.errors import LightConeViolation


def test_decoupled_chain_stays_put():
    params = fr.WaveguideParams(3, 1.0, 0.75, 0.0, 1)
    series = fr.evolve_lattice(params, t_max=10.0, dt_out=0.5)
    assert np.allclose(series.p, 1.0, atol=1e-12)


def test_norm_conservation():
    params = fr.WaveguideParams(3, 1.0, 0.75, 0.25, 2)
    series = fr.evolve_lattice(params, t_max=50.0, dt_out=0.5)
    assert series.meta["norm_drift"] < 1e-6


def test_step_halving_fourth_order():
    # steps small enough to keep the norm check quiet, large enough that
    # the dt^4 error dominates roundoff
    params = fr.WaveguideParams(3, 1.0, 0.75, 0.25, 2)
    runs = {
        dt: fr.evolve_lattice(params, t_max=10.0, dt_out=1.0, dt=dt).p
        for dt in (0.04, 0.02, 0.01)
    }
    e1 = np.max(np.abs(runs[0.04] - runs[0.02]))
    e2 = np.max(np.abs(runs[0.02] - runs[0.01]))
    assert 12.0 <= e1 / e2 <= 20.0


def test_truncation_independence():
    params = fr.WaveguideParams(3, 1.0, 0.75, 0.25, 1)
    a = fr.evolve_lattice(params, t_max=40.0, dt_out=1.0, n_trunc=1000)
    b = fr.evolve_lattice(params, t_max=40.0, dt_out=1.0, n_trunc=2000)
    assert np.max(np.abs(a.p - b.p)) < 1e-8


def test_truncation_auto_raise():
    params = fr.WaveguideParams(2, 1.0, 4.0, 0.5, 1)
    series = fr.evolve_lattice(params, t_max=120.0, dt_out=4.0)
    assert series.meta["n_trunc"] >= 2.5 * 4.0 * 120.0


def test_light_cone_cap():
    params = fr.WaveguideParams(2, 1.0, 4.0, 0.5, 1)
    with pytest.raises(LightConeViolation):
        fr.evolve_lattice(params, t_max=1e6, dt_out=1e4)


def test_complete_decay_regime_long_run():
    # no bound states at these parameters: the excitation drains out
    params = fr.WaveguideParams(3, 1.0, 0.75, 0.25, 1)
    series = fr.evolve_lattice(params, t_max=300.0, dt_out=10.0)
    assert series.p[-1] < 0.01
    assert np.all(np.diff(series.p[-10:]) < 0)  # still monotone draining


def test_ep_decay_against_markovian_formula():
    params = fr.WaveguideParams(2, 1.0, 4.0, 4.0, fr.INFINITE)
    series = fr.evolve_lattice(params, t_max=10.0, dt_out=0.1)
    t = series.times
    formula = (2 * t**2 + 2 * t + 1) * np.exp(-2 * t)
    assert np.max(np.abs(series.p - formula)) < 5e-2


def test_initial_site_selectable():
    params = fr.WaveguideParams(3, 1.0, 0.75, 0.25, 1)
    end = fr.evolve_lattice(params, initial_site=3, t_max=5.0, dt_out=0.5)
    coupled = fr.evolve_lattice(params, initial_site=1, t_max=5.0, dt_out=0.5)
    # starting on the coupled site decays faster at early times
    assert coupled.p[2] < end.p[2]

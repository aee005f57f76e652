import numpy as np
import pytest

import friedrichs as fr
from friedrichs import dynamics as dyn
from friedrichs.errors import QuadratureBudgetExceeded

from _support import random_model, random_initial


@pytest.fixture(scope="module")
def fig_cases():
    out = {}
    for site in (1, 2, fr.INFINITE):
        params = fr.WaveguideParams(3, 1.0, 0.75, 0.25, site)
        model = fr.build_waveguide_model(params)
        initial = fr.default_initial_state(params)
        bound = fr.all_bound_states(model)
        out[site] = (params, model, initial, bound)
    return out


def test_no_bound_states_forces_complete_decay(fig_cases):
    _, model, initial, bound = fig_cases[1]
    assert bound == []
    coeffs = fr.decay_coefficients(model, initial, bound)
    assert coeffs.R.shape == (3, 0)
    limit = fr.long_time_limit(model, initial, bound)
    assert limit.mean == 0.0 and limit.beats == []


def test_bic_row_structure(fig_cases):
    _, model, initial, bound = fig_cases[2]
    assert len(bound) == 1
    coeffs = fr.decay_coefficients(model, initial, bound)
    r = coeffs.R[:, 0]
    assert r[0] == 0 and r[2] == 0
    expected = initial.amplitudes[1] / (
        1 - abs(model.couplings[1]) ** 2 * fr.self_energy_derivative(model, 0.0)
    )
    assert r[1] == pytest.approx(expected, rel=1e-12)


def test_r_column_zero_when_initial_orthogonal():
    # I(E_m) = 0 makes the whole column vanish for a generic bound state
    params = fr.WaveguideParams(2, 1.0, 0.3, 0.8, fr.INFINITE)
    model = fr.build_waveguide_model(params)
    bound = fr.solve_bound_states(model)
    assert bound
    e0 = bound[0].energy
    f = model.couplings
    # c with  sum_n f_n^* c_n/(e0 - eps_n) = 0
    w = np.array(
        [1.0, -(np.conj(f[0]) / (e0 - model.levels[0])) * (e0 - model.levels[1]) / np.conj(f[1])]
    )
    initial = fr.InitialState.normalized(w)
    assert abs(fr.i_function(model, initial, e0)) < 1e-14
    coeffs = fr.decay_coefficients(model, initial, bound)
    assert np.max(np.abs(coeffs.R[:, 0])) < 1e-13


def test_p0_equals_one(fig_cases):
    for site in (1, 2, fr.INFINITE):
        _, model, initial, bound = fig_cases[site]
        series = fr.survival_probability(model, initial, np.array([0.0]), bound_states=bound)
        assert series.p[0] == pytest.approx(1.0, abs=1e-4)


def test_completeness_sum_rule_componentwise(fig_cases):
    for site in (1, 2, fr.INFINITE):
        _, model, initial, bound = fig_cases[site]
        amps = fr.survival_amplitudes(model, initial, np.array([0.0]))[:, 0]
        assert np.allclose(amps, initial.amplitudes, atol=5e-5)


def test_parts_recombine_exactly(fig_cases):
    _, model, initial, bound = fig_cases[2]
    t = np.linspace(0.0, 30.0, 40)
    series = fr.survival_probability(model, initial, t, bound_states=bound)
    total = series.parts["bound"] + series.parts["scatter"] + series.parts["cross"]
    assert np.max(np.abs(total - series.p)) < 1e-12


def test_probability_range(fig_cases):
    for site in (1, 2, fr.INFINITE):
        _, model, initial, bound = fig_cases[site]
        t = np.linspace(0.0, 40.0, 81)
        series = fr.survival_probability(model, initial, t, bound_states=bound)
        assert np.all(series.p >= 0.0)
        assert np.all(series.p <= 1.0 + 1e-6)


def test_time_reversal_symmetry(fig_cases):
    # real couplings and real initial amplitudes: p(t) = p(-t)
    _, model, initial, bound = fig_cases[2]
    coeffs = fr.decay_coefficients(model, initial, bound)
    for t in (0.7, 3.3, 11.0):
        amps = dyn.survival_amplitudes(
            model, initial, np.array([-t, t]), coefficients=coeffs
        )
        p = np.sum(np.abs(amps) ** 2, axis=0)
        assert p[0] == pytest.approx(p[1], rel=1e-10)


def test_riemann_lebesgue_scattering_decay(fig_cases):
    _, model, initial, bound = fig_cases[1]
    coeffs = fr.decay_coefficients(model, initial, bound)
    maxima = []
    for t_win in (25.0, 50.0, 100.0):
        t = np.linspace(t_win, 2 * t_win, 120)
        series = fr.survival_probability(
            model, initial, t, coefficients=coeffs, with_parts=True
        )
        maxima.append(float(np.max(series.parts["scatter"])))
    assert maxima[0] > maxima[1] > maxima[2]


def test_match_oracle_all_geometries(fig_cases):
    for site in (1, 2, fr.INFINITE):
        params, model, initial, bound = fig_cases[site]
        t = np.linspace(0.0, 50.0, 201)
        series = fr.survival_probability(model, initial, t, bound_states=bound)
        oracle = fr.evolve_lattice(params, t_max=50.0, dt_out=0.25)
        assert np.max(np.abs(series.p - oracle.p)) < 1e-2


def test_long_time_limit_structure(fig_cases):
    _, model2, initial2, bound2 = fig_cases[2]
    lim2 = fr.long_time_limit(model2, initial2, bound2)
    assert lim2.beats == []  # single bound state: constant plateau
    assert 0.4 < lim2.mean < 0.5

    _, modelI, initialI, boundI = fig_cases[fr.INFINITE]
    limI = fr.long_time_limit(modelI, initialI, boundI)
    assert len(limI.beats) == 1
    freq = limI.beats[0][0]
    e = sorted(s.energy for s in boundI)
    assert freq == pytest.approx(e[1] - e[0], rel=1e-12)
    assert limI.mean <= 1.0


def test_beat_frequency_visible_in_oracle(fig_cases):
    # over t in [100, 200] transient bound-scattering interference still
    # rides on the signal; the persistent beat is the dominant component
    # above the transient band
    params, model, initial, bound = fig_cases[fr.INFINITE]
    lim = fr.long_time_limit(model, initial, bound)
    beat = lim.beats[0][0]
    oracle = fr.evolve_lattice(params, t_max=200.0, dt_out=0.05)
    mask = oracle.times >= 100.0
    sig = oracle.p[mask]
    idx = np.arange(sig.size)
    sig = (sig - np.polyval(np.polyfit(idx, sig, 2), idx)) * np.hanning(sig.size)
    freqs = 2 * np.pi * np.fft.rfftfreq(sig.size, d=0.05)
    spec = np.abs(np.fft.rfft(sig))
    upper = freqs > 0.75 * beat
    peak = freqs[upper][int(np.argmax(spec[upper]))]
    assert abs(peak - beat) <= freqs[1]


def test_sum_rule_random_models():
    rng = np.random.default_rng(77)
    done = 0
    while done < 6:
        m = random_model(rng, n_max=3, with_zero=False)
        initial = random_initial(rng, m.n_levels)
        series = fr.survival_probability(m, initial, np.array([0.0]))
        assert series.p[0] == pytest.approx(1.0, abs=1e-4)
        done += 1


def test_error_budget_enforced(fig_cases):
    _, model, initial, bound = fig_cases[1]
    t = np.linspace(0.0, 10.0, 11)
    with pytest.raises(QuadratureBudgetExceeded):
        fr.survival_probability(
            model, initial, t, bound_states=bound, n_base_nodes=33, error_budget=1e-10
        )
    series = fr.survival_probability(
        model, initial, t, bound_states=bound, error_budget=5e-4
    )
    assert series.p.size == 11

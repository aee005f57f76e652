import numpy as np
import pytest

import friedrichs as fr
from friedrichs.bound_states import BoundStateKind

from _support import census_bruteforce, census_margin, random_model


def test_single_far_level_weak_coupling():
    # decoupled limit: the root stays within 1% of the bare level
    lo, up = 0.0, 1.0
    eps = lo - 10.0 * (up - lo)

    def j(om):
        om = np.asarray(om, dtype=float)
        out = np.zeros_like(om)
        inside = (om > lo) & (om < up)
        out[inside] = 0.02 * (om[inside] - lo) * (up - om[inside])
        return out

    m = fr.validate_model(
        fr.FriedrichsModel(
            discrete=fr.DiscreteSpectrum(np.array([eps]), np.array([0.05])),
            continuum=fr.ContinuumBand(lo, up, j, edge_exponents=(1.0, 1.0)),
        )
    )
    states = fr.solve_bound_states(m)
    assert len(states) == 1
    assert states[0].kind is BoundStateKind.BELOW_BAND
    assert abs(states[0].energy - eps) < 0.01 * abs(eps)


def test_waveguide_infinite_two_symmetric_roots():
    params = fr.WaveguideParams(3, 1.0, 0.75, 0.25, fr.INFINITE)
    m = fr.build_waveguide_model(params)
    states = fr.solve_bound_states(m)
    assert len(states) == 2
    assert states[0].energy == pytest.approx(-states[1].energy, rel=1e-12)
    assert states[0].energy < -1.5 < 1.5 < states[1].energy


def test_plugback_residual():
    rng = np.random.default_rng(101)
    checked = 0
    for _ in range(12):
        m = random_model(rng, n_max=4)
        for state in fr.solve_bound_states(m):
            assert fr.residual(m, state) < 1e-10
            checked += 1
    assert checked >= 5


def test_census_equals_solved_count():
    rng = np.random.default_rng(57)
    for _ in range(15):
        m = random_model(rng, n_max=4)
        census = fr.count_bound_states(m)
        states = fr.solve_bound_states(m, census)
        assert len(states) == census.m_below + census.m_above


def test_census_against_bruteforce_scan():
    rng = np.random.default_rng(7)
    done = 0
    while done < 12:
        m = random_model(rng, n_max=4)
        if census_margin(m) < 1e-2:
            continue
        census = fr.count_bound_states(m)
        below, above = census_bruteforce(m, n_grid=40_000)
        assert (census.m_below, census.m_above) == (below, above)
        done += 1


def test_interlacing_below_band():
    rng = np.random.default_rng(31)
    for _ in range(10):
        m = random_model(rng, n_max=4)
        census = fr.count_bound_states(m)
        states = fr.solve_bound_states(m, census)
        below = [s.energy for s in states if s.kind is BoundStateKind.BELOW_BAND]
        poles = [e for e in m.levels if e < m.omega_low]
        # at most one root per monotone branch segment
        bounds = [-np.inf] + poles + [m.omega_low]
        for a, b in zip(bounds[:-1], bounds[1:]):
            assert sum(1 for e in below if a < e < b) <= 1


def test_zero_coupling_limit_monotone():
    params = fr.WaveguideParams(3, 1.0, 0.75, 1.0, fr.INFINITE)
    gaps = []
    for s in (1.0, 0.5, 0.25, 0.125):
        scaled = fr.WaveguideParams(3, 1.0, 0.75, 1.0 * s, fr.INFINITE)
        m = fr.build_waveguide_model(scaled)
        states = fr.solve_bound_states(m)
        e_above = max(st.energy for st in states)
        gaps.append(e_above - 1.5)  # distance to the band edge it collapses onto
    assert all(g > 0 for g in gaps)
    assert all(b < a for a, b in zip(gaps[:-1], gaps[1:]))


def test_total_norm_unity():
    rng = np.random.default_rng(201)
    checked = 0
    for _ in range(8):
        m = random_model(rng, n_max=3)
        for state in fr.solve_bound_states(m):
            assert fr.total_norm(m, state) == pytest.approx(1.0, abs=1e-6)
            checked += 1
    params = fr.WaveguideParams(3, 1.0, 0.75, 0.25, 2)
    m2 = fr.build_waveguide_model(params)
    for state in fr.find_bics(m2):
        assert fr.total_norm(m2, state) == pytest.approx(1.0, abs=1e-6)
        checked += 1
    assert checked >= 3


def test_bic_special_case_zero_energy():
    params = fr.WaveguideParams(3, 1.0, 0.75, 0.25, 2)
    m = fr.build_waveguide_model(params)
    bics = fr.find_bics(m)
    assert len(bics) == 1
    bic = bics[0]
    assert bic.kind is BoundStateKind.IN_CONTINUUM
    assert bic.energy == pytest.approx(0.0, abs=1e-12)
    assert bic.level_index == 1
    f2 = abs(m.couplings[1]) ** 2
    sigp = fr.self_energy_derivative(m, 0.0)
    assert bic.norm_b2 == pytest.approx(1.0 / (1.0 - f2 * sigp), rel=1e-12)
    # amplitudes live on the pinned level only
    assert abs(bic.amplitudes[0]) == 0 and abs(bic.amplitudes[2]) == 0


def test_all_levels_become_bics_at_matched_hopping():
    params = fr.WaveguideParams(3, 1.0, 1.0, 0.4, 4)
    m = fr.build_waveguide_model(params)
    bics = fr.find_bics(m)
    assert len(bics) == 3
    assert np.allclose(sorted(s.energy for s in bics), m.levels, atol=1e-12)


def test_no_bics_without_interior_zeros():
    params = fr.WaveguideParams(3, 1.0, 0.75, 0.25, 1)
    m = fr.build_waveguide_model(params)
    assert fr.find_bics(m) == []


def test_generic_bic_at_declared_zero():
    # tune a single level against a quadratic J-zero so K(e0) = 1/Sigma(e0)
    lo, up, z0 = -1.0, 1.0, 0.2

    def j(om):
        om = np.asarray(om, dtype=float)
        out = np.zeros_like(om)
        inside = (om > lo) & (om < up)
        out[inside] = 0.15 * (om[inside] - lo) * (up - om[inside]) * (om[inside] - z0) ** 2
        return out

    def build(eps):
        return fr.validate_model(
            fr.FriedrichsModel(
                discrete=fr.DiscreteSpectrum(np.array([eps]), np.array([0.4])),
                continuum=fr.ContinuumBand(
                    lo, up, j, edge_exponents=(1.0, 1.0), interior_zeros=(z0,)
                ),
            )
        )

    sig0 = fr.self_energy(build(-0.5), z0)  # independent of eps
    eps_star = z0 - 0.16 * sig0  # K(z0) = |f|^2/(z0-eps) = 1/Sigma(z0)
    m = build(eps_star)
    bics = fr.find_bics(m)
    assert len(bics) == 1
    assert bics[0].energy == pytest.approx(z0)
    assert bics[0].level_index is None
    assert fr.total_norm(m, bics[0]) == pytest.approx(1.0, abs=1e-6)
    # detuned level: no BIC
    assert fr.find_bics(build(eps_star + 0.05)) == []


def test_census_counts_shifted_band():
    # three levels below a high band: all three appear as bound states
    lo, up = 5.0, 7.0

    def j(om):
        om = np.asarray(om, dtype=float)
        out = np.zeros_like(om)
        inside = (om > lo) & (om < up)
        out[inside] = 0.05 * (om[inside] - lo) * (up - om[inside])
        return out

    m = fr.validate_model(
        fr.FriedrichsModel(
            discrete=fr.DiscreteSpectrum(
                np.array([-1.0, 0.0, 1.0]), np.array([0.3, 0.2, 0.25])
            ),
            continuum=fr.ContinuumBand(lo, up, j, edge_exponents=(1.0, 1.0)),
        )
    )
    census = fr.count_bound_states(m)
    assert census.n_low == 3 and census.n_up == 0
    states = fr.solve_bound_states(m, census)
    assert len(states) == census.m_below + census.m_above >= 3

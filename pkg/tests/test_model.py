import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import friedrichs as fr
from friedrichs.errors import (
    DegenerateLevels,
    EmptyBand,
    NegativeSpectralDensity,
    UnnormalizedInitialState,
)

from _support import random_model


def smooth_j(om):
    om = np.asarray(om, dtype=float)
    out = np.zeros_like(om)
    inside = (om > -1.5) & (om < 1.5)
    out[inside] = (1.5 - om[inside]) * (om[inside] + 1.5)
    return out


def make_model(levels=(-1.0, 1.0), couplings=(0.3, 0.3)):
    return fr.FriedrichsModel(
        discrete=fr.DiscreteSpectrum(np.array(levels), np.array(couplings)),
        continuum=fr.ContinuumBand(-1.5, 1.5, smooth_j, edge_exponents=(1.0, 1.0)),
    )


def test_well_formed_model_accepted():
    m = fr.validate_model(make_model())
    assert m.n_levels == 2
    assert m.omega_low == -1.5 and m.omega_up == 1.5


def test_degenerate_levels_rejected():
    with pytest.raises(DegenerateLevels):
        make_model(levels=(0.0, 0.0))


def test_unsorted_levels_rejected():
    with pytest.raises(DegenerateLevels):
        make_model(levels=(1.0, -1.0))


def test_unnormalized_initial_rejected():
    with pytest.raises(UnnormalizedInitialState):
        fr.InitialState(np.array([1.0, 1.0]))


def test_empty_band_rejected():
    with pytest.raises(EmptyBand):
        fr.ContinuumBand(1.5, -1.5, smooth_j)


def test_negative_density_rejected():
    bad = fr.FriedrichsModel(
        discrete=fr.DiscreteSpectrum(np.array([0.0]), np.array([0.3])),
        continuum=fr.ContinuumBand(-1.0, 1.0, lambda om: np.asarray(om) * 0.0 - 1e-3),
    )
    with pytest.raises(NegativeSpectralDensity):
        fr.validate_model(bad)


def test_declared_zero_must_be_zero():
    bad = fr.FriedrichsModel(
        discrete=fr.DiscreteSpectrum(np.array([0.0]), np.array([0.3])),
        continuum=fr.ContinuumBand(-1.5, 1.5, smooth_j, interior_zeros=(0.5,)),
    )
    with pytest.raises(NegativeSpectralDensity):
        fr.validate_model(bad)


def test_validation_idempotent():
    m = fr.validate_model(make_model())
    assert fr.validate_model(m) is m


def test_scalar_density_gets_vectorized():
    m = fr.FriedrichsModel(
        discrete=fr.DiscreteSpectrum(np.array([0.0]), np.array([0.3])),
        continuum=fr.ContinuumBand(
            -1.0, 1.0, lambda om: float(1.0 - om**2) if abs(om) < 1 else 0.0
        ),
    )
    v = fr.validate_model(m)
    vals = v.j(np.array([0.0, 0.5]))
    assert vals.shape == (2,)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6).filter(lambda v: any(abs(x) > 1e-3 for x in v)))
@settings(max_examples=50, deadline=None)
def test_normalized_constructor(values):
    state = fr.InitialState.normalized(np.array(values, dtype=float))
    assert abs(np.sum(np.abs(state.amplitudes) ** 2) - 1.0) < 1e-12


@given(st.floats(0.25, 4.0))
@settings(max_examples=8, deadline=None)
def test_energy_unit_covariance(s):
    """Scaling all energies by s scales eigenvalues by s and times by 1/s."""
    base = fr.WaveguideParams(3, 1.0, 0.75, 0.25, fr.INFINITE)
    scaled = fr.WaveguideParams(3, s, 0.75 * s, 0.25 * s, fr.INFINITE)
    mb = fr.build_waveguide_model(base)
    ms = fr.build_waveguide_model(scaled)
    eb = [st_.energy for st_ in fr.solve_bound_states(mb)]
    es = [st_.energy for st_ in fr.solve_bound_states(ms)]
    assert np.allclose(np.array(es), s * np.array(eb), rtol=1e-9, atol=1e-12)

    init_b = fr.default_initial_state(base)
    init_s = fr.default_initial_state(scaled)
    t_b = np.array([0.0, 2.0, 5.0])
    pb = fr.survival_probability(mb, init_b, t_b, n_base_nodes=1025).p
    ps = fr.survival_probability(ms, init_s, t_b / s, n_base_nodes=1025).p
    assert np.allclose(pb, ps, atol=5e-7)


def test_random_models_validate():
    rng = np.random.default_rng(0)
    for _ in range(10):
        m = random_model(rng, with_zero=bool(rng.integers(2)))
        assert m.n_levels >= 1

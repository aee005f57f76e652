"""Data model: discrete levels factorizably coupled to a single continuum.

Units: hbar = 1; all energies in one arbitrary base unit, times in its
inverse.  Only the spectral density J(omega) enters any computation; the
optional factored pair (density_of_states rho, coupling_profile g) with
J = |g|^2 rho is metadata used to build continuum amplitude profiles of
bound states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateLevels,
    EmptyBand,
    NegativeSpectralDensity,
    UnnormalizedInitialState,
)

#: an edge exponent of DIVERGENT marks an edge where Sigma(omega_edge) diverges
DIVERGENT = None


def _readonly(a, dtype):
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class DiscreteSpectrum:
    """Levels eps_n (strictly increasing) and coupling factors f_n."""

    levels: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        levels = _readonly(self.levels, float)
        couplings = _readonly(self.couplings, complex)
        if levels.ndim != 1 or levels.size < 1:
            raise DegenerateLevels("need at least one discrete level")
        if couplings.shape != levels.shape:
            raise DegenerateLevels("levels and couplings must have equal length")
        span = float(levels[-1] - levels[0]) if levels.size > 1 else 0.0
        scale = max(span, float(np.max(np.abs(levels))), 1.0)
        if levels.size > 1 and np.min(np.diff(levels)) <= 1e-12 * scale:
            raise DegenerateLevels("levels must be strictly increasing (no degeneracy)")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "couplings", couplings)

    @property
    def n(self) -> int:
        return self.levels.size


@dataclass(frozen=True, eq=False)
class ContinuumBand:
    """Band [omega_low, omega_up] with spectral density J(omega) >= 0.

    edge_exponents holds the power-law exponents of J near each edge
    (s > 0 keeps Sigma finite at that edge); DIVERGENT flags an edge where
    Sigma diverges (e.g. a van Hove 1/sqrt divergence of J).  Interior
    zeros of J must be declared explicitly; they are the only energies at
    which bound states inside the band are sought.
    """

    omega_low: float
    omega_up: float
    spectral_density: Callable
    edge_exponents: tuple = (1.0, 1.0)
    interior_zeros: tuple = ()
    density_of_states: Optional[Callable] = None
    coupling_profile: Optional[Callable] = None

    def __post_init__(self):
        object.__setattr__(self, "omega_low", float(self.omega_low))
        object.__setattr__(self, "omega_up", float(self.omega_up))
        object.__setattr__(
            self, "interior_zeros", tuple(sorted(float(z) for z in self.interior_zeros))
        )
        if not self.omega_low < self.omega_up:
            raise EmptyBand(f"omega_low={self.omega_low} >= omega_up={self.omega_up}")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.omega_low) and math.isfinite(self.omega_up)


@dataclass(frozen=True, eq=False)
class AnalyticOverrides:
    """Closed forms used in place of quadrature when a model has them.

    sigma(E):        self-energy on real E outside the band or at a J-zero
    sigma_deriv(E):  its derivative on the same domain (strictly off-edge)
    delta(E):        principal-value part inside the band
    k(z):            K(z) in the complex plane
    i_default(z):    I(z) for the model's default initial state only
    """

    sigma: Optional[Callable] = None
    sigma_deriv: Optional[Callable] = None
    delta: Optional[Callable] = None
    k: Optional[Callable] = None
    i_default: Optional[Callable] = None


@dataclass(frozen=True, eq=False)
class FriedrichsModel:
    discrete: DiscreteSpectrum
    continuum: ContinuumBand
    overrides: Optional[AnalyticOverrides] = None


@dataclass(frozen=True, eq=False)
class InitialState:
    """Unit-norm amplitudes c_n on the discrete levels."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _readonly(self.amplitudes, complex)
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > 1e-12:
            raise UnnormalizedInitialState(f"sum |c_n|^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, values: Sequence[complex]) -> "InitialState":
        v = np.asarray(values, dtype=complex)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise UnnormalizedInitialState("cannot normalize the zero vector")
        return cls(v / nrm)


def _vectorized(fn: Callable) -> Callable:
    """Return fn if it already maps arrays to arrays, else a vectorized wrap."""
    probe = np.array([0.25, 0.75])
    try:
        out = fn(probe)
        if np.shape(out) == probe.shape:
            return fn
    except Exception:
        pass
    return np.vectorize(fn, otypes=[float])


@dataclass(frozen=True, eq=False)
class ValidatedModel:
    """Immutable, validated handle consumed by every other module."""

    discrete: DiscreteSpectrum
    continuum: ContinuumBand
    overrides: Optional[AnalyticOverrides]
    _j: Callable = field(repr=False)
    scale: float = 1.0

    @property
    def levels(self) -> np.ndarray:
        return self.discrete.levels

    @property
    def couplings(self) -> np.ndarray:
        return self.discrete.couplings

    @property
    def n_levels(self) -> int:
        return self.discrete.n

    @property
    def omega_low(self) -> float:
        return self.continuum.omega_low

    @property
    def omega_up(self) -> float:
        return self.continuum.omega_up

    @property
    def interior_zeros(self) -> tuple:
        return self.continuum.interior_zeros

    @property
    def finite_band(self) -> bool:
        return self.continuum.finite

    def j(self, omega):
        return self._j(omega)

    def inside_band(self, e: float) -> bool:
        return self.omega_low < e < self.omega_up

    def is_interior_zero(self, e: float, tol: float | None = None) -> bool:
        tol = 1e-12 * self.scale if tol is None else tol
        return any(abs(e - z) <= tol for z in self.interior_zeros)

    def is_edge(self, e: float, tol: float | None = None) -> bool:
        tol = 1e-12 * self.scale if tol is None else tol
        for edge in (self.omega_low, self.omega_up):
            if math.isfinite(edge) and abs(e - edge) <= tol:
                return True
        return False


def _sample_points(model: FriedrichsModel) -> np.ndarray:
    lo, up = model.continuum.omega_low, model.continuum.omega_up
    if model.continuum.finite:
        # cosine-spaced interior points avoid evaluating exactly at the edges
        k = np.linspace(0.0, np.pi, 403)[1:-1]
        mid, half = 0.5 * (lo + up), 0.5 * (up - lo)
        return mid - half * np.cos(k)
    levels = model.discrete.levels
    width = max(np.ptp(levels), 1.0)
    lo_f = lo if math.isfinite(lo) else float(levels[0]) - 10 * width
    up_f = up if math.isfinite(up) else float(levels[-1]) + 10 * width
    return np.linspace(lo_f, up_f, 401)[1:-1]


def validate_model(model) -> ValidatedModel:
    """Validate a model; idempotent on an already-validated handle."""
    if isinstance(model, ValidatedModel):
        return model
    band = model.continuum
    j = _vectorized(band.spectral_density)

    pts = _sample_points(model)
    vals = np.asarray(j(pts), dtype=float)
    if np.any(vals < -1e-14):
        worst = pts[int(np.argmin(vals))]
        raise NegativeSpectralDensity(f"J({worst}) = {float(np.min(vals))} < 0")
    jmax = float(np.max(vals)) if vals.size else 1.0
    for z in band.interior_zeros:
        if not band.omega_low < z < band.omega_up:
            raise EmptyBand(f"declared J-zero {z} lies outside the band")
        if abs(float(j(np.array([z]))[0])) > 1e-10 * max(jmax, 1e-300):
            raise NegativeSpectralDensity(f"declared J-zero at {z} has J != 0")

    levels = model.discrete.levels
    extent = [float(levels[0]), float(levels[-1])]
    if math.isfinite(band.omega_low):
        extent.append(band.omega_low)
    if math.isfinite(band.omega_up):
        extent.append(band.omega_up)
    scale = max(max(extent) - min(extent), float(np.max(np.abs(levels))), 1e-300)

    return ValidatedModel(
        discrete=model.discrete,
        continuum=band,
        overrides=model.overrides,
        _j=j,
        scale=scale,
    )

"""Energy-independent non-Hermitian limit: flat continuum, constant width.

H = diag(eps) - i*Gamma*f f^dagger.  Resonances come from a biorthogonal
eigensystem when H is diagonalizable; at an exceptional point the
coalesced eigenvector is continued by a Jordan chain and the decay picks
up polynomial-in-t factors.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .dynamics import SurvivalSeries
from .errors import NegativeGamma, PoleHit
from .model import InitialState, ValidatedModel

EP_GAP_FACTOR = 1e-8
EP_COND = 1e8


@dataclass(frozen=True, eq=False)
class EffectiveHamiltonianMarkov:
    matrix: np.ndarray  # N x N complex
    gamma: float
    levels: np.ndarray
    couplings: np.ndarray

    @property
    def n(self) -> int:
        return self.levels.size


def build_markovian(model: ValidatedModel, gamma: float) -> EffectiveHamiltonianMarkov:
    """H = diag(eps_n) - i*Gamma * f_n f_{n'}^*  with Gamma = pi*J >= 0."""
    if gamma < 0:
        raise NegativeGamma(f"gamma = {gamma} < 0")
    f = model.couplings
    h = np.diag(model.levels.astype(complex)) - 1j * gamma * np.outer(f, np.conj(f))
    return EffectiveHamiltonianMarkov(
        matrix=h, gamma=float(gamma), levels=model.levels, couplings=f
    )


class ResonanceKind(enum.Enum):
    DIAGONALIZABLE = "diagonalizable"
    DEFECTIVE = "defective"


@dataclass(frozen=True, eq=False)
class JordanBlock:
    eigenvalue: complex
    vectors: np.ndarray  # columns: chain v_1 (eigenvector), v_2, ...


@dataclass(frozen=True, eq=False)
class ResonanceSystem:
    kind: ResonanceKind
    eigenvalues: np.ndarray  # sorted by Im descending, ties Re ascending
    right: Optional[np.ndarray] = None  # columns |Psi_i+>
    left: Optional[np.ndarray] = None  # rows <Psi_i-| with <Psi-|Psi+> = 1
    norm_products: Optional[np.ndarray] = None  # V_i W_i^*
    blocks: list = field(default_factory=list)  # JordanBlock entries (defective)
    overlap: Optional[np.ndarray] = None  # Gram matrix of the chain basis
    overlap_inv: Optional[np.ndarray] = None


def _eig2(h: np.ndarray):
    """Closed-form 2x2 eigensystem; exact through the exceptional point.

    The discriminant is computed in the cancellation-aware form
    (h11-h22)^2 + 4 h12 h21 and snapped to zero when it falls below the
    float noise of that expression: there the matrix is coalescent at
    working precision and reporting a spurious sqrt(eps) splitting would
    be pure rounding noise.
    """
    tr = h[0, 0] + h[1, 1]
    diff = h[0, 0] - h[1, 1]
    disc2 = diff * diff + 4.0 * h[0, 1] * h[1, 0]
    noise = 16.0 * np.finfo(float).eps * (abs(diff) ** 2 + 4.0 * abs(h[0, 1] * h[1, 0]))
    disc = 0.0 if abs(disc2) <= noise else cmath.sqrt(disc2)
    z = np.array([(tr + disc) / 2.0, (tr - disc) / 2.0])
    vecs = []
    for zi in z:
        cand1 = np.array([h[0, 1], zi - h[0, 0]])
        cand2 = np.array([zi - h[1, 1], h[1, 0]])
        v = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
        nrm = np.linalg.norm(v)
        vecs.append(v / nrm if nrm > 0 else np.array([1.0, 0.0], dtype=complex))
    return z, np.array(vecs).T


def _order(z: np.ndarray) -> np.ndarray:
    return np.lexsort((z.real, -z.imag))


def _norm_products(h: EffectiveHamiltonianMarkov, z, right, left):
    """V_i W_i^* inferred from the rational eigenvector profile f_n/(z-eps_n).

    Defined only when the coupling vector is nonzero and no resonance sits
    on a level (true decaying resonances); nan otherwise.
    """
    n_star = int(np.argmax(np.abs(h.couplings)))
    f = h.couplings[n_star]
    out = np.full(z.size, np.nan, dtype=complex)
    if abs(f) == 0.0:
        return out
    for i in range(z.size):
        d = z[i] - h.levels[n_star]
        if abs(d) == 0.0:
            continue
        out[i] = (right[n_star, i] * d / f) * (left[i, n_star] * d / np.conj(f))
    return out


def _jordan_blocks(h: np.ndarray, z: np.ndarray, gap_tol: float):
    """Cluster near-equal eigenvalues and build a chain per cluster.

    Each cluster's chain lives in its Schur invariant subspace: with the
    cluster ordered first, T11 - z_c is (nearly) nilpotent and triangular
    least-squares solves give well-scaled chain vectors even when the raw
    shifted system is on the edge of singularity.
    """
    order = _order(z)
    z = z[order]
    clusters = []
    current = [0]
    for i in range(1, z.size):
        if any(abs(z[i] - z[j]) < gap_tol for j in current):
            current.append(i)
        else:
            clusters.append(current)
            current = [i]
    clusters.append(current)

    blocks = []
    for idx in clusters:
        zc = complex(np.mean(z[list(idx)]))
        size = len(idx)
        t, q, sdim = scipy.linalg.schur(
            h, output="complex", sort=lambda w, zc=zc: abs(w - zc) <= gap_tol
        )
        if size == 1:
            blocks.append(JordanBlock(eigenvalue=zc, vectors=q[:, :1]))
            continue
        g = min(max(sdim, size), h.shape[0])
        nil = np.triu(t[:g, :g], k=1)  # diagonal |T_ii - z_c| <= gap_tol dropped
        chain_small = [np.eye(g, dtype=complex)[:, 0]]
        for _ in range(size - 1):
            nxt, *_ = np.linalg.lstsq(nil, chain_small[-1], rcond=None)
            chain_small.append(nxt)
        vectors = q[:, :g] @ np.array(chain_small).T
        blocks.append(JordanBlock(eigenvalue=zc, vectors=vectors))
    return blocks


def resonance_decomposition(
    h: EffectiveHamiltonianMarkov,
    *,
    ep_gap_factor: float = EP_GAP_FACTOR,
    ep_cond: float = EP_COND,
) -> ResonanceSystem:
    mat = h.matrix
    n = mat.shape[0]
    if n == 1:
        z = np.array([mat[0, 0]])
        right = np.eye(1, dtype=complex)
        return ResonanceSystem(
            kind=ResonanceKind.DIAGONALIZABLE,
            eigenvalues=z,
            right=right,
            left=right.copy(),
            norm_products=_norm_products(h, z, right, right.copy()),
        )
    if n == 2:
        z, vecs = _eig2(mat)
    else:
        z, vecs = scipy.linalg.eig(mat)

    norm_h = max(float(np.linalg.norm(mat, 2)), 1e-300)
    gap_tol = ep_gap_factor * norm_h
    gaps = [abs(z[i] - z[j]) for i in range(n) for j in range(i)]
    min_gap = min(gaps) if gaps else math.inf
    defective = False
    if min_gap < gap_tol:
        cond = np.linalg.cond(vecs)
        defective = (not np.isfinite(cond)) or cond > ep_cond
    if defective:
        if n == 2:
            # closed-form null direction is exact at the coalescence
            zc = complex(0.5 * (z[0] + z[1]))
            v1 = vecs[:, 0]
            a = mat - zc * np.eye(2)
            v2, *_ = np.linalg.lstsq(a, v1, rcond=None)
            blocks = [JordanBlock(eigenvalue=zc, vectors=np.column_stack([v1, v2]))]
        else:
            blocks = _jordan_blocks(mat, z, gap_tol)
        basis = np.hstack([b.vectors for b in blocks])
        overlap = basis.conj().T @ basis
        return ResonanceSystem(
            kind=ResonanceKind.DEFECTIVE,
            eigenvalues=z[_order(z)],
            blocks=blocks,
            overlap=overlap,
            overlap_inv=np.linalg.inv(overlap),
        )
    order = _order(z)
    z = z[order]
    right = vecs[:, order]
    left = np.linalg.inv(right)  # rows: <Psi_i-| with c-product normalization
    return ResonanceSystem(
        kind=ResonanceKind.DIAGONALIZABLE,
        eigenvalues=z,
        right=right,
        left=left,
        norm_products=_norm_products(h, z, right, left),
    )


# ---------------------------------------------------------------------------
# decay laws

def _resonance_amplitudes(h: EffectiveHamiltonianMarkov, initial: InitialState):
    """(z, A) with A[i, n] = -I(z_i) f_n / (K'(z_i) (z_i - eps_n)).

    The survival probability is p(t) = sum_n |sum_i A[i, n] e^{-i z_i t}|^2.
    """
    from . import spectral as sp
    from .model import (
        ContinuumBand,
        DiscreteSpectrum,
        FriedrichsModel,
        validate_model,
    )

    flat = validate_model(
        FriedrichsModel(
            discrete=DiscreteSpectrum(h.levels, h.couplings),
            continuum=ContinuumBand(
                omega_low=-math.inf,
                omega_up=math.inf,
                spectral_density=lambda om: np.full_like(
                    np.asarray(om, dtype=float), h.gamma / math.pi
                ),
            ),
        )
    )
    sys = resonance_decomposition(h)
    z = sys.eigenvalues
    n = z.size
    amp = np.empty((n, h.n), dtype=complex)
    for i in range(n):
        i_val = sp.i_function(flat, initial, complex(z[i]))  # PoleHit if z_i on a level
        kp = sp.k_derivative(flat, complex(z[i]))
        amp[i] = -i_val * h.couplings / (kp * (z[i] - h.levels))
    return z, amp


def decay_components(h: EffectiveHamiltonianMarkov, initial: InitialState):
    """(z, D_i, G_{ii'}) for the resonance-interference decay formula.

    D_i are the single-resonance weights; G[i, i'] are the complex cross
    overlaps whose modulus and argument set the beat amplitude and phase.
    """
    z, amp = _resonance_amplitudes(h, initial)
    d = np.sum(np.abs(amp) ** 2, axis=1)
    g = amp @ amp.conj().T
    return z, d, g


def _p_from_components(z, d, g, times):
    t = np.asarray(times, dtype=float)
    p = np.zeros_like(t)
    n = z.size
    for i in range(n):
        p += d[i] * np.exp(2.0 * z[i].imag * t)
    for i in range(n):
        for j in range(i):
            gij = g[i, j]
            p += (
                2.0
                * abs(gij)
                * np.exp((z[i].imag + z[j].imag) * t)
                * np.cos((z[i].real - z[j].real) * t - np.angle(gij))
            )
    return p


def _defective_amplitudes(h, sys: ResonanceSystem, c0, times):
    """Chain-basis evolution: polynomial-in-t factors per Jordan block."""
    basis = np.hstack([b.vectors for b in sys.blocks])
    coeff = np.linalg.solve(basis, c0)
    t = np.asarray(times, dtype=float)
    out = np.zeros((h.n, t.size), dtype=complex)
    pos = 0
    for blk in sys.blocks:
        size = blk.vectors.shape[1]
        a = coeff[pos : pos + size]
        phase = np.exp(-1j * blk.eigenvalue * t)
        for j in range(size):  # chain vector v_{j+1}
            poly = np.zeros(t.size, dtype=complex)
            for k in range(size - j):
                poly += ((-1j * t) ** k / math.factorial(k)) * a[j + k]
            out += blk.vectors[:, j][:, None] * (phase * poly)[None, :]
        pos += size
    return out


def markovian_survival(
    h: EffectiveHamiltonianMarkov,
    initial: InitialState,
    times,
    *,
    method: str = "closed",
    system: Optional[ResonanceSystem] = None,
) -> SurvivalSeries:
    """p(t) from the closed resonance formulas or the matrix exponential."""
    t = np.asarray(times, dtype=float)
    c0 = initial.amplitudes
    if method == "expm":
        p = np.empty_like(t)
        for i, ti in enumerate(t):
            amp = scipy.linalg.expm(-1j * h.matrix * ti) @ c0
            p[i] = float(np.sum(np.abs(amp) ** 2))
        return SurvivalSeries(times=t, p=p, meta={"method": "expm"})
    if method != "closed":
        raise ValueError("method must be 'closed' or 'expm'")
    sys = system or resonance_decomposition(h)
    if sys.kind is ResonanceKind.DIAGONALIZABLE:
        try:
            # amplitude-level evaluation of the resonance-sum decay law:
            # identical to the D_i/U_{ii'} regrouping but free of its
            # squared-amplitude cancellation near degeneracies
            z, amp = _resonance_amplitudes(h, initial)
            if np.all(np.isfinite(amp)):
                phases = np.exp(-1j * np.outer(z, t))
                p = np.sum(np.abs(amp.T @ phases) ** 2, axis=0).real
                return SurvivalSeries(
                    times=t, p=p, meta={"method": "closed-diagonalizable"}
                )
        except PoleHit:
            pass
        # resonance profile inapplicable (decoupled level or z_i on a level):
        # same decomposition, evaluated from the biorthogonal eigensystem
        weights = sys.left @ c0
        amps = sys.right @ (weights[:, None] * np.exp(-1j * np.outer(sys.eigenvalues, t)))
        p = np.sum(np.abs(amps) ** 2, axis=0).real
        return SurvivalSeries(times=t, p=p, meta={"method": "closed-biorthogonal"})
    amps = _defective_amplitudes(h, sys, c0, t)
    p = np.sum(np.abs(amps) ** 2, axis=0).real
    return SurvivalSeries(times=t, p=p, meta={"method": "closed-defective"})


# ---------------------------------------------------------------------------
# anti-PT structure

@dataclass(frozen=True)
class AntiPTReport:
    residual: float
    is_anti_pt: bool
    phase: Optional[str]  # for N=2: "symmetric" | "broken" | "exceptional"


def anti_pt_check(h: EffectiveHamiltonianMarkov) -> AntiPTReport:
    """Residual of (PT) H (PT)^{-1} = -H with parity = index reversal."""
    mat = h.matrix
    rev = mat[::-1, ::-1]
    residual = float(np.linalg.norm(np.conj(rev) + mat))
    norm_h = max(float(np.linalg.norm(mat)), 1e-300)
    is_anti = residual < 1e-12 * norm_h
    phase = None
    if h.n == 2:
        sys = resonance_decomposition(h)
        z = sys.eigenvalues
        scale = max(float(np.max(np.abs(z))), 1e-300)
        if abs(z[0] - z[1]) < 1e-8 * scale or sys.kind is ResonanceKind.DEFECTIVE:
            phase = "exceptional"
        elif np.all(np.abs(z.real) < 1e-10 * scale):
            phase = "broken"
        elif abs(np.conj(z[0]) + z[1]) < 1e-8 * scale:
            phase = "symmetric"
    return AntiPTReport(residual=residual, is_anti_pt=is_anti, phase=phase)

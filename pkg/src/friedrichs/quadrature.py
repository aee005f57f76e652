"""Integration helpers for band integrals with edge and pole structure.

Finite bands are integrated after the substitution omega = mid - half*cos(k),
k in [0, pi]: the Jacobian half*sin(k) removes inverse-square-root edge
divergences (van Hove) and flattens power-law edge zeros, so one scheme
covers every declared edge exponent.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import EdgeEvaluationFailure

_QUAD_LIMIT = 400


@lru_cache(maxsize=32)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _k_of_omega(omega, lo, up):
    mid, half = 0.5 * (lo + up), 0.5 * (up - lo)
    return float(np.arccos(np.clip((mid - omega) / half, -1.0, 1.0)))


def _finite_kernel_quad(j, lo, up, e, power, interior_points=(), epsrel=1e-11):
    """integral of J(w)/(e-w)^power over a finite band, substituted form."""
    mid, half = 0.5 * (lo + up), 0.5 * (up - lo)

    def f(k):
        w = mid - half * math.cos(k)
        return j(w) * half * math.sin(k) / (e - w) ** power

    pts = sorted({_k_of_omega(p, lo, up) for p in interior_points if lo < p < up})
    pts = [p for p in pts if 0.0 < p < np.pi]
    val, err = quad(
        f, 0.0, np.pi, points=pts or None, limit=_QUAD_LIMIT, epsabs=1e-14, epsrel=epsrel
    )
    return val, err


def _infinite_kernel_quad(j, lo, up, e, power, epsrel=1e-11):
    def f(w):
        return j(w) / (e - w) ** power

    val, err = quad(f, lo, up, limit=_QUAD_LIMIT, epsabs=1e-14, epsrel=epsrel)
    return val, err


def kernel_integral(j, lo, up, e, power=1, interior_points=(), epsrel=1e-11):
    """integral of J(w)/(e-w)^power dw over the band, with error estimate.

    e must lie outside (lo, up) or at a point where the integrand is
    regular (a J-zero of sufficient order).
    """
    if math.isfinite(lo) and math.isfinite(up):
        pts = set(interior_points)
        if lo < e < up:
            pts.add(e)  # removable singularity: split the panel there
        return _finite_kernel_quad(j, lo, up, e, power, tuple(pts), epsrel)
    return _infinite_kernel_quad(j, lo, up, e, power, epsrel)


def band_integral(f, lo, up, interior_points=(), epsrel=1e-10):
    """integral of f(w) dw over a finite band, substituted (edge-safe) form."""
    mid, half = 0.5 * (lo + up), 0.5 * (up - lo)

    def g(k):
        w = mid - half * math.cos(k)
        return f(w) * half * math.sin(k)

    pts = sorted({_k_of_omega(p, lo, up) for p in interior_points if lo < p < up})
    pts = [p for p in pts if 0.0 < p < np.pi]
    return quad(
        g, 0.0, np.pi, points=pts or None, limit=_QUAD_LIMIT, epsabs=1e-14, epsrel=epsrel
    )


def principal_value(j, lo, up, e, j_at_e=None, epsrel=1e-10):
    """P.V. integral of J(w)/(e-w) dw for e strictly inside the band.

    Finite band: singularity subtraction
        int [J(w)-J(e)]/(e-w) dw + J(e)*ln|(e-lo)/(up-e)|
    with the compensated integrand regular at w=e.  (Semi-)infinite bands
    use a symmetric window around e so the log term cancels, plus paired
    tails.
    """
    je = float(j_at_e) if j_at_e is not None else float(np.asarray(j(np.array([e])))[0])

    if math.isfinite(lo) and math.isfinite(up):
        mid, half = 0.5 * (lo + up), 0.5 * (up - lo)

        def f(k):
            w = mid - half * math.cos(k)
            if w == e:
                return 0.0  # limit is -J'(e)*half*sin(k); a point does not matter
            return (j(w) - je) * half * math.sin(k) / (e - w)

        ke = _k_of_omega(e, lo, up)
        val, err = quad(
            f, 0.0, np.pi, points=[ke], limit=_QUAD_LIMIT, epsabs=1e-14, epsrel=epsrel
        )
        return val + je * math.log((e - lo) / (up - e)), err

    # symmetric window of width W on both sides of e
    w_lo = e - lo if math.isfinite(lo) else math.inf
    w_up = up - e if math.isfinite(up) else math.inf
    win = min(w_lo, w_up)
    if not math.isfinite(win):
        win = 1.0 + abs(e)

    def central(u):
        if u == 0.0:
            return 0.0
        return ((j(e + u) - je) - (j(e - u) - je)) / (-u)

    val, err = quad(central, 0.0, win, limit=_QUAD_LIMIT, epsabs=1e-14, epsrel=epsrel)

    if math.isinf(lo) and math.isinf(up):
        def tails(u):
            return (j(e + u) - j(e - u)) / (-u)

        v2, e2 = quad(tails, win, math.inf, limit=_QUAD_LIMIT, epsabs=1e-12)
        return val + v2, err + e2

    v2 = e2 = 0.0
    if lo < e - win:
        a, b = quad(lambda w: j(w) / (e - w), lo, e - win, limit=_QUAD_LIMIT)
        v2 += a
        e2 += b
    if e + win < up:
        a, b = quad(lambda w: j(w) / (e - w), e + win, up, limit=_QUAD_LIMIT)
        v2 += a
        e2 += b
    return val + v2, err + e2


def certify(value_err, rel_needed, scale, what="band-edge comparison"):
    """Raise when a quadrature error estimate cannot support a comparison."""
    val, err = value_err
    if err > max(abs(val) * rel_needed, 1e-12 * scale):
        raise EdgeEvaluationFailure(
            f"{what}: value {val:.6e} with error estimate {err:.2e}"
        )
    return val


# ---------------------------------------------------------------------------
# vectorized fixed-rule evaluation on energy grids (brute-force scans)

def _band_nodes_weights(lo, up, n_nodes):
    x, w = _gauss_legendre(n_nodes)
    k = 0.5 * (x + 1.0) * np.pi
    wk = w * (np.pi / 2.0)
    mid, half = 0.5 * (lo + up), 0.5 * (up - lo)
    om = mid - half * np.cos(k)
    jac = half * np.sin(k)
    return om, wk * jac


def sigma_on_grid(j, lo, up, e_grid, n_nodes=600, chunk=4096):
    """Sigma(E) on a grid of energies outside a finite band (fixed rule)."""
    om, wgt = _band_nodes_weights(lo, up, n_nodes)
    jw = np.asarray(j(om), dtype=float) * wgt
    e_grid = np.asarray(e_grid, dtype=float)
    out = np.empty_like(e_grid)
    for i in range(0, e_grid.size, chunk):
        blk = e_grid[i : i + chunk]
        out[i : i + chunk] = (jw[None, :] / (blk[:, None] - om[None, :])).sum(axis=1)
    return out


def delta_on_grid(j, lo, up, e_grid, n_nodes=2000, chunk=512):
    """P.V. part Delta(E) on a grid strictly inside a finite band.

    Uses the subtracted form with a fixed substituted rule; the compensated
    integrand is as smooth as J, so the rule converges independently of how
    close grid points sit to the nodes.
    """
    om, wgt = _band_nodes_weights(lo, up, n_nodes)
    jv = np.asarray(j(om), dtype=float)
    e_grid = np.asarray(e_grid, dtype=float)
    je = np.asarray(j(e_grid), dtype=float)
    out = np.empty_like(e_grid)
    for i in range(0, e_grid.size, chunk):
        blk = e_grid[i : i + chunk]
        jb = je[i : i + chunk]
        diff = blk[:, None] - om[None, :]
        out[i : i + chunk] = (((jv[None, :] - jb[:, None]) / diff) * wgt[None, :]).sum(
            axis=1
        )
    return out + je * np.log((e_grid - lo) / (up - e_grid))


# ---------------------------------------------------------------------------
# linear-Filon transform for oscillatory integrals

def _moments(theta):
    """M0 = int_0^1 e^{-i th u} du and M1 = int_0^1 u e^{-i th u} du."""
    m0 = np.empty(theta.shape, dtype=complex)
    m1 = np.empty(theta.shape, dtype=complex)
    small = np.abs(theta) < 1e-4
    ts = theta[small]
    m0[small] = 1.0 - 0.5j * ts - ts**2 / 6.0 + 1j * ts**3 / 24.0 + ts**4 / 120.0
    m1[small] = 0.5 - 1j * ts / 3.0 - ts**2 / 8.0 + 1j * ts**3 / 30.0 + ts**4 / 144.0
    tl = theta[~small]
    ph = np.exp(-1j * tl)
    m0[~small] = (1.0 - ph) / (1j * tl)
    m1[~small] = (ph * (-1j * tl - 1.0) + 1.0) / (-(tl**2))
    return m0, m1


def fourier_linear(x, f, times, phase=None):
    """integral of f(x)*exp(-i*phase(x)*t) dx, f and phase piecewise linear.

    `phase` defaults to x itself.  Exact moments per panel keep the result
    uniformly accurate in t; a series fallback covers small phase steps.
    Returns an array of shape (len(times),).
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=complex)
    p = x if phase is None else np.asarray(phase, dtype=float)
    h = np.diff(x)
    dp = np.diff(p)
    a = f[:-1]
    df = np.diff(f)
    out = np.empty(len(times), dtype=complex)
    for it, t in enumerate(np.asarray(times, dtype=float)):
        m0, m1 = _moments(t * dp)
        out[it] = np.sum(h * np.exp(-1j * p[:-1] * t) * (a * m0 + df * m1))
    return out

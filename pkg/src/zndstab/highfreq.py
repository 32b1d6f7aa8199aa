"""Semiclassical symbol analysis of the planar front at high transverse frequency.

Frequencies scale as (lambda, xi) = (zeta/h, 1/h) with h -> 0.  The principal
symbol of the transposed dual interior equation is G0 = [(zeta + i A2) A1^{-1}]^T,
whose five eigenvalues have the closed forms implemented here: two acoustic
branches mu1 (decaying for Re zeta > 0), mu2, and the triple convected branch
zeta/u1.  Glancing points are where the acoustic pair collides (s = 0); they are
the nontrivial turning points of the semiclassical ODE.  The shock's own
stability function D_N = l0 . R1 is the h -> 0 principal part of the full
determinant, verified numerically by hf_ratio.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import GlancingError
from .eulerian import (MultiDProfile, euler_state, multid_jacobians,
                       sound_speed_sq, transverse_flux, unburned_state, source_5)
from .evans1d import IntegrationControls, _bordered_null
from .evans2d import Evans2D, _principal_sqrt
from .logpolar import EvansValue
from .params import ChemParams
from .profile import algebraic_state

__all__ = ["SymbolPoint", "symbol_eigs", "glancing_locus", "classify_type",
           "classify_from_samples", "TurningPoint", "turning_points",
           "turning_points_of_function", "NeumannLopatinski", "neumann_lopatinski",
           "hf_ratio", "HFRatioReport"]

_ANCHOR_R1 = np.array([1.0, 0.7, 0.0, 0.5, 0.3])


@dataclass(frozen=True)
class SymbolPoint:
    """Closed-form spectral data of the principal symbol at one profile point."""

    x: float
    c0: float
    u1: float
    kappa: float          # u1/c0
    eta: float            # 1 - u1^2/c0^2
    s_val: complex        # sqrt(zeta^2 + c0^2 - u1^2), principal branch
    mu: tuple             # (mu1, mu2, mu3, mu4, mu5)


def _symbol_quantities(z: float, params: ChemParams):
    tau, _, e = algebraic_state(z, params)
    u1 = float(tau)
    c0sq = sound_speed_sq(params.gamma, float(e))
    return u1, c0sq


def symbol_eigs(x: float, zeta: complex, profile: MultiDProfile) -> SymbolPoint:
    """Five closed-form symbol eigenvalues at position x of the reaction tail.

    mu1 = -kappa (kappa zeta + s)/(eta u1), mu2 with -s, mu3 = mu4 = mu5 =
    zeta/u1.  The branch of s is principal with Re s >= 0 on Re zeta > 0,
    continued onto the imaginary axis from the side of Im zeta.
    """
    z = _z_at_x(profile, x)
    return symbol_eigs_at_z(z, zeta, profile.params, x=x)


def symbol_eigs_at_z(z: float, zeta: complex, params: ChemParams,
                     x: float = float("nan")) -> SymbolPoint:
    u1, c0sq = _symbol_quantities(z, params)
    c0 = math.sqrt(c0sq)
    if u1 == 0.0:
        raise GlancingError("u1 = 0: symbol eigenvalues undefined")
    kap = u1 / c0
    eta = 1.0 - u1 * u1 / c0sq
    s = _principal_sqrt(zeta * zeta + c0sq - u1 * u1, zeta)
    mu1 = -kap * (kap * zeta + s) / (eta * u1)
    mu2 = -kap * (kap * zeta - s) / (eta * u1)
    mu3 = zeta / u1
    return SymbolPoint(x=x, c0=c0, u1=u1, kappa=kap, eta=eta, s_val=s,
                       mu=(mu1, mu2, mu3, mu3, mu3))


def principal_symbol(z: float, zeta: complex, params: ChemParams) -> np.ndarray:
    """G0 = [(zeta + i A2) A1^{-1}]^T assembled from the state at reactant level z."""
    st = euler_state(z, params)
    A1, A2, _ = multid_jacobians(st, params)
    return ((zeta * np.eye(5) + 1j * A2) @ np.linalg.inv(A1)).T


def _z_at_x(profile: MultiDProfile, x: float) -> float:
    if x <= 0.0:
        return 1.0
    if x >= profile.domain_length:
        return profile.z_min
    lo, hi = math.log(profile.z_min), 0.0
    sp = profile._x_spline
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if sp(mid) > x:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    return math.exp(0.5 * (lo + hi))


def glancing_locus(profile: MultiDProfile):
    """Tabulated glancing curve zeta*(x) = +/- i sqrt(c0^2 - u1^2) along the tail."""
    z = profile.z
    tau, _, e = algebraic_state(z, profile.params)
    g = profile.params.gamma
    c2mu2 = g * (g + 1.0) * np.asarray(e) - np.asarray(tau) ** 2
    root = np.sqrt(c2mu2)
    return profile.x.copy(), 1j * root, -1j * root


def lax_margin(profile: MultiDProfile) -> float:
    """min over the tail of c0^2 - u1^2 (positive iff the Lax condition holds)."""
    tau, _, e = algebraic_state(profile.z, profile.params)
    g = profile.params.gamma
    vals = g * (g + 1.0) * np.asarray(e) - np.asarray(tau) ** 2
    return float(np.min(vals))


def classify_from_samples(x: np.ndarray, g: np.ndarray, rtol: float = 1e-9) -> str:
    """'I' if g increases along x, 'D' if it decreases, else 'neither'.

    Monotone with a tolerance band: steps within +/- rtol*scale are treated as
    flat (profiles converge exponentially, so tail steps are below any strict
    threshold); a significant step in each direction, or no significant step
    at all, classifies as neither.
    """
    order = np.argsort(x)
    gs = np.asarray(g, dtype=float)[order]
    scale = max(abs(float(gs.max())), abs(float(gs.min())), 1e-300)
    d = np.diff(gs)
    tol = rtol * scale
    rises = bool(np.any(d > tol))
    falls = bool(np.any(d < -tol))
    if rises and not falls:
        return "I"
    if falls and not rises:
        return "D"
    return "neither"


def classify_type(profile: MultiDProfile, refine: int = 1) -> str:
    """Type of the detonation: monotonicity of x -> c0^2 - u1^2 on the tail."""
    n = len(profile.z) * refine
    s = np.linspace(math.log(profile.z_min), 0.0, n)
    z = np.exp(s)
    tau, _, e = algebraic_state(z, profile.params)
    g = profile.params.gamma
    vals = g * (g + 1.0) * np.asarray(e) - np.asarray(tau) ** 2
    x = profile._x_spline(s)
    return classify_from_samples(np.asarray(x), vals)


@dataclass(frozen=True)
class TurningPoint:
    x_star: float
    zeta_star: complex
    d_s_squared: float   # d/dx of s^2 at the turning point
    nondegenerate: bool


def turning_points_of_function(g_of_x, x_grid, zeta: complex,
                               slope_tol: float = 1e-8):
    """Roots of s^2(x) = zeta^2 + g(x) on a grid, by bracketing and bisection.

    g supplies c0^2 - u1^2 as a function of x; zeta must be purely imaginary
    (s^2 is then real).  Degenerate turning points (flat s^2) are flagged,
    never dropped.
    """
    if abs(zeta.real) > 1e-12 * (1.0 + abs(zeta)):
        raise GlancingError(
            f"turning points are defined for imaginary zeta, got {zeta}")
    tau2 = zeta.imag ** 2
    xs = np.asarray(x_grid, dtype=float)
    vals = np.array([g_of_x(x) for x in xs]) - tau2
    out = []
    for i in range(len(xs) - 1):
        a, b = xs[i], xs[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            root = a
        elif fa * fb < 0.0:
            root = brentq(lambda x: g_of_x(x) - tau2, a, b, xtol=1e-13)
        else:
            continue
        h = max(1e-7, 1e-7 * abs(root))
        slope = (g_of_x(root + h) - g_of_x(max(root - h, xs[0]))) / (
            (root + h) - max(root - h, xs[0]))
        scale = max(tau2, 1.0)
        out.append(TurningPoint(x_star=float(root), zeta_star=zeta,
                                d_s_squared=float(slope),
                                nondegenerate=abs(slope) > slope_tol * scale))
    if len(xs) and vals[-1] == 0.0:
        out.append(TurningPoint(x_star=float(xs[-1]), zeta_star=zeta,
                                d_s_squared=0.0, nondegenerate=False))
    return out


def turning_points(zeta: complex, profile: MultiDProfile,
                   n_grid: int = 2001, slope_tol: float = 1e-8):
    """Glancing positions s(x, zeta) = 0 on the reaction tail for imaginary zeta."""
    s_grid = np.linspace(math.log(profile.z_min), 0.0, n_grid)
    z = np.exp(s_grid)
    tau, _, e = algebraic_state(z, profile.params)
    g = profile.params.gamma
    vals = g * (g + 1.0) * np.asarray(e) - np.asarray(tau) ** 2
    x = np.asarray(profile._x_spline(s_grid), dtype=float)
    order = np.argsort(x)
    x_sorted = x[order]
    v_sorted = vals[order]

    from scipy.interpolate import CubicSpline
    gfun = CubicSpline(x_sorted, v_sorted)
    return turning_points_of_function(lambda t: float(gfun(t)), x_sorted, zeta,
                                      slope_tol=slope_tol)


@dataclass(frozen=True)
class NeumannLopatinski:
    """Shock stability function at the ignited side of the front."""

    ell0: np.ndarray      # zeta [U] + i [F2(U)], jump = unburned - ignited
    r1: np.ndarray        # decaying-mode eigenvector of the frozen symbol at 0^+
    value: complex        # D_N = ell0 . r1


def neumann_lopatinski(zeta: complex, profile: MultiDProfile) -> NeumannLopatinski:
    """Frozen-coefficient Lopatinski determinant D_N = l0 . R1 at x = 0^+.

    R1 is the mu1 eigenvector of the principal symbol at the Neumann state,
    normalized by a bordered solve against a fixed real anchor with zero
    transverse component (analytic in zeta, conjugation-equivariant).
    """
    params = profile.params
    sp = symbol_eigs_at_z(1.0, zeta, params, x=0.0)
    if abs(sp.s_val) < 1e-10 * (1.0 + abs(zeta)):
        raise GlancingError(f"zeta={zeta} is glancing at the Neumann state")
    G0 = principal_symbol(1.0, zeta, params)
    N = (G0 - sp.mu[0] * np.eye(5)).astype(complex)
    r1 = _bordered_null(N, _ANCHOR_R1)
    jump = unburned_state(params).conserved - profile.neumann_plus.conserved
    f2_jump = (transverse_flux(unburned_state(params), params.gamma)
               - transverse_flux(profile.neumann_plus, params.gamma))
    ell0 = zeta * jump + 1j * f2_jump
    return NeumannLopatinski(ell0=ell0, r1=r1, value=complex(ell0 @ r1))


@dataclass
class HFRatioReport:
    zeta: complex
    h_grid: list
    deviations: list       # |D_ZND/D_N - 1| per h
    fitted_order: float
    monotone: bool


def hf_ratio(zeta: complex, h_grid, profile: MultiDProfile,
             controls: IntegrationControls | None = None) -> HFRatioReport:
    """Measures D_ZND(zeta/h, 1/h) / D_N(zeta) -> 1 with rate O(h).

    The comparison is normalization-free: the dual solution direction U(0+) is
    paired with the h-scaled boundary vector and referenced against R1 through
    a common anchor, so integration prefactors cancel exactly.
    """
    ev = Evans2D(profile, controls)
    dn = neumann_lopatinski(zeta, profile)
    r = _ANCHOR_R1
    devs = []
    for h in h_grid:
        lam = zeta / h
        xi = 1.0 / h
        res = ev.evaluate(lam, xi)
        U = res.boundary_direction
        b_scaled = h * ev.boundary_vector(lam, xi)
        ratio = ((U @ b_scaled) * (r @ dn.r1)) / ((r @ U) * (dn.ell0 @ dn.r1))
        devs.append(abs(ratio - 1.0))
    hs = np.asarray(list(h_grid), dtype=float)
    devs_a = np.asarray(devs)
    slope = float(np.polyfit(np.log(hs), np.log(devs_a), 1)[0])
    monotone = bool(np.all(np.diff(devs_a[np.argsort(-hs)]) < 0.0))
    return HFRatioReport(zeta=zeta, h_grid=list(h_grid), deviations=devs,
                         fitted_order=slope, monotone=monotone)

"""Closed-form ZND detonation profiles in the wave-normalized scaling.

The gas state along the reaction zone is algebraic in the reactant fraction z:
u = 1 - tau and e = tau*(Gamma e+ + 1 - tau)/Gamma with tau the strong
(minus-branch) root of the profile quadratic.  Only the scalar reactant ODE
z' = k phi(T) z needs quadrature, done here with z (equivalently s = ln z) as
the independent variable so the spatial tail costs nothing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.integrate import quad

from .errors import DegenerateProfileError, ParameterDomainError
from .params import ChemParams, q_cj

__all__ = ["ProfilePoint", "ZNDProfile", "algebraic_state", "reaction_rhs",
           "compute_profile", "lagrangian_flux", "lagrangian_source",
           "rankine_hugoniot_residual"]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class ProfilePoint:
    """One state sample of the steady wave."""

    x: float
    tau: float
    u: float
    e: float
    z: float
    p: float
    T: float


def algebraic_state(z, params: ChemParams):
    """Gas state (tau, u, e) at reactant fraction z, vectorized over z.

    Returns the strong-detonation (minus) branch of the profile quadratic.
    """
    g = params.gamma
    ep = params.e_plus
    q = params.heat_release
    z = np.asarray(z, dtype=float)
    if np.any(z < -1e-15) or np.any(z > 1.0 + 1e-15):
        raise ParameterDomainError("reactant fraction z must lie in [0, 1]")
    disc = ((g + 1.0) ** 2 * (g * ep + 1.0) ** 2
            - g * (g + 2.0) * (1.0 + 2.0 * (g + 1.0) * ep - 2.0 * q * (z - 1.0)))
    if np.any(disc < 0.0):
        raise ParameterDomainError(
            f"negative profile discriminant: q={q} violates q <= q_cj="
            f"{q_cj(g, ep)} at gamma={g}, e_plus={ep}")
    tau = ((g + 1.0) * (g * ep + 1.0) - np.sqrt(disc)) / (g + 2.0)
    u = 1.0 - tau
    e = tau * (g * ep + 1.0 - tau) / g
    return tau, u, e


def temperature(z, params: ChemParams):
    _, _, e = algebraic_state(z, params)
    return e / params.specific_heat


def reaction_rhs(z, params: ChemParams):
    """dz/dx = k * exp(-activation/T(z)) * z along the reaction zone."""
    T = temperature(z, params)
    if params.activation == 0.0:
        phi = np.ones_like(np.asarray(T, dtype=float))
    else:
        phi = np.exp(-params.activation / T)
    return params.rate * phi * np.asarray(z, dtype=float)


def _inv_rate_of_s(s, params: ChemParams):
    """dx/ds with s = ln z: equals 1/(k phi(T(e^s)))."""
    z = np.exp(s)
    T = temperature(z, params)
    if params.activation == 0.0:
        phi = np.ones_like(np.asarray(T, dtype=float))
    else:
        phi = np.exp(-params.activation / T)
    return 1.0 / (params.rate * phi)


@dataclass(frozen=True)
class ZNDProfile:
    """A computed steady detonation wave on x in [-M, 0].

    Grid arrays run from the burned tail (z = z_min, x = -M) up to the shock
    (z = 1, x = 0).  All arrays are read-only; the profile is safe to share
    across threads.
    """

    params: ChemParams
    z: np.ndarray
    x: np.ndarray
    tau: np.ndarray
    u: np.ndarray
    e: np.ndarray
    p: np.ndarray
    T: np.ndarray
    z_min: float
    domain_length: float          # M = |x(z_min)|
    half_reaction_length: float   # |x(1/2)|
    neumann_minus: ProfilePoint   # ignited state at x = 0^-
    quiescent_plus: ProfilePoint  # unburned state at x = 0^+

    def __post_init__(self):
        for arr in (self.z, self.x, self.tau, self.u, self.e, self.p, self.T):
            arr.setflags(write=False)

    @property
    def grid(self):
        """Profile samples as ProfilePoint records, ordered by increasing x."""
        return [ProfilePoint(x=float(self.x[i]), tau=float(self.tau[i]),
                             u=float(self.u[i]), e=float(self.e[i]),
                             z=float(self.z[i]), p=float(self.p[i]),
                             T=float(self.T[i]))
                for i in range(len(self.z))]

    def x_of_z(self, z):
        """Spatial coordinate of a reactant level, from the stored cumulative map."""
        s = np.log(np.asarray(z, dtype=float))
        return self._x_spline(s)

    def z_of_x(self, x):
        """Reactant level at spatial coordinate x in [-M, 0], by monotone inversion."""
        x = np.asarray(x, dtype=float)
        sp = self._x_spline
        out = np.empty_like(x)
        it = np.nditer(x, flags=["multi_index"])
        for xi in it:
            lo, hi = math.log(self.z_min), 0.0
            # Newton with bisection fallback on the monotone spline
            s = hi if xi >= 0 else lo + (hi - lo) * 0.5
            for _ in range(60):
                f = sp(s) - float(xi)
                if f > 0:
                    hi = s
                else:
                    lo = s
                ds = f / max(sp(s, 1), 1e-300)
                s_new = s - ds
                if not (lo <= s_new <= hi):
                    s_new = 0.5 * (lo + hi)
                if abs(s_new - s) < 1e-15 * (1.0 + abs(s)):
                    s = s_new
                    break
                s = s_new
            out[it.multi_index] = math.exp(s)
        return out

    @cached_property
    def _x_spline(self) -> CubicSpline:
        return CubicSpline(np.log(self.z), self.x)


def lagrangian_flux(W, params: ChemParams):
    """Steady-frame flux of the conserved variables W = (tau, u, E, z), s = 1."""
    tau, u, E, z = W
    e = E - 0.5 * u * u
    p = params.gamma * e / tau
    return np.array([-u - tau, p - u, p * u - E, -z])

def lagrangian_source(W, params: ChemParams):
    """Reaction source for W = (tau, u, E, z)."""
    tau, u, E, z = W
    e = E - 0.5 * u * u
    T = e / params.specific_heat
    phi = math.exp(-params.activation / T) if params.activation != 0.0 else 1.0
    g = params.rate * phi * z
    return np.array([0.0, 0.0, params.heat_release * g, -g])


def conserved_state(z, params: ChemParams):
    """W = (tau, u, E_total, z) at reactant level z."""
    tau, u, e = algebraic_state(z, params)
    return np.array([float(tau), float(u), float(e) + 0.5 * float(u) ** 2, float(z)])


def rankine_hugoniot_residual(profile: ZNDProfile) -> np.ndarray:
    """Componentwise flux jump across the Neumann shock; zero for an exact profile."""
    p = profile.params
    W_plus = conserved_state(1.0, p).copy()
    W_plus[:3] = [1.0, 0.0, p.e_plus]
    W_minus = conserved_state(1.0, p)
    return lagrangian_flux(W_plus, p) - lagrangian_flux(W_minus, p)


def compute_profile(params: ChemParams, z_min: float = 1e-10,
                    n_points: int = 2001) -> ZNDProfile:
    """Integrate the spatial map x(z) and assemble the full profile.

    x(z) = -int_z^1 dzeta / (k phi(T(zeta)) zeta), evaluated as a cumulative
    Gauss-Legendre quadrature over a grid uniform in ln z (the integrand is
    smooth and bounded there).  Requires q < q_cj strictly; the CJ point has
    an algebraically decaying profile which this construction does not cover.
    """
    if not 0.0 < z_min < 1.0:
        raise ParameterDomainError(f"z_min must lie in (0, 1), got {z_min}")
    qmax = q_cj(params.gamma, params.e_plus)
    if params.heat_release >= qmax * (1.0 - 1e-12) and params.heat_release > 0.0:
        raise DegenerateProfileError(
            f"q={params.heat_release} is at the Chapman-Jouget bound q_cj={qmax}; "
            "the profile decays algebraically and is not supported")

    s_lo = math.log(z_min)
    s_grid = np.linspace(s_lo, 0.0, n_points)
    s_half = math.log(0.5)
    if not np.any(np.isclose(s_grid, s_half, rtol=0, atol=1e-14)):
        s_grid = np.sort(np.append(s_grid, s_half))

    # cumulative quadrature of dx/ds from the shock (s=0) downward
    x = np.zeros_like(s_grid)
    for i in range(len(s_grid) - 1, 0, -1):
        a, b = s_grid[i - 1], s_grid[i]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes = mid + half * _GL_NODES
        seg = half * np.dot(_GL_WEIGHTS, _inv_rate_of_s(nodes, params))
        x[i - 1] = x[i] - seg

    z = np.exp(s_grid)
    tau, u, e = algebraic_state(z, params)
    p_arr = params.gamma * e / tau
    T_arr = e / params.specific_heat

    i_half = int(np.argmin(np.abs(s_grid - s_half)))
    half_len = abs(x[i_half])

    tau_n, u_n, e_n = (float(v) for v in algebraic_state(1.0, params))
    neumann = ProfilePoint(x=0.0, tau=tau_n, u=u_n, e=e_n, z=1.0,
                           p=params.gamma * e_n / tau_n,
                           T=e_n / params.specific_heat)
    quiescent = ProfilePoint(x=0.0, tau=1.0, u=0.0, e=params.e_plus, z=1.0,
                             p=params.gamma * params.e_plus,
                             T=params.e_plus / params.specific_heat)

    return ZNDProfile(params=params, z=z, x=x, tau=np.asarray(tau),
                      u=np.asarray(u), e=np.asarray(e), p=p_arr, T=T_arr,
                      z_min=z_min, domain_length=abs(x[0]),
                      half_reaction_length=half_len,
                      neumann_minus=neumann, quiescent_plus=quiescent)


def x_of_z_quadrature(z: float, params: ChemParams) -> float:
    """Direct adaptive quadrature for x(z); reference implementation for tests."""
    val, _ = quad(lambda s: float(_inv_rate_of_s(s, params)), math.log(z), 0.0,
                  epsabs=1e-14, epsrel=1e-13, limit=500)
    return -val


def domain_length(params: ChemParams, z_min: float, n_segments: int = 4096) -> float:
    """M = |x(z_min)| by composite Gauss-Legendre in s = ln z (machine accurate)."""
    edges = np.linspace(math.log(z_min), 0.0, n_segments + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = _inv_rate_of_s(nodes.ravel(), params).reshape(nodes.shape)
    return float(np.sum(half * (vals @ _GL_WEIGHTS)))

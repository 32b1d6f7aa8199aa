"""Planar ZND waves in Eulerian coordinates (d = 2) and their linearization.

The standing left-facing front has constant unburned gas on x < 0 streaming
rightward at unit mass flux, the nonreactive Neumann shock at x = 0, and the
reaction tail on x > 0.  States along the tail are reconstructed from the
three steady flux invariants (mass, momentum, energy-with-formation-enthalpy),
an algebraic route independent of the Lagrangian closed form, which the test
suite cross-validates against it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ParameterDomainError
from .params import ChemParams
from .profile import algebraic_state

__all__ = ["EulerState", "MultiDProfile", "euler_state", "euler_state_from_fluxes",
           "multid_jacobians", "eulerian_profile", "transverse_flux", "source_5",
           "sound_speed_sq"]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def sound_speed_sq(gamma: float, e: float) -> float:
    """c0^2 = Gamma (Gamma+1) e for the polytropic law p = Gamma e / tau."""
    return gamma * (gamma + 1.0) * e


@dataclass(frozen=True)
class EulerState:
    """Conserved 5-vector (rho, rho u1, rho u2, rho E, rho z) plus primitives."""

    conserved: np.ndarray

    def __post_init__(self):
        self.conserved.setflags(write=False)
        if self.rho <= 0.0:
            raise ParameterDomainError(f"density must be positive, got {self.rho}")

    @property
    def rho(self): return float(self.conserved[0])

    @property
    def u1(self): return float(self.conserved[1] / self.conserved[0])

    @property
    def u2(self): return float(self.conserved[2] / self.conserved[0])

    @property
    def e(self):
        rho, m1, m2, EE, _ = self.conserved
        return float(EE / rho - 0.5 * (m1 * m1 + m2 * m2) / rho ** 2)

    @property
    def z(self): return float(self.conserved[4] / self.conserved[0])

    def pressure(self, gamma: float) -> float:
        return gamma * self.rho * self.e

    def temperature(self, specific_heat: float) -> float:
        return self.e / specific_heat


def euler_state(z, params: ChemParams) -> EulerState:
    """Eulerian state at reactant level z via the Lagrangian closed form.

    Unit mass flux through the standing front gives rho = 1/tau, u1 = tau.
    """
    tau, _, e = algebraic_state(z, params)
    tau = float(tau); e = float(e)
    rho = 1.0 / tau
    u1 = tau
    return EulerState(np.array([rho, rho * u1, 0.0, rho * (e + 0.5 * u1 * u1),
                                rho * float(z)]))


def unburned_state(params: ChemParams) -> EulerState:
    return EulerState(np.array([1.0, 1.0, 0.0, params.e_plus + 0.5, 1.0]))


def _flux_invariants(params: ChemParams):
    """(mass, momentum, stagnation-enthalpy-plus-heat) of the unburned stream."""
    ep = params.e_plus
    g = params.gamma
    m0 = 1.0
    P0 = 1.0 + g * ep
    H0 = ep + 0.5 + g * ep + params.heat_release
    return m0, P0, H0


def euler_state_from_fluxes(z: float, params: ChemParams) -> EulerState:
    """Tail state from the steady flux invariants; independent of algebraic_state.

    With m = rho u1 = 1: momentum u1 + Gamma e / u1 = P0 and energy
    (1+Gamma) e + u1^2/2 + q z = H0 combine to a quadratic in u1; the strong
    branch is the smaller (subsonic) root.
    """
    g = params.gamma
    q = params.heat_release
    m0, P0, H0 = _flux_invariants(params)
    a = (1.0 + g) - 0.5 * g
    b = -(1.0 + g) * P0
    c = g * (H0 - q * z)
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise ParameterDomainError(
            f"flux-invariant discriminant negative at z={z}: q exceeds the CJ bound")
    u1 = (-b - math.sqrt(disc)) / (2.0 * a)
    e = u1 * (P0 - u1) / g
    rho = m0 / u1
    return EulerState(np.array([rho, m0, 0.0, rho * (e + 0.5 * u1 * u1), rho * z]))


def transverse_flux(state: EulerState, gamma: float) -> np.ndarray:
    """F2(U): flux of the conserved variables in the transverse direction."""
    rho, m1, m2, EE, QQ = state.conserved
    u2 = m2 / rho
    p = gamma * rho * state.e
    return np.array([m2, m1 * u2, m2 * u2 + p, u2 * (EE + p), QQ * u2])


def source_5(state: EulerState, params: ChemParams) -> np.ndarray:
    """Reaction source of the conserved system (per unit volume)."""
    T = state.temperature(params.specific_heat)
    phi = math.exp(-params.activation / T) if params.activation != 0.0 else 1.0
    gq = params.rate * phi * state.rho * state.z
    return np.array([0.0, 0.0, 0.0, params.heat_release * gq, -gq])


def multid_jacobians(state: EulerState, params: ChemParams):
    """(A1, A2, Emat) of the conservative reactive Euler system at one state.

    Valid for general u2 (the planar profile has u2 = 0); each matches central
    finite differences of the flux and source maps.
    """
    g = params.gamma
    rho, m1, m2, EE, QQ = state.conserved
    u1 = m1 / rho
    u2 = m2 / rho
    ke = 0.5 * (u1 * u1 + u2 * u2)
    e = EE / rho - ke
    p = g * rho * e
    H = (EE + p) / rho
    z = QQ / rho

    A1 = np.array([
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [-u1 * u1 + g * ke, (2.0 - g) * u1, -g * u2, g, 0.0],
        [-u1 * u2, u2, u1, 0.0, 0.0],
        [u1 * (g * ke - H), H - g * u1 * u1, -g * u1 * u2, (1.0 + g) * u1, 0.0],
        [-u1 * z, z, 0.0, 0.0, u1]])
    A2 = np.array([
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [-u1 * u2, u2, u1, 0.0, 0.0],
        [-u2 * u2 + g * ke, -g * u1, (2.0 - g) * u2, g, 0.0],
        [u2 * (g * ke - H), -g * u1 * u2, H - g * u2 * u2, (1.0 + g) * u2, 0.0],
        [-u2 * z, 0.0, z, 0.0, u2]])

    if np.abs(np.linalg.det(A1)) < 1e-14 * max(1.0, abs(u1)) ** 5:
        raise ParameterDomainError("A1 is singular (characteristic front)")

    T = e / params.specific_heat
    phi = math.exp(-params.activation / T) if params.activation != 0.0 else 1.0
    dphi_de = (phi * params.activation / (T * T) / params.specific_heat
               if params.activation != 0.0 else 0.0)
    de = np.array([(ke - e) / rho, -u1 / rho, -u2 / rho, 1.0 / rho, 0.0])
    dg = params.rate * (QQ * dphi_de * de + phi * np.array([0.0, 0.0, 0.0, 0.0, 1.0]))
    Em = np.zeros((5, 5))
    Em[3] = params.heat_release * dg
    Em[4] = -dg
    return A1, A2, Em


@dataclass(frozen=True)
class MultiDProfile:
    """Planar Eulerian profile: constant unburned state, tail on x in [0, M]."""

    params: ChemParams
    z: np.ndarray          # from z_min (far tail) to 1 (shock), matching x descending
    x: np.ndarray          # x(z), decreasing to 0 at z = 1
    rho: np.ndarray
    u1: np.ndarray
    e: np.ndarray
    p: np.ndarray
    z_min: float
    domain_length: float
    neumann_plus: EulerState    # ignited state at x = 0^+
    unburned_minus: EulerState  # quiescent stream at x = 0^-

    def __post_init__(self):
        for arr in (self.z, self.x, self.rho, self.u1, self.e, self.p):
            arr.setflags(write=False)

    @cached_property
    def _x_spline(self) -> CubicSpline:
        return CubicSpline(np.log(self.z), self.x)

    def x_of_z(self, z):
        return self._x_spline(np.log(np.asarray(z, dtype=float)))

    def state(self, z: float) -> EulerState:
        return euler_state(z, self.params)

    def jump(self) -> np.ndarray:
        """[U] = U(0+) - U(0-) across the Neumann shock, conserved variables."""
        return self.neumann_plus.conserved - self.unburned_minus.conserved


def eulerian_profile(params: ChemParams, z_min: float = 1e-10,
                     n_points: int = 2001) -> MultiDProfile:
    """Steady Eulerian profile from the flux invariants plus the scalar z-ODE."""
    if not 0.0 < z_min < 1.0:
        raise ParameterDomainError(f"z_min must lie in (0, 1), got {z_min}")
    s_grid = np.linspace(math.log(z_min), 0.0, n_points)
    z = np.exp(s_grid)

    u1 = np.empty_like(z)
    e = np.empty_like(z)
    rho = np.empty_like(z)
    for i, zz in enumerate(z):
        st = euler_state_from_fluxes(float(zz), params)
        u1[i] = st.u1
        e[i] = st.e
        rho[i] = st.rho
    p = params.gamma * rho * e

    # dx/ds = -u1/(k phi); cumulative from the shock outward (x >= 0)
    k = params.rate
    Ea = params.activation
    c = params.specific_heat

    def dxds(s):
        zz = np.exp(s)
        tau_, _, e_ = algebraic_state(zz, params)
        phi = np.exp(-Ea * c / np.asarray(e_)) if Ea != 0.0 else np.ones_like(np.asarray(e_))
        return np.asarray(tau_) / (k * phi)

    x = np.zeros_like(s_grid)
    for i in range(len(s_grid) - 1, 0, -1):
        a, b = s_grid[i - 1], s_grid[i]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        seg = half * np.dot(_GL_WEIGHTS, dxds(mid + half * _GL_NODES))
        x[i - 1] = x[i] + seg

    return MultiDProfile(params=params, z=z, x=x, rho=rho, u1=u1, e=e, p=p,
                         z_min=z_min, domain_length=float(x[0]),
                         neumann_plus=euler_state(1.0, params),
                         unburned_minus=unburned_state(params))


def domain_length_eulerian(params: ChemParams, z_min: float,
                           n_segments: int = 4096) -> float:
    """M = x(z_min) of the Eulerian tail, composite Gauss-Legendre in s = ln z."""
    k = params.rate
    Ea = params.activation
    c = params.specific_heat
    edges = np.linspace(math.log(z_min), 0.0, n_segments + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    tau_, _, e_ = algebraic_state(np.exp(nodes), params)
    phi = np.exp(-Ea * c / np.asarray(e_)) if Ea != 0.0 else np.ones_like(np.asarray(e_))
    vals = (np.asarray(tau_) / (k * phi)).reshape(len(mid), len(_GL_NODES))
    return float(np.sum(half * (vals @ _GL_WEIGHTS)))

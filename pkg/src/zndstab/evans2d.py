"""Multi-dimensional Evans-Lopatinski determinant for planar ZND fronts.

D(lambda, xi) = Z(0+) . (lambda [U] + i xi [F2(U)] + R(U)(0+)), with Z the
solution of the transposed dual equation decaying as x -> +infinity,
integrated backward from the burned tail to the shock.  The i on the
transverse term matches the principal symbol (zeta + i A2); see the decisions
ledger for the sign conventions adopted.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConsistencyError, GlancingError, IntegrationError
from .evans1d import IntegrationControls, _bordered_null
from .eulerian import (MultiDProfile, domain_length_eulerian, euler_state,
                       multid_jacobians, source_5, sound_speed_sq,
                       transverse_flux, unburned_state)
from .logpolar import EvansValue, _wrap
from .params import ChemParams
from .profile import algebraic_state

__all__ = ["MultiDQuery", "dual_init_2d", "evans_multid", "Evans2D"]

_ANCHOR_5 = np.array([1.0, 0.7, 0.0, 0.5, 0.3])  # zero transverse component


@dataclass(frozen=True)
class MultiDQuery:
    """A frequency pair (lambda, xi) with the transverse wavenumber real."""

    lam: complex
    xi: float


def _burned_quantities(params: ChemParams):
    tau_b, _, e_b = algebraic_state(0.0, params)
    tau_b = float(tau_b); e_b = float(e_b)
    u1 = tau_b
    c0sq = sound_speed_sq(params.gamma, e_b)
    return u1, c0sq


def acoustic_branch(lam: complex, xi: float, u1: float, c0sq: float) -> complex:
    """Decaying dual eigenvalue -(lambda u1 + c0 S)/(eta c0^2), principal S."""
    c0 = math.sqrt(c0sq)
    arg = lam * lam + xi * xi * (c0sq - u1 * u1)
    S = _principal_sqrt(arg, lam)
    eta = (c0sq - u1 * u1) / c0sq
    return -(lam * u1 + c0 * S) / (eta * c0sq)


def _principal_sqrt(w: complex, direction_hint: complex) -> complex:
    """Principal square root, continued onto the negative real axis from the
    side indicated by the sign of Im(direction_hint)."""
    if w.real < 0.0 and w.imag == 0.0:
        sign = 1.0 if direction_hint.imag >= 0.0 else -1.0
        return 1j * sign * math.sqrt(-w.real)
    return cmath.sqrt(w)


@dataclass(frozen=True)
class DualMode2D:
    growth_rate: complex
    vector: np.ndarray
    continued: bool


def dual_init_2d(lam: complex, xi: float, params: ChemParams) -> DualMode2D:
    """Decaying dual mode of the burned end state for a (lambda, xi) query."""
    u1, c0sq = _burned_quantities(params)
    lam_eff = lam
    if abs(lam) + abs(xi) < 1e-8:
        lam_eff = complex(1e-8)
    mu = acoustic_branch(lam_eff, xi, u1, c0sq)

    # glancing guard: S ~ 0 collapses the two acoustic branches
    c0 = math.sqrt(c0sq)
    S = _principal_sqrt(lam_eff * lam_eff + xi * xi * (c0sq - u1 * u1), lam_eff)
    if abs(S) < 1e-10 * (1.0 + abs(lam) + abs(xi)):
        raise GlancingError(
            f"(lambda, xi) = ({lam}, {xi}) is glancing at the burned state")

    # uniqueness of the decaying (Re < 0) branch among the closed-form duals
    tau_b, _, e_b = algebraic_state(0.0, params)
    phi_b = (math.exp(-params.activation * params.specific_heat / float(e_b))
             if params.activation != 0.0 else 1.0)
    kphi = params.rate * phi_b
    eta = (c0sq - u1 * u1) / c0sq
    branches = np.array([
        mu,
        -(lam_eff * u1 - c0 * S) / (eta * c0sq),
        lam_eff / u1, lam_eff / u1,
        (lam_eff + kphi) / u1])
    tol = 1e-12 * (1.0 + abs(lam) + abs(xi))
    if lam.real > tol:
        # strict regime: decay toward x -> +infinity means Re < 0, exactly once
        n_neg = int(np.sum(branches.real < -tol))
        if n_neg != 1:
            raise ConsistencyError(
                f"expected one decaying dual mode at (lambda, xi)=({lam}, {xi}), "
                f"found {n_neg}: {branches}")
        continued = False
    else:
        gaps = np.abs(branches[1:] - mu)
        if abs(lam) + abs(xi) > tol and np.min(gaps) < tol:
            raise ConsistencyError(
                f"dual branch collision at (lambda, xi)=({lam}, {xi}): {branches}")
        continued = True

    st = euler_state(0.0, params)
    A1, A2, Em = multid_jacobians(st, params)
    N = ((-lam_eff * np.eye(5) - 1j * xi * A2 + Em) + mu * A1).T.astype(complex)
    V = _bordered_null(N, _ANCHOR_5)
    res = np.linalg.norm(N @ V) / np.linalg.norm(V)
    if res > 1e-8 * (1.0 + abs(lam_eff) + abs(xi)):
        raise ConsistencyError(
            f"2D dual eigenvector residual {res} at (lambda, xi)=({lam}, {xi})")
    return DualMode2D(growth_rate=complex(mu), vector=V, continued=continued)


@dataclass(frozen=True)
class Evans2DResult:
    value: EvansValue
    boundary_direction: np.ndarray  # unit-scale dual vector at x = 0^+
    nsteps: int
    continued_init: bool


class Evans2D:
    """Evaluator of D(lambda, xi) bound to one Eulerian profile."""

    def __init__(self, profile: MultiDProfile, controls: IntegrationControls | None = None):
        self.profile = profile
        self.params = profile.params
        self.controls = controls or IntegrationControls()
        self._P = kernels.pack_params(self.params)
        # Jump taken as (0^-) - (0^+) for the left-facing front: the relative
        # sign between the frequency terms and the ignited-side source is
        # fixed by requiring the xi = 0 root set to match the 1D module
        # (cross-coordinate oracle; see the decisions ledger).
        self._jump = -profile.jump()
        self._f2_jump = (transverse_flux(profile.unburned_minus, self.params.gamma)
                         - transverse_flux(profile.neumann_plus, self.params.gamma))
        self._source = source_5(profile.neumann_plus, self.params)
        self._quad_cache: dict = {}

    def _tail_quadrature(self, z_min: float):
        """Cached Gauss-Legendre nodes of the tail for the WKB phase functional."""
        cached = self._quad_cache.get(z_min)
        if cached is not None:
            return cached
        p = self.params
        nodes_gl, weights_gl = np.polynomial.legendre.leggauss(12)
        n_segments = 512
        edges = np.linspace(math.log(z_min), 0.0, n_segments + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        s = (mid[:, None] + half[:, None] * nodes_gl[None, :]).ravel()
        z = np.exp(s)
        tau, _, e = algebraic_state(z, p)
        tau = np.asarray(tau); e = np.asarray(e)
        u1 = tau
        c0sq = p.gamma * (p.gamma + 1.0) * e
        if p.activation != 0.0:
            phi = np.exp(-p.activation * p.specific_heat / e)
        else:
            phi = np.ones_like(e)
        # |dx/ds| with x decreasing in s; integrating mu dx over [0, M] equals
        # integrating mu * (u1/(k phi)) ds over [s0, 0]
        w = (np.tile(half[:, None], (1, len(nodes_gl))).ravel() *
             np.tile(weights_gl[None, :], (len(mid), 1)).ravel() * u1 / (p.rate * phi))
        c0 = np.sqrt(c0sq)
        c2mu2 = c0sq - u1 * u1
        k20 = float(np.sum(w * (u1 + c0) / c2mu2))
        cached = (w, u1, c0, c2mu2, k20)
        self._quad_cache[z_min] = cached
        return cached

    def _wkb_phase(self, lam: complex, xi: float, z_min: float) -> complex:
        """kappa2 = int_0^M mu_1(x; lambda, xi) dx, the removable prefactor exponent."""
        w, u1, c0, c2mu2, k20 = self._tail_quadrature(z_min)
        if xi == 0.0:
            return -lam * k20
        arg = lam * lam + xi * xi * c2mu2
        S = np.sqrt(arg.astype(complex))
        neg = (arg.real < 0.0) & (arg.imag == 0.0)
        if np.any(neg):
            sign = 1.0 if lam.imag >= 0.0 else -1.0
            S[neg] = 1j * sign * np.sqrt(-arg.real[neg])
        mu = -(lam * u1 + c0 * S) / c2mu2
        return complex(np.sum(w * mu))

    def boundary_vector(self, lam: complex, xi: float) -> np.ndarray:
        return lam * self._jump + 1j * xi * self._f2_jump + self._source

    def evaluate(self, lam: complex, xi: float,
                 controls: IntegrationControls | None = None) -> Evans2DResult:
        ctl = controls or self.controls
        mode = dual_init_2d(lam, xi, self.params)
        V = mode.vector
        nv = np.linalg.norm(V)
        # normalize by the WKB phase functional of the decaying branch: the
        # reported value is truncation independent and free of the huge
        # entire prefactor (zeros, windings, symmetry unaffected)
        kappa = self._wkb_phase(complex(lam), float(xi), ctl.z_min)
        y0 = np.empty(6, dtype=complex)
        y0[:5] = V / nv
        y0[5] = math.log(nv) + kappa
        s0 = math.log(ctl.z_min)
        y, status, nsteps = kernels.dual_integrate(
            True, s0, 0.0, y0, complex(lam), float(xi), self._P,
            ctl.rtol, ctl.atol, ctl.max_steps)
        if status != kernels.OK:
            raise IntegrationError(
                f"dual integration failed (status={status}) at (lambda, xi)=({lam}, {xi})")
        U = y[:5]
        Lam = y[5]
        b = self.boundary_vector(lam, xi)
        d = U @ b
        if d == 0:
            return Evans2DResult(EvansValue(float("-inf"), 0.0), U, nsteps, mode.continued)
        val = EvansValue(Lam.real + math.log(abs(d)),
                         _wrap(Lam.imag + cmath.phase(d)))
        return Evans2DResult(value=val, boundary_direction=U, nsteps=nsteps,
                             continued_init=mode.continued)

    def __call__(self, lam: complex, xi: float = 0.0) -> EvansValue:
        return self.evaluate(lam, xi).value

    def section(self, xi: float):
        """lambda -> EvansValue evaluator at fixed transverse wavenumber."""
        def f(lam: complex) -> EvansValue:
            return self.evaluate(lam, xi).value
        return f


def evans_multid(query: MultiDQuery, profile: MultiDProfile,
                 controls: IntegrationControls | None = None) -> EvansValue:
    return Evans2D(profile, controls).evaluate(query.lam, query.xi).value

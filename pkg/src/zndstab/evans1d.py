"""Evans-Lopatinski determinant of a 1D ZND wave by adjoint ODE integration.

D(lambda) = Z(0) . (lambda [W] + R(W)(0^-)) where Z solves the transposed dual
interior equation Z' = -G(x)^T Z and decays toward the burned region.  The
transpose (bilinear-pairing) formulation keeps D analytic in lambda with real
data at real lambda, so D(conj lambda) = conj D(lambda) and winding numbers
are well defined; zeros agree with the adjoint-pairing formulation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConsistencyError, IntegrationError
from .logpolar import EvansValue, _wrap
from .params import ChemParams
from .profile import (ZNDProfile, algebraic_state, conserved_state, domain_length,
                      lagrangian_source)

_TRANSIT_CACHE: dict = {}


def _acoustic_transit(params: ChemParams, z_min: float, n_segments: int = 4096) -> float:
    """kappa = int_{-M}^{0} dx / (C(x) - 1): the WKB phase/growth functional of
    the tracked dual branch.  D is reported normalized by e^{-lambda kappa},
    which removes the entire exponential prefactor exactly (it is nonvanishing
    and linear in lambda, so zeros, windings, conjugate symmetry and
    truncation robustness are all preserved) and keeps contour phase speeds
    O(1) for adaptive winding."""
    key = (params, z_min)
    kap = _TRANSIT_CACHE.get(key)
    if kap is not None:
        return kap
    nodes_gl, weights_gl = np.polynomial.legendre.leggauss(12)
    edges = np.linspace(math.log(z_min), 0.0, n_segments + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    s = (mid[:, None] + half[:, None] * nodes_gl[None, :]).ravel()
    z = np.exp(s)
    tau, _, e = algebraic_state(z, params)
    tau = np.asarray(tau); e = np.asarray(e)
    C = np.sqrt(params.gamma * (params.gamma + 1.0) * e) / tau
    if params.activation != 0.0:
        phi = np.exp(-params.activation * params.specific_heat / e)
    else:
        phi = np.ones_like(e)
    dxds = 1.0 / (params.rate * phi)
    integrand = (dxds / (C - 1.0)).reshape(len(mid), len(nodes_gl))
    kap = float(np.sum(half * (integrand @ weights_gl)))
    _TRANSIT_CACHE[key] = kap
    return kap

__all__ = ["LinearizedCoeffs", "BoundaryData", "DualMode", "IntegrationControls",
           "jacobians", "boundary_data", "dual_init", "evans_1d", "Evans1D"]

# fixed real anchor for the analytic eigenvector normalization
_ANCHOR_4 = np.array([1.0, 0.8, 0.6, 0.4])


@dataclass(frozen=True)
class LinearizedCoeffs:
    """Flux and source Jacobians of the Lagrangian reactive system at one state."""

    A: np.ndarray
    Emat: np.ndarray

    def __post_init__(self):
        self.A.setflags(write=False)
        self.Emat.setflags(write=False)


@dataclass(frozen=True)
class BoundaryData:
    """Jump and ignited-side source entering the determinant's boundary vector."""

    jump: np.ndarray
    source_at_front: np.ndarray

    def vector(self, lam: complex) -> np.ndarray:
        return lam * self.jump + self.source_at_front


@dataclass(frozen=True)
class DualMode:
    """Decaying dual mode at the burned end state.

    growth_rate is the unique eigenvalue of the transposed dual coefficient
    matrix with positive real part (decay toward x -> -infinity); vector is
    the analytically normalized eigenvector; continued marks queries at
    marginal frequencies where the strictly-positive selection degenerates and
    the init was taken by continuation from a nearby lambda.
    """

    growth_rate: complex
    vector: np.ndarray
    continued: bool


@dataclass(frozen=True)
class IntegrationControls:
    z_min: float = 1e-10
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 4_000_000

    def tail_doubled(self) -> "IntegrationControls":
        """Controls with the truncation tail doubled (z_min squared)."""
        return IntegrationControls(z_min=self.z_min ** 2, rtol=self.rtol,
                                   atol=self.atol, max_steps=self.max_steps)


def jacobians(z: float, params: ChemParams) -> LinearizedCoeffs:
    """Closed-form A = dF/dW and E = dR/dW at reactant level z of the profile."""
    A = np.empty((4, 4))
    Em = np.empty((4, 4))
    kernels._fill_1d(float(z), kernels.pack_params(params), A, Em)
    lag_sound = _lagrangian_sound(params, z)
    if abs(lag_sound - 1.0) < 1e-12:
        raise ConsistencyError(
            "flux Jacobian is singular: the front is characteristic "
            f"(Lagrangian sound speed {lag_sound} equals the wave speed)")
    return LinearizedCoeffs(A=A, Emat=Em)


def _lagrangian_sound(params: ChemParams, z: float) -> float:
    tau, _, e = algebraic_state(z, params)
    return math.sqrt(params.gamma * (params.gamma + 1.0) * float(e)) / float(tau)


def boundary_data(params: ChemParams) -> BoundaryData:
    """Jump [W] = W(0+) - W(0-) across the Neumann shock and R(W)(0^-)."""
    W_minus = conserved_state(1.0, params)
    W_plus = np.array([1.0, 0.0, params.e_plus, 1.0])
    return BoundaryData(jump=W_plus - W_minus,
                        source_at_front=lagrangian_source(W_minus, params))


def _dual_branches(lam: complex, params: ChemParams):
    """Closed-form eigenvalues of the transposed dual coefficient at the burned state."""
    tau_b, _, e_b = algebraic_state(0.0, params)
    C = _lagrangian_sound(params, 0.0)
    phi_b = math.exp(-params.activation * params.specific_heat / float(e_b)) \
        if params.activation != 0.0 else 1.0
    kphi = params.rate * phi_b
    return np.array([-lam - kphi, -lam, -lam / (C + 1.0), lam / (C - 1.0)]), C


def dual_init(lam: complex, params: ChemParams) -> DualMode:
    """Analytic initialization of the dual integration at the burned end.

    The decaying branch is nu = lambda/(C - 1) with C the Lagrangian sound
    speed of the burned gas; its eigenvector comes from a bordered solve
    against a fixed real anchor, which is analytic in lambda and phase-stable.
    """
    branches, C = _dual_branches(lam, params)
    if C <= 1.0:
        raise ConsistencyError(
            f"burned-state sound speed {C} <= wave speed: dual mode count invalid")
    tol = 1e-12 * (1.0 + abs(lam))
    if lam.real > tol:
        # strict decaying-mode regime: exactly one branch with positive real part
        n_pos = int(np.sum(branches.real > tol))
        if n_pos != 1:
            raise ConsistencyError(
                f"expected one decaying dual mode at lambda={lam}, "
                f"found {n_pos}: spectrum {branches}")
        continued = False
    else:
        # analytic continuation region: require the tracked branch to stay
        # separated from the others instead of a sign condition
        tracked = branches[3]
        gaps = np.abs(branches[:3] - tracked)
        if abs(lam) > tol and np.min(gaps) < tol:
            raise ConsistencyError(
                f"dual branch collision at lambda={lam}: spectrum {branches}")
        continued = True

    lam_eff = lam
    if abs(lam) < 1e-8:
        lam_eff = complex(1e-8)  # continuation through the translational point
    nu = lam_eff / (C - 1.0)

    A = np.empty((4, 4))
    Em = np.empty((4, 4))
    kernels._fill_1d(0.0, kernels.pack_params(params), A, Em)
    N = (lam_eff * np.eye(4) - Em - nu * A).T.astype(complex)
    V = _bordered_null(N, _ANCHOR_4)
    res = np.linalg.norm(N @ V) / np.linalg.norm(V)
    if res > 1e-8 * (1.0 + abs(lam_eff)):
        raise ConsistencyError(
            f"dual eigenvector residual {res} too large at lambda={lam}")
    return DualMode(growth_rate=complex(nu), vector=V, continued=continued)


def _bordered_null(N: np.ndarray, anchor: np.ndarray) -> np.ndarray:
    """Null vector of a rank-deficient matrix, normalized by anchor . V = 1."""
    n = N.shape[0]
    M = np.zeros((n + 1, n + 1), dtype=complex)
    M[:n, :n] = N
    M[:n, n] = anchor
    M[n, :n] = anchor
    rhs = np.zeros(n + 1, dtype=complex)
    rhs[n] = 1.0
    return np.linalg.solve(M, rhs)[:n]


@dataclass(frozen=True)
class Evans1DResult:
    value: EvansValue
    boundary_direction: np.ndarray  # unit-scale dual vector at x = 0^-
    nsteps: int
    continued_init: bool


class Evans1D:
    """Evaluator of D(lambda) bound to one profile; safe for concurrent use."""

    def __init__(self, profile: ZNDProfile, controls: IntegrationControls | None = None):
        self.profile = profile
        self.params = profile.params
        self.controls = controls or IntegrationControls()
        self._P = kernels.pack_params(self.params)
        self._bdata = boundary_data(self.params)

    def evaluate(self, lam: complex, controls: IntegrationControls | None = None) -> Evans1DResult:
        ctl = controls or self.controls
        mode = dual_init(lam, self.params)
        V = mode.vector
        nv = np.linalg.norm(V)
        kappa = _acoustic_transit(self.params, ctl.z_min)
        y0 = np.empty(5, dtype=complex)
        y0[:4] = V / nv
        y0[4] = math.log(nv) - lam * kappa
        s0 = math.log(ctl.z_min)
        y, status, nsteps = kernels.dual_integrate(
            False, s0, 0.0, y0, complex(lam), 0.0, self._P,
            ctl.rtol, ctl.atol, ctl.max_steps)
        if status != kernels.OK:
            raise IntegrationError(
                f"dual integration failed (status={status}) at lambda={lam}")
        U = y[:4]
        Lam = y[4]
        b = self._bdata.vector(lam)
        d = U @ b
        if d == 0:
            return Evans1DResult(EvansValue(float("-inf"), 0.0), U, nsteps, mode.continued)
        val = EvansValue(Lam.real + math.log(abs(d)),
                         _wrap(Lam.imag + cmath.phase(d)))
        return Evans1DResult(value=val, boundary_direction=U, nsteps=nsteps,
                             continued_init=mode.continued)

    def __call__(self, lam: complex) -> EvansValue:
        return self.evaluate(lam).value


def evans_1d(lam: complex, profile: ZNDProfile,
             controls: IntegrationControls | None = None) -> EvansValue:
    """One-shot evaluation; prefer Evans1D for sweeps."""
    return Evans1D(profile, controls).evaluate(lam).value

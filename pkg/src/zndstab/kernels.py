"""JIT-compiled hot paths: dual-ODE right-hand sides and the adaptive integrator.

The Evans-Lopatinski evaluation integrates Z' = -G(x)^T Z along the reaction
zone.  Everything here works in s = ln z, where the profile state is closed
form and the coefficient 1/(k phi) is bounded, so no interpolation enters the
error budget and the domain is short regardless of induction-zone stiffness.

To keep the state O(1) for arbitrarily large |lambda| the integrator evolves
the projectivized pair (U, Lambda): U stays on the unit sphere while the
complex Rayleigh quotient rho = <U, BU>/<U, U> accumulates into Lambda, so the
true dual solution is e^{Lambda} U.  This removes both exponential growth and
the fast phase rotation, leaving step sizes governed by the profile scale.

All kernels release the GIL; parameter records are packed as
P = [gamma, q, activation, rate, specific_heat, e_plus].
"""
import numpy as np
from numba import njit

# status codes returned by the integrator
OK = 0
STEP_UNDERFLOW = 1
MAX_STEPS = 2


def pack_params(params) -> np.ndarray:
    return np.array([params.gamma, params.heat_release, params.activation,
                     params.rate, params.specific_heat, params.e_plus],
                    dtype=np.float64)


@njit(cache=True, nogil=True, inline="always")
def _state_of_z(z, P):
    """Closed-form (tau, u, e, phi) at reactant level z."""
    g = P[0]
    q = P[1]
    Ea = P[2]
    c = P[4]
    ep = P[5]
    b1 = (g + 1.0) * (g * ep + 1.0)
    disc = b1 * b1 - g * (g + 2.0) * (1.0 + 2.0 * (g + 1.0) * ep - 2.0 * q * (z - 1.0))
    tau = (b1 - np.sqrt(disc)) / (g + 2.0)
    u = 1.0 - tau
    e = tau * (g * ep + 1.0 - tau) / g
    if Ea == 0.0:
        phi = 1.0
    else:
        phi = np.exp(-Ea * c / e)
    return tau, u, e, phi


@njit(cache=True, nogil=True)
def _fill_1d(z, P, A, Em):
    """Lagrangian flux and source Jacobians at reactant level z (4x4, real)."""
    g = P[0]
    q = P[1]
    Ea = P[2]
    k = P[3]
    c = P[4]
    tau, u, e, phi = _state_of_z(z, P)
    p = g * e / tau
    T = e / c

    A[0, 0] = -1.0; A[0, 1] = -1.0; A[0, 2] = 0.0; A[0, 3] = 0.0
    A[1, 0] = -p / tau; A[1, 1] = -g * u / tau - 1.0; A[1, 2] = g / tau; A[1, 3] = 0.0
    A[2, 0] = -p * u / tau; A[2, 1] = p - g * u * u / tau; A[2, 2] = g * u / tau - 1.0; A[2, 3] = 0.0
    A[3, 0] = 0.0; A[3, 1] = 0.0; A[3, 2] = 0.0; A[3, 3] = -1.0

    if Ea == 0.0:
        dphi_de = 0.0
    else:
        dphi_de = phi * (Ea / (T * T)) / c
    d0 = 0.0
    d1 = k * (-u) * z * dphi_de
    d2 = k * z * dphi_de
    d3 = k * phi
    for j in range(4):
        Em[0, j] = 0.0
        Em[1, j] = 0.0
    Em[2, 0] = q * d0; Em[2, 1] = q * d1; Em[2, 2] = q * d2; Em[2, 3] = q * d3
    Em[3, 0] = -d0; Em[3, 1] = -d1; Em[3, 2] = -d2; Em[3, 3] = -d3
    sigma = 1.0 / (k * phi)
    return sigma


@njit(cache=True, nogil=True)
def _fill_2d(z, P, A1, A2, Em):
    """Eulerian Jacobians on the planar profile (u2 = 0), 5x5 real."""
    g = P[0]
    q = P[1]
    Ea = P[2]
    k = P[3]
    c = P[4]
    tau, ulag, e, phi = _state_of_z(z, P)
    rho = 1.0 / tau
    u1 = tau              # mass flux is 1: u1 = tau, rho = 1/tau
    ke = 0.5 * u1 * u1
    p = g * rho * e
    EE = rho * (e + ke)
    H = (EE + p) / rho
    T = e / c

    for i in range(5):
        for j in range(5):
            A1[i, j] = 0.0
            A2[i, j] = 0.0
            Em[i, j] = 0.0

    A1[0, 1] = 1.0
    A1[1, 0] = -u1 * u1 + g * ke; A1[1, 1] = (2.0 - g) * u1; A1[1, 3] = g
    A1[2, 2] = u1
    A1[3, 0] = u1 * (g * ke - H); A1[3, 1] = H - g * u1 * u1; A1[3, 3] = (1.0 + g) * u1
    A1[4, 0] = -u1 * z; A1[4, 1] = z; A1[4, 4] = u1

    A2[0, 2] = 1.0
    A2[1, 2] = u1
    A2[2, 0] = g * ke; A2[2, 1] = -g * u1; A2[2, 3] = g
    A2[3, 2] = H
    A2[4, 2] = z

    if Ea == 0.0:
        dphi_de = 0.0
    else:
        dphi_de = phi * (Ea / (T * T)) / c
    QQ = rho * z
    f0 = k * QQ * dphi_de
    d0 = f0 * (ke - e) / rho
    d1 = f0 * (-u1 / rho)
    d3 = f0 * (1.0 / rho)
    d4 = k * phi
    Em[3, 0] = q * d0; Em[3, 1] = q * d1; Em[3, 3] = q * d3; Em[3, 4] = q * d4
    Em[4, 0] = -d0; Em[4, 1] = -d1; Em[4, 3] = -d3; Em[4, 4] = -d4
    # dx/ds along the reaction tail (x increases away from the shock)
    dxds = -u1 / (k * phi)
    return dxds


@njit(cache=True, nogil=True, inline="always")
def _solve_inplace(M, b, n):
    """Gaussian elimination with partial pivoting; M, b overwritten; x in b."""
    for col in range(n):
        piv = col
        best = abs(M[col, col])
        for r in range(col + 1, n):
            m = abs(M[r, col])
            if m > best:
                best = m
                piv = r
        if piv != col:
            for j in range(col, n):
                tmp = M[col, j]; M[col, j] = M[piv, j]; M[piv, j] = tmp
            tmpb = b[col]; b[col] = b[piv]; b[piv] = tmpb
        inv = 1.0 / M[col, col]
        for r in range(col + 1, n):
            f = M[r, col] * inv
            if f != 0.0:
                for j in range(col + 1, n):
                    M[r, j] -= f * M[col, j]
                b[r] -= f * b[col]
    for r in range(n - 1, -1, -1):
        acc = b[r]
        for j in range(r + 1, n):
            acc -= M[r, j] * b[j]
        b[r] = acc / M[r, r]


@njit(cache=True, nogil=True)
def _dual_rhs(two_d, s, y, lam, xi, P, A, A2, Em, v, M, dy):
    """d/ds of (U, Lambda): projectivized dual flow with complex Rayleigh removal."""
    n = 5 if two_d else 4
    z = np.exp(s)
    # scale = dx/ds: +1/(k phi) for the Lagrangian zone (x < 0, s increasing
    # toward the shock), -u1/(k phi) for the Eulerian tail (x > 0).
    if two_d:
        scale = _fill_2d(z, P, A, A2, Em)
    else:
        scale = _fill_1d(z, P, A, Em)

    # v = lam*U - E^T U (+ i xi A2^T U in 2D)
    for i in range(n):
        acc = lam * y[i]
        for r in range(n):
            acc -= Em[r, i] * y[r]
        v[i] = acc
    if two_d:
        for i in range(n):
            acc = 0.0 + 0.0j
            for r in range(n):
                acc += A2[r, i] * y[r]
            v[i] += 1j * xi * acc

    # solve A^T w = v  (M := A^T copy)
    for i in range(n):
        for j in range(n):
            M[i, j] = A[j, i]
    _solve_inplace(M, v, n)

    # raw dual velocity BU = (dx/ds) * A^{-T} (lam U [+ i xi A2^T U] - E^T U)
    num = 0.0 + 0.0j
    den = 0.0
    for i in range(n):
        bu = scale * v[i]
        v[i] = bu
        num += np.conj(y[i]) * bu
        den += (y[i].real * y[i].real + y[i].imag * y[i].imag)
    rho = num / den
    for i in range(n):
        dy[i] = v[i] - rho * y[i]
    dy[n] = rho
    return 0.0


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


@njit(cache=True, nogil=True)
def dual_integrate(two_d, s0, s1, y0, lam, xi, P, rtol, atol, max_steps):
    """Adaptive DP5(4) integration of the projectivized dual system over [s0, s1].

    y0 has length n+1 (U components then Lambda).  Returns (y, status, nsteps).
    """
    n = 5 if two_d else 4
    m = n + 1
    A = np.empty((n, n), dtype=np.float64)
    A2b = np.empty((n, n), dtype=np.float64)
    Em = np.empty((n, n), dtype=np.float64)
    v = np.empty(n, dtype=np.complex128)
    M = np.empty((n, n), dtype=np.complex128)

    y = y0.copy()
    k1 = np.empty(m, dtype=np.complex128)
    k2 = np.empty(m, dtype=np.complex128)
    k3 = np.empty(m, dtype=np.complex128)
    k4 = np.empty(m, dtype=np.complex128)
    k5 = np.empty(m, dtype=np.complex128)
    k6 = np.empty(m, dtype=np.complex128)
    k7 = np.empty(m, dtype=np.complex128)
    yt = np.empty(m, dtype=np.complex128)
    ynew = np.empty(m, dtype=np.complex128)

    span = s1 - s0
    s = s0
    _dual_rhs(two_d, s, y, lam, xi, P, A, A2b, Em, v, M, k1)
    # initial step from the velocity scale
    vel = 0.0
    for i in range(n):
        vel += abs(k1[i])
    h = min(abs(span) * 0.1, 0.1 / (1.0 + vel))
    if h <= 0.0:
        h = 1e-6

    nsteps = 0
    while s < s1:
        if nsteps >= max_steps:
            return y, MAX_STEPS, nsteps
        if s + h > s1:
            h = s1 - s
        if h < 1e-14 * abs(span):
            return y, STEP_UNDERFLOW, nsteps

        for i in range(m):
            yt[i] = y[i] + h * _A21 * k1[i]
        _dual_rhs(two_d, s + _C2 * h, yt, lam, xi, P, A, A2b, Em, v, M, k2)
        for i in range(m):
            yt[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
        _dual_rhs(two_d, s + _C3 * h, yt, lam, xi, P, A, A2b, Em, v, M, k3)
        for i in range(m):
            yt[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        _dual_rhs(two_d, s + _C4 * h, yt, lam, xi, P, A, A2b, Em, v, M, k4)
        for i in range(m):
            yt[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        _dual_rhs(two_d, s + _C5 * h, yt, lam, xi, P, A, A2b, Em, v, M, k5)
        for i in range(m):
            yt[i] = y[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i])
        _dual_rhs(two_d, s + h, yt, lam, xi, P, A, A2b, Em, v, M, k6)
        for i in range(m):
            ynew[i] = y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i])
        _dual_rhs(two_d, s + h, ynew, lam, xi, P, A, A2b, Em, v, M, k7)

        # weighted rms error; Lambda gets a near-absolute weight so the
        # accumulated log-magnitude/phase stays accurate even when |Lambda| is large
        err = 0.0
        for i in range(m):
            ei = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                      + _E6 * k6[i] + _E7 * k7[i])
            if i < n:
                sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            else:
                sc = atol + rtol * 1.0
            q = abs(ei) / sc
            err += q * q
        err = np.sqrt(err / m)

        if err <= 1.0:
            s += h
            for i in range(m):
                y[i] = ynew[i]
                k1[i] = k7[i]
            nsteps += 1
            fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
            if fac > 5.0:
                fac = 5.0
            h *= fac
        else:
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            h *= fac
    return y, OK, nsteps

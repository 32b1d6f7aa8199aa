"""Physical and scaling parameters of a single-step polytropic detonation.

Two parametrizations are supported: the wave-normalized one (unit upstream
specific volume, zero upstream velocity, unit wave speed) in which profiles
have closed form, and the classical overdrive parametrization.  Conversion
between them pivots on the Chapman-Jouget heat-release bound q_cj.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.optimize import brentq

from .errors import ParameterDomainError

__all__ = ["ChemParams", "ScalingClassical", "q_cj", "e_plus_max",
           "classical_to_wave", "wave_to_classical"]


def e_plus_max(gamma: float) -> float:
    """Upper end of the admissible unburned-energy range, 1/(Gamma(Gamma+1))."""
    return 1.0 / (gamma * (gamma + 1.0))


def q_cj(gamma: float, e_plus: float) -> float:
    """Maximal heat release admitting a strong detonation at unit wave speed.

    q_cj = [ (G+1)^2 (G e+ + 1)^2 - G(G+2)(1 + 2(G+1) e+) ] / (2 G (G+2)).

    Zero exactly at e_plus = 1/(G(G+1)); decreasing in e_plus on the
    admissible range.
    """
    if gamma <= 0.0:
        raise ParameterDomainError(f"gamma must be positive, got {gamma}")
    if not 0.0 <= e_plus <= e_plus_max(gamma) * (1.0 + 1e-12):
        raise ParameterDomainError(
            f"e_plus={e_plus} outside admissible range [0, {e_plus_max(gamma)}] "
            f"for gamma={gamma}")
    g = gamma
    num = (g + 1.0) ** 2 * (g * e_plus + 1.0) ** 2 - g * (g + 2.0) * (1.0 + 2.0 * (g + 1.0) * e_plus)
    return num / (2.0 * g * (g + 2.0))


@dataclass(frozen=True)
class ChemParams:
    """Parameters in the wave-normalized scaling (tau+ = 1, u+ = 0, s = 1).

    gamma         Gruneisen coefficient of the polytropic law p = gamma*e/tau
    activation    Arrhenius activation energy (>= 0)
    heat_release  q, must satisfy 0 <= q <= q_cj(gamma, e_plus)
    rate          reaction-rate prefactor k > 0
    specific_heat c in T = e/c
    e_plus        unburned specific internal energy
    speed         wave speed, fixed to 1 in this scaling
    """

    gamma: float
    activation: float
    heat_release: float
    rate: float = 1.0
    specific_heat: float = 1.0
    e_plus: float = 0.0
    speed: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ParameterDomainError(f"gamma must be positive, got {self.gamma}")
        if self.activation < 0.0:
            raise ParameterDomainError(f"activation must be >= 0, got {self.activation}")
        if self.rate <= 0.0:
            raise ParameterDomainError(f"rate must be positive, got {self.rate}")
        if self.specific_heat <= 0.0:
            raise ParameterDomainError(f"specific_heat must be positive, got {self.specific_heat}")
        if self.speed != 1.0:
            raise ParameterDomainError("wave speed is fixed to 1 in this scaling")
        if not 0.0 <= self.e_plus <= e_plus_max(self.gamma):
            raise ParameterDomainError(
                f"e_plus={self.e_plus} outside [0, {e_plus_max(self.gamma)}]")
        qmax = q_cj(self.gamma, self.e_plus)
        if not 0.0 <= self.heat_release <= qmax:
            raise ParameterDomainError(
                f"heat_release={self.heat_release} outside [0, q_cj={qmax}] "
                f"at gamma={self.gamma}, e_plus={self.e_plus}")

    @property
    def q_cj(self) -> float:
        return q_cj(self.gamma, self.e_plus)

    def with_(self, **kw) -> "ChemParams":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return {
            "gamma": self.gamma, "activation": self.activation,
            "heat_release": self.heat_release, "rate": self.rate,
            "specific_heat": self.specific_heat, "e_plus": self.e_plus,
            "speed": self.speed,
        }


@dataclass(frozen=True)
class ScalingClassical:
    """Classical overdrive parametrization (f, E0, Q0) at fixed gas constant.

    The overdrive f is the squared ratio of the wave speed to the
    Chapman-Jouget speed of the same physical gas; f > 1 strictly (f = 1 is
    the degenerate CJ wave, excluded).
    """

    overdrive: float
    activation_classical: float
    heat_classical: float
    gamma: float

    def __post_init__(self):
        if self.overdrive <= 1.0:
            raise ParameterDomainError(
                f"overdrive must exceed 1 strictly (CJ case excluded), got {self.overdrive}")
        if self.gamma <= 0.0:
            raise ParameterDomainError(f"gamma must be positive, got {self.gamma}")
        if self.heat_classical < 0.0:
            raise ParameterDomainError("heat_classical must be >= 0")
        if self.activation_classical < 0.0:
            raise ParameterDomainError("activation_classical must be >= 0")


def _cj_reference_energy(gamma: float, heat_classical: float) -> float:
    """Energy e' at which the classically-scaled heat release sits exactly at CJ.

    Solves Q0 * e' = q_cj(gamma, e') by bisection; the left side increases,
    the right decreases from q_cj(gamma, 0) to 0, so the root is unique.
    """
    lo, hi = 0.0, e_plus_max(gamma)
    if heat_classical == 0.0:
        # q = 0 never reaches CJ; the reference degenerates to the endpoint.
        return hi

    def g(ep):
        return q_cj(gamma, ep) - heat_classical * ep

    return brentq(g, lo, hi, xtol=1e-15, rtol=8.9e-16)


def classical_to_wave(cl: ScalingClassical, rate: float = 1.0,
                      specific_heat: float = 1.0) -> ChemParams:
    """Map (f, E0, Q0) to wave-normalized parameters.

    Energies scale with the square of the wave speed, so at fixed physical
    state e_plus_cj = f * e_plus; the CJ reference energy is pinned by
    Q0 * e' = q_cj(gamma, e').  Then e_plus = e'/f, q = Q0 e_plus,
    activation = E0 e_plus.
    """
    e_ref = _cj_reference_energy(cl.gamma, cl.heat_classical)
    e_plus = e_ref / cl.overdrive
    return ChemParams(
        gamma=cl.gamma,
        activation=cl.activation_classical * e_plus,
        heat_release=cl.heat_classical * e_plus,
        rate=rate,
        specific_heat=specific_heat,
        e_plus=e_plus,
    )


def wave_to_classical(p: ChemParams) -> ScalingClassical:
    """Inverse of classical_to_wave; requires e_plus > 0 and q > 0."""
    if p.e_plus <= 0.0:
        raise ParameterDomainError("classical conversion needs e_plus > 0")
    heat_classical = p.heat_release / p.e_plus
    activation_classical = p.activation / p.e_plus
    if p.heat_release == 0.0:
        raise ParameterDomainError(
            "q = 0 has no finite overdrive (CJ speed is zero-heat degenerate)")
    e_ref = _cj_reference_energy(p.gamma, heat_classical)
    f = e_ref / p.e_plus
    return ScalingClassical(overdrive=f,
                            activation_classical=activation_classical,
                            heat_classical=heat_classical,
                            gamma=p.gamma)

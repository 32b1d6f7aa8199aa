"""Overflow-safe complex values in split log-polar form.

Determinant evaluations accumulate exponential factors of size e^{|lambda| M};
carrying (log-magnitude, phase) instead of a raw complex avoids overflow while
keeping zeros and phase increments exact.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class EvansValue:
    """A complex number exp(log_magnitude + i*phase).

    phase is reported as a principal argument in (-pi, pi]; continuity along a
    sampling path is the contour module's job, not this container's.
    """

    log_magnitude: float
    phase: float

    @classmethod
    def from_complex(cls, w: complex, extra_log: float = 0.0) -> "EvansValue":
        if w == 0:
            return cls(float("-inf"), 0.0)
        return cls(math.log(abs(w)) + extra_log, cmath.phase(w))

    def to_complex(self) -> complex:
        """Raw complex value; only safe when |log_magnitude| <= ~300."""
        return cmath.exp(complex(self.log_magnitude, self.phase))

    def normalized(self) -> complex:
        """Unit-modulus representative e^{i phase}."""
        return cmath.exp(1j * self.phase)

    def __mul__(self, other: "EvansValue") -> "EvansValue":
        return EvansValue(self.log_magnitude + other.log_magnitude,
                          _wrap(self.phase + other.phase))

    def __truediv__(self, other: "EvansValue") -> "EvansValue":
        return EvansValue(self.log_magnitude - other.log_magnitude,
                          _wrap(self.phase - other.phase))

    @property
    def abs(self) -> float:
        return math.exp(self.log_magnitude)


def _wrap(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    w = math.fmod(theta, 2.0 * math.pi)
    if w > math.pi:
        w -= 2.0 * math.pi
    elif w <= -math.pi:
        w += 2.0 * math.pi
    return w


def phase_step(a: EvansValue, b: EvansValue) -> float:
    """Principal phase increment from a to b, in (-pi, pi]."""
    return _wrap(b.phase - a.phase)

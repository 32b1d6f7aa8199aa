"""Argument-principle winding counts over adaptive contour sampling.

A contour is a closed, positively oriented chain of parametric segments.
Sampling is refined by bisection until every consecutive phase step is below
pi/2, which guarantees correct branch tracking for analytic nonvanishing
evaluators; the total phase change divided by 2 pi must then round to an
integer within 1e-6.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import ContourError
from .logpolar import EvansValue, phase_step

__all__ = ["Segment", "Contour", "circle", "half_disk_with_notch", "rectangle",
           "RefineControl", "WindingReport", "winding", "conjugate_aware"]

Evaluator = Callable[[complex], EvansValue]


@dataclass(frozen=True)
class Segment:
    """A smooth parametric piece t in [0, 1] with exact endpoints.

    kind "line": start + (end - start) t.
    kind "arc":  center + radius e^{i(theta0 + (theta1-theta0) t)}.
    point() returns the stored endpoints exactly at t = 0, 1 so consecutive
    segments share identical complex values at their joints.
    """

    kind: str
    start: complex
    end: complex
    center: complex = 0.0
    radius: float = 0.0
    theta0: float = 0.0
    theta1: float = 0.0

    def point(self, t: float) -> complex:
        if t == 0.0:
            return self.start
        if t == 1.0:
            return self.end
        if self.kind == "line":
            return self.start + (self.end - self.start) * t
        th = self.theta0 + (self.theta1 - self.theta0) * t
        return self.center + self.radius * complex(math.cos(th), math.sin(th))


def _arc(center: complex, radius: float, theta0: float, theta1: float,
         start: complex | None = None, end: complex | None = None) -> Segment:
    if start is None:
        start = center + radius * complex(math.cos(theta0), math.sin(theta0))
    if end is None:
        end = center + radius * complex(math.cos(theta1), math.sin(theta1))
    return Segment("arc", start, end, center, radius, theta0, theta1)


@dataclass(frozen=True)
class Contour:
    """Closed positively oriented chain with an exclusion radius about the origin."""

    kind: str
    segments: tuple
    exclusion_radius: float = 0.0


def circle(center: complex, radius: float) -> Contour:
    start = center + radius
    seg = _arc(center, radius, 0.0, 2.0 * math.pi, start=start, end=start)
    return Contour(kind="circle", segments=(seg,))


def half_disk_with_notch(radius: float, exclusion: float) -> Contour:
    """Boundary of {Re >= 0, exclusion <= |lambda| <= radius}, positively oriented.

    Conjugation-symmetric by construction: every sampled point in the lower
    half-plane is the exact conjugate of an upper-half sample.
    """
    if not 0.0 < exclusion < radius:
        raise ValueError("need 0 < exclusion < radius")
    top_R = complex(0.0, radius)
    bot_R = complex(0.0, -radius)
    top_r = complex(0.0, exclusion)
    bot_r = complex(0.0, -exclusion)
    segs = (
        _arc(0.0, radius, -math.pi / 2.0, math.pi / 2.0, start=bot_R, end=top_R),
        Segment("line", top_R, top_r),
        _arc(0.0, exclusion, math.pi / 2.0, -math.pi / 2.0, start=top_r, end=bot_r),
        Segment("line", bot_r, bot_R),
    )
    return Contour(kind="half-disk-notched", segments=segs, exclusion_radius=exclusion)


def rectangle(lo: complex, hi: complex) -> Contour:
    """Axis-aligned rectangle with corners lo (bottom-left) and hi (top-right)."""
    if not (hi.real > lo.real and hi.imag > lo.imag):
        raise ValueError("rectangle needs hi to dominate lo componentwise")
    c1 = complex(hi.real, lo.imag)
    c3 = complex(lo.real, hi.imag)
    segs = (Segment("line", lo, c1), Segment("line", c1, hi),
            Segment("line", hi, c3), Segment("line", c3, lo))
    return Contour(kind="rectangle", segments=segs)


@dataclass(frozen=True)
class RefineControl:
    initial_per_segment: int = 16
    max_phase_step: float = math.pi / 2.0
    max_depth: int = 48
    min_dt: float = 1e-12
    max_densify: int = 14
    confirm_by_doubling: bool = False


@dataclass
class WindingReport:
    contour: Contour
    count: int
    total_phase: float
    samples: list = field(repr=False)   # ordered (lambda, EvansValue) along the path
    max_phase_step: float = 0.0
    n_evaluations: int = 0
    integer_residual: float = 0.0


class _Cache:
    """Deterministic memo of evaluator calls keyed by the exact complex point."""

    def __init__(self, evaluator: Evaluator):
        self.evaluator = evaluator
        self.data: dict = {}

    def __call__(self, lam: complex) -> EvansValue:
        key = (lam.real, lam.imag)
        v = self.data.get(key)
        if v is None:
            v = self.evaluator(lam)
            self.data[key] = v
        return v

    @property
    def count(self) -> int:
        return len(self.data)


def winding(evaluator: Evaluator, contour: Contour,
            refine: RefineControl | None = None) -> WindingReport:
    """Winding number of the evaluated path around the origin.

    Sampled phase tracking can alias when the true phase moves by more than
    pi between neighbouring samples (wrapped steps then look small and
    bisection never triggers), so the initial density is doubled until two
    consecutive densities agree on the count; bisection to steps < pi/2 runs
    at every density.  The evaluator must be analytic inside and nonvanishing
    on the contour; a phase step that fails to shrink under bisection signals
    a near-zero on the contour and raises ContourError with the location.
    """
    refine = refine or RefineControl()
    cache = _Cache(evaluator)
    n = refine.initial_per_segment
    report = _winding_once(cache, contour, refine, n, 0)
    agreements = 0
    for level in range(1, refine.max_densify + 1):
        n *= 2
        denser = _winding_once(cache, contour, refine, n, level)
        agreements = agreements + 1 if denser.count == report.count else 0
        report = denser
        if agreements >= 2:
            break
    else:
        raise ContourError(
            f"winding count failed to stabilize under sampling densification "
            f"(last {report.count} at {n} per segment)")
    report.n_evaluations = cache.count
    return report


def _winding_once(cache: _Cache, contour: Contour, refine: RefineControl,
                  per_segment: int, level: int) -> WindingReport:
    # interior sample nodes carry a density-dependent irrational offset so
    # that successive densification levels never resample a resonant comb
    # aligned with a periodic root ladder
    offset = (0.6180339887498949 * level) % 1.0
    total = 0.0
    max_step = 0.0
    samples: list = []
    first = contour.segments[0].point(0.0)
    samples.append((first, cache(first)))
    for k, seg in enumerate(contour.segments):
        ts = [0.0]
        ts += [(i + offset) / per_segment for i in range(per_segment)
               if 0.0 < (i + offset) / per_segment < 1.0]
        ts.append(1.0)
        pts = [seg.point(t) for t in ts]
        vals = [cache(p) for p in pts]
        for i in range(len(ts) - 1):
            s, m, extra = _refine_edge(cache, seg, ts[i], ts[i + 1],
                                       pts[i], pts[i + 1], vals[i], vals[i + 1],
                                       refine, 0)
            total += s
            max_step = max(max_step, m)
            samples.extend(extra)

    count_f = total / (2.0 * math.pi)
    count = int(round(count_f))
    residual = abs(count_f - count)
    if residual > 1e-6:
        raise ContourError(
            f"winding total {count_f} is not an integer to 1e-6 "
            f"(residual {residual}); contour may pass near a zero")
    return WindingReport(contour=contour, count=count, total_phase=total,
                         samples=samples, max_phase_step=max_step,
                         integer_residual=residual)


def _refine_edge(cache, seg, t0, t1, p0, p1, v0, v1, refine, depth):
    """Phase increment over one intra-segment edge, bisecting while steps >= pi/2.

    The subdivision criterion uses the full complex log change: log|D| is
    single-valued, so an edge whose true phase jumps by 2 pi k cannot hide
    unless the magnitude barely moves AND the log-derivative rotates wildly
    inside the edge; bounding hypot(d log|D|, d arg D) below pi/2 removes the
    first possibility and the density-doubling agreement in winding() the rest.
    """
    step = phase_step(v0, v1)
    dmag = v1.log_magnitude - v0.log_magnitude
    if math.hypot(dmag, step) < refine.max_phase_step:
        return step, abs(step), [(p1, v1)]
    if depth >= refine.max_depth or abs(t1 - t0) < refine.min_dt:
        raise ContourError(
            f"phase step {step:.3f} fails to shrink near lambda = {p1}: "
            "evaluator likely vanishes on or near the contour")
    tm = 0.5 * (t0 + t1)
    pm = seg.point(tm)
    vm = cache(pm)
    s1, m1, a1 = _refine_edge(cache, seg, t0, tm, p0, pm, v0, vm, refine, depth + 1)
    s2, m2, a2 = _refine_edge(cache, seg, tm, t1, pm, p1, vm, v1, refine, depth + 1)
    return s1 + s2, max(m1, m2), a1 + a2


def conjugate_aware(evaluator: Evaluator) -> Evaluator:
    """Wrap an evaluator satisfying D(conj l) = conj D(l) to halve symmetric sweeps."""
    memo: dict = {}

    def wrapped(lam: complex) -> EvansValue:
        key = (lam.real, abs(lam.imag))
        v = memo.get(key)
        if v is None:
            v = evaluator(lam if lam.imag >= 0 else lam.conjugate())
            memo[key] = v
        if lam.imag >= 0 or v.phase == 0.0:
            return v
        return EvansValue(v.log_magnitude, -v.phase)

    return wrapped

"""Root localization, stability verdicts, and neutral-boundary tracing.

All counting is by the argument principle; roots are polished by a complex
secant iteration on normalized determinant values (robust next to zeros where
log-derivative stencils break down).  Conjugate symmetry of the determinant is
exploited: upper half-plane boxes are searched and mirrored.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace as dc_replace
from typing import Callable

import numpy as np

from .contours import (RefineControl, conjugate_aware, half_disk_with_notch,
                       rectangle, winding)
from .errors import ContourError
from .logpolar import EvansValue

__all__ = ["Root", "RootSearchReport", "locate_roots", "Verdict", "verdict",
           "verdict_from_evaluator", "BoundaryPoint", "trace_boundary",
           "trace_boundary_evaluator", "secant_polish"]

Evaluator = Callable[[complex], EvansValue]


@dataclass(frozen=True)
class Root:
    lam: complex
    multiplicity: int


@dataclass
class RootSearchReport:
    roots: list
    total_count: int
    region_radius: float
    exclusion: float
    unresolved: list = field(default_factory=list)
    n_evaluations: int = 0
    notes: list = field(default_factory=list)


def _value_to_unit(v: EvansValue, ref_log: float) -> complex:
    return cmath.exp(complex(v.log_magnitude - ref_log, v.phase))


def secant_polish(evaluator: Evaluator, lam0: complex, lam1: complex | None = None,
                  tol: float = 1e-11, max_iter: int = 60):
    """Complex secant iteration on D; returns (root, converged, n_iter).

    Values are rescaled by the running maximum log-magnitude so the iteration
    is overflow-safe arbitrarily close to machine-scale determinants.
    """
    if lam1 is None:
        lam1 = lam0 + 1e-5 * (1.0 + abs(lam0))
    v0, v1 = evaluator(lam0), evaluator(lam1)
    for it in range(max_iter):
        ref = max(v0.log_magnitude, v1.log_magnitude)
        d0 = _value_to_unit(v0, ref)
        d1 = _value_to_unit(v1, ref)
        if d1 == d0:
            return lam1, False, it
        lam2 = lam1 - d1 * (lam1 - lam0) / (d1 - d0)
        if not (math.isfinite(lam2.real) and math.isfinite(lam2.imag)):
            return lam1, False, it
        lam0, v0 = lam1, v1
        lam1, v1 = lam2, evaluator(lam2)
        if abs(lam1 - lam0) < tol * (1.0 + abs(lam1)):
            return lam1, True, it + 1
    return lam1, False, max_iter


def _winding_with_jitter(evaluator, make_contour, refine):
    """Winding with small deterministic jitters when a zero sits on the contour."""
    last_err = None
    for scale in (1.0, 1.00371, 0.99592, 1.00833, 0.98973):
        try:
            return winding(evaluator, make_contour(scale), refine), scale
        except ContourError as exc:
            last_err = exc
    raise last_err


def _scan_minima(evaluator, radius, exclusion, delta):
    """Grid scan of log|D| over the closed upper quarter; returns seed points.

    Seeds are strict local minima of the log-magnitude in their 3x3
    neighbourhood.  The grid covers [0, R] x [0, R] which bounds the upper
    half of the search region.
    """
    nx = max(8, int(math.ceil(radius / delta)) + 1)
    xs = np.linspace(0.0, radius, nx)
    ys = np.linspace(0.0, radius, nx)
    logmag = np.empty((nx, nx))
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            lam = complex(xs[i], ys[j])
            if abs(lam) < 0.7 * exclusion:
                logmag[j, i] = np.inf
                continue
            logmag[j, i] = evaluator(lam).log_magnitude
    seeds = []
    for j in range(nx):
        for i in range(nx):
            v = logmag[j, i]
            if not np.isfinite(v):
                continue
            neigh = logmag[max(0, j - 1):j + 2, max(0, i - 1):i + 2]
            if v <= neigh.min() and np.sum(neigh == v) == 1:
                seeds.append(complex(xs[i], ys[j]))
    return seeds


def _multiplicity(evaluator, root, scale, refine):
    rep, _ = _winding_with_jitter(
        evaluator, lambda s: _circle_at(root, scale * s), refine)
    return rep.count


def _circle_at(center, radius):
    from .contours import circle
    return circle(center, radius)


def locate_roots(evaluator: Evaluator, radius: float, exclusion: float = 1e-2,
                 refine: RefineControl | None = None,
                 scan_delta: float | None = None,
                 assume_conjugate_symmetry: bool = True,
                 polish_tol: float = 1e-11, max_rescan_rounds: int = 3) -> RootSearchReport:
    """All determinant zeros with Re >= 0, |lambda| <= radius, off the origin disk.

    Strategy: (1) scan log|D| on a grid over the closed upper quadrant and
    polish every local minimum by a complex secant iteration; (2) read each
    root's multiplicity off a small circle; (3) certify completeness by
    winding over horizontal strips whose boundaries pass midway between known
    root ordinates, so no contour edge runs close to a zero (long edges near
    periodic root ladders are exactly where sampled phase tracking can alias);
    strips whose count disagrees with the known roots are rescanned at finer
    resolution.  Conjugate symmetry fills in the lower half-plane.

    The capture region is the rectangle [0, Rc] x [-Rc, Rc] with
    Rc = 1.05 radius + 0.05; reported roots outside |lambda| <= radius let the
    caller see near-boundary structure, and total_count refers to the
    requested disk intersection.
    """
    refine = refine or RefineControl(initial_per_segment=8)
    base = conjugate_aware(evaluator) if assume_conjugate_symmetry else evaluator
    ev = _CountingEvaluator(base)
    r_cert = 1.05 * radius + 0.05
    delta = scan_delta if scan_delta is not None else radius / 96.0
    notes: list = []
    unresolved: list = []

    seeds = _scan_minima(ev, r_cert, exclusion, delta)
    roots_up = _polish_and_dedupe(ev, seeds, r_cert, exclusion, polish_tol, notes)
    with_mult = _attach_multiplicities(ev, roots_up, refine, polish_tol, notes)

    for _round in range(max_rescan_rounds + 1):
        mismatches = _certify(ev, with_mult, r_cert, exclusion, refine, notes)
        if not mismatches:
            break
        if _round == max_rescan_rounds:
            unresolved = [(complex(0.0, y0), complex(r_cert, y1))
                          for (y0, y1, _, _) in mismatches]
            notes.append(f"certification still failing after rescans: {mismatches}")
            break
        delta /= 3.0
        extra_seeds = []
        for (y0, y1, expected, got) in mismatches:
            extra_seeds += _scan_strip(ev, r_cert, exclusion, max(y0, 0.0), min(y1, r_cert), delta)
        roots_up = _polish_and_dedupe(ev, extra_seeds, r_cert, exclusion,
                                      polish_tol, notes, existing=roots_up)
        with_mult = _attach_multiplicities(ev, roots_up, refine, polish_tol, notes)

    full: list = list(with_mult)
    if assume_conjugate_symmetry:
        for r in with_mult:
            if r.lam.imag > 10.0 * polish_tol * (1.0 + abs(r.lam)):
                full.append(Root(lam=r.lam.conjugate(), multiplicity=r.multiplicity))
    full.sort(key=lambda r: (r.lam.imag, r.lam.real))
    total = sum(r.multiplicity for r in full if abs(r.lam) <= radius)
    return RootSearchReport(roots=full, total_count=total, region_radius=radius,
                            exclusion=exclusion, unresolved=unresolved,
                            n_evaluations=ev.count, notes=notes)


def _attach_multiplicities(ev, roots_up, refine, polish_tol, notes):
    out = []
    for lam in roots_up:
        others = [abs(lam - o) for o in roots_up if o != lam]
        if abs(lam.imag) > polish_tol:
            others.append(2.0 * abs(lam.imag))   # distance to own conjugate
        near = min(others) if others else math.inf
        r_circ = 1e-4 * (1.0 + abs(lam))
        if near < math.inf:
            r_circ = min(r_circ, 0.25 * near)
        try:
            mult = _multiplicity(ev, lam, r_circ, refine)
        except ContourError:
            mult = 1
            notes.append(f"multiplicity circle failed at {lam}; assuming simple")
        if mult < 1:
            notes.append(f"discarding spurious minimum at {lam} (winding {mult})")
            continue
        out.append(Root(lam=lam, multiplicity=mult))
    return out


def _polish_and_dedupe(ev, seeds, r_cert, exclusion, polish_tol, notes, existing=()):
    roots = list(existing)
    for seed in seeds:
        lam, ok, _ = secant_polish(ev, seed, tol=polish_tol)
        if not ok:
            continue
        if lam.imag < -1e-7 * (1.0 + abs(lam)):
            lam = lam.conjugate()
        if lam.imag < 0.0:
            lam = complex(lam.real, 0.0)
        if lam.real < -1e-9 * (1.0 + abs(lam)):
            continue  # converged out of the closed right half-plane
        if lam.real < 0.0:
            lam = complex(0.0, lam.imag)
        if abs(lam) <= exclusion or lam.real > r_cert or lam.imag > r_cert:
            continue
        if any(abs(lam - o) < 1e-6 * (1.0 + abs(lam)) for o in roots):
            continue
        roots.append(lam)
    return sorted(roots, key=lambda w: (w.imag, w.real))


def _scan_strip(ev, r_cert, exclusion, y0, y1, delta):
    xs = np.arange(0.0, r_cert + delta, delta)
    ys = np.arange(max(y0, 0.0), min(y1, r_cert) + delta, delta)
    if len(ys) < 3:
        ys = np.linspace(max(y0, 0.0), min(y1, r_cert), 5)
    vals = np.empty((len(ys), len(xs)))
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            lam = complex(x, y)
            vals[j, i] = ev(lam).log_magnitude if abs(lam) > 0.7 * exclusion else np.inf
    seeds = []
    for j in range(len(ys)):
        for i in range(len(xs)):
            v = vals[j, i]
            if not np.isfinite(v):
                continue
            neigh = vals[max(0, j - 1):j + 2, max(0, i - 1):i + 2]
            if v <= neigh.min() and np.sum(neigh == v) == 1:
                seeds.append(complex(xs[i], ys[j]))
    return seeds


def _rect_winding_jittered(ev, lo, hi, refine):
    """Rectangle winding; edges are nudged outward slightly on contour failure."""
    last = None
    w = hi - lo
    for pad in (0.0, 0.0137, -0.0093, 0.0291):
        try:
            rep = winding(ev, rectangle(lo - pad * w, hi + pad * w), refine)
            return rep.count
        except ContourError as exc:
            last = exc
    raise last


def _certify(ev, roots, r_cert, exclusion, refine, notes):
    """Strip windings vs known roots (with multiplicity); returns mismatches.

    Strip boundaries run midway between distinct root ordinates, so every
    contour edge stays as far from the zeros as the distribution allows.
    Real-axis roots are certified in a conjugation-symmetric band whose left
    edge dodges both the origin and the smallest real root.
    """
    mism = []
    creal = [r for r in roots if r.lam.imag <= 1e-7 * (1.0 + abs(r.lam))]
    ccplx = [r for r in roots if r.lam.imag > 1e-7 * (1.0 + abs(r.lam))]

    if ccplx:
        b = 0.5 * min(r.lam.imag for r in ccplx)
    else:
        b = 0.4 * r_cert
    b = max(b, 1.2 * exclusion)
    x_lo = exclusion
    if creal:
        x_lo = max(0.25 * exclusion, min(0.5 * min(r.lam.real for r in creal), exclusion))
    expected_band = (sum(r.multiplicity for r in creal)
                     + 2 * sum(r.multiplicity for r in ccplx if r.lam.imag < b))
    try:
        got = _rect_winding_jittered(ev, complex(x_lo, -b), complex(r_cert, b), refine)
        if got != expected_band:
            mism.append((-b, b, expected_band, got))
    except ContourError as exc:
        notes.append(f"axis band winding failed: {exc}")
        mism.append((-b, b, expected_band, None))

    ys = sorted(set(r.lam.imag for r in ccplx if r.lam.imag >= b))
    cuts = [b]
    for i in range(len(ys) - 1):
        mid = 0.5 * (ys[i] + ys[i + 1])
        if mid - cuts[-1] > 1e-9:
            cuts.append(mid)
    cuts.append(r_cert)
    for y0, y1 in zip(cuts[:-1], cuts[1:]):
        if y1 - y0 <= 1e-9:
            continue
        expected = sum(r.multiplicity for r in ccplx if y0 < r.lam.imag <= y1)
        try:
            got = _rect_winding_jittered(ev, complex(0.0, y0), complex(r_cert, y1), refine)
        except ContourError as exc:
            notes.append(f"strip [{y0}, {y1}] winding failed: {exc}")
            mism.append((y0, y1, expected, None))
            continue
        if got != expected:
            mism.append((y0, y1, expected, got))
    return mism


class _CountingEvaluator:
    def __init__(self, evaluator: Evaluator):
        self.evaluator = evaluator
        self.count = 0

    def __call__(self, lam: complex) -> EvansValue:
        self.count += 1
        return self.evaluator(lam)


@dataclass(frozen=True)
class Verdict:
    """Stability verdict from winding on the half-disk boundary."""

    status: str             # "stable" | "unstable" | "inconclusive"
    count: int
    radius: float
    exclusion: float
    count_doubled: int | None = None
    n_evaluations: int = 0

    @property
    def is_stable(self) -> bool:
        return self.status == "stable"


def verdict_from_evaluator(evaluator: Evaluator, radius: float = 10.0,
                           exclusion: float = 1e-2, confirm_doubling: bool = True,
                           refine: RefineControl | None = None,
                           assume_conjugate_symmetry: bool = True) -> Verdict:
    """Winding count over {Re >= 0, exclusion <= |lambda| <= radius}.

    With confirm_doubling the count is recomputed at twice the radius; a
    mismatch yields an explicit inconclusive verdict, never a silent answer.
    """
    refine = refine or RefineControl(initial_per_segment=16)
    ev = conjugate_aware(evaluator) if assume_conjugate_symmetry else evaluator
    counting = _CountingEvaluator(ev)
    rep, _ = _winding_with_jitter(
        counting, lambda s: half_disk_with_notch(radius * s, exclusion), refine)
    count = rep.count
    count2 = None
    if confirm_doubling:
        rep2, _ = _winding_with_jitter(
            counting, lambda s: half_disk_with_notch(2.0 * radius * s, exclusion), refine)
        count2 = rep2.count
        if count2 != count:
            return Verdict(status="inconclusive", count=count, radius=radius,
                           exclusion=exclusion, count_doubled=count2,
                           n_evaluations=counting.count)
    status = "stable" if count == 0 else "unstable"
    return Verdict(status=status, count=count, radius=radius, exclusion=exclusion,
                   count_doubled=count2, n_evaluations=counting.count)


@dataclass(frozen=True)
class BoundaryPoint:
    """One neutral-boundary sample: activation bracket at fixed heat release."""

    q: float
    activation_lo: float
    activation_hi: float
    count_below: int
    count_above: int
    converged: bool
    note: str = ""

    @property
    def activation(self) -> float:
        return 0.5 * (self.activation_lo + self.activation_hi)


def trace_boundary_evaluator(make_verdict: Callable[[float, float], Verdict],
                             q_grid, activation_bracket, tol: float = 1e-3):
    """Bisection of the stability predicate in activation at each heat release.

    make_verdict(q, activation) must return a Verdict.  Points where the
    bracket does not straddle a transition are reported with converged=False
    and the trace continues.
    """
    lo0, hi0 = activation_bracket
    points = []
    for q in q_grid:
        v_lo = make_verdict(q, lo0)
        v_hi = make_verdict(q, hi0)
        if v_lo.status == "inconclusive" or v_hi.status == "inconclusive":
            points.append(BoundaryPoint(q, lo0, hi0, v_lo.count, v_hi.count,
                                        False, "inconclusive endpoint verdict"))
            continue
        if v_lo.is_stable == v_hi.is_stable:
            points.append(BoundaryPoint(q, lo0, hi0, v_lo.count, v_hi.count,
                                        False, "no transition in bracket"))
            continue
        lo, hi = lo0, hi0
        c_lo, c_hi = v_lo.count, v_hi.count
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            v_mid = make_verdict(q, mid)
            if v_mid.status == "inconclusive":
                points.append(BoundaryPoint(q, lo, hi, c_lo, c_hi, False,
                                            f"inconclusive verdict at {mid}"))
                break
            if v_mid.is_stable == v_lo.is_stable:
                lo, c_lo = mid, v_mid.count
            else:
                hi, c_hi = mid, v_mid.count
        else:
            points.append(BoundaryPoint(q, lo, hi, c_lo, c_hi, True))
    return points


def _evaluator_for(params, controls=None):
    from .evans1d import Evans1D, IntegrationControls
    from .profile import compute_profile
    profile = compute_profile(params)
    return Evans1D(profile, controls or IntegrationControls())


def verdict(params, radius: float = 10.0, exclusion: float = 1e-2,
            confirm_doubling: bool = True, controls=None) -> Verdict:
    """Stability verdict of a detonation in the wave-normalized scaling."""
    return verdict_from_evaluator(_evaluator_for(params, controls), radius=radius,
                                  exclusion=exclusion, confirm_doubling=confirm_doubling)


def trace_boundary(params_base, q_grid, activation_bracket, tol: float = 1e-3,
                   radius: float = 10.0, exclusion: float = 1e-2,
                   confirm_doubling: bool = False, threads: int = 1):
    """Neutral stability boundary over a heat-release grid, in the wave scaling.

    Bisects the activation energy at each q; radius-doubling confirmation is
    off by default inside the bisection loop (each accepted boundary point can
    be re-confirmed by the caller at its bracket endpoints).
    """
    from .parallel import ordered_map

    def make_verdict(q, activation):
        p = params_base.with_(heat_release=q, activation=activation)
        return verdict(p, radius=radius, exclusion=exclusion,
                       confirm_doubling=confirm_doubling)

    def solve_one(q):
        return trace_boundary_evaluator(make_verdict, [q], activation_bracket, tol)[0]

    return ordered_map(solve_one, list(q_grid), threads=threads)

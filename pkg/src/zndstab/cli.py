"""Command-line front end: batch orchestration and artifact export.

Every run takes a single YAML/JSON config document, writes its artifacts into
--out, and finishes with a manifest (config echo, version, wall time, warning
list, SHA-256 of every output file).  Exit codes: 0 success (possibly with
warnings recorded in the manifest), 1 validation failure, 2 numerical failure.
"""
from __future__ import annotations

import json
import math
import sys
import time
from pathlib import Path

import click
import numpy as np
import yaml

from . import __version__
from .errors import ZndStabError
from .eulerian import eulerian_profile
from .evans1d import Evans1D, IntegrationControls
from .evans2d import Evans2D
from .highfreq import (classify_type, glancing_locus, hf_ratio,
                       neumann_lopatinski, symbol_eigs_at_z, turning_points)
from .oscint import (analytic_decay_check, const_one, gevrey_decay_check,
                     gevrey_symbol, monomial, osc_integral)
from .parallel import default_threads, ordered_map
from .params import ChemParams, ScalingClassical, classical_to_wave
from .profile import compute_profile
from .riccati import (BlockSystem, ChebyshevGrid, conjugator_verdict,
                      riccati_block_iterate)
from .rootfind import locate_roots, trace_boundary, verdict
from .serialize import fmt, write_csv, write_json

_SYMBOLS = {"one": const_one, "y^2": monomial(2)}


def _load_config(path):
    text = Path(path).read_text(encoding="utf-8")
    cfg = yaml.safe_load(text)
    if not isinstance(cfg, dict):
        raise click.ClickException("config must be a mapping")
    return cfg


def _params_from(cfg) -> ChemParams:
    has_wave = "params" in cfg
    has_classical = "classical" in cfg
    if has_wave == has_classical:
        raise click.ClickException(
            "config must contain exactly one of 'params' or 'classical'")
    if has_wave:
        return ChemParams(**cfg["params"])
    cl = dict(cfg["classical"])
    rate = cl.pop("rate", 1.0)
    specific_heat = cl.pop("specific_heat", 1.0)
    return classical_to_wave(ScalingClassical(**cl), rate=rate,
                             specific_heat=specific_heat)


def _controls_from(cfg) -> IntegrationControls:
    c = cfg.get("controls", {})
    return IntegrationControls(z_min=float(c.get("z_min", 1e-10)),
                               rtol=float(c.get("rtol", 1e-10)),
                               atol=float(c.get("atol", 1e-12)))


class RunContext:
    def __init__(self, out_dir: Path, config: dict, subcommand: str,
                 threads: int, verbose: bool):
        self.out = out_dir
        self.config = config
        self.subcommand = subcommand
        self.threads = threads
        self.verbose = verbose
        self.outputs = {}
        self.warnings = []
        self.counts = {}
        self.t0 = time.time()

    def emit_csv(self, name, header, rows):
        self.outputs[name] = write_csv(self.out / name, header, rows)

    def emit_json(self, name, obj):
        self.outputs[name] = write_json(self.out / name, obj)

    def log(self, msg):
        if self.verbose:
            click.echo(msg, err=True)

    def finish(self):
        manifest = {
            "tool": "zndstab",
            "version": __version__,
            "subcommand": self.subcommand,
            "config": self.config,
            "wall_time_s": time.time() - self.t0,
            "operation_counts": self.counts,
            "warnings": self.warnings,
            "outputs": self.outputs,
        }
        write_json(self.out / "manifest.json", manifest)
        return 0


def _profile_cmd(ctx: RunContext, params: ChemParams):
    pc = ctx.config.get("profile", {})
    prof = compute_profile(params, z_min=float(pc.get("z_min", 1e-10)),
                           n_points=int(pc.get("n_points", 2001)))
    rows = [(prof.x[i], prof.tau[i], prof.u[i], prof.e[i], prof.z[i],
             prof.p[i], prof.T[i]) for i in range(len(prof.z))]
    ctx.emit_csv("profile.csv", ["x", "tau", "u", "e", "z", "p", "T"], rows)
    ctx.emit_json("profile.json", {
        "params": params.as_dict(),
        "half_reaction_length": prof.half_reaction_length,
        "domain_length": prof.domain_length,
        "z_min": prof.z_min,
    })
    ctx.counts["profile_points"] = len(prof.z)


def _evans1d_cmd(ctx: RunContext, params: ChemParams):
    cfg = ctx.config.get("evans1d", {})
    lams = [complex(a, b) for a, b in cfg["lambdas"]]
    prof = compute_profile(params)
    ev = Evans1D(prof, _controls_from(ctx.config))
    vals = ordered_map(ev, lams, threads=ctx.threads)
    rows = [(l.real, l.imag, v.log_magnitude, v.phase) for l, v in zip(lams, vals)]
    ctx.emit_csv("evans1d.csv", ["re_lambda", "im_lambda", "log_mag", "phase"], rows)
    ctx.counts["evaluations"] = len(lams)


def _evans2d_cmd(ctx: RunContext, params: ChemParams):
    cfg = ctx.config.get("evans2d", {})
    queries = [(complex(a, b), float(xi)) for a, b, xi in cfg["queries"]]
    prof = eulerian_profile(params)
    ev = Evans2D(prof, _controls_from(ctx.config))
    vals = ordered_map(lambda q: ev(q[0], q[1]), queries, threads=ctx.threads)
    rows = [(q[0].real, q[0].imag, q[1], v.log_magnitude, v.phase)
            for q, v in zip(queries, vals)]
    ctx.emit_csv("evans2d.csv",
                 ["re_lambda", "im_lambda", "xi", "log_mag", "phase"], rows)
    ctx.counts["evaluations"] = len(queries)


def _roots_cmd(ctx: RunContext, params: ChemParams):
    cfg = ctx.config.get("roots", {})
    prof = compute_profile(params)
    ev = Evans1D(prof, _controls_from(ctx.config))
    rep = locate_roots(ev, radius=float(cfg.get("radius", 10.0)),
                       exclusion=float(cfg.get("exclusion", 1e-2)),
                       scan_delta=cfg.get("scan_delta"))
    ctx.emit_json("roots.json", {
        "radius": rep.region_radius,
        "exclusion": rep.exclusion,
        "total_count": rep.total_count,
        "roots": [{"re": r.lam.real, "im": r.lam.imag,
                   "multiplicity": r.multiplicity} for r in rep.roots],
        "unresolved": [[str(a), str(b)] for a, b in rep.unresolved],
    })
    ctx.counts["evaluations"] = rep.n_evaluations
    if rep.unresolved:
        ctx.warnings.append(f"{len(rep.unresolved)} regions unresolved")


def _verdict_cmd(ctx: RunContext, params: ChemParams):
    cfg = ctx.config.get("verdict", {})
    v = verdict(params, radius=float(cfg.get("radius", 10.0)),
                exclusion=float(cfg.get("exclusion", 1e-2)),
                confirm_doubling=bool(cfg.get("confirm_doubling", True)),
                controls=_controls_from(ctx.config))
    ctx.emit_json("verdict.json", {
        "status": v.status, "count": v.count, "radius": v.radius,
        "exclusion": v.exclusion, "count_doubled": v.count_doubled,
    })
    ctx.counts["evaluations"] = v.n_evaluations
    if v.status == "inconclusive":
        ctx.warnings.append("verdict inconclusive: count changed under radius doubling")


def _boundary_cmd(ctx: RunContext, params: ChemParams):
    cfg = ctx.config.get("boundary", {})
    pts = trace_boundary(params, cfg["q_grid"],
                         tuple(cfg["activation_bracket"]),
                         tol=float(cfg.get("tol", 1e-3)),
                         radius=float(cfg.get("radius", 10.0)),
                         threads=ctx.threads)
    rows = [(p.q, p.activation_lo, p.activation_hi, p.count_below, p.count_above)
            for p in pts]
    ctx.emit_csv("boundary.csv",
                 ["q", "E_lo", "E_hi", "count_below", "count_above"], rows)
    for p in pts:
        if not p.converged:
            ctx.warnings.append(f"q={p.q}: {p.note}")
    ctx.counts["boundary_points"] = len(pts)


def _hifreq_cmd(ctx: RunContext, params: ChemParams):
    cfg = ctx.config.get("hifreq", {})
    prof = eulerian_profile(params)
    zeta = complex(*cfg.get("zeta", (1.0, 0.5)))

    n_tab = int(cfg.get("n_symbol_table", 33))
    zs = np.geomspace(prof.z_min, 1.0, n_tab)
    rows = []
    for z in zs:
        sp = symbol_eigs_at_z(float(z), zeta, params)
        x = float(prof.x_of_z(float(z)))
        rows.append((x, zeta.real, zeta.imag,
                     *sum(([m.real, m.imag] for m in sp.mu), [])))
    ctx.emit_csv("symbol_table.csv",
                 ["x", "re_zeta", "im_zeta"] +
                 [f"{p}_mu{i}" for i in range(1, 6) for p in ("re", "im")], rows)

    x_loc, plus, minus = glancing_locus(prof)
    ctx.emit_csv("glancing_locus.csv", ["x", "im_zeta_plus", "im_zeta_minus"],
                 [(x_loc[i], plus[i].imag, minus[i].imag) for i in range(len(x_loc))])

    tps = []
    for tau in cfg.get("turning_tau", []):
        for tp in turning_points(complex(0.0, float(tau)), prof):
            tps.append({"x_star": tp.x_star, "im_zeta": tp.zeta_star.imag,
                        "d_s_squared": tp.d_s_squared,
                        "nondegenerate": tp.nondegenerate})
    ctx.emit_json("turning_points.json",
                  {"type": classify_type(prof), "points": tps})

    h_grid = [float(h) for h in cfg.get("h_grid", [0.1, 0.05, 0.025, 0.0125])]
    rep = hf_ratio(zeta, h_grid, prof, _controls_from(ctx.config))
    ctx.emit_csv("hf_ratio.csv", ["h", "abs_ratio_minus_1"],
                 list(zip(rep.h_grid, rep.deviations)))
    ctx.counts["hf_points"] = len(h_grid)
    if not rep.monotone:
        ctx.warnings.append("hf ratio deviations not monotone")


def _oscint_cmd(ctx: RunContext, params=None):
    cfg = ctx.config.get("oscint", {})
    name = cfg.get("symbol", "one")
    if name == "gevrey":
        sym = gevrey_symbol(float(cfg.get("gevrey_s", 2.0)))
    elif name in _SYMBOLS:
        sym = _SYMBOLS[name]
    else:
        raise click.ClickException(f"unknown symbol {name!r}")
    xs = [float(v) for v in cfg.get("x_values", [0.5, 2.0])]
    hs = [float(v) for v in cfg.get("h_grid", [0.2, 0.1, 0.05])]
    rows = []
    n_warn = 0
    for x in xs:
        for h in hs:
            res = osc_integral(sym, x, h)
            rows.append((x, h, res.log_abs, res.arg))
            n_warn += int(res.precision_warning)
    ctx.emit_csv("oscint_table.csv", ["x", "h", "log_abs_I", "arg_I"], rows)
    if n_warn:
        ctx.warnings.append(f"{n_warn} integrals hit the precision limit")
    conj = cfg.get("conjugator")
    if conj:
        v = conjugator_verdict(sym, float(conj["L"]),
                               [float(h) for h in conj["h_grid"]])
        ctx.emit_json("conjugator_verdict.json", {
            "verdict": v.verdict, "L": v.L, "h_grid": v.h_grid,
            "x_grid": list(map(float, v.x_grid)),
            "sup_log_ratio": v.sup_log_ratio,
            "evidence": v.evidence,
            "note": "grid-based numerical evidence, not a proof",
        })
        if v.verdict == "inconclusive":
            ctx.warnings.append("conjugator verdict inconclusive")
    ctx.counts["integrals"] = len(rows)


def _riccati_cmd(ctx: RunContext, params=None):
    cfg = ctx.config.get("riccati", {})
    iterations = int(cfg.get("iterations", 3))
    hs = [float(h) for h in cfg.get("h_grid", [2.0 ** -k for k in range(3, 11)])]
    n_nodes = int(cfg.get("n_nodes", 48))
    grid = ChebyshevGrid(n_nodes, -1.0, 1.0)
    A11 = np.array([[1.0, 0.3], [0.0, 1.2]])
    A22 = np.array([[-1.0, 0.0], [0.2, -1.3]])
    rows = []
    for h in hs:
        coeff = np.zeros((n_nodes, 4, 4), dtype=complex)
        for k, x in enumerate(grid.x):
            coeff[k, :2, :2] = A11
            coeff[k, 2:, 2:] = A22
            th = np.array([[0.1 * math.sin(2 * x), 0.3 * math.cos(x)],
                           [0.2 * math.cos(3 * x), -0.1 * math.sin(x)]])
            coeff[k, :2, 2:] = h * th
            coeff[k, 2:, :2] = h * th.T
        rb = riccati_block_iterate(BlockSystem(grid=grid, coeff=coeff, n1=2),
                                   h, iterations)
        for it, r in enumerate(rb.residuals):
            rows.append((h, r, it))
    ctx.emit_csv("riccati_orders.csv", ["h", "residual_norm", "iteration"], rows)
    fitted = {}
    hs_a = np.asarray(hs)
    for it in range(1, iterations + 1):
        res = np.asarray([r for (h, r, i) in rows if i == it])
        fitted[str(it)] = float(np.polyfit(np.log(hs_a), np.log(res), 1)[0])
    ctx.emit_json("riccati_fit.json", {"fitted_orders": fitted})
    ctx.counts["h_points"] = len(hs)


_COMMANDS = {
    "profile": _profile_cmd,
    "evans1d": _evans1d_cmd,
    "evans2d": _evans2d_cmd,
    "roots": _roots_cmd,
    "verdict": _verdict_cmd,
    "boundary": _boundary_cmd,
    "hifreq": _hifreq_cmd,
    "oscint": _oscint_cmd,
    "riccati": _riccati_cmd,
}


@click.command()
@click.argument("subcommand", type=click.Choice(sorted(_COMMANDS)))
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True), help="YAML/JSON run configuration.")
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Output directory (created if missing).")
@click.option("--threads", type=int, default=None,
              help="Worker threads (default: ZNDSTAB_THREADS or CPU count).")
@click.option("--verbose", is_flag=True, default=False)
def main(subcommand, config_path, out_dir, threads, verbose):
    """Detonation-wave stability toolkit."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        cfg = _load_config(config_path)
        ctx = RunContext(out, cfg, subcommand, threads or default_threads(), verbose)
        needs_params = subcommand not in ("oscint", "riccati")
        params = _params_from(cfg) if needs_params else None
    except (ZndStabError, click.ClickException, TypeError, KeyError, ValueError) as exc:
        _error_exit(out, str(exc), code=1)
        return
    try:
        _COMMANDS[subcommand](ctx, params)
        sys.exit(ctx.finish())
    except ZndStabError as exc:
        _error_exit(out, str(exc), code=2)
    except (KeyError, ValueError, TypeError) as exc:
        _error_exit(out, f"invalid config for {subcommand}: {exc}", code=1)


def _error_exit(out: Path, message: str, code: int):
    try:
        write_json(out / "error.json", {"error": message, "exit_code": code})
    except OSError:
        pass
    click.echo(f"error: {message}", err=True)
    sys.exit(code)

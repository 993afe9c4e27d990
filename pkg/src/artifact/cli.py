"""Command-line front end.

Usage::

    artifact dos --config run.json --out results/
    artifact free-energy --format json
    artifact validate --checks 1 4 8

Everything is computed before any file is opened, so a failed run leaves no
partial output.  Exit codes: 0 success, 1 numerical failure (or a failed
validation check), 2 configuration error.
"""
from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import io
import json
import math
import sys
from functools import partial
from pathlib import Path

import numpy as np

from . import eddy, lifshitz, thermo, validation
from .config import ConfigError, RunConfig, load_config
from .numerics import QuadratureError, RootFindingError
from .optics import GOLD, K_B_EV_PER_K, Cavity, ComplexFrequency, DomainError, DrudeMaterial, GoodConductorError, PoleError
from .parallel import map_ordered

__all__ = ["main", "run", "build_parser"]

NUMERICAL_ERRORS = (QuadratureError, RootFindingError, thermo.CoverageError, thermo.IllConditionedFitError,
                    PoleError, DomainError, GoodConductorError, ArithmeticError)

DOS_CHANNELS = ("CL", "D", "propagating", "CL0", "Dgamma")
COUNT_UNIT = "nm^-2"
DENSITY_UNIT = "nm^-2 eV^-1"


class Table:
    """Columns with a three-row header (quantity, unit, channel)."""

    def __init__(self):
        self.columns: list[tuple[str, str, str, np.ndarray]] = []

    def add(self, quantity, unit, channel, values):
        self.columns.append((quantity, unit, channel, np.asarray(values)))

    def add_with_err(self, quantity, unit, channel, values, errs):
        self.add(quantity, unit, channel, values)
        self.add(quantity + "_err", unit, channel, errs)

    @property
    def nrows(self):
        return len(self.columns[0][3]) if self.columns else 0

    def to_csv(self, comments) -> str:
        buf = io.StringIO()
        for c in comments:
            buf.write(f"# {c}\n")
        for i in range(3):
            buf.write(",".join(col[i] for col in self.columns) + "\n")
        for r in range(self.nrows):
            buf.write(",".join(_fmt(col[3][r]) for col in self.columns) + "\n")
        return buf.getvalue()

    def to_records(self):
        return {"columns": [{"quantity": q, "unit": u, "channel": ch} for q, u, ch, _ in self.columns],
                "rows": [[_jsonable(col[3][r]) for col in self.columns] for r in range(self.nrows)]}


def _fmt(x):
    if isinstance(x, str):
        return x
    return repr(float(x))


def _jsonable(x):
    if isinstance(x, str):
        return x
    x = float(x)
    return x if math.isfinite(x) else repr(x)


class Output:
    """Collects tables and reports; written to disk only at the end."""

    def __init__(self, cfg: RunConfig, fmt: str, timestamp: bool):
        self.cfg, self.fmt, self.timestamp = cfg, fmt, timestamp
        self.files: dict[str, str] = {}

    def header(self) -> list[str]:
        lines = []
        if self.timestamp:
            lines.append("generated " + _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
        p = self.cfg.provenance
        lines.append(f"material preset={p.get('preset') or 'custom'} omega_p={p['omega_p_eV']!r} eV "
                     f"gamma={p['gamma_eV']!r} eV hbar_c={p['hbar_c_eV_nm']!r} eV nm")
        lines.append(f"gap={p['gap_nm']!r} nm tolerance={self.cfg.tolerance!r}")
        return lines

    def table(self, stem: str, table: Table):
        if self.fmt == "csv":
            self.files[stem + ".csv"] = table.to_csv(self.header())
        else:
            self.report(stem, table.to_records())

    def report(self, stem: str, payload: dict):
        doc = {"provenance": dict(self.cfg.provenance), **payload}
        if self.timestamp:
            doc["generated"] = self.header()[0].split(" ", 1)[1]
        self.files[stem + ".json"] = json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, out_dir: Path):
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            with open(out_dir / name, "w", newline="\n") as fh:
                fh.write(text)
        return sorted(self.files)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _dos_curves(cav, grid, kind, tol, workers):
    curves = {}
    for ch in ("CL", "D", "Dgamma"):
        c = (lifshitz.curve_cl(cav, grid, kind, ch, tol, workers=workers) if ch == "CL"
             else eddy.curve_eddy(cav, grid, kind, ch, tol))
        curves[ch] = (c.values, c.err)
    curves["propagating"] = (curves["CL"][0] - curves["D"][0], curves["CL"][1] + curves["D"][1])
    if kind == "count":
        c = lifshitz.curve_cl(cav, grid, kind, "CL0", tol, workers=workers)
        curves["CL0"] = (c.values, c.err)
    else:
        vals = [lifshitz.dispersion_derivative(cav, ComplexFrequency.real(w), tol, with_err=True, leading=True)
                for w in grid]
        curves["CL0"] = (np.array([-v[0].imag for v in vals]), np.array([v[1] for v in vals]))
    return curves


def cmd_dos(cfg: RunConfig, out: Output, args):
    cav = cfg.cavity
    grid = cfg.frequency_grid.values(cav)
    for kind, stem, qty, unit in (("count", "dos_count", "M", COUNT_UNIT),
                                  ("density", "dos_density", "rho", DENSITY_UNIT)):
        curves = _dos_curves(cav, grid, kind, cfg.tolerance, cfg.threads)
        t = Table()
        t.add("omega", "eV", "", grid)
        t.add("omega_over_xiL", "1", "", grid / cav.thouless)
        for ch in DOS_CHANNELS:
            t.add_with_err(qty, unit, ch, *curves[ch])
        out.table(stem, t)


def _temperatures(cfg):
    return cfg.temperature_values()


def cmd_free_energy(cfg: RunConfig, out: Output, args):
    cav = cfg.cavity
    tol = cfg.tolerance
    rows = []
    for T in _temperatures(cfg):
        for route in ("matsubara", "dos", "expansion"):
            rows.append((T, route) + _thermal_row(cav, T, route, tol, args.with_pressure))
    t = Table()
    t.add("T", "eV", "", [r[0] for r in rows])
    t.add("T_K", "K", "", [r[0] / K_B_EV_PER_K for r in rows])
    t.add("route", "", "", [r[1] for r in rows])
    names = (("F", "eV nm^-2"), ("S", "nm^-2"), ("p", "eV nm^-3"))
    for j, (q, u) in enumerate(names):
        t.add_with_err(q, u, "CL", [r[2 + 2 * j] for r in rows], [r[3 + 2 * j] for r in rows])
    F0, F0err = thermo.free_energy_zero(cav, min(tol, 1e-10), with_err=True)
    out.table("free_energy", t)
    out.report("free_energy_zero", {"F0": F0, "F0_err": F0err, "unit": "eV nm^-2"})


def _thermal_row(cav, T, route, tol, with_pressure):
    ftol = min(tol, 1e-10)
    if route == "matsubara":
        F, Ferr = thermo.thermal_free_energy(cav, T, ftol, with_err=True)
    elif route == "dos":
        M = partial(lifshitz.mode_count_cl, cav, tol=ftol)
        F, Ferr = thermo.free_energy_from_dos(M, T, tol=ftol, with_err=True)
    else:
        co = thermo.low_T_expansion(cav, "CL")
        F, Ferr = float(thermo.expansion_free_energy(co, T)), 0.0
    S, Serr = thermo.entropy(cav, T, route, ftol, with_err=True)
    if with_pressure:
        p, perr = thermo.pressure(cav, T, route, thermal_only=True, tol=ftol, with_err=True)
    else:
        p, perr = math.nan, math.nan
    return F, Ferr, S, Serr, p, perr


def cmd_expand(cfg: RunConfig, out: Output, args):
    cav = cfg.cavity
    xiL = cav.thouless
    cl = thermo.low_T_expansion(cav, "CL")
    Ts = np.geomspace(1e-4, 1e-2, cfg.fit_count) * xiL
    pts = [thermo.ThermalPoint(T=T, F=F, err=e, route="matsubara")
           for T, (F, e) in zip(Ts, (thermo.thermal_free_energy(cav, T, 1e-11, with_err=True) for T in Ts))]
    fit = thermo.fit_expansion(pts, xi_L=xiL)
    rows = [("f2", cl.f2, fit.a2, fit.err2, "eV^-1 nm^-2"),
            ("f52", cl.f52, fit.a52, fit.err52, "eV^-3/2 nm^-2"),
            ("f52_bose", cl.f52_bose, fit.a52, fit.err52, "eV^-3/2 nm^-2")]
    analytic = {"CL": dataclasses.asdict(cl)}
    try:
        analytic["D"] = dataclasses.asdict(eddy.m_coefficients(cav))
    except GoodConductorError as exc:
        analytic["D"] = {"unavailable": str(exc)}
    t = Table()
    t.add("coefficient", "", "", [r[0] for r in rows])
    t.add("analytic", "", "CL", [r[1] for r in rows])
    t.add_with_err("fitted", "", "CL", [r[2] for r in rows], [r[3] for r in rows])
    t.add("ratio", "1", "CL", [r[2] / r[1] for r in rows])
    t.add("unit", "", "", [r[4] for r in rows])
    out.table("expansion", t)
    out.report("expansion_summary", {"analytic": analytic, "fit_condition": fit.condition,
                                     "fit_window_over_xiL": [1e-4, 1e-2], "fit_count": cfg.fit_count})


def cmd_modes(cfg: RunConfig, out: Output, args):
    cav = cfg.cavity
    mat = cav.material
    kk = cfg.k_grid.values(cav)
    mb = eddy.mode_boundary(mat, kk)
    t = Table()
    t.add("k", "nm^-1", "", mb.k_grid)
    t.add_with_err("xi0", "eV", "", mb.xi0, 1e-12 * np.abs(mb.xi0))
    out.table("modes_boundary", t)

    xi = cfg.cut_grid.values(cav)
    t = Table()
    t.add("xi", "eV", "", xi)
    t.add("xi_over_gamma", "1", "", xi / mat.gamma)
    for ch in eddy.CUT_CHANNELS:
        vals = [eddy.mode_count_cut(cav, x, ch, cfg.tolerance, with_err=True) for x in xi]
        t.add_with_err("M", COUNT_UNIT, ch, [v[0] for v in vals], [v[1] for v in vals])
    out.table("modes_cut", t)


def cmd_validate(cfg: RunConfig, out: Output, args):
    results = validation.run_checks(args.checks)
    for r in results:
        print(r.line())
    npass = sum(r.passed for r in results)
    print(f"{npass}/{len(results)} checks passed")
    out.report("validation", {"results": [_clean(r.to_dict()) for r in results],
                              "passed": npass, "total": len(results)})
    return 0 if npass == len(results) else 1


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.generic,)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _sweep_point(p, omega_p, tol):
    T, L, gamma = p
    cav = Cavity(DrudeMaterial(omega_p, gamma, GOLD.c), L)
    F, err = thermo.thermal_free_energy(cav, T, tol, with_err=True)
    return T, L, gamma, cav.thouless, F, err


def cmd_sweep(cfg: RunConfig, out: Output, args):
    gammas = cfg.sweep_gammas or (cfg.material.gamma,)
    points = []
    for L in cfg.sweep_gaps:
        for g in gammas:
            cav = Cavity(DrudeMaterial(cfg.material.omega_p, g, cfg.material.c), L)
            points.extend((T, L, g) for T in cfg.temperature_values(cav))
    rows = map_ordered(partial(_sweep_point, omega_p=cfg.material.omega_p, tol=min(cfg.tolerance, 1e-10)),
                       points, cfg.threads)
    t = Table()
    t.add("T", "eV", "", [r[0] for r in rows])
    t.add("T_K", "K", "", [r[0] / K_B_EV_PER_K for r in rows])
    t.add("L", "nm", "", [r[1] for r in rows])
    t.add("gamma", "eV", "", [r[2] for r in rows])
    t.add("xi_L", "eV", "", [r[3] for r in rows])
    t.add_with_err("F", "eV nm^-2", "CL", [r[4] for r in rows], [r[5] for r in rows])
    out.table("sweep", t)


COMMANDS = {
    "dos": cmd_dos,
    "free-energy": cmd_free_energy,
    "expand": cmd_expand,
    "modes": cmd_modes,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory (default: config output.path or .)")
    common.add_argument("--format", choices=("csv", "json"), help="table format")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--threads", type=int, help="worker processes for sweeps and curves")
    common.add_argument("--no-timestamp", action="store_true", help="omit the generated-at line")

    parser = argparse.ArgumentParser(prog="artifact", description="TE Casimir free energy of Drude plates")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "free-energy":
            p.add_argument("--with-pressure", action="store_true", help="also compute the thermal pressure")
        if name == "validate":
            p.add_argument("--checks", type=int, nargs="+", choices=sorted(validation.CHECKS),
                           help="subset of acceptance checks")
    return parser


def _effective_config(args) -> RunConfig:
    cfg = load_config(args.config)
    updates = {}
    if args.tol is not None:
        if not (math.isfinite(args.tol) and 0 < args.tol < 1e-2):
            raise ConfigError("--tol must lie in (0, 1e-2)")
        updates["tolerance"] = args.tol
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        updates["threads"] = args.threads
    if args.out is not None:
        updates["output_dir"] = args.out
    return dataclasses.replace(cfg, **updates) if updates else cfg


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _effective_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    fmt = args.format or cfg.output_format or "csv"
    out = Output(cfg, fmt, timestamp=not args.no_timestamp)
    try:
        with np.errstate(all="ignore"):
            code = COMMANDS[args.command](cfg, out, args) or 0
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure in {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for name in out.write(Path(cfg.output_dir)):
        print(f"wrote {Path(cfg.output_dir) / name}")
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

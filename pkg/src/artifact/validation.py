"""Acceptance checks shared by ``artifact validate`` and the test suite.

Each check returns a :class:`CheckResult`; nothing here raises on a failed
comparison, so a report always lists every check.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import eddy, lifshitz, thermo
from .optics import (
    GOLD,
    K_B_EV_PER_K,
    Cavity,
    ComplexFrequency,
    DrudeMaterial,
    kappa_gamma,
    reflection_te,
    sqrt_pos,
)

__all__ = ["CheckResult", "CHECKS", "run_checks", "gold_cavity"]

SEED = 20240611


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail}"

    def to_dict(self) -> dict:
        return asdict(self)


def natural_material(ratio: float, gamma: float = 1.0) -> DrudeMaterial:
    """gamma = 1, c = 1 and Omega = gamma / ratio."""
    return DrudeMaterial(omega_p=gamma / ratio, gamma=gamma, c=1.0)


def gold_cavity(gap_nm: float = 100.0) -> Cavity:
    return Cavity(GOLD, gap_nm)


def _rel(a, b):
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------

def check_appendix() -> CheckResult:
    i1, i2 = lifshitz.appendix_integrals()
    s1, s2 = lifshitz.appendix_integrals_sinh()
    errs = [abs(i1 - lifshitz.I1_EXACT), abs(i2 - lifshitz.I2_EXACT),
            abs(s1 - lifshitz.I1_EXACT), abs(s2 - lifshitz.I2_EXACT)]
    ok = max(errs) <= 1e-10
    return CheckResult(1, "appendix closed forms", ok,
                       {"I1": i1, "I2": i2, "max_abs_err": max(errs)},
                       f"I1={i1:.10f} I2={i2:.10f} max|err|={max(errs):.1e} (tol 1e-10)")


def check_m1() -> CheckResult:
    mat = natural_material(1e-3)
    cav = Cavity(mat, 10 * mat.plasma_wavelength)
    w = 1e-6 * cav.thouless
    slope = -lifshitz.dos_cl(cav, w, tol=1e-11)
    measured = slope * mat.diffusion
    dev = _rel(measured, 0.0048925)
    return CheckResult(2, "m1 slope of M_CL", dev <= 5e-3, {"slope_times_D": measured, "rel_dev": dev},
                       f"D*dM/domega={measured:.7f} vs 0.0048925, rel dev {dev:.2e} (tol 5e-3)")


def check_m32() -> CheckResult:
    mat = natural_material(1e-3)
    cav = Cavity(mat, 10 * mat.plasma_wavelength)
    D, L = mat.diffusion, cav.gap
    grid = np.geomspace(1e-6, 1e-4, 5) * cav.thouless
    coeffs = []
    for w in grid:
        M = lifshitz.mode_count_cl(cav, w, tol=1e-12)
        coeffs.append((M - lifshitz.M1_LEADING * w / D) / (L * (w / D) ** 1.5))
    devs = [_rel(c, -0.0059704) for c in coeffs]
    return CheckResult(3, "m32 residual coefficient", max(devs) <= 0.02,
                       {"coefficients": coeffs, "max_rel_dev": max(devs)},
                       f"residual coefficient in [{min(coeffs):.7f}, {max(coeffs):.7f}] vs -0.0059704, "
                       f"max rel dev {max(devs):.2e} (tol 2e-2)")


def check_appendix_b() -> CheckResult:
    worst = 0.0
    rows = []
    for ratio in (1e-3, 1e-2):
        mat = natural_material(ratio)
        for gap in (1.0, 10.0):
            cav = Cavity(mat, gap * mat.plasma_wavelength)
            for w in (1e-3, 1e-2, 1e-1):
                m0 = eddy.mode_count_eddy(cav, w * mat.gamma, "D0", tol=1e-10)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    im = lifshitz.dispersion_leading(cav, complex(w * mat.gamma), tol=1e-12).imag
                rel = _rel(m0, im)
                rows.append((ratio, gap, w, rel))
                worst = max(worst, rel)
    return CheckResult(4, "eddy D0 count equals Im D0", worst <= 1e-6, {"max_rel_dev": worst, "rows": rows},
                       f"max rel dev {worst:.1e} over gamma/Omega in {{1e-3,1e-2}}, L in {{1,10}} lambda (tol 1e-6)")


def check_damping() -> CheckResult:
    rows = []
    ok = True
    for ratio in (1e-3, 1e-2):
        mat = natural_material(ratio)
        lam = mat.plasma_wavelength
        for gap in (1e-9, 2.0, 20.0):
            cav = Cavity(mat, gap * lam)
            w = 1e-3 * mat.gamma
            num = eddy.mode_count_eddy(cav, w, "Dgamma", tol=1e-10)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                closed = eddy.damping_correction(cav, w)
            ratio_signed = num / closed
            rows.append({"gamma_over_omega": ratio, "L_over_lambda": gap, "numeric": num,
                         "closed_form": closed, "ratio": ratio_signed})
            ok &= abs(ratio_signed - 1.0) <= 0.05
    mags = [abs(r["ratio"]) for r in rows]
    signs = sorted({int(math.copysign(1, r["ratio"])) for r in rows})
    return CheckResult(5, "damping correction closed form", ok, {"rows": rows},
                       f"numeric/closed in [{min(r['ratio'] for r in rows):.4f}, {max(r['ratio'] for r in rows):.4f}]; "
                       f"|ratio| in [{min(mags):.4f}, {max(mags):.4f}]; sign(s) {signs} (tol 5%)")


def check_routes() -> CheckResult:
    cav = gold_cavity()
    xi_L = cav.thouless
    rows = []
    for f in (0.1, 0.5, 1.0):
        T = f * xi_L
        m = thermo.thermal_free_energy(cav, T)
        d = thermo.free_energy_from_dos(lambda w: lifshitz.mode_count_cl(cav, w, 1e-11), T)
        rows.append((f, m, d, _rel(d, m)))
    worst = max(r[3] for r in rows)
    return CheckResult(6, "DOS vs Matsubara free energy", worst <= 1e-3, {"rows": rows, "max_rel_dev": worst},
                       f"max rel dev {worst:.1e} at T in {{0.1,0.5,1}} xi_L (tol 1e-3)")


def fit_samples(cav: Cavity, n: int = 10):
    Ts = np.geomspace(1e-4, 1e-2, n) * cav.thouless
    return [thermo.ThermalPoint(T=float(T), F=thermo.thermal_free_energy(cav, float(T))) for T in Ts]


def check_fit() -> CheckResult:
    cav = gold_cavity()
    co = thermo.low_T_expansion(cav, "CL")
    pts = fit_samples(cav)
    fr = thermo.fit_expansion(pts, xi_L=cav.thouless)
    d2 = _rel(fr.a2, co.f2)
    d52 = _rel(fr.a52, co.f52)
    d52b = _rel(fr.a52, co.f52_bose)
    ok = d2 <= 0.01 and d52 <= 0.05
    return CheckResult(7, "T^2 and T^5/2 coefficient fit", ok,
                       {"a2": fr.a2, "a52": fr.a52, "f2": co.f2, "f52": co.f52, "f52_bose": co.f52_bose,
                        "rel_dev_f2": d2, "rel_dev_f52": d52, "rel_dev_f52_bose": d52b, "condition": fr.condition},
                       f"a2 rel dev {d2:.2e} (tol 1e-2); a52/f52 = {fr.a52 / co.f52:.4f} (tol 5%); "
                       f"a52/f52_bose = {fr.a52 / co.f52_bose:.4f}")


def check_thouless() -> CheckResult:
    cav = gold_cavity()
    # D in eV nm^2 / hbar; xi_L / k_B in kelvin
    kelvin = cav.thouless / K_B_EV_PER_K
    return CheckResult(8, "Thouless temperature", 15.0 <= kelvin <= 25.0, {"kelvin": kelvin},
                       f"hbar D/(k_B L^2) = {kelvin:.2f} K (window 15-25 K)")


def check_entropy() -> CheckResult:
    cav = gold_cavity()
    xi_L = cav.thouless
    co = thermo.low_T_expansion(cav, "CL")
    scan = [0.05, 0.5, 2.0, 5.0]
    S_scan = [thermo.entropy(cav, f * xi_L) for f in scan]
    negative = any(s < 0 for s in S_scan)
    T4 = 1e-4 * xi_L
    S4 = thermo.entropy(cav, T4)
    dev = _rel(S4 / T4, -2.0 * co.f2)
    S5 = thermo.entropy(cav, 1e-5 * xi_L)
    small = abs(S5) < 1e-4 * co.f2 * xi_L and abs(S5) < abs(S4)
    ok = negative and dev <= 0.05 and small
    return CheckResult(9, "entropy sign and Nernst limit", ok,
                       {"S_scan": dict(zip(scan, S_scan)), "S_over_T_rel_dev": dev, "S_1e-5": S5},
                       f"S<0 on scan: {negative}; S/T vs -2 f2 rel dev {dev:.2e} (tol 5e-2); "
                       f"|S(1e-5 xi_L)|/(f2 xi_L) = {abs(S5) / (co.f2 * xi_L):.2e} (< 1e-4)")


def check_tail() -> CheckResult:
    rows = []
    ok = True
    for gap in (1.0, 10.0):
        base = natural_material(1e-2)
        cavs = [Cavity(DrudeMaterial(base.omega_p, g, 1.0), gap * base.plasma_wavelength) for g in (1.0, 0.5)]
        w = 1e-2 * min(min(c.material.gamma, c.thouless, c.material.c / c.gap) for c in cavs)
        vals = [eddy.dos_propagating(c, w, tol=1e-11) for c in cavs]
        r = vals[1] / vals[0]
        rows.append({"L_over_lambda": gap, "omega": w, "rho_pm": vals, "ratio": r})
        ok &= abs(r - 0.5) <= 0.05
    return CheckResult(10, "propagating tail linear in gamma", ok, {"rows": rows},
                       "ratio rho(gamma/2)/rho(gamma) = " + ", ".join(f"{r['ratio']:.4f}" for r in rows)
                       + " (target 0.5 within 10%)")


def check_properties() -> CheckResult:
    rng = np.random.default_rng(SEED)
    mat = natural_material(1e-2)
    cav = Cavity(mat, mat.plasma_wavelength)
    # branch rule
    w = rng.normal(size=500) + 1j * rng.normal(size=500)
    s = sqrt_pos(w)
    branch_ok = bool(np.all(s.real >= 0) and np.allclose(s * s, w, rtol=1e-14, atol=0))
    axis = sqrt_pos(-rng.uniform(0.1, 10, 50) + 0j)
    branch_ok &= bool(np.all(axis.imag <= 0))
    # Schwarz symmetry
    zs = rng.uniform(-3, 3, 100) + 1j * rng.uniform(0.01, 3, 100)
    sym = 0.0
    for z in zs:
        a = lifshitz.dispersion(cav, complex(z), tol=1e-12)
        b = lifshitz.dispersion(cav, complex(-z.real, z.imag), tol=1e-12)
        sym = max(sym, abs(b - np.conj(a)) / abs(a))
    # unimodular on-cut reflection
    cut = 0.0
    for _ in range(200):
        xi = rng.uniform(1e-4, 1 - 1e-4) * mat.gamma
        kg = -1j * kappa_gamma(mat, ComplexFrequency.on_cut(xi))
        kap = rng.uniform(0, 1) * kg.real
        r = reflection_te(mat, kap, ComplexFrequency.on_cut(xi))
        cut = max(cut, abs(abs(r) - 1.0))
    # splitting closure
    closure_ok = True
    worst = 0.0
    for gap in (0.5, 2.0):
        c = Cavity(mat, gap * mat.plasma_wavelength)
        for om in (1e-3, 1e-2, 1e-1):
            full, ef = eddy.mode_count_eddy(c, om, "D", with_err=True)
            (a, ea), (b, eb) = eddy.mode_count_eddy_split(c, om, with_err=True)
            gap_abs = abs(full - a - b)
            worst = max(worst, gap_abs / (ef + ea + eb))
            closure_ok &= gap_abs <= ef + ea + eb
    ok = branch_ok and sym < 1e-9 and cut < 1e-12 and closure_ok
    return CheckResult(11, "property suites", ok,
                       {"branch_ok": branch_ok, "schwarz_max_rel": sym, "cut_max_dev": cut,
                        "closure_max_ratio": worst},
                       f"branch rule {'ok' if branch_ok else 'broken'}; Schwarz max rel {sym:.1e} (<1e-9); "
                       f"on-cut ||r|-1| max {cut:.1e} (<1e-12); closure |gap|/err max {worst:.2f} (<=1)")


CHECKS = {
    1: check_appendix,
    2: check_m1,
    3: check_m32,
    4: check_appendix_b,
    5: check_damping,
    6: check_routes,
    7: check_fit,
    8: check_thouless,
    9: check_entropy,
    10: check_tail,
    11: check_properties,
}


def run_checks(numbers=None):
    numbers = sorted(CHECKS) if numbers is None else list(numbers)
    return [CHECKS[n]() for n in numbers]

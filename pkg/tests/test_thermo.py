import math

import numpy as np
import pytest
from scipy.special import gamma as Gamma, zeta

from artifact.eddy import m_coefficients
from artifact.lifshitz import SpectralCurve
from artifact.optics import GOLD, Cavity
from artifact.thermo import (
    CoverageError,
    IllConditionedFitError,
    ThermalPoint,
    cubic_coefficient_cl,
    entropy,
    expansion_free_energy,
    fit_expansion,
    free_energy_from_dos,
    free_energy_matsubara,
    free_energy_zero,
    low_T_expansion,
    matsubara_integrand,
    pressure,
    thermal_free_energy,
    thermal_point,
)
from artifact.validation import natural_material

GOLD_CAV = Cavity(GOLD, 100.0)


def natural_cavity(ratio=1e-3, gap=10.0):
    mat = natural_material(ratio)
    return Cavity(mat, gap * mat.plasma_wavelength)


@pytest.mark.parametrize("nu", [1.0, 1.5, 2.0])
def test_bose_identity(nu):
    T = 0.37
    got = free_energy_from_dos(lambda w: w**nu, T, tol=1e-12)
    assert got == pytest.approx(Gamma(nu + 1) * zeta(nu + 1) * T ** (nu + 1), rel=1e-8)


def test_bose_examples():
    assert free_energy_from_dos(lambda w: 2.0 * w, 1.0) == pytest.approx(2.0 * math.pi**2 / 6, rel=1e-10)
    assert free_energy_from_dos(lambda w: w**1.5, 1.0) == pytest.approx(1.78329, abs=1e-5)
    assert free_energy_from_dos(lambda w: w, 0.0) == 0.0


def test_dos_route_from_curve():
    grid = np.geomspace(1e-6, 100.0, 400)
    curve = SpectralCurve(grid, grid**1.5, np.zeros_like(grid))
    got = free_energy_from_dos(curve, 1.0)
    assert got == pytest.approx(Gamma(2.5) * zeta(2.5), rel=1e-6)
    with pytest.raises(CoverageError):
        free_energy_from_dos(curve, 10.0)


def test_matsubara_static_term_vanishes():
    assert matsubara_integrand(GOLD_CAV, 0.0) == 0.0


# g and its derivative are exponentially small here, so differences are noise
@pytest.mark.filterwarnings("ignore:Richardson estimates")
def test_thermal_part_vanishes_for_wide_gap():
    near = thermal_free_energy(natural_cavity(gap=1.0), 1e-3)
    far = thermal_free_energy(natural_cavity(gap=1e6), 1e-3)
    assert abs(far) < 1e-6 * abs(near)


def test_routes_agree_natural_units():
    cav = natural_cavity()
    T = 0.1 * cav.thouless
    m = thermal_free_energy(cav, T)
    d = free_energy_from_dos(lambda w: __import__("artifact").mode_count_cl(cav, w), T)
    assert d == pytest.approx(m, rel=1e-3)


def test_zero_temperature_energy_negative_and_decays():
    f100 = free_energy_zero(GOLD_CAV)
    f1000 = free_energy_zero(GOLD_CAV.with_gap(1000.0))
    assert f100 < 0 and f1000 < 0
    assert abs(f1000) < 1e-2 * abs(f100)


def test_low_temperature_limit_of_full_energy():
    T = 1e-3 * GOLD_CAV.thouless
    F0 = free_energy_zero(GOLD_CAV)
    assert abs(free_energy_matsubara(GOLD_CAV, T) - F0) < 1e-2 * abs(F0)
    assert free_energy_matsubara(GOLD_CAV, 0.0) == pytest.approx(F0, rel=1e-9)


def test_expansion_coefficients_cl():
    cav = natural_cavity()
    D, L = cav.material.diffusion, cav.gap
    co = low_T_expansion(cav, "CL")
    assert co.f2 == pytest.approx((2 * math.log(2) - 1) / (48 * D), rel=1e-12)
    assert co.f2 * D == pytest.approx(0.0080478, abs=5e-8)
    assert co.f52 == pytest.approx(-0.0070980 * L / D**1.5, rel=1e-4)
    assert co.f52_bose == pytest.approx(1.5 * co.f52, rel=1e-15)


def test_expansion_channel_gap():
    cav = natural_cavity(1e-2, 2.0)
    mat = cav.material
    lam, D, L = mat.plasma_wavelength, mat.diffusion, cav.gap
    gap = low_T_expansion(cav, "D").f2 - low_T_expansion(cav, "CL").f2
    expected = zeta(2) * mat.damping_ratio**2 * lam / (4 * math.pi**2 * D * (L + 2 * lam))
    assert gap == pytest.approx(expected, rel=1e-10)


def test_eddy_pressure_coefficient():
    cav = natural_cavity(1e-2, 2.0)
    mat = cav.material
    lam, D, L = mat.plasma_wavelength, mat.diffusion, cav.gap
    h = 1e-4 * L
    dfdL = (m_coefficients(cav.with_gap(L + h)).f2 - m_coefficients(cav.with_gap(L - h)).f2) / (2 * h)
    expected = zeta(2) * mat.damping_ratio**2 * lam / (4 * math.pi**2 * D) / (L + 2 * lam) ** 2
    assert -dfdL == pytest.approx(expected, rel=1e-6)


def _synthetic(T, a2, a52, a3=0.0):
    return [ThermalPoint(T=t, F=a2 * t**2 + a52 * t**2.5 + a3 * t**3) for t in T]


def test_fit_exact_basis():
    T = np.geomspace(1e-4, 1e-2, 10)
    res = fit_expansion(_synthetic(T, 3.0, -7.0))
    assert res.a2 == pytest.approx(3.0, rel=1e-12)
    assert res.a52 == pytest.approx(-7.0, rel=1e-12)


def test_fit_with_cubic_contamination():
    xiL = GOLD_CAV.thouless
    co = low_T_expansion(GOLD_CAV, "CL")
    T = np.geomspace(1e-4, 1e-2, 10) * xiL
    res = fit_expansion(_synthetic(T, co.f2, co.f52, cubic_coefficient_cl(GOLD_CAV)), xi_L=xiL)
    assert res.a2 == pytest.approx(co.f2, rel=1e-2)


def test_fit_ill_conditioned_and_guards():
    T = 1e-3 * (1 + 1e-12 * np.arange(6))
    with pytest.raises(IllConditionedFitError):
        fit_expansion(_synthetic(T, 1.0, 1.0))
    with pytest.raises(ValueError):
        fit_expansion(_synthetic([1e-3, 2e-3, 3e-3], 1.0, 1.0))
    with pytest.raises(ValueError):
        fit_expansion(_synthetic(np.geomspace(1e-3, 1e-1, 6), 1.0, 1.0), xi_L=1.0)


def test_expansion_route_entropy_analytic():
    co = low_T_expansion(GOLD_CAV, "CL")
    T = 1e-3 * GOLD_CAV.thouless
    S = entropy(GOLD_CAV, T, route="expansion")
    assert S == pytest.approx(-(2 * co.f2 * T + 2.5 * co.f52 * T**1.5), rel=1e-8)
    assert float(expansion_free_energy(co, T)) == pytest.approx(co.f2 * T**2 + co.f52 * T**2.5)


def test_entropy_negative_at_low_temperature():
    assert entropy(GOLD_CAV, 0.1 * GOLD_CAV.thouless) < 0


def test_zero_temperature_pressure_attractive_and_decays():
    cav = natural_cavity(1e-2, 1.0)
    p1 = pressure(cav, 0.0, tol=1e-9)
    p2 = pressure(cav.with_gap(2 * cav.gap), 0.0, tol=1e-9)
    assert p1 < 0 and p2 < 0
    assert abs(p2) < abs(p1)


@pytest.mark.filterwarnings("ignore:Richardson estimates")
def test_thermal_pressure_has_no_quadratic_term():
    cav = natural_cavity(1e-3, 10.0)
    xiL = cav.thouless
    T = np.geomspace(1e-4, 1e-2, 6) * xiL
    p = np.array([pressure(cav, t, thermal_only=True, tol=1e-11) for t in T])
    A = np.column_stack([np.ones_like(T), np.sqrt(T)])
    (a, b), *_ = np.linalg.lstsq(A, p / T**2, rcond=None)
    # a quadratic term would show up as a constant in p / T^2
    assert abs(a) < 0.05 * abs(b) * math.sqrt(T[-1])


def test_thermal_point_record():
    pt = thermal_point(GOLD_CAV, 0.5 * GOLD_CAV.thouless)
    assert pt.route == "matsubara" and pt.F > 0 and pt.S < 0 and pt.err >= 0
    with pytest.raises(ValueError):
        ThermalPoint(T=-1.0, F=0.0)

import math

import numpy as np
import pytest

from artifact.lifshitz import (
    I1_EXACT,
    I2_EXACT,
    M1_LEADING,
    SpectralCurve,
    appendix_integrals,
    appendix_integrals_sinh,
    curve_cl,
    dispersion,
    dispersion_eddy_kappa,
    dispersion_k_integral,
    dispersion_leading,
    dispersion_leading_series,
    dos_cl,
    mode_count_cl,
    mode_count_cl0,
    mode_count_correction_cl,
)
from artifact.numerics import differentiate_richardson, integrate_adaptive, sqrt_endpoint
from artifact.optics import Cavity, DomainError
from artifact.validation import natural_material


@pytest.fixture(scope="module")
def cav():
    # gamma = c = 1, Omega = 1000, L = 10 lambda
    mat = natural_material(1e-3)
    return Cavity(mat, 10 * mat.plasma_wavelength)


def test_appendix_closed_forms():
    i1, i2 = appendix_integrals()
    assert abs(i1 - I1_EXACT) < 1e-10 and abs(I1_EXACT + 0.09657359) < 1e-8
    assert abs(i2 - I2_EXACT) < 1e-10 and abs(I2_EXACT - 1 / 6) < 1e-15


def test_appendix_parameterizations_agree():
    assert np.allclose(appendix_integrals(), appendix_integrals_sinh(), rtol=0, atol=1e-10)


def test_dispersion_suppressed_at_large_gap():
    mat = natural_material(1e-3)
    far = Cavity(mat, 1e6 * mat.plasma_wavelength)
    assert abs(dispersion(far, 1j)) < 1e-30


def test_schwarz_symmetry(cav):
    a = dispersion(cav, 1.0 + 1.0j)
    b = dispersion(cav, -1.0 + 1.0j)
    assert abs(a - b.conjugate()) < 1e-10 * abs(a)


@pytest.mark.parametrize("xi", [1e-4, 1e-2, 1.0, 30.0])
def test_imaginary_axis_real_negative(cav, xi):
    d = dispersion(cav, 1j * xi)
    assert d.real < 0 and abs(d.imag) < 1e-12 * abs(d.real)


@pytest.mark.parametrize("z", [0.5j, 0.3 + 0.4j, -2.0 + 0.1j, 5j])
def test_scaled_path_matches_direct_k_integral(cav, z):
    assert dispersion(cav, z, 1e-11) == pytest.approx(dispersion_k_integral(cav, z, 1e-11), rel=1e-9)


def test_leading_equals_eddy_contour(cav):
    z = 0.3 + 0.4j
    assert dispersion_leading(cav, z, 1e-11) == pytest.approx(dispersion_eddy_kappa(cav, z, 1e-11), rel=1e-9)


def test_leading_schwarz(cav):
    z = 0.3 + 0.4j
    a = dispersion_leading(cav, z)
    b = dispersion_leading(cav, -z.conjugate())
    assert abs(a - b.conjugate()) < 1e-10 * abs(a)


def test_leading_small_z_series(cav):
    z = 1e-7 * cav.thouless * (1 + 1j)
    assert dispersion_leading(cav, z, 1e-11) == pytest.approx(dispersion_leading_series(cav, z), rel=1e-3)


def test_mode_count_zero(cav):
    assert mode_count_cl(cav, 0.0) == 0.0
    with pytest.raises(DomainError):
        mode_count_cl(cav, -1.0)


def test_leading_count_matches_first_order_slope(cav):
    w = 1e-6 * cav.thouless
    m = mode_count_cl0(cav, w) / (w / cav.material.diffusion)
    assert m == pytest.approx(M1_LEADING, rel=5e-3)


@pytest.mark.parametrize("frac", [1e-3, 1e-1, 3.0])
def test_density_matches_finite_difference(cav, frac):
    w = frac * cav.thouless
    fd = differentiate_richardson(lambda x: mode_count_cl(cav, x, 1e-12), w, 0.05 * w)[0]
    assert dos_cl(cav, w, 1e-11) == pytest.approx(-fd, rel=1e-6)


def test_density_integrates_to_count(cav):
    w = 0.5 * cav.thouless
    f = np.vectorize(lambda x: dos_cl(cav, x, 1e-11))
    g, a, b = sqrt_endpoint(f, 0.0, w)
    total = integrate_adaptive(g, a, b, tol=1e-10).value
    assert -total == pytest.approx(mode_count_cl(cav, w, 1e-11), rel=1e-8)


def test_density_at_zero_dominated_by_leading_slope(cav):
    r = dos_cl(cav, 0.0) * cav.material.diffusion
    assert r == pytest.approx(-M1_LEADING, rel=1e-2)


def test_density_decreases_with_gap():
    mat = natural_material(1e-3)
    w = 0.1 * mat.gamma
    mags = [abs(dos_cl(Cavity(mat, f * mat.plasma_wavelength), w)) for f in (1, 10, 1e2, 1e3, 1e4)]
    assert all(b < a for a, b in zip(mags, mags[1:]))
    assert mags[-1] < 1e-5 * mags[0]


def test_segment_closed_form_natural_units(cav):
    _, closed, _ = mode_count_correction_cl(cav, 1.0)
    assert closed == pytest.approx(-1.0 / (16 * math.pi), rel=1e-12)
    assert mode_count_correction_cl(cav, 2.0)[1] == pytest.approx(4 * closed, rel=1e-12)


def test_segment_exact_close_to_closed_form():
    mat = natural_material(1e-3)
    c = Cavity(mat, mat.plasma_wavelength)
    exact, closed, dev = mode_count_correction_cl(c, 1e-2 * mat.gamma)
    assert dev < 0.1


def test_curve_container(cav):
    grid = np.geomspace(1e-3, 1.0, 4) * cav.thouless
    cur = curve_cl(cav, grid, "count", "CL")
    assert isinstance(cur, SpectralCurve) and len(cur) == 4
    assert np.all(cur.err >= 0)
    assert cur.values[2] == mode_count_cl(cav, grid[2])
    with pytest.raises(ValueError):
        SpectralCurve(grid[::-1], cur.values, cur.err)

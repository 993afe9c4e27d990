import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact.optics import (
    GOLD,
    Cavity,
    ComplexFrequency,
    DomainError,
    DrudeMaterial,
    K_B_EV_PER_K,
    PoleError,
    chi,
    k_gamma_cut,
    kappa,
    kappa_gamma,
    permittivity,
    reflection_scaled,
    reflection_te,
    sqrt_pos,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_permittivity_imaginary_axis():
    assert permittivity(DrudeMaterial(2.0, 1.0), 1j) == pytest.approx(3.0)


def test_permittivity_real_axis():
    assert permittivity(DrudeMaterial(1.0, 1.0), 1.0) == pytest.approx(0.5 + 0.5j)


def test_permittivity_high_frequency():
    assert abs(permittivity(GOLD, 1e8 * (1 + 1j)) - 1.0) < 1e-12


def test_permittivity_poles():
    with pytest.raises(PoleError):
        permittivity(GOLD, 0.0)
    with pytest.raises(PoleError):
        permittivity(GOLD, -1j * GOLD.gamma)


def test_kappa_examples():
    assert kappa(3.0, 0.0) == pytest.approx(3.0)
    w = ComplexFrequency.real(2.0)
    assert kappa(0.0, w.value, c=1.0) == pytest.approx(-2.0j)
    assert kappa(5.0, ComplexFrequency.real(3.0).value) == pytest.approx(4.0)


def test_kappa_rejects_negative_k():
    with pytest.raises(DomainError):
        kappa(-1.0, 1j)


def test_kappa_gamma_examples():
    mat = DrudeMaterial(3.0, 1.0)
    assert kappa_gamma(mat, 2j) == pytest.approx(3.0 * math.sqrt(2.0 / 3.0))
    assert kappa_gamma(mat, ComplexFrequency.on_cut(0.5)) == pytest.approx(-3.0j)
    assert abs(kappa_gamma(mat, 1e9 + 1e9j) - 3.0) < 1e-8


def test_k_gamma_cut_limits():
    mat = DrudeMaterial(3.0, 1.0)
    assert k_gamma_cut(mat, 0.5) == pytest.approx(3.0)
    assert k_gamma_cut(mat, 1e-300) < 1e-140
    near = k_gamma_cut(mat, np.nextafter(1.0, 0.0))
    assert near > 1e7 and np.isfinite(near)
    with pytest.raises(DomainError):
        k_gamma_cut(mat, 1.0)


def test_reflection_limits():
    mat = DrudeMaterial(3.0, 1.0)
    assert reflection_te(mat, 0.0, 1j) == pytest.approx(-1.0)
    assert abs(reflection_te(mat, 1e6, 1j)) < 1e-11


def test_reflection_unitary_on_cut():
    mat = DrudeMaterial(9.0, 0.5)
    z = ComplexFrequency.on_cut(0.25)
    kap = np.linspace(0.0, 0.999 * 9.0 / mat.c, 101)
    r = reflection_te(mat, kap, z)
    assert np.max(np.abs(np.abs(r) - 1.0)) < 1e-12
    assert abs(abs(reflection_te(mat, 4.5, z)) - 1.0) < 1e-12


def test_reflection_scaled_examples():
    assert reflection_scaled(0.0) == pytest.approx(-1.0)
    assert reflection_scaled(1.0) == pytest.approx((1 - math.sqrt(2)) / (1 + math.sqrt(2)), abs=1e-12)
    big = reflection_scaled(1e8)
    assert big < 0 and abs(big) < 1e-15


def test_reflection_scaled_matches_fresnel():
    mat = DrudeMaterial(4.0, 1.0)
    z = 0.3 + 0.2j
    kg = kappa_gamma(mat, z)
    for y in (0.1, 1.0, 7.0):
        assert reflection_te(mat, y * kg, z) == pytest.approx(reflection_scaled(y), rel=1e-12)


def test_chi_examples():
    mat = DrudeMaterial(100.0, 1.0)
    xi = 0.3
    assert chi(mat, 1j * xi) == pytest.approx((xi / 100.0) * math.sqrt((xi + 1.0) / xi))
    z = 1e6
    assert chi(mat, z) == pytest.approx(-1j * z / 100.0, rel=1e-5)


def test_chi_bounded_on_gamma_circle():
    mat = DrudeMaterial(1e3, 1.0)
    phases = np.linspace(0.0, math.pi, 10)[1:-1]
    vals = [abs(chi(mat, np.exp(1j * p))) for p in phases] + [abs(chi(mat, 1.0 + 0j)), abs(chi(mat, -1.0 + 0j))]
    assert max(vals) <= math.sqrt(2) / 1e3 * (1 + 1e-12)


def test_thouless_temperature_gold():
    T = Cavity(GOLD, 100.0).thouless / K_B_EV_PER_K
    assert 15.0 < T < 25.0


def test_frequency_tags():
    with pytest.raises(ValueError):
        ComplexFrequency(1.0, 0.0)
    with pytest.raises(ValueError):
        ComplexFrequency(0.0, -1.0)
    assert ComplexFrequency.on_cut(2.0).value == -2j


def test_material_invariants():
    with pytest.raises(ValueError):
        DrudeMaterial(1.0, 0.0)
    with pytest.raises(ValueError):
        Cavity(GOLD, 0.0)


@settings(max_examples=300, deadline=None)
@given(finite, finite)
def test_sqrt_pos_branch(x, y):
    w = complex(x, y)
    s = sqrt_pos(w)
    assert abs(s * s - w) <= 1e-12 * max(1.0, abs(w))
    assert s.real >= 0
    if s.real == 0:
        assert s.imag <= 0


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 50), st.floats(0.01, 10), st.floats(0.01, 10))
def test_kappa_upper_half_plane(k, re, im):
    assert kappa(k, complex(re, im)).real >= 0


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 10), st.floats(0.01, 10), st.floats(0, 1e3))
def test_reflection_bounded_in_upper_half_plane(re, im, k):
    mat = DrudeMaterial(10.0, 1.0)
    z = complex(re, im)
    r = reflection_te(mat, kappa(k, z), z)
    assert abs(r) <= 1.0 + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 0.999999), st.floats(0, 1.0))
def test_on_cut_unitary_property(frac, kfrac):
    mat = DrudeMaterial(5.0, 1.0)
    xi = frac * mat.gamma
    kap = kfrac * k_gamma_cut(mat, xi)
    r = reflection_te(mat, kap, ComplexFrequency.on_cut(xi))
    assert abs(abs(r) - 1.0) < 1e-12

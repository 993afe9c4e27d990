"""TE Lifshitz dispersion function and the real-frequency mode densities.

The k-integral is always taken along ``kappa = y * kappa_gamma(z)`` with real
``y`` plus a short complex segment from ``y = chi(z)`` to ``y = 0``.  Along
the real ``y`` axis the reflection coefficient is real and independent of
``z``, which keeps the integrand clear of all square-root branch cuts.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .numerics import (
    QuadratureError,
    integrate_adaptive,
    integrate_semiinf,
    log1m,
    log1m_exp,
    expm1c,
)
from .optics import Cavity, ComplexFrequency, DomainError, kappa, kappa_gamma, reflection_te
from .parallel import map_ordered

__all__ = [
    "SpectralCurve",
    "DEFAULT_TOL",
    "log_grid",
    "dispersion",
    "dispersion_k_integral",
    "dispersion_leading",
    "dispersion_leading_series",
    "dispersion_eddy_kappa",
    "dispersion_derivative",
    "mode_count_cl",
    "dos_cl",
    "mode_count_cl0",
    "mode_count_correction_cl",
    "appendix_integrals",
    "appendix_integrals_sinh",
    "curve_cl",
    "M1_LEADING",
    "M32",
    "I1_EXACT",
    "I2_EXACT",
]

DEFAULT_TOL = 1e-9
TWO_PI2 = 2.0 * math.pi**2

I1_EXACT = -(2.0 * math.log(2.0) - 1.0) / 4.0
I2_EXACT = 1.0 / 6.0
M1_LEADING = (2.0 * math.log(2.0) - 1.0) / (8.0 * math.pi**2)
M32 = -math.sqrt(2.0) / (24.0 * math.pi**2)

_KINDS = ("count", "density")
_CHANNELS = ("CL", "D", "propagating", "CL0", "CLgamma", "D0", "Dgamma")


@dataclass(frozen=True)
class SpectralCurve:
    """Mode count ``M(omega)`` or density ``rho(omega)`` sampled on a grid."""

    grid: np.ndarray
    values: np.ndarray
    err: np.ndarray
    kind: str = "count"
    channel: str = "CL"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        err = np.asarray(self.err, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must be one-dimensional with at least two points")
        if values.shape != grid.shape or err.shape != grid.shape:
            raise ValueError("grid, values and err must have the same length")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly ascending")
        if np.any(err < 0):
            raise ValueError("error estimates must be non-negative")
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if self.channel not in _CHANNELS:
            raise ValueError(f"channel must be one of {_CHANNELS}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "err", err)

    def __len__(self):
        return self.grid.size


def log_grid(lo, hi, n):
    """``n`` log-spaced frequencies between ``lo`` and ``hi``."""
    if not 0 < lo < hi:
        raise ValueError("log_grid needs 0 < lo < hi")
    return np.geomspace(lo, hi, int(n))


def _zval(z):
    return z.value if isinstance(z, ComplexFrequency) else complex(z)


def _check_z(cav, z):
    zz = _zval(z)
    if zz == 0 or zz == -1j * cav.material.gamma:
        raise DomainError("dispersion is singular at z = 0 and z = -i*gamma")
    if isinstance(z, ComplexFrequency) and z.side.name == "RIGHT_OF_IMAG_CUT":
        raise DomainError("use the eddy_dos module for evaluations on the eddy cut")
    return zz


# ---------------------------------------------------------------------------
# integrands along the scaled path
# ---------------------------------------------------------------------------

def _exponent(y, kg, L):
    # log of r(y)^2 exp(-2 y kappa_gamma L); log r^2 = -4 asinh(y)
    return -4.0 * np.arcsinh(y) - 2.0 * y * kg * L


def _g(y, kg, L):
    return log1m_exp(_exponent(y, kg, L))


def _dg_dkappa(y, kg, L):
    if L == 0:
        return np.zeros_like(np.asarray(y, dtype=complex))
    w = _exponent(y, kg, L)
    with np.errstate(over="ignore"):
        return 2.0 * y * L / expm1c(-w)


def _real_path(h, kg, L, tol):
    """Integral of ``y * h(y)`` over ``y in [0, inf)``."""
    b = float(np.real(kg)) * L
    f = lambda y: y * h(y)
    if b > 0:
        y_cut = 40.0 / b
        # decades between the reflection scale y ~ 1 and the gap scale 1/b
        pts = [10.0**j for j in range(0, int(math.log10(y_cut)) + 1)] + [0.5 / b]
        pts = sorted(p for p in pts if p < y_cut)
        res = integrate_adaptive(f, 0.0, y_cut, tol=tol, points=pts)
        # |y h| <= y^-3 e^{-2 b y}/4 beyond the cut
        tail = 0.125 * math.exp(-80.0) / y_cut**2 * (1.0 + L * abs(kg))
        return res.value, res.err + tail
    lo = integrate_adaptive(f, 0.0, 1.0, tol=tol)
    hi = integrate_semiinf(f, 1.0, tol=tol, abs_tol=tol * abs(lo.value))
    return lo.value + hi.value, lo.err + hi.err


def _segment(h, chival, tol):
    """Integral of ``y * h(y)`` along the straight path from 0 to ``chi``."""
    f = lambda t: t * h(t * chival)
    res = integrate_adaptive(f, 0.0, 1.0, tol=tol)
    return chival**2 * res.value, abs(chival) ** 2 * res.err


def _parts(cav, zz, tol):
    mat = cav.material
    kg = complex(kappa_gamma(mat, zz))
    ch = -1j * zz / (mat.c * kg)
    return mat, kg, ch


# ---------------------------------------------------------------------------
# dispersion function
# ---------------------------------------------------------------------------

def dispersion(cav: Cavity, z, tol=DEFAULT_TOL, with_err=False):
    """Dispersion function D(z) per unit area (TE only).

    Evaluated along the scaled path with lower limit ``chi(z)``; real ``z``
    means ``z + i0``.
    """
    zz = _check_z(cav, z)
    if zz.imag * cav.gap > cav.material.c:
        # far above the real axis the two path pieces cancel to a few digits
        return dispersion_k_integral(cav, zz, tol, with_err=with_err)
    mat, kg, ch = _parts(cav, zz, tol)
    L = cav.gap
    h = partial(_g, kg=kg, L=L)
    jr, er = _real_path(h, kg, L, tol)
    js, es = _segment(h, ch, tol)
    pref = kg**2 / TWO_PI2
    val = pref * (jr - js)
    err = abs(pref) * (er + es)
    if err > max(1e3 * tol, 1e-6) * abs(val) and abs(val) > 0:
        raise QuadratureError(f"dispersion did not converge at z={zz}: err={err:.2e}")
    return (val, err) if with_err else val


def dispersion_leading(cav: Cavity, z, tol=DEFAULT_TOL, with_err=False):
    """Leading small-damping dispersion D_0(z): scaled path with lower limit 0."""
    zz = _check_z(cav, z)
    if abs(zz) > cav.material.gamma:
        warnings.warn("dispersion_leading is intended for |z| < gamma", RuntimeWarning, stacklevel=2)
    mat, kg, _ = _parts(cav, zz, tol)
    h = partial(_g, kg=kg, L=cav.gap)
    jr, er = _real_path(h, kg, cav.gap, tol)
    pref = kg**2 / TWO_PI2
    return (pref * jr, abs(pref) * er) if with_err else pref * jr


def dispersion_leading_series(cav: Cavity, z):
    """Two-term small-|z| expansion of D_0 in powers z and z^(3/2)."""
    zz = _zval(z)
    D = cav.material.diffusion
    lead = zz / (1j * D)
    root = np.sqrt(zz / (1j * cav.thouless))
    return lead * (I1_EXACT + root * I2_EXACT) / TWO_PI2


def dispersion_k_integral(cav: Cavity, z, tol=DEFAULT_TOL, with_err=False):
    """Direct transverse-momentum integral of D(z) for ``Im z > 0``.

    Free of cancellation on and near the imaginary axis, where ``dispersion``
    delegates to it once ``Im z > c/L``.
    """
    zz = _zval(z)
    if zz.imag <= 0:
        raise DomainError("direct k-integration needs Im z > 0")
    mat, L, c = cav.material, cav.gap, cav.material.c

    def f(k):
        ka = kappa(k, zz, c)
        r = reflection_te(mat, ka, zz)
        with np.errstate(under="ignore"):
            return k * log1m(r**2 * np.exp(-2.0 * ka * L)) / TWO_PI2

    scale = max(abs(zz) / c, 1.0 / L)
    res = integrate_semiinf(f, 0.0, tol=tol, scale=scale, points=[abs(zz) / c, mat.omega_p / c])
    return (res.value, res.err) if with_err else res.value


def dispersion_eddy_kappa(cav: Cavity, z, tol=DEFAULT_TOL):
    """Eddy-current dispersion function: D integrated over real kappa from 0.

    For ``Re z > 0`` this is analytic and coincides with D_0(z).
    """
    zz = _zval(z)
    mat, L = cav.material, cav.gap
    kg2 = complex(kappa_gamma(mat, zz)) ** 2

    def f(ka):
        root = np.sqrt(ka**2 + kg2 + 0j)
        root = np.where(root.real < 0, -root, root)
        r = (ka - root) / (ka + root)
        with np.errstate(under="ignore"):
            return ka * np.log(1.0 - r**2 * np.exp(-2.0 * ka * L)) / TWO_PI2

    scale = max(abs(kg2) ** 0.5, 1.0 / L)
    res = integrate_semiinf(f, 0.0, tol=tol, scale=scale, points=[1.0 / L, abs(kg2) ** 0.5])
    return res.value


def dispersion_derivative(cav: Cavity, z, tol=DEFAULT_TOL, with_err=False, leading=False):
    """dD/dz by differentiating the scaled-path integrand analytically."""
    zz = _check_z(cav, z)
    mat, kg, ch = _parts(cav, zz, tol)
    L = cav.gap
    dkg = 0.5 * kg * 1j * mat.gamma / (zz * (zz + 1j * mat.gamma))
    dch = ch * (1.0 / zz - dkg / kg)
    h = partial(_g, kg=kg, L=L)
    dh = partial(_dg_dkappa, kg=kg, L=L)
    jr, er = _real_path(h, kg, L, tol)
    kr, ekr = _real_path(dh, kg, L, tol) if L > 0 else (0.0, 0.0)
    if leading:
        val = (2.0 * kg * dkg * jr + kg**2 * dkg * kr) / TWO_PI2
        err = (abs(2.0 * kg * dkg) * er + abs(kg**2 * dkg) * ekr) / TWO_PI2
    else:
        js, es = _segment(h, ch, tol)
        ks, eks = _segment(dh, ch, tol) if L > 0 else (0.0, 0.0)
        gch = complex(_g(np.array([ch]), kg, L)[0])
        val = (2.0 * kg * dkg * (jr - js) + kg**2 * dkg * (kr - ks) - kg**2 * ch * dch * gch) / TWO_PI2
        err = (abs(2.0 * kg * dkg) * (er + es) + abs(kg**2 * dkg) * (ekr + eks)) / TWO_PI2
    return (val, err) if with_err else val


# ---------------------------------------------------------------------------
# real-frequency mode counts and densities
# ---------------------------------------------------------------------------

def _check_omega(omega):
    if omega < 0:
        raise DomainError("mode counts are defined for omega >= 0")


def mode_count_cl(cav: Cavity, omega, tol=DEFAULT_TOL, with_err=False):
    """Integrated Lifshitz mode count M_CL(omega) = Im D(omega + i0)."""
    _check_omega(omega)
    if omega == 0:
        return (0.0, 0.0) if with_err else 0.0
    val, err = dispersion(cav, ComplexFrequency.real(omega), tol, with_err=True)
    return (val.imag, err) if with_err else val.imag


def mode_count_cl0(cav: Cavity, omega, tol=DEFAULT_TOL, with_err=False):
    """Leading part M_CL,0(omega) = Im D_0(omega + i0)."""
    _check_omega(omega)
    if omega == 0:
        return (0.0, 0.0) if with_err else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        val, err = dispersion_leading(cav, ComplexFrequency.real(omega), tol, with_err=True)
    return (val.imag, err) if with_err else val.imag


def dos_cl(cav: Cavity, omega, tol=DEFAULT_TOL, with_err=False):
    """Lifshitz mode density rho_CL(omega) = -Im dD/domega at omega + i0."""
    _check_omega(omega)
    if omega == 0:
        # rho = rho(0) + C sqrt(omega) + O(omega): eliminate the root term
        w1 = 1e-10 * min(cav.thouless, cav.material.gamma)
        a, ea = dispersion_derivative(cav, ComplexFrequency.real(w1), tol, with_err=True)
        b, eb = dispersion_derivative(cav, ComplexFrequency.real(4.0 * w1), tol, with_err=True)
        val = -(2.0 * a.imag - b.imag)
        err = 2.0 * ea + eb + 1e-9 * abs(val)
        return (val, err) if with_err else val
    val, err = dispersion_derivative(cav, ComplexFrequency.real(omega), tol, with_err=True)
    return (-val.imag, err) if with_err else -val.imag


def mode_count_correction_cl(cav: Cavity, omega, tol=DEFAULT_TOL):
    """Lower-segment correction M_CL,gamma(omega) and its closed form.

    Returns ``(exact, closed_form, relative_deviation)`` where the exact value
    is the segment integral from 0 to chi(omega) and the closed form is
    ``-omega^2 / (16 pi c^2)``.
    """
    _check_omega(omega)
    c = cav.material.c
    closed = -(omega**2) / (16.0 * math.pi * c**2)
    if omega == 0:
        return 0.0, 0.0, 0.0
    zz = complex(omega)
    _, kg, ch = _parts(cav, zz, tol)
    h = partial(_g, kg=kg, L=cav.gap)
    js, _ = _segment(h, ch, tol)
    exact = (-(kg**2) * js / TWO_PI2).imag
    return exact, closed, abs(exact / closed - 1.0)


def appendix_integrals(tol=1e-13):
    """The two y-integrals of the low-frequency expansion of D_0.

    Returns ``(I1, I2)`` with ``I1 = int y log(1 - r^2) dy`` and
    ``I2 = int 2 y^2 r^2/(1 - r^2) dy`` over ``[0, inf)``.
    """
    f1 = lambda y: y * log1m_exp(-4.0 * np.arcsinh(y)).real
    f2 = lambda y: 2.0 * y**2 / np.expm1(4.0 * np.arcsinh(y))
    out = []
    for f in (f1, f2):
        lo = integrate_adaptive(f, 0.0, 1.0, tol=tol)
        hi = integrate_semiinf(f, 1.0, tol=tol, abs_tol=tol * abs(lo.value))
        out.append(lo.value + hi.value)
    return tuple(out)


def appendix_integrals_sinh(tol=1e-13):
    """Same integrals after ``y = sinh t``."""
    def f1(t):
        # sinh(2t)/2 * log(1 - e^{-4t}) written without overflow
        with np.errstate(divide="ignore", under="ignore"):
            mlog = -log1m_exp(-4.0 * t).real
            return -0.25 * (-np.expm1(-4.0 * t)) * np.exp(2.0 * t + np.log(mlog))

    f2 = lambda t: 0.25 * (np.exp(-t) - np.exp(-3.0 * t))
    out = []
    for f in (f1, f2):
        lo = integrate_adaptive(f, 0.0, 1.0, tol=tol)
        hi = integrate_semiinf(f, 1.0, tol=tol, abs_tol=tol * abs(lo.value))
        out.append(lo.value + hi.value)
    return tuple(out)


_CURVE_FUNCS = {
    ("count", "CL"): mode_count_cl,
    ("count", "CL0"): mode_count_cl0,
    ("density", "CL"): dos_cl,
}


def _curve_point(omega, cav, kind, channel, tol):
    if (kind, channel) == ("count", "CLgamma"):
        return mode_count_correction_cl(cav, omega, tol)[0], 0.0
    return _CURVE_FUNCS[kind, channel](cav, omega, tol, with_err=True)


def curve_cl(cav: Cavity, grid, kind="count", channel="CL", tol=DEFAULT_TOL, workers=1):
    """Sample a Lifshitz-channel curve; points may be evaluated concurrently."""
    grid = np.asarray(grid, dtype=float)
    pts = map_ordered(partial(_curve_point, cav=cav, kind=kind, channel=channel, tol=tol), grid, workers)
    vals = np.array([p[0] for p in pts])
    errs = np.array([p[1] for p in pts])
    return SpectralCurve(grid, vals, errs, kind=kind, channel=channel)

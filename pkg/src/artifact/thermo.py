"""Casimir free energy, entropy and pressure of the TE channel.

Two independent routes give the thermal part ``dF = F(T) - F(0)``:

* ``dos``: Bose-weighted integral of an integrated mode count M(omega);
* ``matsubara``: the imaginary-frequency sum ``T sum'_n g(xi_n)`` with
  ``g(xi) = pi D(i xi)``, minus its zero-temperature integral.

The Matsubara sum is carried explicitly over the first ``N`` frequencies;
the remaining sum-minus-integral difference is an Euler-Maclaurin tail on a
region where ``g`` is smooth on the Matsubara spacing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import zeta

from .eddy import ExpansionCoefficients, m_coefficients
from .lifshitz import (
    DEFAULT_TOL,
    M1_LEADING,
    M32,
    SpectralCurve,
    dispersion,
    dispersion_derivative,
    mode_count_cl,
)
from .numerics import differentiate_richardson, integrate_adaptive
from .optics import Cavity

__all__ = [
    "ThermalPoint",
    "ExpansionCoefficients",
    "CoverageError",
    "IllConditionedFitError",
    "FitResult",
    "matsubara_integrand",
    "free_energy_from_dos",
    "free_energy_matsubara",
    "thermal_free_energy",
    "free_energy_zero",
    "low_T_expansion",
    "cubic_coefficient_cl",
    "expansion_free_energy",
    "fit_expansion",
    "entropy",
    "pressure",
    "thermal_point",
]

ROUTES = ("dos", "matsubara", "expansion")
BOSE_CUTOFF = 50.0          # minimum omega_max / T for the DOS route
MATSUBARA_HEAD = 40         # explicit Matsubara terms before the tail


class CoverageError(ValueError):
    """Spectral curve does not reach high enough in frequency."""


class IllConditionedFitError(ValueError):
    """Temperature window too narrow to separate T^2 from T^(5/2)."""


@dataclass(frozen=True)
class ThermalPoint:
    """Thermodynamic state at one temperature.

    ``F`` is the thermal part F(T) - F(0) per area; ``S`` and ``p`` may be
    NaN when not requested.
    """

    T: float
    F: float
    S: float = math.nan
    p: float = math.nan
    route: str = "matsubara"
    err: float = 0.0

    def __post_init__(self):
        if not self.T >= 0:
            raise ValueError("temperature must be non-negative")
        if self.route not in ROUTES:
            raise ValueError(f"route must be one of {ROUTES}")


# ---------------------------------------------------------------------------
# DOS route
# ---------------------------------------------------------------------------

def _curve_interpolant(curve: SpectralCurve):
    if curve.kind != "count":
        raise ValueError("free_energy_from_dos needs an integrated mode count")
    w = np.asarray(curve.grid, dtype=float)
    if np.any(w <= 0):
        raise ValueError("curve grid must be positive for log interpolation")
    # M(omega)/omega is smooth in log omega and tends to m1/D at the origin
    spl = CubicSpline(np.log(w), curve.values / w)
    lo = w[0]
    slope_lo = curve.values[0] / lo

    def M(x):
        x = np.asarray(x, dtype=float)
        inside = spl(np.log(np.clip(x, lo, w[-1])))
        return np.where(x < lo, slope_lo, inside) * x

    return M, w[-1]


def free_energy_from_dos(
    mode_count: Union[SpectralCurve, Callable[[float], float]],
    T: float,
    omega_max: float | None = None,
    tol: float = 1e-10,
    with_err: bool = False,
):
    """Thermal free energy ``int_0^inf M(omega) / (exp(omega/T) - 1) domega``.

    ``mode_count`` is either a count-kind SpectralCurve (interpolated) or a
    scalar callable.  The integral is truncated at ``omega_max`` (the curve
    end by default, which must be at least 50 T); beyond it ``|M|`` is
    bounded by linear growth from its last value.
    """
    if T < 0:
        raise ValueError("temperature must be non-negative")
    if T == 0:
        return (0.0, 0.0) if with_err else 0.0
    if isinstance(mode_count, SpectralCurve):
        M, top = _curve_interpolant(mode_count)
        omega_max = top if omega_max is None else min(omega_max, top)
        interp_err = float(np.max(mode_count.err / mode_count.grid))
    else:
        f = np.vectorize(mode_count, otypes=[float])
        M = f
        omega_max = 1.2 * BOSE_CUTOFF * T if omega_max is None else omega_max
        interp_err = 0.0
    X = omega_max / T
    if X < BOSE_CUTOFF * (1.0 - 1e-12):
        raise CoverageError(f"mode count covers omega/T up to {X:.3g}; need at least {BOSE_CUTOFF}")

    def integrand(x):
        with np.errstate(over="ignore"):
            return M(T * x) / np.expm1(x)

    pts = [p for p in (0.1, 1.0, 5.0, 15.0) if p < X]
    res = integrate_adaptive(integrand, 0.0, X, tol=tol, points=pts)
    val = T * res.value
    m_top = abs(float(np.asarray(M(np.array([omega_max])))[0]))
    # |M(omega)| <= m_top omega/omega_max beyond the cut: int x e^-x from X
    tail = T * m_top * (1.0 + 1.0 / X) * math.exp(-X) * 1.01
    # spline/curve point errors enter through int |err/omega| omega n(omega)
    err = T * res.err + tail + interp_err * T * T * zeta(2.0)
    return (val, err) if with_err else val


# ---------------------------------------------------------------------------
# Matsubara route
# ---------------------------------------------------------------------------

def matsubara_integrand(cav: Cavity, xi: float, tol=DEFAULT_TOL) -> float:
    """g(xi) = int k dk / (2 pi) log(1 - r^2 e^{-2 kappa L}) at z = i xi."""
    if xi == 0:
        return 0.0          # TE Drude: kappa_gamma(0) = 0 so r = 0
    return math.pi * dispersion(cav, 1j * xi, tol).real


def _g_prime(cav, xi, tol):
    if xi * cav.gap > cav.material.c:
        return differentiate_richardson(lambda x: matsubara_integrand(cav, x, tol), xi, 0.05 * xi)[0]
    # dD/dz at z = i xi times i
    return -math.pi * dispersion_derivative(cav, 1j * xi, tol).imag


def _g_integral(cav, a, b, tol, scale):
    f = np.vectorize(lambda x: matsubara_integrand(cav, x, tol), otypes=[float])
    pts = [b * 10.0**-j for j in (3, 2, 1)] + [scale]
    pts = sorted(p for p in pts if a < p < b)
    return integrate_adaptive(f, a, b, tol=0.1 * tol, points=pts)


def _natural_scale(cav: Cavity) -> float:
    mat = cav.material
    return min(cav.thouless, mat.gamma, mat.c / cav.gap)


def thermal_free_energy(cav: Cavity, T: float, tol=1e-11, head: int = MATSUBARA_HEAD, with_err=False):
    """Matsubara-route thermal part F(T) - F(0), free of the large cancellation.

    ``h sum''_{n=0}^{N} g(n h) - int_0^{N h} g`` is evaluated directly and the
    remaining difference from ``[N h, inf)`` by its Euler-Maclaurin series
    ``-(h^2/12) g' + (h^4/720) g'''`` with ``h = 2 pi T``.
    """
    if T < 0:
        raise ValueError("temperature must be non-negative")
    if T == 0:
        return (0.0, 0.0) if with_err else 0.0
    h = 2.0 * math.pi * T
    xN = head * h
    gvals = np.array([matsubara_integrand(cav, n * h, tol) for n in range(head + 1)])
    trap = h * (gvals.sum() - 0.5 * gvals[0] - 0.5 * gvals[-1])
    integ = _g_integral(cav, 0.0, xN, tol, _natural_scale(cav))
    g1 = _g_prime(cav, xN, tol)
    # g''' from the second derivative of g'
    step = 0.05 * xN
    g3 = (_g_prime(cav, xN + step, tol) - 2.0 * g1 + _g_prime(cav, xN - step, tol)) / step**2
    em = -(h * h / 12.0) * g1 + (h**4 / 720.0) * g3
    val = float(trap - integ.value + em) / (2.0 * math.pi)
    # next Euler-Maclaurin term is bounded by the size of the last one kept
    err = (integ.err + abs(h**4 / 720.0 * g3) + tol * (abs(trap) + abs(integ.value))) / (2.0 * math.pi)
    return (val, err) if with_err else val


def free_energy_zero(cav: Cavity, tol=1e-10, with_err=False):
    """Zero-temperature free energy (1/2 pi) int_0^inf g(xi) dxi (negative)."""
    s = _natural_scale(cav)
    f = np.vectorize(lambda x: matsubara_integrand(cav, x, tol), otypes=[float])
    mat = cav.material
    pts = sorted({cav.thouless, mat.gamma, mat.c / cav.gap})
    top = 60.0 * mat.c / cav.gap
    pts = [p for p in pts if p < top]
    head = integrate_adaptive(f, 0.0, top, tol=tol, points=pts)
    # g ~ e^{-2 xi L / c} beyond; bound the rest by the last value's decay length
    g_top = abs(matsubara_integrand(cav, top, tol))
    tail = g_top * mat.c / (2.0 * cav.gap)
    val = head.value / (2.0 * math.pi)
    err = (head.err + tail) / (2.0 * math.pi)
    return (val, err) if with_err else val


def free_energy_matsubara(cav: Cavity, T: float, tol=1e-11, with_err=False):
    """Full TE free energy T sum'_n g(xi_n).

    Evaluated as F(0) plus the thermal part, which avoids summing the
    1/T-many terms needed before e^{-2 kappa L} cuts the series off.
    """
    f0, e0 = free_energy_zero(cav, tol, with_err=True)
    if T == 0:
        return (f0, e0) if with_err else f0
    dF, e1 = thermal_free_energy(cav, T, tol, with_err=True)
    return (f0 + dF, e0 + e1) if with_err else f0 + dF


# ---------------------------------------------------------------------------
# expansions and fits
# ---------------------------------------------------------------------------

def low_T_expansion(cav: Cavity, channel: str = "CL") -> ExpansionCoefficients:
    """Analytic coefficients of dF = f2 T^2 + f52 T^(5/2)."""
    if channel == "CL":
        return ExpansionCoefficients.from_m(cav, M1_LEADING, M32, "CL")
    if channel == "D":
        return m_coefficients(cav)
    raise ValueError("channel must be 'CL' or 'D'")


def cubic_coefficient_cl(cav: Cavity) -> float:
    """T^3 coefficient from the lower-segment correction -omega^2/(16 pi c^2).

    Bose-weighting omega^2 gives Gamma(3) zeta(3) T^3.
    """
    return -2.0 * zeta(3.0) / (16.0 * math.pi * cav.material.c**2)


def expansion_free_energy(coeffs: ExpansionCoefficients, T) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    return coeffs.f2 * T**2 + coeffs.f52 * T**2.5


@dataclass(frozen=True)
class FitResult:
    a2: float
    a52: float
    err2: float
    err52: float
    condition: float

    def __iter__(self):
        return iter((self.a2, self.a52))


def fit_expansion(samples: Sequence[ThermalPoint], max_condition: float = 1e8, xi_L: float | None = None) -> FitResult:
    """Least-squares fit of F(T) to a2 T^2 + a52 T^(5/2).

    Each row is divided by T^2 so all temperatures carry equal relative
    weight; the fit is then linear in (1, sqrt(T)).  ``condition`` is the
    2-norm condition number of the column-scaled design matrix.
    """
    pts = list(samples)
    if len(pts) < 4:
        raise ValueError("fit_expansion needs at least four samples")
    T = np.array([p.T for p in pts], dtype=float)
    F = np.array([p.F for p in pts], dtype=float)
    if np.any(T <= 0):
        raise ValueError("fit temperatures must be positive")
    if xi_L is not None and np.any(T > 1e-2 * xi_L * (1 + 1e-12)):
        raise ValueError("fit window must satisfy T <= 1e-2 xi_L")
    s = np.sqrt(T)
    A = np.column_stack([np.ones_like(T), s])
    y = F / T**2
    colscale = np.linalg.norm(A, axis=0)
    As = A / colscale
    cond = float(np.linalg.cond(As))
    if not np.isfinite(cond) or cond > max_condition:
        raise IllConditionedFitError(f"design matrix condition number {cond:.3g} exceeds {max_condition:.3g}")
    coef, res, *_ = np.linalg.lstsq(As, y, rcond=None)
    coef = coef / colscale
    dof = max(len(T) - 2, 1)
    resid = y - A @ coef
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(A.T @ A)
    return FitResult(float(coef[0]), float(coef[1]), float(math.sqrt(cov[0, 0])), float(math.sqrt(cov[1, 1])), cond)


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

def _route_F(cav, route, tol, mode_count=None):
    if route == "matsubara":
        return lambda T: thermal_free_energy(cav, T, tol)
    if route == "dos":
        M = mode_count or (lambda w: mode_count_cl(cav, w, tol))
        return lambda T: free_energy_from_dos(M, T, tol=tol)
    if route == "expansion":
        co = low_T_expansion(cav, "CL")
        return lambda T: float(expansion_free_energy(co, T))
    raise ValueError(f"route must be one of {ROUTES}")


def entropy(cav: Cavity, T: float, route: str = "matsubara", tol=1e-11, with_err=False):
    """S = -dF/dT by Richardson-extrapolated central differences (h = T/10)."""
    if not T > 0:
        raise ValueError("entropy requires T > 0")
    F = _route_F(cav, route, tol)
    d, err = differentiate_richardson(F, T, 0.1 * T)[:2]
    return (-d, err) if with_err else -d


def pressure(cav: Cavity, T: float, route: str = "matsubara", thermal_only: bool = False, tol=1e-11, with_err=False):
    """p = -dF/dL by central differences in the gap (h = L/100).

    With ``thermal_only`` the zero-temperature Casimir pressure is left out.
    """
    if T < 0:
        raise ValueError("temperature must be non-negative")

    def F(L):
        c = cav.with_gap(L)
        val = 0.0 if thermal_only else free_energy_zero(c, tol)
        if T > 0:
            val += _route_F(c, route, tol)(T)
        return val

    d, err = differentiate_richardson(F, cav.gap, 0.01 * cav.gap)[:2]
    return (-d, err) if with_err else -d


def thermal_point(cav: Cavity, T: float, route: str = "matsubara", with_entropy=True, with_pressure=False, tol=1e-11) -> ThermalPoint:
    F, err = _route_F(cav, route, tol)(T), 0.0
    if route == "matsubara" and T > 0:
        F, err = thermal_free_energy(cav, T, tol, with_err=True)
    S = entropy(cav, T, route, tol) if (with_entropy and T > 0) else (0.0 if T == 0 else math.nan)
    p = pressure(cav, T, route, thermal_only=True, tol=tol) if with_pressure else math.nan
    return ThermalPoint(T=T, F=F, S=S, p=p, route=route, err=err)

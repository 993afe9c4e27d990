"""Eddy-current (Foucault) mode densities from the branch cut on [0, -i gamma].

Along the cut the reflection coefficient is unimodular.  Writing
``kappa = k_gamma(xi) sin(theta)`` gives ``r^2 = exp(-4 i theta)``, so the
cut mode count becomes a smooth theta-integral:

    M_D(xi) = -(k_gamma^2 / 2 pi^2) * int sin cos Im log(1 - e^{-4 i theta} e^{-2 k_gamma L sin theta})

The real-frequency count and density follow by Lorentzian smearing of the
cut density.  ``M_D(xi)`` is tabulated once per cavity on Chebyshev panels in
``phi`` with ``xi = gamma sin(phi)^2`` and stored as ``M_D / xi^(3/2)``,
which is smooth on the closed interval.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.special import zeta

from .lifshitz import DEFAULT_TOL, M1_LEADING, M32, SpectralCurve, dos_cl
from .numerics import QuadratureError, find_root_bracketed, integrate_adaptive
from .optics import Cavity, DomainError, DrudeMaterial

__all__ = [
    "ExpansionCoefficients",
    "ModeBoundary",
    "BranchCutDensity",
    "xi0",
    "mode_boundary",
    "cut_phase",
    "mode_count_cut",
    "branch_cut_density",
    "mode_count_eddy",
    "mode_count_eddy_split",
    "dos_eddy",
    "damping_correction",
    "dos_propagating",
    "m_coefficients",
    "curve_eddy",
]

TWO_PI2 = 2.0 * math.pi**2
CUT_CHANNELS = ("D", "D0", "Dgamma")


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Low-frequency / low-temperature expansion coefficients.

    ``m1`` and ``m32`` are dimensionless; ``f2`` and ``f52`` multiply T^2 and
    T^(5/2) in the free energy per area.
    """

    m1: float
    m32: float
    f2: float
    f52: float
    channel: str = "CL"

    @property
    def f52_bose(self) -> float:
        """T^(5/2) coefficient from Bose-weighting the omega^(3/2) term.

        Termwise integration gives Gamma(5/2) zeta(5/2) rather than the
        sqrt(pi) zeta(5/2) / 2 = Gamma(3/2) zeta(5/2) prefactor of ``f52``.
        """
        return 1.5 * self.f52

    @classmethod
    def from_m(cls, cav: Cavity, m1: float, m32: float, channel: str):
        D = cav.material.diffusion
        f2 = zeta(2.0) * m1 / D
        f52 = 0.5 * math.sqrt(math.pi) * zeta(2.5) * m32 * cav.gap / D**1.5
        return cls(m1, m32, float(f2), float(f52), channel)


@dataclass(frozen=True)
class ModeBoundary:
    k_grid: np.ndarray
    xi0: np.ndarray


# ---------------------------------------------------------------------------
# lower edge of the cut
# ---------------------------------------------------------------------------

def xi0(mat: DrudeMaterial, k: float, tol: float = 1e-12) -> float:
    """Lower end of the eddy cut at transverse wavenumber ``k``.

    Root in [0, gamma) of (gamma - xi)(c^2 k^2 + xi^2) = Omega^2 xi.
    """
    if k < 0:
        raise DomainError("k must be non-negative")
    if k == 0:
        return 0.0
    g, W, c = mat.gamma, mat.omega_p, mat.c

    def f(x):
        return (g - x) * (c * c * k * k + x * x) - W * W * x

    return find_root_bracketed(f, 0.0, g * (1.0 - 1e-12), tol=tol)


def mode_boundary(mat: DrudeMaterial, k_grid) -> ModeBoundary:
    k_grid = np.asarray(k_grid, dtype=float)
    return ModeBoundary(k_grid, np.array([xi0(mat, k) for k in k_grid]))


# ---------------------------------------------------------------------------
# cut mode count M_D(xi)
# ---------------------------------------------------------------------------

def cut_phase(theta, kg_L):
    """Principal Im log(1 - exp(-4 i theta - 2 kg_L sin theta)).

    The real part of the argument is never negative, so the principal branch
    is continuous in theta.
    """
    theta = np.asarray(theta, dtype=float)
    a = 2.0 * kg_L * np.sin(theta)
    ea = np.exp(-a)
    re = -np.expm1(-a) + 2.0 * ea * np.sin(2.0 * theta) ** 2
    im = ea * np.sin(4.0 * theta)
    return np.arctan2(im, re)


def _theta_lo(cav: Cavity, xi: float, kg: float) -> float:
    return math.asin(min(1.0, xi / (cav.material.c * kg)))


def _theta_integral(kg_L, a, b, tol):
    f = lambda th: np.sin(th) * np.cos(th) * cut_phase(th, kg_L)
    pts = None
    if kg_L > 1.0:
        pts = [p for p in (0.25 / kg_L, 1.0 / kg_L, 4.0 / kg_L, 16.0 / kg_L) if a < p < b]
    # the integral scales as 1/(k_gamma L)^2 for thick gaps; absolute floor follows it
    floor = 1e-2 * tol / (1.0 + kg_L) ** 2
    return integrate_adaptive(f, a, b, tol=tol, abs_tol=floor, points=pts)


def _kg(mat, xi):
    with np.errstate(divide="ignore", over="ignore"):
        return (mat.omega_p / mat.c) * math.sqrt(xi / (mat.gamma - xi)) if xi < mat.gamma else math.inf


def mode_count_cut(cav: Cavity, xi: float, channel: str = "D", tol=DEFAULT_TOL, with_err=False):
    """Integrated mode count along the cut, M_D(xi), for 0 < xi < gamma.

    ``channel='D'`` keeps the exact lower kappa-limit xi/c, ``'D0'`` sets it
    to zero and ``'Dgamma'`` is the difference (the segment below xi/c), so
    that D = D0 + Dgamma.
    """
    mat = cav.material
    if channel not in CUT_CHANNELS:
        raise ValueError(f"channel must be one of {CUT_CHANNELS}")
    if xi <= 0:
        return (0.0, 0.0) if with_err else 0.0
    if xi >= mat.gamma:
        return (0.0, 0.0) if with_err else 0.0
    kg = _kg(mat, xi)
    if not math.isfinite(kg):
        return (0.0, 0.0) if with_err else 0.0
    kg_L = kg * cav.gap
    th_lo = _theta_lo(cav, xi, kg)
    pref = kg * kg / TWO_PI2
    if channel == "D":
        res = _theta_integral(kg_L, th_lo, 0.5 * math.pi, tol)
        val, err = -pref * res.value, pref * res.err
    elif channel == "D0":
        res = _theta_integral(kg_L, 0.0, 0.5 * math.pi, tol)
        val, err = -pref * res.value, pref * res.err
    else:
        res = _theta_integral(kg_L, 0.0, th_lo, tol)
        val, err = pref * res.value, pref * res.err
    return (val, err) if with_err else val


# ---------------------------------------------------------------------------
# tabulated cut density
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchCutDensity:
    """Piecewise-Chebyshev table of M_D(xi) on [0, gamma].

    Stored in ``phi`` (``xi = gamma sin^2 phi``) as ``q = M_D / xi^(3/2)``.
    ``panel_err`` bounds the interpolation error of ``q`` (absolute) on
    each panel, including the quadrature error of the tabulated samples.
    """

    gamma: float
    channel: str
    edges: np.ndarray
    coeffs: tuple
    panel_err: tuple
    samples: int

    @property
    def err(self) -> float:
        return float(max(self.panel_err))

    @property
    def xi_grid(self):
        phi = np.linspace(0.0, 0.5 * math.pi, 65)[1:-1]
        return self.gamma * np.sin(phi) ** 2

    @property
    def values(self):
        return self(self.xi_grid)

    def _panel(self, phi):
        return np.clip(np.searchsorted(self.edges, phi, side="right") - 1, 0, len(self.coeffs) - 1)

    def q_err(self, phi):
        return np.asarray(self.panel_err)[self._panel(np.asarray(phi, dtype=float))]

    def q(self, phi):
        phi = np.asarray(phi, dtype=float)
        out = np.zeros_like(phi)
        idx = self._panel(phi)
        for i, cf in enumerate(self.coeffs):
            m = idx == i
            if m.any():
                a, b = self.edges[i], self.edges[i + 1]
                out[m] = C.chebval((2.0 * phi[m] - a - b) / (b - a), cf)
        return out

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        inside = (xi > 0) & (xi < self.gamma)
        phi = np.arcsin(np.sqrt(np.clip(xi / self.gamma, 0.0, 1.0)))
        return np.where(inside, self.q(phi) * np.clip(xi, 0.0, None) ** 1.5, 0.0)


def _q_samples(cav, channel, phis, tol):
    g = cav.material.gamma
    out = np.empty_like(phis)
    errs = np.empty_like(phis)
    for i, p in enumerate(phis):
        xi = g * math.sin(p) ** 2
        v, e = mode_count_cut(cav, xi, channel, tol, with_err=True)
        out[i] = v / xi**1.5
        errs[i] = e / xi**1.5
    return out, errs


def _fit_panel(cav, channel, a, b, deg, tol):
    nodes = np.cos(math.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
    phis = 0.5 * (a + b) + 0.5 * (b - a) * nodes
    vals, errs = _q_samples(cav, channel, phis, tol)
    cf = C.chebfit(nodes, vals, deg)
    return cf, float(np.abs(cf[-3:]).max()), float(errs.max())


@lru_cache(maxsize=64)
def branch_cut_density(cav: Cavity, channel: str = "D", tol: float = DEFAULT_TOL,
                       deg: int = 20, max_panels: int = 256, min_width: float = 1e-6) -> BranchCutDensity:
    """Tabulate M_D(xi) for a cavity; cached per (cavity, channel, tol)."""
    if channel not in CUT_CHANNELS:
        raise ValueError(f"channel must be one of {CUT_CHANNELS}")
    qtol = max(0.1 * min(tol, 1e-9), 1e-12)
    stack = [(i * math.pi / 16, (i + 1) * math.pi / 16) for i in range(8)]
    panels = []
    scale = 0.0
    nsamp = 0
    first = [(_fit_panel(cav, channel, a, b, deg, qtol), a, b) for a, b in stack]
    nsamp += len(stack) * (deg + 1)
    scale = max(np.abs(p[0][0]).sum() for p in first)
    work = list(first)
    while work:
        (cf, tail, serr), a, b = work.pop()
        if tail <= tol * scale or b - a < min_width or len(panels) + len(work) >= max_panels:
            panels.append((a, b, cf, tail + serr))
            continue
        m = 0.5 * (a + b)
        work.append((_fit_panel(cav, channel, a, m, deg, qtol), a, m))
        work.append((_fit_panel(cav, channel, m, b, deg, qtol), m, b))
        nsamp += 2 * (deg + 1)
    if len(panels) >= max_panels:
        warnings.warn("branch_cut_density hit the panel budget", RuntimeWarning, stacklevel=2)
    panels.sort(key=lambda p: p[0])
    edges = np.array([p[0] for p in panels] + [panels[-1][1]])
    return BranchCutDensity(
        gamma=cav.material.gamma,
        channel=channel,
        edges=edges,
        coeffs=tuple(p[2] for p in panels),
        panel_err=tuple(float(p[3]) for p in panels),
        samples=nsamp,
    )


# ---------------------------------------------------------------------------
# Lorentzian-smeared real-frequency quantities
# ---------------------------------------------------------------------------

def _phi_points(gamma, omega):
    if omega <= 0 or omega >= gamma:
        return None
    p = math.asin(math.sqrt(omega / gamma))
    return [x for x in (0.25 * p, 0.5 * p, p, min(2.0 * p, 1.5), min(4.0 * p, 1.5)) if 0 < x < 0.5 * math.pi]


def _smeared(bcd: BranchCutDensity, kernel, omega, tol):
    """int_0^gamma kernel(xi) * M(xi) dxi / pi, in phi with M = q xi^(3/2)."""
    g = bcd.gamma

    def weight(phi):
        s = np.sin(phi)
        # dxi = gamma sin(2 phi) dphi; xi^(3/2) = gamma^1.5 s^3
        return kernel(g * s * s) * g**2.5 * s**3 * np.sin(2.0 * phi)

    pts = _phi_points(g, omega)
    res = integrate_adaptive(lambda p: weight(p) * bcd.q(p), 0.0, 0.5 * math.pi,
                             tol=tol, abs_tol=1e-300, points=pts)
    # interpolation error propagated through |kernel| xi^(3/2)
    absres = integrate_adaptive(lambda p: np.abs(weight(p)) * bcd.q_err(p),
                                0.0, 0.5 * math.pi, tol=1e-3, points=pts)
    return res.value / math.pi, (res.err + absres.value) / math.pi


def mode_count_eddy(cav: Cavity, omega: float, channel: str = "D", tol=DEFAULT_TOL, with_err=False):
    """Real-frequency eddy mode count M_D(omega) (even in omega)."""
    omega = abs(omega)
    if omega == 0:
        return (0.0, 0.0) if with_err else 0.0
    bcd = branch_cut_density(cav, channel, tol)
    val, err = _smeared(bcd, lambda xi: omega / (xi * xi + omega * omega), omega, tol)
    return (-val, err) if with_err else -val


def mode_count_eddy_split(cav: Cavity, omega: float, tol=DEFAULT_TOL, with_err=False):
    """(M_D0(omega), M_Dgamma(omega)) with lower kappa-limit 0 vs the segment."""
    a = mode_count_eddy(cav, omega, "D0", tol, with_err=True)
    b = mode_count_eddy(cav, omega, "Dgamma", tol, with_err=True)
    if with_err:
        return a, b
    return a[0], b[0]


def dos_eddy(cav: Cavity, omega: float, channel: str = "D", tol=DEFAULT_TOL, with_err=False):
    """Eddy mode density rho_D(omega) after integrating the Lorentzian by parts."""
    omega = abs(omega)
    g = cav.material.gamma
    bcd = branch_cut_density(cav, channel, tol)
    w2 = omega * omega
    if omega > 0:
        kernel = lambda xi: -(w2 - xi * xi) / (xi * xi + w2) ** 2
    else:
        kernel = lambda xi: 1.0 / (xi * xi)
    val, err = _smeared(bcd, kernel, omega, tol)
    # M_D(gamma^-) from the table endpoint; it vanishes unless the gap is tiny
    m_top = float(bcd.q(np.array([0.5 * math.pi]))[0]) * g**1.5
    boundary = g * m_top / (g * g + w2) / math.pi
    err += g * bcd.panel_err[-1] * g**1.5 / (g * g + w2) / math.pi
    val += boundary
    return (val, err) if with_err else val


def damping_correction(cav: Cavity, omega: float) -> float:
    """Closed-form damping part of the eddy mode count.

    (omega/D) (gamma^2 / 4 pi^2 Omega^2) lambda / (2 lambda + L); valid for
    omega << gamma and gamma << c/L.
    """
    mat = cav.material
    if omega > 0.1 * mat.gamma:
        warnings.warn("damping_correction assumes omega << gamma", RuntimeWarning, stacklevel=2)
    if mat.gamma * cav.gap / mat.c > 0.1:
        warnings.warn("damping_correction assumes gamma << c/L", RuntimeWarning, stacklevel=2)
    return _damping_closed(mat, cav.gap, omega)


def _damping_closed(mat: DrudeMaterial, L: float, omega: float) -> float:
    lam = mat.plasma_wavelength
    return (omega / mat.diffusion) * mat.damping_ratio**2 / (4.0 * math.pi**2) * lam / (2.0 * lam + L)


def dos_propagating(cav: Cavity, omega: float, tol=DEFAULT_TOL, with_err=False):
    """Propagating-mode remainder rho_CL - rho_D."""
    a, ea = dos_cl(cav, omega, tol, with_err=True)
    b, eb = dos_eddy(cav, omega, "D", tol, with_err=True)
    return (a - b, ea + eb) if with_err else a - b


def m_coefficients(cav: Cavity) -> ExpansionCoefficients:
    """Good-conductor low-frequency coefficients of the eddy mode count."""
    mat = cav.material
    mat.require_good_conductor()
    lam = mat.plasma_wavelength
    m1 = M1_LEADING + mat.damping_ratio**2 * lam / (4.0 * math.pi**2 * (cav.gap + 2.0 * lam))
    return ExpansionCoefficients.from_m(cav, m1, M32, "D")


def curve_eddy(cav: Cavity, grid, kind="count", channel="D", tol=DEFAULT_TOL):
    """Eddy-channel curve; the cut table is shared by all grid points."""
    grid = np.asarray(grid, dtype=float)
    if channel == "propagating":
        pts = [dos_propagating(cav, w, tol, with_err=True) for w in grid]
    elif kind == "count":
        pts = [mode_count_eddy(cav, w, channel, tol, with_err=True) for w in grid]
    else:
        pts = [dos_eddy(cav, w, channel, tol, with_err=True) for w in grid]
    return SpectralCurve(grid, [p[0] for p in pts], [p[1] for p in pts], kind=kind, channel=channel)

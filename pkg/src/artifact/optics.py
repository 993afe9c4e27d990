"""Drude response, wave vectors and TE reflection for complex frequency.

All quantities are in natural units (hbar = k_B = 1); the speed of light is
carried by the material so that any consistent length/frequency pair can be
used.  Square roots follow a single rule: positive real part, and on the
imaginary axis the root with non-positive imaginary part.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "HBAR_C_EV_NM",
    "HBAR_EV_S",
    "K_B_EV_PER_K",
    "PhysicalConstants",
    "DrudeMaterial",
    "Cavity",
    "Side",
    "ComplexFrequency",
    "PoleError",
    "DomainError",
    "GoodConductorError",
    "sqrt_pos",
    "permittivity",
    "kappa",
    "kappa_gamma",
    "k_gamma_cut",
    "reflection_te",
    "reflection_scaled",
    "chi",
    "GOLD",
]

HBAR_C_EV_NM = 197.3269804          # hbar*c in eV nm
HBAR_EV_S = 6.582119569e-16         # hbar in eV s
K_B_EV_PER_K = 8.617333262e-5       # Boltzmann constant in eV/K

GOOD_CONDUCTOR_RATIO = 0.1


class PoleError(ValueError):
    """Frequency sits on a pole of the Drude response."""


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class GoodConductorError(ValueError):
    """A good-conductor expansion was requested with gamma/Omega > 0.1."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Speed of light plus the unit system it is expressed in.

    ``natural`` means hbar = k_B = 1 with frequencies, temperatures and
    energies sharing one unit; ``SI`` is only used at the CLI boundary.
    """

    c: float = 1.0
    unit_system: str = "natural"

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"speed of light must be positive, got {self.c}")
        if self.unit_system not in ("natural", "SI"):
            raise ValueError(f"unknown unit system {self.unit_system!r}")


@dataclass(frozen=True)
class DrudeMaterial:
    omega_p: float
    gamma: float
    c: float = 1.0

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError(f"plasma frequency must be positive, got {self.omega_p}")
        if not self.gamma > 0:
            raise ValueError(f"relaxation rate must be positive, got {self.gamma}")
        if not self.c > 0:
            raise ValueError(f"speed of light must be positive, got {self.c}")

    @property
    def diffusion(self) -> float:
        """Diffusion constant of eddy currents, gamma c^2 / Omega^2."""
        return self.gamma * self.c**2 / self.omega_p**2

    @property
    def plasma_wavelength(self) -> float:
        return self.c / self.omega_p

    @property
    def damping_ratio(self) -> float:
        return self.gamma / self.omega_p

    @property
    def is_good_conductor(self) -> bool:
        return self.damping_ratio <= GOOD_CONDUCTOR_RATIO

    def require_good_conductor(self):
        if not self.is_good_conductor:
            raise GoodConductorError(
                f"gamma/Omega = {self.damping_ratio:.3g} exceeds {GOOD_CONDUCTOR_RATIO}"
            )


@dataclass(frozen=True)
class Cavity:
    material: DrudeMaterial
    gap: float

    def __post_init__(self):
        if not self.gap > 0:
            raise ValueError(f"gap width must be positive, got {self.gap}")

    @property
    def thouless(self) -> float:
        """Thouless frequency D/L^2."""
        return self.material.diffusion / self.gap**2

    @property
    def gap_over_lambda(self) -> float:
        return self.gap / self.material.plasma_wavelength

    def with_gap(self, gap: float) -> "Cavity":
        return Cavity(self.material, gap)


class Side(enum.Enum):
    ABOVE_REAL_AXIS = "above_real_axis"
    RIGHT_OF_IMAG_CUT = "right_of_imag_cut"
    EXACT = "exact"


@dataclass(frozen=True)
class ComplexFrequency:
    """Complex frequency with the direction of the infinitesimal limit.

    Real-axis points must be tagged ``ABOVE_REAL_AXIS`` (z = w + i0) and
    negative-imaginary-axis points ``RIGHT_OF_IMAG_CUT`` (z = -i xi + 0).
    """

    re: float
    im: float = 0.0
    side: Side = field(default=Side.EXACT)

    def __post_init__(self):
        if self.side is Side.ABOVE_REAL_AXIS and self.im != 0.0:
            raise ValueError("ABOVE_REAL_AXIS requires a real frequency")
        if self.side is Side.RIGHT_OF_IMAG_CUT and (self.re != 0.0 or self.im >= 0.0):
            raise ValueError("RIGHT_OF_IMAG_CUT requires z = -i*xi with xi > 0")
        if self.side is Side.EXACT:
            if self.im == 0.0:
                raise ValueError("real frequencies must be tagged ABOVE_REAL_AXIS")
            if self.re == 0.0 and self.im < 0.0:
                raise ValueError("points on the negative imaginary axis must be tagged RIGHT_OF_IMAG_CUT")

    @classmethod
    def real(cls, omega: float) -> "ComplexFrequency":
        return cls(float(omega), 0.0, Side.ABOVE_REAL_AXIS)

    @classmethod
    def on_cut(cls, xi: float) -> "ComplexFrequency":
        return cls(0.0, -float(xi), Side.RIGHT_OF_IMAG_CUT)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


GOLD = DrudeMaterial(omega_p=9.0, gamma=0.035, c=HBAR_C_EV_NM)


def sqrt_pos(w):
    """Square root with Re >= 0; ties on the imaginary axis go to Im <= 0."""
    s = np.sqrt(np.asarray(w, dtype=complex))
    s = np.where(s.real < 0, -s, s)
    s = np.where((s.real == 0) & (s.imag > 0), -s, s)
    return s if s.ndim else complex(s)


def _z(z):
    return z.value if isinstance(z, ComplexFrequency) else z


def permittivity(mat: DrudeMaterial, z):
    """Drude permittivity 1 - Omega^2 / (z (z + i gamma))."""
    zz = np.asarray(_z(z), dtype=complex)
    den = zz * (zz + 1j * mat.gamma)
    if np.any(den == 0):
        raise PoleError("permittivity has poles at z = 0 and z = -i*gamma")
    out = 1.0 - mat.omega_p**2 / den
    return out if out.ndim else complex(out)


def kappa(k, z, c=1.0):
    """Normal wavenumber sqrt(k^2 - z^2/c^2) in vacuum."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise DomainError("transverse wavenumber must be non-negative")
    if isinstance(z, ComplexFrequency) and z.side is Side.RIGHT_OF_IMAG_CUT:
        out = np.sqrt(k**2 + (z.im / c) ** 2) + 0j
        return out if out.ndim else complex(out)
    zz = _z(z)
    return sqrt_pos(k**2 - (np.asarray(zz, dtype=complex) / c) ** 2)


def k_gamma_cut(mat: DrudeMaterial, xi):
    """Imaginary part of -kappa_gamma on the eddy cut, (Omega/c) sqrt(xi/(gamma-xi)).

    Returns ``inf`` (without overflow warnings) when ``xi`` rounds onto gamma.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 0) or np.any(xi >= mat.gamma):
        raise DomainError("k_gamma_cut requires 0 < xi < gamma")
    with np.errstate(divide="ignore", over="ignore"):
        out = (mat.omega_p / mat.c) * np.sqrt(xi / (mat.gamma - xi))
    return out if out.ndim else float(out)


def kappa_gamma(mat: DrudeMaterial, z):
    """(Omega/c) sqrt(z / (z + i gamma)) with the branch rule applied."""
    if isinstance(z, ComplexFrequency) and z.side is Side.RIGHT_OF_IMAG_CUT:
        xi = -z.im
        if xi == mat.gamma:
            raise PoleError("kappa_gamma has a pole at z = -i*gamma")
        if xi < mat.gamma:
            return -1j * k_gamma_cut(mat, xi)
        return complex((mat.omega_p / mat.c) * math.sqrt(xi / (xi - mat.gamma)))
    zz = np.asarray(_z(z), dtype=complex)
    den = zz + 1j * mat.gamma
    if np.any(den == 0):
        raise PoleError("kappa_gamma has a pole at z = -i*gamma")
    return (mat.omega_p / mat.c) * sqrt_pos(zz / den)


def reflection_te(mat: DrudeMaterial, kap, z):
    """TE Fresnel coefficient (kappa - root) / (kappa + root), root = sqrt(kappa^2 + kappa_gamma^2)."""
    kg = kappa_gamma(mat, z)
    kap = np.asarray(kap, dtype=complex)
    root = sqrt_pos(kap**2 + np.asarray(kg) ** 2)
    out = (kap - root) / (kap + root)
    return out if np.ndim(out) else complex(out)


def reflection_scaled(y):
    """Reflection coefficient along kappa = y kappa_gamma, a function of y only."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("reflection_scaled requires y >= 0")
    out = -np.exp(-2.0 * np.arcsinh(y))
    return out if out.ndim else float(out)


def chi(mat: DrudeMaterial, z):
    """Lower limit -i z / (c kappa_gamma(z)) of the scaled k-integral."""
    zz = _z(z)
    if np.any(np.asarray(zz) == 0):
        raise PoleError("chi is undefined at z = 0")
    out = -1j * np.asarray(zz) / (mat.c * np.asarray(kappa_gamma(mat, z)))
    return out if np.ndim(out) else complex(out)

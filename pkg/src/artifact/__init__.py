"""TE Casimir-Lifshitz thermodynamics of two Drude half-spaces.

The public API re-exports the material model, the mode-count and density
routines for the Lifshitz and eddy-current channels, and the thermodynamic
routes built on them.
"""
from .optics import (
    GOLD,
    Cavity,
    ComplexFrequency,
    DomainError,
    DrudeMaterial,
    GoodConductorError,
    PoleError,
    Side,
    chi,
    kappa,
    kappa_gamma,
    k_gamma_cut,
    permittivity,
    reflection_te,
    sqrt_pos,
)
from .numerics import QuadratureError, RootFindingError, integrate_adaptive, find_root_bracketed
from .lifshitz import (
    SpectralCurve,
    appendix_integrals,
    curve_cl,
    dispersion,
    dispersion_leading,
    dos_cl,
    mode_count_cl,
    mode_count_cl0,
)
from .eddy import (
    BranchCutDensity,
    ExpansionCoefficients,
    branch_cut_density,
    damping_correction,
    dos_eddy,
    dos_propagating,
    m_coefficients,
    mode_boundary,
    mode_count_cut,
    mode_count_eddy,
    xi0,
)
from .thermo import (
    FitResult,
    ThermalPoint,
    entropy,
    fit_expansion,
    free_energy_from_dos,
    free_energy_matsubara,
    free_energy_zero,
    low_T_expansion,
    pressure,
    thermal_free_energy,
)

__version__ = "0.1.0"

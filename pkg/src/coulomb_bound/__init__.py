"""Lower bounds on the indirect Coulomb energy in terms of the one-body density.

Densities (:mod:`.densities`), trial smearing distributions (:mod:`.mu_model`),
density functionals (:mod:`.functionals`), the bound and its comparisons
(:mod:`.bounds`) and brute-force checks (:mod:`.oracle`).
"""
from .bounds import (C1, C2, C3, C_DIRAC, BoundBreakdown, optimize_alpha, theorem_bound,
                     theorem_constants)
from .densities import (Exponential, Gaussian, Grid, RadialDensity, Scaled, UniformBall,
                        density_from_descriptor, dilate, make_exponential, scale_tf)
from .exceptions import CoarseGridWarning, DivergenceError, DomainError
from .functionals import (direct_energy, functional_report, k_double, k_fourier, l43,
                          q_ratio)
from .mu_model import PowerLaw, TrialMu, Uniform, mu_constants

__version__ = "0.1.0"

__all__ = [
    "C1", "C2", "C3", "C_DIRAC", "BoundBreakdown", "optimize_alpha", "theorem_bound",
    "theorem_constants", "Exponential", "Gaussian", "Grid", "RadialDensity", "Scaled",
    "UniformBall", "density_from_descriptor", "dilate", "make_exponential", "scale_tf",
    "CoarseGridWarning", "DivergenceError", "DomainError", "direct_energy",
    "functional_report", "k_double", "k_fourier", "l43", "q_ratio", "PowerLaw", "TrialMu",
    "Uniform", "mu_constants",
]

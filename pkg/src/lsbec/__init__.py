"""Numerical laboratory for the Luttinger-Sy model at finite interaction strength."""

from .errors import (DomainError, FitError, InsufficientSpectrumError, LSModelError,
                     ParameterError, ResourceCapError, ValidationError)
from .sampler import (ImpurityConfiguration, ModelParameters, configuration_from_points,
                      realization_rng, sample_configuration)
from .spectrum import (Spectrum, count_eigenvalues_below, count_profile, dirichlet_union_oracle,
                       eigenvalue_indices, eigenvalues, free_spectrum_oracle, single_delta_oracle)

__version__ = "0.1.0"

__all__ = [
    "DomainError", "FitError", "InsufficientSpectrumError", "LSModelError", "ParameterError",
    "ResourceCapError", "ValidationError", "ImpurityConfiguration", "ModelParameters",
    "configuration_from_points", "realization_rng", "sample_configuration", "Spectrum",
    "count_eigenvalues_below", "count_profile", "dirichlet_union_oracle", "eigenvalue_indices",
    "eigenvalues", "free_spectrum_oracle", "single_delta_oracle",
]

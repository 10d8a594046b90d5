"""Squeezed coherent states of a free particle with exponentially varying mass."""

from .errors import AdmissibilityError, HermiteOverflowError, IntegrationError, TruncationError
from .fock import (
    FockExpansion,
    TransitionSpectrum,
    coeffs_closed_form,
    coeffs_recurrence,
    transition_probabilities,
)
from .overlap import completeness_check, hermite_orthogonality_check, overlap
from .params import (
    EvolvedParams,
    InitialConditions,
    ModelParams,
    cs_regime_params,
    evolve_closed_form,
    evolve_ode,
    ramp,
)
from .position import SpatialGrid, WaveField, probability_density, scs_basis_sum, scs_wavefunction
from .statistics import GaussianMoments, classical_trajectory, moments, quadrature_trace
from .verify import ResidualReport, residual

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "EvolvedParams",
    "FockExpansion",
    "GaussianMoments",
    "HermiteOverflowError",
    "InitialConditions",
    "IntegrationError",
    "ModelParams",
    "ResidualReport",
    "SpatialGrid",
    "TransitionSpectrum",
    "TruncationError",
    "WaveField",
    "classical_trajectory",
    "coeffs_closed_form",
    "coeffs_recurrence",
    "completeness_check",
    "cs_regime_params",
    "evolve_closed_form",
    "evolve_ode",
    "hermite_orthogonality_check",
    "moments",
    "overlap",
    "probability_density",
    "quadrature_trace",
    "ramp",
    "residual",
    "scs_basis_sum",
    "scs_wavefunction",
    "transition_probabilities",
]

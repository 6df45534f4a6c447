"""Dirichlet energies of compositions with harmonic extensions on the unit disk.

Compares ``D[Phi o Ph]`` with ``D[P(Phi o h)]`` for the Laplacian on the unit
disk, computes the best constant of the reverse Cauchy inequality
``mean(Psi**2) <= C mean(Psi)**2`` and runs the step/ramp experiment that
shows the constant cannot be improved.
"""

from .composition import (
    EnergyPair,
    QuadratureConfig,
    energy_composed_boundary,
    energy_composed_volume,
    energy_of_composed_data,
    energy_pair,
    truncation_sweep,
    verify_theorem1,
)
from .disk import (
    BoundaryFunction,
    HarmonicExtension,
    decompose,
    douglas_energy,
    energy_fourier,
    extend,
    gradient_eval,
    poisson_eval,
)
from .errors import DirlabError, DomainError, QuadratureError, ResolutionError, SearchError, SpecError
from .extremal import StepRampData, decompose_energy, extrapolate, make_step_ramp, sweep
from .psi import NONNEGATIVE, WHOLE_LINE, PsiSpec, parse_psi
from .reverse_cauchy import (
    ConstantEstimate,
    SearchConfig,
    check_condition,
    estimate_constant,
    interval_ratio,
    power_constant,
    power_inner,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryFunction",
    "ConstantEstimate",
    "DirlabError",
    "DomainError",
    "EnergyPair",
    "HarmonicExtension",
    "NONNEGATIVE",
    "PsiSpec",
    "QuadratureConfig",
    "QuadratureError",
    "ResolutionError",
    "SearchConfig",
    "SearchError",
    "SpecError",
    "StepRampData",
    "WHOLE_LINE",
    "check_condition",
    "decompose",
    "decompose_energy",
    "douglas_energy",
    "energy_composed_boundary",
    "energy_composed_volume",
    "energy_fourier",
    "energy_of_composed_data",
    "energy_pair",
    "estimate_constant",
    "extend",
    "extrapolate",
    "gradient_eval",
    "interval_ratio",
    "make_step_ramp",
    "parse_psi",
    "poisson_eval",
    "power_constant",
    "power_inner",
    "sweep",
    "truncation_sweep",
    "verify_theorem1",
]

from .exceptions import SingularityError
from .flow import (
    field_of,
    hamiltonian_vector_field,
    reference_flow,
    reference_trajectory,
    rk4_step,
    structure_matrix,
    symplectic_gradient,
    symplectic_pairing,
    symplecticity_defect,
)
from .models import PhaseLike, PhaseState, Trajectory, as_phase_array
from .systems import (
    SYSTEMS,
    AnalyticSystem,
    HarmonicOscillator,
    Kepler,
    Pendulum,
    get_system,
)

__all__ = [
    "SingularityError",
    "field_of",
    "hamiltonian_vector_field",
    "reference_flow",
    "reference_trajectory",
    "rk4_step",
    "structure_matrix",
    "symplectic_gradient",
    "symplectic_pairing",
    "symplecticity_defect",
    "PhaseLike",
    "PhaseState",
    "Trajectory",
    "as_phase_array",
    "SYSTEMS",
    "AnalyticSystem",
    "HarmonicOscillator",
    "Kepler",
    "Pendulum",
    "get_system",
]

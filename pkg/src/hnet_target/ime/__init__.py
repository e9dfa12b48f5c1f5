from .analysis import (
    candidate_flow,
    estimate_order,
    conservation_series,
    gradient_symmetry_defect,
    nt_existence_table,
    one_step_defects,
    oscillation_amplitude,
    verify_target_order,
)
from .exceptions import IMEError, PrecisionError, UnsupportedTruncationError
from .pendulum import TruncatedModifiedHamiltonian, pendulum_mh, pendulum_mh_gradient

__all__ = [
    "candidate_flow",
    "estimate_order",
    "conservation_series",
    "gradient_symmetry_defect",
    "nt_existence_table",
    "one_step_defects",
    "oscillation_amplitude",
    "verify_target_order",
    "IMEError",
    "PrecisionError",
    "UnsupportedTruncationError",
    "TruncatedModifiedHamiltonian",
    "pendulum_mh",
    "pendulum_mh_gradient",
]

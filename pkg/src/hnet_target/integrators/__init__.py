from .exceptions import DivergenceError
from .models import METHODS, MethodId, MethodSpec, SolverConfig, get_method
from .solver import fixed_point
from .stepping import jacobian_symplecticity_defect, rollout, step

__all__ = [
    "DivergenceError",
    "METHODS",
    "MethodId",
    "MethodSpec",
    "SolverConfig",
    "get_method",
    "fixed_point",
    "jacobian_symplecticity_defect",
    "rollout",
    "step",
]

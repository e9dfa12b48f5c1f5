# hnet_target/integrators/models.py

from __future__ import annotations

from enum import Enum
from typing import Dict, Union

from pydantic import BaseModel, ConfigDict, Field

from ..exceptions import ConfigurationError


class MethodId(str, Enum):
    EXPLICIT_EULER = "explicit_euler"
    SYMPLECTIC_EULER = "symplectic_euler"
    IMPLICIT_MIDPOINT = "implicit_midpoint"
    IMPLICIT_TRAPEZOIDAL = "implicit_trapezoidal"
    RK4_ORACLE = "rk4_oracle"


class MethodSpec(BaseModel):
    """Descriptor of a one-step integrator."""

    model_config = ConfigDict(frozen=True)

    id: MethodId
    order: int = Field(..., ge=1, description="Classical order p of the method.")
    symplectic: bool = Field(..., description="Whether the one-step map is symplectic.")
    implicit: bool = Field(..., description="Whether a step requires a nonlinear solve.")


class SolverConfig(BaseModel):
    """
    Fixed-point solver settings for implicit steps.

    Defaults are recorded in every experiment manifest.
    """

    model_config = ConfigDict(frozen=True)

    tolerance: float = Field(
        default=1e-14,
        gt=0,
        description="Sup-norm threshold on the difference of consecutive iterates.",
    )
    max_iterations: int = Field(
        default=100,
        ge=1,
        description="Iteration cap before a DivergenceError is raised.",
    )
    damping: float = Field(
        default=1.0,
        gt=0,
        le=1,
        description="Relaxation weight w in y <- (1 - w) y + w map(y).",
    )


METHODS: Dict[MethodId, MethodSpec] = {
    MethodId.EXPLICIT_EULER: MethodSpec(
        id=MethodId.EXPLICIT_EULER, order=1, symplectic=False, implicit=False
    ),
    MethodId.SYMPLECTIC_EULER: MethodSpec(
        id=MethodId.SYMPLECTIC_EULER, order=1, symplectic=True, implicit=True
    ),
    MethodId.IMPLICIT_MIDPOINT: MethodSpec(
        id=MethodId.IMPLICIT_MIDPOINT, order=2, symplectic=True, implicit=True
    ),
    MethodId.IMPLICIT_TRAPEZOIDAL: MethodSpec(
        id=MethodId.IMPLICIT_TRAPEZOIDAL, order=2, symplectic=False, implicit=True
    ),
    MethodId.RK4_ORACLE: MethodSpec(
        id=MethodId.RK4_ORACLE, order=4, symplectic=False, implicit=False
    ),
}


def get_method(method: Union[MethodSpec, MethodId, str]) -> MethodSpec:
    """Resolve a method id (or pass a MethodSpec through)."""
    if isinstance(method, MethodSpec):
        return method
    try:
        return METHODS[MethodId(method)]
    except ValueError:
        raise ConfigurationError(
            f"Unknown integrator {method!r}; expected one of {[m.value for m in MethodId]}"
        ) from None

# hnet_target/phasecore/flow.py

from __future__ import annotations

import logging
from typing import Callable, Union

import numpy as np

from ..exceptions import ConfigurationError, ShapeError
from .exceptions import SingularityError
from .models import PhaseLike, PhaseState, Trajectory, as_phase_array, like_input
from .systems import AnalyticSystem

logger = logging.getLogger(__name__)

VectorField = Callable[[np.ndarray], np.ndarray]
GradientMap = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# Canonical structure
# ---------------------------------------------------------------------------


def structure_matrix(d: int) -> np.ndarray:
    """J = [[0, I_d], [-I_d, 0]]."""
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return np.block([[zero, eye], [-eye, zero]])


def symplectic_gradient(grad: np.ndarray) -> np.ndarray:
    """J^{-1} grad, i.e. (-grad_q, grad_p) for a (..., 2d) gradient array."""
    d = grad.shape[-1] // 2
    return np.concatenate([-grad[..., d:], grad[..., :d]], axis=-1)


def symplectic_pairing(matrix: np.ndarray) -> np.ndarray:
    """
    Return A^T J A for the symplecticity test A^T J A = J.

    Raises:
        ShapeError if A is not square of even size.
    """
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2 or a.shape[0] == 0:
        raise ShapeError(
            "symplectic pairing needs a square matrix of even size",
            expected="(2d, 2d)",
            actual=a.shape,
        )
    j = structure_matrix(a.shape[0] // 2)
    return a.T @ j @ a


def symplecticity_defect(matrix: np.ndarray) -> float:
    """Sup-norm of A^T J A - J over matrix entries."""
    a = np.asarray(matrix, dtype=np.float64)
    pairing = symplectic_pairing(a)
    return float(np.max(np.abs(pairing - structure_matrix(a.shape[0] // 2))))


# ---------------------------------------------------------------------------
# Vector fields
# ---------------------------------------------------------------------------


def hamiltonian_vector_field(
    system: AnalyticSystem, y: PhaseLike
) -> np.ndarray:
    """
    Evaluate J^{-1} grad H(y) = (-dH/dq, dH/dp).

    Raises:
        SingularityError outside the system domain (Kepler origin).
    """
    return symplectic_gradient(system.gradient(y))


def field_of(source: Union[AnalyticSystem, GradientMap]) -> VectorField:
    """
    Build the Hamiltonian vector field of an analytic system or of any
    gradient map (truncated modified Hamiltonians, learned nets).
    """
    gradient = source.gradient if isinstance(source, AnalyticSystem) else source

    def field(y: np.ndarray) -> np.ndarray:
        return symplectic_gradient(np.asarray(gradient(y), dtype=np.float64))

    return field


# ---------------------------------------------------------------------------
# Reference flow oracle
# ---------------------------------------------------------------------------


def rk4_step(field: VectorField, y: np.ndarray, h: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta step."""
    k1 = field(y)
    k2 = field(y + 0.5 * h * k1)
    k3 = field(y + 0.5 * h * k2)
    k4 = field(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def reference_flow(
    system: AnalyticSystem,
    y0: PhaseLike,
    h: float,
    substeps: int = 1000,
) -> Union[PhaseState, np.ndarray]:
    """
    High-accuracy approximation of the exact flow phi_h(y0).

    Applies `substeps` RK4 steps of size h / substeps. Accepts a single
    state or a batch of shape (N, 2d) and returns the same kind.

    Raises:
        ConfigurationError for h <= 0 or substeps < 1.
        SingularityError (with `substep` set) when the trajectory leaves
        the system domain.
    """
    if not h > 0:
        raise ConfigurationError(f"step size must be positive, got {h}")
    if substeps < 1:
        raise ConfigurationError(f"substeps must be >= 1, got {substeps}")

    y = system.validate(y0).copy()
    field = field_of(system)
    dt = h / substeps
    for index in range(substeps):
        try:
            y = rk4_step(field, y, dt)
        except SingularityError as exc:
            raise SingularityError(
                exc.message, system=system.name, substep=index
            ) from exc
    return like_input(y0, y)


def reference_trajectory(
    system: AnalyticSystem,
    y0: PhaseLike,
    h: float,
    n: int,
    substeps: int = 1000,
    t0: float = 0.0,
) -> Trajectory:
    """Exact-flow samples y0, phi_h(y0), ..., phi_h^n(y0)."""
    if n < 0:
        raise ConfigurationError(f"number of steps must be >= 0, got {n}")
    y = as_phase_array(y0)
    states = [y]
    for _ in range(n):
        y = reference_flow(system, y, h, substeps)
        states.append(y)
    logger.debug("reference trajectory for %s: %d steps of h=%g", system.name, n, h)
    return Trajectory(states=np.stack(states), h=h, t0=t0)

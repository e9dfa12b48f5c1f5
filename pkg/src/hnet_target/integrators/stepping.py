# hnet_target/integrators/stepping.py

from __future__ import annotations

import logging
from typing import Optional, Union

import numpy as np

from ..exceptions import ConfigurationError
from ..phasecore.exceptions import SingularityError
from ..phasecore.flow import VectorField, field_of, rk4_step, symplecticity_defect
from ..phasecore.models import PhaseLike, PhaseState, Trajectory, as_phase_array, like_input
from ..phasecore.systems import AnalyticSystem
from ..utils import central_difference_jacobian
from .exceptions import DivergenceError
from .models import MethodId, MethodSpec, SolverConfig, get_method
from .solver import fixed_point

logger = logging.getLogger(__name__)

MethodLike = Union[MethodSpec, MethodId, str]


# ---------------------------------------------------------------------------
# One step
# ---------------------------------------------------------------------------


def step(
    method: MethodLike,
    field: VectorField,
    y: PhaseLike,
    h: float,
    cfg: Optional[SolverConfig] = None,
) -> Union[PhaseState, np.ndarray]:
    """
    Advance y by one step of size h with the named one-step method.

    `field` maps a (..., 2d) array to the vector field at those states.
    Accepts a single state or a batch (N, 2d) and returns the same kind.

    Symplectic Euler uses the (p_new, q_old) staggering
        p_new = p + h f_p(p_new, q),  q_new = q + h f_q(p_new, q),
    solving only for p_new.

    Raises:
        DivergenceError if an implicit solve does not converge.
        SingularityError propagated from the field.
    """
    spec = get_method(method)
    if not h > 0:
        raise ConfigurationError(f"step size must be positive, got {h}")
    arr = as_phase_array(y)
    new = _STEPPERS[spec.id](field, arr, h, cfg or SolverConfig())
    return like_input(y, new)


def _explicit_euler(field, y, h, cfg):
    return y + h * field(y)


def _symplectic_euler(field, y, h, cfg):
    d = y.shape[-1] // 2
    p, q = y[..., :d], y[..., d:]

    def staggered(p_new: np.ndarray) -> np.ndarray:
        return np.concatenate([p_new, q], axis=-1)

    p_new, _ = fixed_point(
        lambda p_bar: p + h * field(staggered(p_bar))[..., :d],
        p + h * field(y)[..., :d],
        cfg,
    )
    q_new = q + h * field(staggered(p_new))[..., d:]
    return np.concatenate([p_new, q_new], axis=-1)


def _implicit_midpoint(field, y, h, cfg):
    solution, _ = fixed_point(
        lambda y_bar: y + h * field(0.5 * (y + y_bar)),
        y + h * field(y),
        cfg,
    )
    return solution


def _implicit_trapezoidal(field, y, h, cfg):
    f0 = field(y)
    solution, _ = fixed_point(
        lambda y_bar: y + 0.5 * h * (f0 + field(y_bar)),
        y + h * f0,
        cfg,
    )
    return solution


def _rk4(field, y, h, cfg):
    return rk4_step(field, y, h)


_STEPPERS = {
    MethodId.EXPLICIT_EULER: _explicit_euler,
    MethodId.SYMPLECTIC_EULER: _symplectic_euler,
    MethodId.IMPLICIT_MIDPOINT: _implicit_midpoint,
    MethodId.IMPLICIT_TRAPEZOIDAL: _implicit_trapezoidal,
    MethodId.RK4_ORACLE: _rk4,
}


# ---------------------------------------------------------------------------
# Rollouts
# ---------------------------------------------------------------------------


def rollout(
    method: MethodLike,
    field: VectorField,
    y0: PhaseLike,
    h: float,
    n: int,
    cfg: Optional[SolverConfig] = None,
    t0: float = 0.0,
) -> Trajectory:
    """
    Repeated stepping: returns the n + 1 states y0, ..., y_n.

    Fails fast on the first failing step; the raised error carries the
    step index (and, for DivergenceError, the partial trajectory).
    """
    if n < 1:
        raise ConfigurationError(f"rollout needs n >= 1 steps, got {n}")
    spec = get_method(method)
    y = as_phase_array(y0)
    if y.ndim != 1:
        raise ConfigurationError("rollout expects a single initial state")
    states = [y]
    for index in range(n):
        try:
            y = step(spec, field, y, h, cfg)
        except DivergenceError as exc:
            raise DivergenceError(
                exc.message,
                residual=exc.residual,
                iterations=exc.iterations,
                step_index=index,
                partial=Trajectory(states=np.stack(states), h=h, t0=t0),
            ) from exc
        except SingularityError as exc:
            raise SingularityError(
                f"{exc.message} at rollout step {index}", system=exc.system
            ) from exc
        states.append(y)
    return Trajectory(states=np.stack(states), h=h, t0=t0)


# ---------------------------------------------------------------------------
# Symplecticity check
# ---------------------------------------------------------------------------


def jacobian_symplecticity_defect(
    method: MethodLike,
    system: AnalyticSystem,
    y: PhaseLike,
    h: float,
    cfg: Optional[SolverConfig] = None,
    eps: float = 1e-6,
) -> float:
    """
    ||D^T J D - J||_inf for the finite-difference Jacobian D of the
    one-step map y -> step(method, field_of(system), y, h).
    """
    field = field_of(system)
    base = system.validate(y)
    jacobian = central_difference_jacobian(
        lambda points: step(method, field, points, h, cfg), base, eps
    )
    return symplecticity_defect(jacobian)

# hnet_target/ime/analysis.py

from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ConfigurationError
from ..hnet_loss.candidates import CandidateHamiltonian
from ..integrators.models import MethodId, MethodSpec, SolverConfig, get_method
from ..integrators.stepping import rollout, step
from ..phasecore.flow import field_of, reference_flow, structure_matrix
from ..phasecore.models import PhaseLike, Trajectory
from ..phasecore.systems import AnalyticSystem
from ..utils import central_difference_jacobian, loglog_slope
from .exceptions import PrecisionError
from .pendulum import TruncatedModifiedHamiltonian

logger = logging.getLogger(__name__)

DEFECT_FLOOR = 1e-13


# ---------------------------------------------------------------------------
# Order of the target error
# ---------------------------------------------------------------------------


def one_step_defects(
    system: AnalyticSystem,
    method: Union[MethodSpec, MethodId, str],
    truncation: TruncatedModifiedHamiltonian,
    states: np.ndarray,
    h_grid: Sequence[float],
    substeps: int = 1000,
    cfg: Optional[SolverConfig] = None,
) -> np.ndarray:
    """
    Max over `states` of ||step(method, field_of(truncation at h), y, h) - phi_h(y)||
    for every h in the grid.
    """
    _check_grid(h_grid)
    states = np.atleast_2d(system.validate(states))
    defects = []
    for h in h_grid:
        field = field_of(truncation.at(h).gradient)
        stepped = step(method, field, states, h, cfg)
        exact = reference_flow(system, states, h, substeps)
        defects.append(float(np.max(np.linalg.norm(stepped - exact, axis=-1))))
    return np.array(defects)


def verify_target_order(
    system: AnalyticSystem,
    method: Union[MethodSpec, MethodId, str],
    truncation: TruncatedModifiedHamiltonian,
    states: np.ndarray,
    h_grid: Sequence[float],
    substeps: int = 1000,
    cfg: Optional[SolverConfig] = None,
) -> float:
    """
    Log-log slope of the one-step defect of the truncated inverse-modified
    field against h. For an order-p method and a truncation of order k the
    expected slope is p + k + 1.

    Raises:
        ConfigurationError if h_grid is not strictly decreasing with >= 4 values.
        PrecisionError if the defect at the largest h sits at the round-off floor.
    """
    defects = one_step_defects(system, method, truncation, states, h_grid, substeps, cfg)
    slope = estimate_order(h_grid, defects)
    logger.info(
        "%s under %s: defects %s -> order %.3f",
        truncation.name,
        get_method(method).id.value,
        np.array2string(defects, precision=3),
        slope,
    )
    return slope


def estimate_order(h_grid: Sequence[float], defects: Sequence[float]) -> float:
    """
    Log-log slope of defects against h.

    Raises:
        PrecisionError if the defect at the largest h sits at the round-off
        floor, or if any defect is not positive.
    """
    grid = np.asarray(h_grid, dtype=np.float64)
    values = np.asarray(defects, dtype=np.float64)
    largest = int(np.argmax(grid))
    if values[largest] <= DEFECT_FLOOR:
        raise PrecisionError(
            "one-step defect at the largest h is below the round-off floor",
            h=float(grid[largest]),
            defect=float(values[largest]),
        )
    for h, defect in zip(grid, values):
        if defect <= 0.0:
            raise PrecisionError("one-step defect is not positive", h=float(h), defect=float(defect))
    return loglog_slope(grid, values)


def _check_grid(h_grid: Sequence[float]) -> None:
    grid = np.asarray(h_grid, dtype=np.float64)
    if grid.size < 4:
        raise ConfigurationError(f"h grid needs at least 4 values, got {grid.size}")
    if np.any(grid <= 0) or np.any(np.diff(grid) >= 0):
        raise ConfigurationError(f"h grid must be positive and strictly decreasing, got {list(grid)}")


# ---------------------------------------------------------------------------
# Existence of the explicit-Euler network target
# ---------------------------------------------------------------------------


def gradient_symmetry_defect(
    system: AnalyticSystem,
    y: PhaseLike,
    h: float,
    substeps: int = 1000,
    eps: float = 1e-5,
) -> float:
    """
    ||DG - DG^T||_inf for G(y) = J (phi_h(y) - y) / h.

    An explicit-Euler network target would satisfy grad NT = G, which
    requires DG to be symmetric. A defect above finite-difference noise
    means no scalar target exists at this h.
    """
    base = system.validate(y)
    j = structure_matrix(system.dim)

    def g(points: np.ndarray) -> np.ndarray:
        return (reference_flow(system, points, h, substeps) - points) @ j.T / h

    dg = central_difference_jacobian(g, base, eps)
    return float(np.max(np.abs(dg - dg.T)))


def nt_existence_table(
    system: AnalyticSystem,
    y: PhaseLike,
    h_grid: Sequence[float],
    substeps: int = 1000,
) -> List[Tuple[float, float]]:
    """(h, gradient_symmetry_defect) for every h in the grid."""
    if len(h_grid) == 0:
        raise ConfigurationError("h grid is empty")
    return [(float(h), gradient_symmetry_defect(system, y, h, substeps)) for h in h_grid]


# ---------------------------------------------------------------------------
# Conservation along trajectories
# ---------------------------------------------------------------------------


def conservation_series(cand: CandidateHamiltonian, traj: Trajectory) -> np.ndarray:
    """cand(y_t) - cand(y_0) along the trajectory."""
    values = np.atleast_1d(np.asarray(cand.value(traj.states), dtype=np.float64))
    return values - values[0]


def oscillation_amplitude(series: np.ndarray) -> float:
    """max - min of a conservation series."""
    series = np.asarray(series)
    return float(series.max() - series.min())


def candidate_flow(
    cand: CandidateHamiltonian,
    y0: PhaseLike,
    h: float,
    n: int,
    substeps: int = 20,
    cfg: Optional[SolverConfig] = None,
) -> Trajectory:
    """
    Accurate flow of y' = J^{-1} grad cand(y), sampled every h for n steps
    (RK4 with `substeps` steps per sample). Used to compare the flows of
    the true, truncated modified and learned Hamiltonians.
    """
    fine = rollout(
        MethodId.RK4_ORACLE, field_of(cand.gradient), y0, h / substeps, n * substeps, cfg
    )
    return Trajectory(states=fine.states[::substeps], h=h, t0=fine.t0)

# hnet_target/integrators/solver.py

from __future__ import annotations

import logging
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import DivergenceError
from .models import SolverConfig

logger = logging.getLogger(__name__)


def fixed_point(
    mapping: Callable[[np.ndarray], np.ndarray],
    initial: np.ndarray,
    cfg: Optional[SolverConfig] = None,
) -> Tuple[np.ndarray, int]:
    """
    Damped fixed-point iteration x <- (1 - w) x + w mapping(x).

    Stops when the sup-norm of the iterate difference (over the whole
    batch) drops to `cfg.tolerance`.

    Returns:
        (solution, iterations)

    Raises:
        DivergenceError when the tolerance is not met within
        `cfg.max_iterations`, or when an iterate becomes non-finite.
    """
    cfg = cfg or SolverConfig()
    x = np.asarray(initial, dtype=np.float64)
    w = cfg.damping
    diff = float("inf")

    for iteration in range(1, cfg.max_iterations + 1):
        mapped = mapping(x)
        new = mapped if w == 1.0 else (1.0 - w) * x + w * mapped
        diff = float(np.max(np.abs(new - x)))
        x = new
        if not np.isfinite(diff):
            raise DivergenceError(
                "fixed-point iterate became non-finite",
                residual=diff,
                iterations=iteration,
            )
        if diff <= cfg.tolerance:
            logger.debug("fixed point converged in %d iterations", iteration)
            return x, iteration

    raise DivergenceError(
        "fixed-point iteration did not converge",
        residual=diff,
        iterations=cfg.max_iterations,
    )

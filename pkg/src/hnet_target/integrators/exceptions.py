# hnet_target/integrators/exceptions.py

from __future__ import annotations

from typing import TYPE_CHECKING, Optional

from ..exceptions import HNetError

if TYPE_CHECKING:
    from ..phasecore.models import Trajectory


class DivergenceError(HNetError):
    """
    Raised when the fixed-point iteration of an implicit step does not
    reach the requested tolerance.

    Attributes:
        residual: Sup-norm of the last iterate difference.
        iterations: Number of iterations performed.
        step_index: Index of the failing step when raised from `rollout`.
        partial: Trajectory computed before the failing step (rollout only).
    """

    def __init__(
        self,
        message: str,
        *,
        residual: float,
        iterations: int,
        step_index: Optional[int] = None,
        partial: Optional["Trajectory"] = None,
    ) -> None:
        self.message = message
        self.residual = residual
        self.iterations = iterations
        self.step_index = step_index
        self.partial = partial
        super().__init__(self.__str__())

    def __str__(self) -> str:
        base = f"{self.message}: residual {self.residual:.3e} after {self.iterations} iterations"
        if self.step_index is not None:
            base += f" (rollout step {self.step_index})"
        return base

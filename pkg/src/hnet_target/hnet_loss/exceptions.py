# hnet_target/hnet_loss/exceptions.py

from __future__ import annotations

from typing import TYPE_CHECKING, Optional

from ..diffnet.exceptions import NonFiniteLossError

if TYPE_CHECKING:
    from ..diffnet.models import NetParameters
    from .models import LossHistory


class TrainingDivergedError(NonFiniteLossError):
    """
    Raised when the training loss becomes non-finite.

    Attributes:
        iteration: Iteration (1-based) at which the loss was non-finite.
        checkpoint: Last parameters that produced a finite loss.
        history: Loss history recorded up to the failure.
    """

    def __init__(
        self,
        message: str,
        *,
        iteration: int,
        checkpoint: "NetParameters",
        history: "LossHistory",
        pair_index: Optional[int] = None,
    ) -> None:
        self.iteration = iteration
        self.checkpoint = checkpoint
        self.history = history
        super().__init__(f"{message} at iteration {iteration}", pair_index=pair_index)

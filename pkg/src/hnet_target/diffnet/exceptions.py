# hnet_target/diffnet/exceptions.py

from __future__ import annotations

from typing import Optional

from ..exceptions import HNetError


class NonFiniteLossError(HNetError):
    """
    Raised when a loss (or its gradient) evaluates to NaN / inf.

    Attributes:
        pair_index: Index of the first data pair with a non-finite loss,
            when the loss closure returns per-pair values.
    """

    def __init__(self, message: str, *, pair_index: Optional[int] = None) -> None:
        self.message = message
        self.pair_index = pair_index
        super().__init__(self.__str__())

    def __str__(self) -> str:
        if self.pair_index is None:
            return self.message
        return f"{self.message} (data pair {self.pair_index})"

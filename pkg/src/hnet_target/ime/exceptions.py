# hnet_target/ime/exceptions.py

from __future__ import annotations

from ..exceptions import HNetError


class IMEError(HNetError):
    """Base class for inverse-modified-equation analysis errors."""


class UnsupportedTruncationError(IMEError):
    """Raised when no closed form is shipped for a (system, method, order) triple."""


class PrecisionError(IMEError):
    """
    Raised when a one-step defect is at or below the round-off floor, so a
    log-log order fit would be meaningless (the h grid is too fine).
    """

    def __init__(self, message: str, *, h: float, defect: float) -> None:
        self.h = h
        self.defect = defect
        super().__init__(f"{message} (h={h:g}, defect={defect:.3e})")

# hnet_target/phasecore/exceptions.py

from __future__ import annotations

from typing import Optional

from ..exceptions import HNetError


class SingularityError(HNetError):
    """
    Raised when a state leaves the domain of an analytic system
    (e.g. the Kepler problem at the origin).

    Attributes:
        system: Name of the system whose domain was violated.
        substep: Oracle sub-step index at which the violation happened, if
            raised from inside `reference_flow`.
    """

    def __init__(
        self,
        message: str,
        *,
        system: str = "",
        substep: Optional[int] = None,
    ) -> None:
        self.message = message
        self.system = system
        self.substep = substep
        super().__init__(self.__str__())

    def __str__(self) -> str:
        base = self.message
        if self.system:
            base = f"[{self.system}] {base}"
        if self.substep is not None:
            base += f" (oracle sub-step {self.substep})"
        return base

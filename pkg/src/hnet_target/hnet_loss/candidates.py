# hnet_target/hnet_loss/candidates.py

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Callable, Literal, Optional, Union

import numpy as np

from ..diffnet.models import NetArchitecture, NetParameters
from ..diffnet.network import ScalarNet
from ..phasecore.models import PhaseLike, as_phase_array
from ..phasecore.systems import AnalyticSystem

ArrayMap = Callable[[np.ndarray], np.ndarray]


class CandidateHamiltonian(ABC):
    """
    Anything that can be plugged into a residual as "H": an analytic
    Hamiltonian (true, truncated modified) or a learned network.
    """

    kind: Literal["analytic", "learned"]
    name: str

    @abstractmethod
    def value(self, y: PhaseLike) -> Union[float, np.ndarray]: ...

    @abstractmethod
    def gradient(self, y: PhaseLike) -> np.ndarray: ...

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"


class AnalyticCandidate(CandidateHamiltonian):
    """Closed-form value and gradient maps on (..., 2d) arrays."""

    kind = "analytic"

    def __init__(self, name: str, value: ArrayMap, gradient: ArrayMap) -> None:
        self.name = name
        self._value = value
        self._gradient = gradient

    @classmethod
    def from_system(cls, system: AnalyticSystem, name: Optional[str] = None) -> "AnalyticCandidate":
        return cls(name or system.name, system.hamiltonian, system.gradient)

    def value(self, y: PhaseLike) -> Union[float, np.ndarray]:
        out = np.asarray(self._value(as_phase_array(y)), dtype=np.float64)
        return float(out) if out.ndim == 0 else out

    def gradient(self, y: PhaseLike) -> np.ndarray:
        return np.asarray(self._gradient(as_phase_array(y)), dtype=np.float64)


class LearnedCandidate(CandidateHamiltonian):
    """
    A trained ScalarNet. `offset` is added to values only; gradients (the
    only thing the loss sees) are unaffected.
    """

    kind = "learned"

    def __init__(
        self,
        arch: NetArchitecture,
        params: NetParameters,
        name: str = "net",
        offset: float = 0.0,
    ) -> None:
        self.name = name
        self.arch = arch
        self.params = params
        self.offset = offset
        self.net = ScalarNet.from_parameters(arch, params)

    def value(self, y: PhaseLike) -> Union[float, np.ndarray]:
        out = self.net.value_numpy(as_phase_array(y)) + self.offset
        return float(out) if np.ndim(out) == 0 else out

    def gradient(self, y: PhaseLike) -> np.ndarray:
        return self.net.gradient_numpy(as_phase_array(y))

    def anchored(
        self,
        reference: CandidateHamiltonian,
        y_ref: Optional[np.ndarray] = None,
    ) -> "LearnedCandidate":
        """
        Fix the additive gauge so that value(y_ref) == reference.value(y_ref);
        y_ref defaults to the origin.
        """
        y_ref = np.zeros(self.arch.input_dim) if y_ref is None else np.asarray(y_ref)
        raw = float(self.net.value_numpy(y_ref))
        return LearnedCandidate(
            self.arch,
            self.params,
            name=self.name,
            offset=float(reference.value(y_ref)) - raw,
        )


def as_candidate(source: Union[CandidateHamiltonian, AnalyticSystem]) -> CandidateHamiltonian:
    if isinstance(source, CandidateHamiltonian):
        return source
    if isinstance(source, AnalyticSystem):
        return AnalyticCandidate.from_system(source)
    raise TypeError(f"cannot use {type(source).__name__} as a candidate Hamiltonian")

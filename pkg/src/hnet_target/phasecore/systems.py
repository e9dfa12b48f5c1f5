# hnet_target/phasecore/systems.py

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Dict, Union

import numpy as np

from ..exceptions import ConfigurationError, ShapeError
from .exceptions import SingularityError
from .models import PhaseLike, as_phase_array

__all__ = [
    "AnalyticSystem",
    "Pendulum",
    "Kepler",
    "HarmonicOscillator",
    "SYSTEMS",
    "get_system",
]

KEPLER_MIN_RADIUS = 1e-8


class AnalyticSystem(ABC):
    """
    A named Hamiltonian with closed-form value and gradient.

    Subclasses implement `_value` and `_gradient` on validated arrays of
    shape (..., 2d); the public methods accept a `PhaseState`, a single
    state vector or a batch.
    """

    name: str = ""
    dim: int = 1

    def hamiltonian(self, y: PhaseLike) -> Union[float, np.ndarray]:
        arr = self.validate(y)
        value = self._value(arr)
        return float(value) if np.ndim(value) == 0 else value

    def gradient(self, y: PhaseLike) -> np.ndarray:
        """Return (dH/dp, dH/dq) in the flattened (p, q) ordering."""
        return self._gradient(self.validate(y))

    def validate(self, y: PhaseLike) -> np.ndarray:
        arr = as_phase_array(y)
        if arr.shape[-1] != 2 * self.dim:
            raise ShapeError(
                f"state does not match system {self.name!r}",
                expected=f"(..., {2 * self.dim})",
                actual=arr.shape,
            )
        return arr

    def split(self, arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return arr[..., : self.dim], arr[..., self.dim :]

    @abstractmethod
    def _value(self, arr: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _gradient(self, arr: np.ndarray) -> np.ndarray: ...

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, dim={self.dim})"


class Pendulum(AnalyticSystem):
    """Mathematical pendulum, H(p, q) = p^2 / 2 - cos q (m = l = g = 1)."""

    name = "pendulum"
    dim = 1

    def _value(self, arr: np.ndarray) -> np.ndarray:
        p, q = arr[..., 0], arr[..., 1]
        return 0.5 * p**2 - np.cos(q)

    def _gradient(self, arr: np.ndarray) -> np.ndarray:
        p, q = arr[..., 0], arr[..., 1]
        return np.stack([p, np.sin(q)], axis=-1)


class Kepler(AnalyticSystem):
    """Planar Kepler problem, H = |p|^2 / 2 - 1 / |q| (m = M = G = 1)."""

    name = "kepler"
    dim = 2

    def _radius(self, q: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(q, axis=-1)
        if np.any(r < KEPLER_MIN_RADIUS):
            raise SingularityError(
                f"|q| below {KEPLER_MIN_RADIUS:g}; the Kepler field is undefined at the origin",
                system=self.name,
            )
        return r

    def _value(self, arr: np.ndarray) -> np.ndarray:
        p, q = self.split(arr)
        return 0.5 * np.sum(p**2, axis=-1) - 1.0 / self._radius(q)

    def _gradient(self, arr: np.ndarray) -> np.ndarray:
        p, q = self.split(arr)
        r = self._radius(q)
        return np.concatenate([p, q / r[..., None] ** 3], axis=-1)


class HarmonicOscillator(AnalyticSystem):
    """Linear oscillator H = (|p|^2 + |q|^2) / 2; its exact flow is a rotation."""

    name = "harmonic"

    def __init__(self, dim: int = 1) -> None:
        if dim < 1:
            raise ConfigurationError(f"dimension must be >= 1, got {dim}")
        self.dim = dim

    def _value(self, arr: np.ndarray) -> np.ndarray:
        return 0.5 * np.sum(arr**2, axis=-1)

    def _gradient(self, arr: np.ndarray) -> np.ndarray:
        return arr.copy()


SYSTEMS: Dict[str, AnalyticSystem] = {
    "pendulum": Pendulum(),
    "kepler": Kepler(),
    "harmonic": HarmonicOscillator(),
}


def get_system(name: str) -> AnalyticSystem:
    """Look up a shipped benchmark system by name."""
    try:
        return SYSTEMS[name]
    except KeyError:
        raise ConfigurationError(
            f"Unknown system {name!r}; expected one of {sorted(SYSTEMS)}"
        ) from None

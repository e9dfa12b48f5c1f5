# hnet_target/phasecore/models.py

from __future__ import annotations

import math
from typing import List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..exceptions import ShapeError


class PhaseState(BaseModel):
    """
    A point y = (p, q) of a canonical Hamiltonian system.

    The flattened ordering used everywhere in the package is
    (p_1..p_d, q_1..q_d).
    """

    model_config = ConfigDict(frozen=True)

    p: Tuple[float, ...] = Field(..., description="Momenta p_1..p_d.")
    q: Tuple[float, ...] = Field(..., description="Positions q_1..q_d.")

    @model_validator(mode="after")
    def _check_shape(self) -> "PhaseState":
        if len(self.p) != len(self.q):
            raise ValueError(
                f"p and q must have equal length, got {len(self.p)} and {len(self.q)}"
            )
        if len(self.p) < 1:
            raise ValueError("a phase state needs at least one degree of freedom")
        if not all(math.isfinite(v) for v in (*self.p, *self.q)):
            raise ValueError("phase state entries must be finite")
        return self

    @property
    def dim(self) -> int:
        return len(self.p)

    def to_array(self) -> np.ndarray:
        return np.array([*self.p, *self.q], dtype=np.float64)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "PhaseState":
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size % 2 or arr.size == 0:
            raise ShapeError(
                "cannot build a PhaseState", expected="vector of even length", actual=arr.shape
            )
        d = arr.size // 2
        return cls(p=tuple(arr[:d].tolist()), q=tuple(arr[d:].tolist()))


PhaseLike = Union[PhaseState, np.ndarray, Sequence[float]]


def as_phase_array(y: PhaseLike) -> np.ndarray:
    """
    Convert a state (or a batch of states, shape (N, 2d)) to a float64 array.

    Raises:
        ShapeError if the trailing dimension is not a positive even number.
    """
    if isinstance(y, PhaseState):
        return y.to_array()
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] == 0 or arr.shape[-1] % 2:
        raise ShapeError(
            "phase arrays need an even trailing dimension 2d",
            expected="(..., 2d)",
            actual=arr.shape,
        )
    return arr


def like_input(y: PhaseLike, values: np.ndarray) -> Union[PhaseState, np.ndarray]:
    """Return `values` as a PhaseState when the caller passed one."""
    if isinstance(y, PhaseState):
        return PhaseState.from_array(values)
    return values


class Trajectory(BaseModel):
    """
    A sequence of states sampled with a fixed step size.

    `states` is stored as an (n, 2d) float64 array; use indexing to get
    `PhaseState` views.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    states: np.ndarray = Field(..., description="State array of shape (n, 2d).")
    h: float = Field(..., gt=0, description="Step size between consecutive states.")
    t0: float = Field(default=0.0, description="Time of the first state.")

    @field_validator("states", mode="before")
    @classmethod
    def _coerce_states(cls, value: object) -> np.ndarray:
        if isinstance(value, (list, tuple)) and value and isinstance(value[0], PhaseState):
            value = [s.to_array() for s in value]
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] % 2:
            raise ValueError(f"states must be a nonempty (n, 2d) array, got {arr.shape}")
        return arr

    def __len__(self) -> int:
        return self.states.shape[0]

    def __getitem__(self, index: int) -> PhaseState:
        return PhaseState.from_array(self.states[index])

    def phase_states(self) -> List[PhaseState]:
        return [PhaseState.from_array(row) for row in self.states]

    @property
    def dim(self) -> int:
        return self.states.shape[1] // 2

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(len(self))

    @property
    def final(self) -> PhaseState:
        return self[len(self) - 1]

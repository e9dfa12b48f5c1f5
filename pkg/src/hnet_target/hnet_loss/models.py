# hnet_target/hnet_loss/models.py

from __future__ import annotations

from typing import List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..integrators.models import MethodId
from ..phasecore.models import PhaseState


class DatasetProvenance(BaseModel):
    """Where a FlowDataset came from; written as the JSON sidecar of dataset files."""

    system: str = Field(..., description="Name of the analytic system.")
    mode: Literal["region", "trajectory", "external"] = Field(
        default="external",
        description="region: i.i.d. uniform states; trajectory: chained pairs.",
    )
    region: Optional[List[Tuple[float, float]]] = Field(
        default=None,
        description="Per-coordinate (low, high) sampling bounds in (p, q) order.",
    )
    start: Optional[List[float]] = Field(
        default=None,
        description="Initial state of the trajectory in (p, q) order.",
    )
    oracle_substeps: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None


class FlowDataset(BaseModel):
    """
    Training pairs (y_i, phi_h(y_i)) sharing one step size h.

    States are stored as two aligned (N, 2d) arrays.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    states: np.ndarray = Field(..., description="Pair starts y_i, shape (N, 2d).")
    next_states: np.ndarray = Field(..., description="Pair ends, shape (N, 2d).")
    h: float = Field(..., gt=0, description="Step size shared by all pairs.")
    provenance: DatasetProvenance

    @field_validator("states", "next_states", mode="before")
    @classmethod
    def _coerce(cls, value: object) -> np.ndarray:
        arr = np.array(value, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] == 0 or arr.shape[1] % 2:
            raise ValueError(f"pair states must have shape (N, 2d), got {arr.shape}")
        return arr

    @model_validator(mode="after")
    def _check_pairs(self) -> "FlowDataset":
        if self.states.shape != self.next_states.shape:
            raise ValueError(
                f"pair arrays differ in shape: {self.states.shape} vs {self.next_states.shape}"
            )
        if self.provenance.mode == "trajectory" and len(self) > 1:
            if not np.array_equal(self.next_states[:-1], self.states[1:]):
                raise ValueError("trajectory pairs must chain: next_states[i] == states[i + 1]")
        return self

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1] // 2

    @property
    def pairs(self) -> List[Tuple[PhaseState, PhaseState]]:
        return [
            (PhaseState.from_array(a), PhaseState.from_array(b))
            for a, b in zip(self.states, self.next_states)
        ]


class TrainConfig(BaseModel):
    """Optimizer and loop settings for `train`."""

    model_config = ConfigDict(frozen=True)

    method: MethodId = Field(
        default=MethodId.SYMPLECTIC_EULER,
        description="Integrator whose defining relation forms the loss.",
    )
    learning_rate: float = Field(default=1e-3, gt=0, description="Adam step size.")
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    iterations: int = Field(
        default=50_000,
        ge=0,
        description="Optimizer steps; 0 returns the initialization unchanged.",
    )
    batch_size: Optional[int] = Field(
        default=None,
        ge=1,
        description="Fixed mini-batch size; None means full batch.",
    )
    seed: int = Field(default=0, ge=0, description="Initialization / batching seed.")
    log_every: int = Field(
        default=1000,
        ge=1,
        description="Interval (iterations) for progress logs and test-loss evaluation.",
    )


class LossHistory(BaseModel):
    """
    Per-iteration training loss (evaluated before each update) plus the
    test loss where it was evaluated.
    """

    iterations: List[int] = Field(default_factory=list)
    train_loss: List[float] = Field(default_factory=list)
    test_loss: List[Optional[float]] = Field(default_factory=list)
    final_train_loss: Optional[float] = None
    final_test_loss: Optional[float] = None

    def record(self, iteration: int, train: float, test: Optional[float] = None) -> None:
        self.iterations.append(iteration)
        self.train_loss.append(train)
        self.test_loss.append(test)

    @property
    def initial_train_loss(self) -> Optional[float]:
        return self.train_loss[0] if self.train_loss else None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "iteration": self.iterations,
                "train_loss": self.train_loss,
                "test_loss": [np.nan if v is None else v for v in self.test_loss],
            }
        )

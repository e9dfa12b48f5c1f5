# hnet_target/expcli/models.py

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..diffnet.models import Activation, NetArchitecture
from ..integrators.models import MethodId, SolverConfig
from ..hnet_loss.models import TrainConfig
from ..utils import stable_hash

SCHEMA_VERSION = 1

PENDULUM_REGION: List[Tuple[float, float]] = [
    (-math.pi / 2, math.pi / 2),
    (-math.sqrt(2.0), math.sqrt(2.0)),
]


class ExperimentId(str, Enum):
    TABLE1 = "table1"
    PENDULUM_PREDICT = "pendulum_predict"
    KEPLER_PREDICT = "kepler_predict"
    IME_ORDERS = "ime_orders"
    NT_EXISTENCE = "nt_existence"


class DatasetSpec(BaseModel):
    """
    How to build a FlowDataset.

    - region mode: `size` i.i.d. uniform states in `region`, each paired
      with its exact-flow image.
    - trajectory mode: `size` chained pairs along the exact trajectory
      from `start`.
    """

    model_config = ConfigDict(frozen=True)

    mode: Literal["region", "trajectory"] = "region"
    region: Optional[List[Tuple[float, float]]] = Field(
        default=None,
        description="Per-coordinate (low, high) bounds in (p, q) order.",
    )
    start: Optional[List[float]] = Field(
        default=None,
        description="Trajectory start in (p, q) order.",
    )
    size: int = Field(default=4000, description="Number of pairs.")
    h: float = Field(default=0.1, gt=0, description="Data step size.")
    seed: int = Field(default=0, ge=0)
    oracle_substeps: Optional[int] = Field(
        default=None,
        ge=1,
        description="Oracle substeps; falls back to HNetSettings.oracle_substeps.",
    )

    @field_validator("region")
    @classmethod
    def _finite_region(
        cls, value: Optional[List[Tuple[float, float]]]
    ) -> Optional[List[Tuple[float, float]]]:
        if value is None:
            return value
        for low, high in value:
            if not (math.isfinite(low) and math.isfinite(high)) or low >= high:
                raise ValueError(f"region bounds must be finite with low < high, got {(low, high)}")
        return value

    @model_validator(mode="after")
    def _mode_fields(self) -> "DatasetSpec":
        if self.mode == "region" and self.region is None:
            raise ValueError("region mode needs `region`")
        if self.mode == "trajectory" and self.start is None:
            raise ValueError("trajectory mode needs `start`")
        return self


class ExperimentConfig(BaseModel):
    """
    JSON-serialisable description of one experiment run.

    `schema_version` must match the version this package writes.
    """

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    experiment: ExperimentId
    system: str = "pendulum"
    method: MethodId = Field(
        default=MethodId.SYMPLECTIC_EULER,
        description="Integrator of the loss for table1 / train / eval-loss.",
    )
    methods: List[MethodId] = Field(
        default_factory=lambda: [MethodId.IMPLICIT_MIDPOINT, MethodId.IMPLICIT_TRAPEZOIDAL],
        description="Integrators compared by the prediction experiments.",
    )
    dataset: DatasetSpec = Field(
        default_factory=lambda: DatasetSpec(region=PENDULUM_REGION)
    )
    test_seed: Optional[int] = Field(
        default=None,
        ge=0,
        description="Seed of the fresh test dataset (defaults to dataset.seed + 1).",
    )
    hidden_widths: Tuple[int, ...] = (128, 128)
    activation: Activation = Activation.TANH
    training: TrainConfig = Field(default_factory=TrainConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    prediction_steps: Optional[int] = Field(
        default=None,
        ge=1,
        description="Rollout length of prediction experiments (default 200 pendulum, 110 Kepler).",
    )
    flow_steps: int = Field(
        default=100,
        ge=1,
        description="Data steps of the target-flow comparison in table1 (t = flow_steps * h).",
    )
    flow_start: List[float] = Field(default_factory=lambda: [0.0, 1.0])
    flow_substeps: int = Field(
        default=20,
        ge=1,
        description="RK4 substeps per data step when integrating a learned Hamiltonian's flow.",
    )
    h_grid: List[float] = Field(default_factory=lambda: [0.1, 0.05, 0.025, 0.0125])
    order_samples: int = Field(default=10, ge=1)
    symmetry_state: List[float] = Field(default_factory=lambda: [0.0, 1.0])
    output_dir: Optional[Path] = None

    @property
    def test_dataset_seed(self) -> int:
        return self.dataset.seed + 1 if self.test_seed is None else self.test_seed

    def architecture(self, input_dim: int) -> NetArchitecture:
        return NetArchitecture(
            input_dim=input_dim,
            hidden_widths=self.hidden_widths,
            activation=self.activation,
        )

    def config_hash(self) -> str:
        return stable_hash(self.model_dump(mode="json", exclude={"output_dir"}))

    # ------------------------------------------------------------------
    # Defaults for the shipped experiments
    # ------------------------------------------------------------------

    @classmethod
    def default(cls, experiment: ExperimentId | str) -> "ExperimentConfig":
        experiment = ExperimentId(experiment)
        if experiment is ExperimentId.PENDULUM_PREDICT:
            return cls(
                experiment=experiment,
                system="pendulum",
                dataset=DatasetSpec(mode="trajectory", start=[0.0, 1.0], size=40),
                prediction_steps=200,
            )
        if experiment is ExperimentId.KEPLER_PREDICT:
            return cls(
                experiment=experiment,
                system="kepler",
                dataset=DatasetSpec(mode="trajectory", start=[0.0, 1.0, 1.0, 0.2], size=55),
                prediction_steps=110,
            )
        if experiment is ExperimentId.NT_EXISTENCE:
            return cls(
                experiment=experiment,
                method=MethodId.EXPLICIT_EULER,
                h_grid=[0.1, 0.05, 0.02, 0.01, 1e-3, 1e-4],
            )
        return cls(experiment=experiment)


class RunManifest(BaseModel):
    """Everything needed to reproduce the numbers of a report."""

    experiment: ExperimentId
    config: Dict[str, Any]
    config_hash: str
    seeds: Dict[str, int]
    oracle_substeps: int
    solver: SolverConfig
    versions: Dict[str, str]


class ExperimentReport(BaseModel):
    """Result of one experiment run; serialised as `manifest.json`."""

    status: Literal["ok", "failed"] = "ok"
    manifest: RunManifest
    metrics: Dict[str, Any] = Field(default_factory=dict)
    artifacts: Dict[str, str] = Field(default_factory=dict)
    messages: List[str] = Field(default_factory=list)

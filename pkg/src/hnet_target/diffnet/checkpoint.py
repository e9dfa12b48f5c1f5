# hnet_target/diffnet/checkpoint.py

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..exceptions import ConfigurationError
from .models import NetArchitecture, NetParameters

CHECKPOINT_FORMAT = "hnet-target-checkpoint"
CHECKPOINT_VERSION = 1


class Checkpoint(BaseModel):
    """
    On-disk record of a trained network (JSON).

    {
      "format": "hnet-target-checkpoint",
      "version": 1,
      "architecture": {"input_dim": 2, "hidden_widths": [128, 128], "activation": "tanh"},
      "seed": 0,
      "parameters": [...],          # flattened, see NetParameters
      "metadata": {...}             # method, h, iterations, final losses, ...
    }

    Parameters are written with full float64 round-trip precision, so a
    save / load cycle reproduces the network bit for bit.
    """

    model_config = ConfigDict(extra="forbid")

    format: Literal["hnet-target-checkpoint"] = CHECKPOINT_FORMAT
    version: Literal[1] = CHECKPOINT_VERSION
    architecture: NetArchitecture
    seed: Optional[int] = None
    parameters: List[float] = Field(..., description="Flattened parameter vector.")
    metadata: Dict[str, Any] = Field(default_factory=dict)

    def to_parameters(self) -> NetParameters:
        params = NetParameters(vector=self.parameters, seed=self.seed)
        params.check(self.architecture)
        return params


def save_checkpoint(
    path: Union[str, Path],
    arch: NetArchitecture,
    params: NetParameters,
    metadata: Optional[Dict[str, Any]] = None,
) -> Path:
    params.check(arch)
    record = Checkpoint(
        architecture=arch,
        seed=params.seed,
        parameters=params.vector.tolist(),
        metadata=metadata or {},
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(record.model_dump_json(indent=2), encoding="utf-8")
    return path


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    try:
        record = Checkpoint.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise ConfigurationError(
            f"Failed to parse checkpoint {path}: {exc}",
            details={"errors": exc.errors(include_url=False)},
        ) from exc
    record.to_parameters()
    return record

# hnet_target/diffnet/models.py

from __future__ import annotations

from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..exceptions import ShapeError


class Activation(str, Enum):
    """Smooth (at least C^2) activations; the loss differentiates grad_y net."""

    TANH = "tanh"
    SOFTPLUS = "softplus"
    SIGMOID = "sigmoid"
    IDENTITY = "identity"


class NetArchitecture(BaseModel):
    """
    Fully connected scalar network input_dim -> hidden_widths... -> 1.

    The output dimension is fixed to 1 (a scalar Hamiltonian).
    """

    model_config = ConfigDict(frozen=True)

    input_dim: int = Field(..., ge=2, description="State dimension 2d.")
    hidden_widths: Tuple[int, ...] = Field(
        default=(128, 128),
        description="Widths of the hidden layers (may be empty for an affine net).",
    )
    activation: Activation = Field(
        default=Activation.TANH,
        description="Activation applied after every hidden layer.",
    )

    @field_validator("input_dim")
    @classmethod
    def _even_input(cls, value: int) -> int:
        if value % 2:
            raise ValueError(f"input_dim must be even (2d), got {value}")
        return value

    @field_validator("hidden_widths")
    @classmethod
    def _positive_widths(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(w < 1 for w in value):
            raise ValueError(f"hidden widths must be >= 1, got {value}")
        return value

    @property
    def layer_sizes(self) -> List[int]:
        return [self.input_dim, *self.hidden_widths, 1]

    @property
    def layer_shapes(self) -> List[Tuple[int, int]]:
        """(fan_out, fan_in) per affine layer."""
        sizes = self.layer_sizes
        return [(sizes[i + 1], sizes[i]) for i in range(len(sizes) - 1)]

    @property
    def parameter_count(self) -> int:
        return sum(out * inp + out for out, inp in self.layer_shapes)


class NetParameters(BaseModel):
    """
    Flattened network parameters.

    Layout: for each affine layer in order, the weight matrix
    (fan_out, fan_in) in row-major order followed by its bias. This is the
    order `torch.nn.utils.parameters_to_vector` produces for `ScalarNet`.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    vector: np.ndarray = Field(..., description="All parameters as one float64 vector.")
    seed: Optional[int] = Field(default=None, description="Initialization seed, if any.")

    @field_validator("vector", mode="before")
    @classmethod
    def _coerce_vector(cls, value: object) -> np.ndarray:
        arr = np.array(value, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"parameters must be a flat vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("parameters must be finite")
        return arr

    def __len__(self) -> int:
        return self.vector.size

    def check(self, arch: NetArchitecture) -> None:
        if self.vector.size != arch.parameter_count:
            raise ShapeError(
                "parameter vector does not match architecture",
                expected=f"{arch.parameter_count} entries",
                actual=self.vector.size,
            )

    def unflatten(self, arch: NetArchitecture) -> List[Tuple[np.ndarray, np.ndarray]]:
        """Split into per-layer (weight, bias) arrays."""
        self.check(arch)
        layers = []
        offset = 0
        for out, inp in arch.layer_shapes:
            weight = self.vector[offset : offset + out * inp].reshape(out, inp)
            offset += out * inp
            bias = self.vector[offset : offset + out]
            offset += out
            layers.append((weight.copy(), bias.copy()))
        return layers

    @classmethod
    def from_layers(
        cls,
        layers: List[Tuple[np.ndarray, np.ndarray]],
        seed: Optional[int] = None,
    ) -> "NetParameters":
        chunks = []
        for weight, bias in layers:
            chunks.append(np.asarray(weight, dtype=np.float64).ravel())
            chunks.append(np.asarray(bias, dtype=np.float64).ravel())
        return cls(vector=np.concatenate(chunks), seed=seed)

    @classmethod
    def zeros(cls, arch: NetArchitecture) -> "NetParameters":
        return cls(vector=np.zeros(arch.parameter_count))

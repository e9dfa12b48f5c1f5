# hnet_target/diffnet/network.py

from __future__ import annotations

import logging
from typing import Callable, Optional, Union

import numpy as np
import torch
from torch import nn

from ..exceptions import ShapeError
from ..phasecore.models import PhaseLike, as_phase_array
from .exceptions import NonFiniteLossError
from .models import Activation, NetArchitecture, NetParameters

logger = logging.getLogger(__name__)

DTYPE = torch.float64

_ACTIVATIONS = {
    Activation.TANH: nn.Tanh,
    Activation.SOFTPLUS: nn.Softplus,
    Activation.SIGMOID: nn.Sigmoid,
    Activation.IDENTITY: nn.Identity,
}


class ScalarNet(nn.Module):
    """
    Differentiable scalar field net(y) approximating a Hamiltonian.

    `forward` returns one value per state; `input_gradient` returns
    grad_y net through autograd. With `create_graph=True` the gradient
    stays differentiable with respect to the parameters, which is what
    the training loss needs.
    """

    def __init__(self, arch: NetArchitecture) -> None:
        super().__init__()
        self.arch = arch
        layers: list[nn.Module] = []
        for index, (out, inp) in enumerate(arch.layer_shapes):
            layers.append(nn.Linear(inp, out, dtype=DTYPE))
            if index < len(arch.layer_shapes) - 1:
                layers.append(_ACTIVATIONS[arch.activation]())
        self.layers = nn.Sequential(*layers)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_parameters(cls, arch: NetArchitecture, params: NetParameters) -> "ScalarNet":
        params.check(arch)
        net = cls(arch)
        net.load_vector(params.vector)
        return net

    def load_vector(self, vector: np.ndarray) -> None:
        with torch.no_grad():
            nn.utils.vector_to_parameters(
                torch.as_tensor(vector, dtype=DTYPE), self.parameters()
            )

    def to_parameters(self, seed: Optional[int] = None) -> NetParameters:
        vector = nn.utils.parameters_to_vector(self.parameters()).detach().numpy()
        return NetParameters(vector=vector.copy(), seed=seed)

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def forward(self, y: torch.Tensor) -> torch.Tensor:
        return self.layers(y).squeeze(-1)

    def input_gradient(self, y: torch.Tensor, create_graph: bool = False) -> torch.Tensor:
        if not y.requires_grad:
            y = y.detach().requires_grad_(True)
        value = self(y)
        (grad,) = torch.autograd.grad(value.sum(), y, create_graph=create_graph)
        return grad

    def value_numpy(self, y: np.ndarray) -> np.ndarray:
        with torch.no_grad():
            return self(self._tensor(y)).numpy()

    def gradient_numpy(self, y: np.ndarray) -> np.ndarray:
        return self.input_gradient(self._tensor(y)).detach().numpy()

    def _tensor(self, y: np.ndarray) -> torch.Tensor:
        arr = np.asarray(y, dtype=np.float64)
        if arr.shape[-1] != self.arch.input_dim:
            raise ShapeError(
                "state does not match network input",
                expected=f"(..., {self.arch.input_dim})",
                actual=arr.shape,
            )
        return torch.as_tensor(arr, dtype=DTYPE)


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------


def initialize_parameters(arch: NetArchitecture, seed: int) -> NetParameters:
    """
    Layer-wise uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and
    biases, drawn from a dedicated seeded generator.
    """
    generator = torch.Generator().manual_seed(seed)
    layers = []
    for out, inp in arch.layer_shapes:
        bound = 1.0 / np.sqrt(inp)
        weight = (torch.rand((out, inp), generator=generator, dtype=DTYPE) * 2 - 1) * bound
        bias = (torch.rand((out,), generator=generator, dtype=DTYPE) * 2 - 1) * bound
        layers.append((weight.numpy(), bias.numpy()))
    return NetParameters.from_layers(layers, seed=seed)


# ---------------------------------------------------------------------------
# Functional surface
# ---------------------------------------------------------------------------


def net_value(
    arch: NetArchitecture, params: NetParameters, y: PhaseLike
) -> Union[float, np.ndarray]:
    """Evaluate net(y) for a single state or a batch."""
    values = ScalarNet.from_parameters(arch, params).value_numpy(as_phase_array(y))
    return float(values) if values.ndim == 0 else values


def net_input_gradient(
    arch: NetArchitecture, params: NetParameters, y: PhaseLike
) -> np.ndarray:
    """Exact grad_y net(y) (autograd, not finite differences)."""
    return ScalarNet.from_parameters(arch, params).gradient_numpy(as_phase_array(y))


LossClosure = Callable[[ScalarNet], torch.Tensor]


def loss_parameter_gradient(
    arch: NetArchitecture,
    params: NetParameters,
    residual_loss: LossClosure,
) -> np.ndarray:
    """
    Exact gradient with respect to the flattened parameters of a loss
    built from net values and input gradients.

    `residual_loss` receives the network and returns either a scalar loss
    or a vector of per-pair losses (reduced by the mean). Input gradients
    inside the closure must be taken with `create_graph=True`; the
    resulting gradient then contains the mixed second derivatives.

    Raises:
        NonFiniteLossError naming the first offending pair.
    """
    net = ScalarNet.from_parameters(arch, params)
    losses = residual_loss(net)
    _check_finite(losses)
    loss = losses.mean() if losses.ndim else losses

    weights = list(net.parameters())
    grads = torch.autograd.grad(loss, weights, allow_unused=True)
    flat = torch.cat(
        [
            (g if g is not None else torch.zeros_like(w)).reshape(-1)
            for g, w in zip(grads, weights)
        ]
    )
    return flat.detach().numpy()


def _check_finite(losses: torch.Tensor) -> None:
    finite = torch.isfinite(losses.detach())
    if bool(finite.all()):
        return
    if losses.ndim == 0:
        raise NonFiniteLossError(f"loss is not finite ({losses.item()})")
    index = int(torch.nonzero(~finite.reshape(-1))[0])
    raise NonFiniteLossError("loss is not finite", pair_index=index)

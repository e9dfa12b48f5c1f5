# hnet_target/hnet_loss/residuals.py

from __future__ import annotations

from typing import Callable, Tuple, TypeVar, Union

import numpy as np
import torch

from ..exceptions import ConfigurationError, ShapeError
from ..integrators.models import MethodId, MethodSpec, get_method
from ..phasecore.models import PhaseLike, as_phase_array
from ..diffnet.network import ScalarNet
from .candidates import CandidateHamiltonian
from .models import FlowDataset

Array = TypeVar("Array", np.ndarray, torch.Tensor)
MethodLike = Union[MethodSpec, MethodId, str]


def _join(a: Array, b: Array) -> Array:
    if isinstance(a, torch.Tensor):
        return torch.cat([a, b], dim=-1)
    return np.concatenate([a, b], axis=-1)


def _field(gradient: Callable[[Array], Array], y: Array) -> Array:
    g = gradient(y)
    d = g.shape[-1] // 2
    return _join(-g[..., d:], g[..., :d])


def method_residual(
    method: MethodLike,
    gradient: Callable[[Array], Array],
    y: Array,
    y_next: Array,
    h: float,
) -> Array:
    """
    Defining relation of a one-step method with both endpoints taken from
    data, so implicit methods need no solve:

        explicit_euler        (y' - y)/h - J^{-1} grad H(y)
        symplectic_euler      (y' - y)/h - J^{-1} grad H(p', q)
        implicit_midpoint     (y' - y)/h - J^{-1} grad H((y + y')/2)
        implicit_trapezoidal  (y' - y)/h - (J^{-1} grad H(y) + J^{-1} grad H(y'))/2

    Works on numpy arrays and on torch tensors (for training), single
    pairs or batches.
    """
    spec = get_method(method)
    d = y.shape[-1] // 2
    quotient = (y_next - y) / h

    if spec.id is MethodId.EXPLICIT_EULER:
        return quotient - _field(gradient, y)
    if spec.id is MethodId.SYMPLECTIC_EULER:
        return quotient - _field(gradient, _join(y_next[..., :d], y[..., d:]))
    if spec.id is MethodId.IMPLICIT_MIDPOINT:
        return quotient - _field(gradient, 0.5 * (y + y_next))
    if spec.id is MethodId.IMPLICIT_TRAPEZOIDAL:
        return quotient - 0.5 * (_field(gradient, y) + _field(gradient, y_next))
    raise ConfigurationError(f"method {spec.id.value!r} has no residual form")


# ---------------------------------------------------------------------------
# Numpy surface
# ---------------------------------------------------------------------------


def residual(
    method: MethodLike,
    cand: CandidateHamiltonian,
    pair: Tuple[PhaseLike, PhaseLike],
    h: float,
) -> np.ndarray:
    """Residual vector of one pair (or of aligned batches) under `cand`."""
    y, y_next = (as_phase_array(s) for s in pair)
    if y.shape != y_next.shape:
        raise ShapeError("pair endpoints differ in shape", expected=str(y.shape), actual=y_next.shape)
    return method_residual(method, cand.gradient, y, y_next, h)


def pair_losses(
    method: MethodLike, cand: CandidateHamiltonian, data: FlowDataset
) -> np.ndarray:
    """Mean squared residual component of every pair, |r|^2 / 2d."""
    r = residual(method, cand, (data.states, data.next_states), data.h)
    return np.mean(r**2, axis=-1)


def empirical_loss(
    method: MethodLike, cand: CandidateHamiltonian, data: FlowDataset
) -> float:
    """Mean over pairs and over the 2d components of the squared residual."""
    if len(data) == 0:
        raise ConfigurationError("empirical loss needs a nonempty dataset")
    return float(np.mean(pair_losses(method, cand, data)))


def loss_summary(
    method: MethodLike, cand: CandidateHamiltonian, data: FlowDataset
) -> Tuple[float, float]:
    """(mean, standard error of the mean) of the per-pair losses."""
    losses = pair_losses(method, cand, data)
    stderr = float(np.std(losses) / np.sqrt(losses.size)) if losses.size > 1 else 0.0
    return float(np.mean(losses)), stderr


# ---------------------------------------------------------------------------
# Torch surface (training)
# ---------------------------------------------------------------------------


def torch_pair_losses(
    method: MethodLike,
    net: ScalarNet,
    y: torch.Tensor,
    y_next: torch.Tensor,
    h: float,
) -> torch.Tensor:
    """Per-pair mean squared residuals, differentiable with respect to the net parameters."""
    r = method_residual(
        method, lambda x: net.input_gradient(x, create_graph=True), y, y_next, h
    )
    return (r**2).mean(dim=-1)

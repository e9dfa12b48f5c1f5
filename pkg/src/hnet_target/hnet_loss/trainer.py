# hnet_target/hnet_loss/trainer.py

from __future__ import annotations

import logging
from typing import Optional, Tuple

import torch

from ..diffnet.exceptions import NonFiniteLossError
from ..diffnet.models import NetArchitecture, NetParameters
from ..diffnet.network import DTYPE, ScalarNet, initialize_parameters
from ..exceptions import ConfigurationError, ShapeError
from ..integrators.models import MethodId, MethodSpec, get_method
from .exceptions import TrainingDivergedError
from .models import FlowDataset, LossHistory, TrainConfig
from .residuals import torch_pair_losses

logger = logging.getLogger(__name__)


def train(
    arch: NetArchitecture,
    method: Optional[MethodSpec | MethodId | str],
    data: FlowDataset,
    cfg: Optional[TrainConfig] = None,
    *,
    test_data: Optional[FlowDataset] = None,
) -> Tuple[NetParameters, LossHistory]:
    """
    Fit a ScalarNet by minimising the empirical loss of `method` on `data`
    with Adam. `method=None` takes the integrator from `cfg.method`.

    The training loss of every iteration (before its update) is recorded;
    the test loss, when `test_data` is given, every `cfg.log_every`
    iterations and at the end.

    Raises:
        ConfigurationError for an empty dataset.
        TrainingDivergedError when the loss turns non-finite; it carries
        the iteration, the last finite parameters and the history.
    """
    cfg = cfg or TrainConfig()
    spec = get_method(cfg.method if method is None else method)
    if len(data) == 0:
        raise ConfigurationError("cannot train on an empty dataset")
    if data.states.shape[1] != arch.input_dim:
        raise ShapeError(
            "dataset does not match network input",
            expected=f"(N, {arch.input_dim})",
            actual=data.states.shape,
        )

    init = initialize_parameters(arch, cfg.seed)
    history = LossHistory()
    if cfg.iterations == 0:
        return init, history

    net = ScalarNet.from_parameters(arch, init)
    optimizer = torch.optim.Adam(
        net.parameters(), lr=cfg.learning_rate, betas=(cfg.beta1, cfg.beta2)
    )
    y = torch.as_tensor(data.states, dtype=DTYPE)
    y_next = torch.as_tensor(data.next_states, dtype=DTYPE)
    batches = torch.Generator().manual_seed(cfg.seed)
    last_finite = init

    logger.info(
        "training %s net (%d parameters) on %d pairs, h=%g, %d iterations",
        spec.id.value,
        arch.parameter_count,
        len(data),
        data.h,
        cfg.iterations,
    )

    for iteration in range(1, cfg.iterations + 1):
        if cfg.batch_size is not None and cfg.batch_size < len(data):
            index = torch.randperm(len(data), generator=batches)[: cfg.batch_size]
            losses = torch_pair_losses(spec, net, y[index], y_next[index], data.h)
        else:
            losses = torch_pair_losses(spec, net, y, y_next, data.h)
        loss = losses.mean()

        if not torch.isfinite(loss):
            bad = torch.nonzero(~torch.isfinite(losses.detach()))
            raise TrainingDivergedError(
                "training loss is not finite",
                iteration=iteration,
                checkpoint=last_finite,
                history=history,
                pair_index=int(bad[0]) if bad.numel() else None,
            )
        last_finite = net.to_parameters(seed=cfg.seed)

        optimizer.zero_grad()
        loss.backward()
        optimizer.step()

        test_loss = None
        if test_data is not None and iteration % cfg.log_every == 0:
            test_loss = evaluate_loss(spec, net, test_data)
        history.record(iteration, loss.item(), test_loss)

        if iteration % cfg.log_every == 0:
            if test_loss is None:
                logger.info("iteration %d, train_loss %.4e", iteration, loss.item())
            else:
                logger.info(
                    "iteration %d, train_loss %.4e, test_loss %.4e",
                    iteration,
                    loss.item(),
                    test_loss,
                )

    params = net.to_parameters(seed=cfg.seed)
    history.final_train_loss = evaluate_loss(spec, net, data)
    if test_data is not None:
        history.final_test_loss = evaluate_loss(spec, net, test_data)
    logger.info(
        "final train_loss %.4e%s",
        history.final_train_loss,
        "" if history.final_test_loss is None else f", test_loss {history.final_test_loss:.4e}",
    )
    return params, history


def evaluate_loss(method: MethodSpec, net: ScalarNet, data: FlowDataset) -> float:
    """Empirical loss of a live network (no parameter graph is kept)."""
    y = torch.as_tensor(data.states, dtype=DTYPE)
    y_next = torch.as_tensor(data.next_states, dtype=DTYPE)
    losses = torch_pair_losses(method, net, y, y_next, data.h).detach()
    value = float(losses.mean())
    if not torch.isfinite(losses).all():
        bad = int(torch.nonzero(~torch.isfinite(losses))[0])
        raise NonFiniteLossError("evaluation loss is not finite", pair_index=bad)
    return value

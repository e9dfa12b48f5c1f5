from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .exceptions import NonFiniteLossError
from .models import Activation, NetArchitecture, NetParameters
from .network import (
    ScalarNet,
    initialize_parameters,
    loss_parameter_gradient,
    net_input_gradient,
    net_value,
)

__all__ = [
    "Checkpoint",
    "load_checkpoint",
    "save_checkpoint",
    "NonFiniteLossError",
    "Activation",
    "NetArchitecture",
    "NetParameters",
    "ScalarNet",
    "initialize_parameters",
    "loss_parameter_gradient",
    "net_input_gradient",
    "net_value",
]

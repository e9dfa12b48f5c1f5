from ._version import __version__
from .config import HNetSettings
from .exceptions import ConfigurationError, HNetError, ShapeError
from .phasecore import (
    HarmonicOscillator,
    Kepler,
    Pendulum,
    PhaseState,
    SingularityError,
    Trajectory,
    get_system,
    reference_flow,
    reference_trajectory,
)
from .integrators import DivergenceError, MethodId, SolverConfig, rollout, step
from .diffnet import NetArchitecture, NetParameters, NonFiniteLossError, ScalarNet
from .hnet_loss import (
    FlowDataset,
    TrainConfig,
    TrainingDivergedError,
    empirical_loss,
    residual,
    train,
)
from .ime import PrecisionError, TruncatedModifiedHamiltonian, UnsupportedTruncationError
from .expcli import ExperimentConfig, ExperimentRunner

__all__ = [
    "__version__",
    "HNetSettings",
    "ConfigurationError",
    "HNetError",
    "ShapeError",
    "HarmonicOscillator",
    "Kepler",
    "Pendulum",
    "PhaseState",
    "SingularityError",
    "Trajectory",
    "get_system",
    "reference_flow",
    "reference_trajectory",
    "DivergenceError",
    "MethodId",
    "SolverConfig",
    "rollout",
    "step",
    "NetArchitecture",
    "NetParameters",
    "NonFiniteLossError",
    "ScalarNet",
    "FlowDataset",
    "TrainConfig",
    "TrainingDivergedError",
    "empirical_loss",
    "residual",
    "train",
    "PrecisionError",
    "TruncatedModifiedHamiltonian",
    "UnsupportedTruncationError",
    "ExperimentConfig",
    "ExperimentRunner",
]

from .candidates import (
    AnalyticCandidate,
    CandidateHamiltonian,
    LearnedCandidate,
    as_candidate,
)
from .exceptions import TrainingDivergedError
from .metrics import target_gap
from .models import DatasetProvenance, FlowDataset, LossHistory, TrainConfig
from .residuals import (
    empirical_loss,
    loss_summary,
    method_residual,
    pair_losses,
    residual,
    torch_pair_losses,
)
from .trainer import evaluate_loss, train

__all__ = [
    "AnalyticCandidate",
    "CandidateHamiltonian",
    "LearnedCandidate",
    "as_candidate",
    "TrainingDivergedError",
    "target_gap",
    "DatasetProvenance",
    "FlowDataset",
    "LossHistory",
    "TrainConfig",
    "empirical_loss",
    "loss_summary",
    "method_residual",
    "pair_losses",
    "residual",
    "torch_pair_losses",
    "evaluate_loss",
    "train",
]

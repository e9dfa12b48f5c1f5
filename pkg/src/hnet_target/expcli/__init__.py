from .cli import build_parser, load_config, main
from .datasets import generate_dataset, load_dataset, save_dataset
from .models import (
    PENDULUM_REGION,
    SCHEMA_VERSION,
    DatasetSpec,
    ExperimentConfig,
    ExperimentId,
    ExperimentReport,
    RunManifest,
)
from .runner import ExperimentRunner

__all__ = [
    "build_parser",
    "load_config",
    "main",
    "generate_dataset",
    "load_dataset",
    "save_dataset",
    "PENDULUM_REGION",
    "SCHEMA_VERSION",
    "DatasetSpec",
    "ExperimentConfig",
    "ExperimentId",
    "ExperimentReport",
    "RunManifest",
    "ExperimentRunner",
]

# hnet_target/expcli/reports.py

from __future__ import annotations

import logging
from importlib import metadata
from pathlib import Path
from typing import Dict, Union

import numpy as np
import pandas as pd
import torch

from .._version import __version__
from ..integrators.models import SolverConfig
from ..phasecore.models import Trajectory
from .datasets import FLOAT_FORMAT
from .models import ExperimentConfig, ExperimentReport, RunManifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def package_versions() -> Dict[str, str]:
    versions = {
        "hnet_target": __version__,
        "numpy": np.__version__,
        "pandas": pd.__version__,
        "torch": torch.__version__,
    }
    try:
        versions["pydantic"] = metadata.version("pydantic")
    except metadata.PackageNotFoundError:
        pass
    return versions


def build_manifest(
    config: ExperimentConfig,
    *,
    oracle_substeps: int,
    seeds: Dict[str, int],
    solver: SolverConfig,
) -> RunManifest:
    return RunManifest(
        experiment=config.experiment,
        config=config.model_dump(mode="json", exclude={"output_dir"}),
        config_hash=config.config_hash(),
        seeds=seeds,
        oracle_substeps=oracle_substeps,
        solver=solver,
        versions=package_versions(),
    )


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------


def write_frame(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """CSV with full float64 round-trip precision; same frame, same bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug("wrote %s (%d rows)", path, len(frame))
    return path


def trajectory_frame(traj: Trajectory, prefix: str) -> pd.DataFrame:
    d = traj.dim
    names = [f"{prefix}_p{i}" for i in range(1, d + 1)] + [
        f"{prefix}_q{i}" for i in range(1, d + 1)
    ]
    return pd.DataFrame(traj.states, columns=names)


def write_report(report: ExperimentReport, directory: Union[str, Path]) -> Path:
    path = Path(directory) / MANIFEST_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    logger.info("%s report (%s) written to %s", report.manifest.experiment.value, report.status, path)
    return path

# hnet_target/expcli/datasets.py

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ..exceptions import ConfigurationError
from ..hnet_loss.models import DatasetProvenance, FlowDataset
from ..phasecore.flow import reference_flow, reference_trajectory
from ..phasecore.systems import AnalyticSystem
from .models import DatasetSpec

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def generate_dataset(
    spec: DatasetSpec,
    system: AnalyticSystem,
    *,
    substeps: int = 1000,
    seed: Optional[int] = None,
) -> FlowDataset:
    """
    Build a FlowDataset from the exact-flow oracle.

    `seed` overrides `spec.seed` (used for fresh test data). The same spec
    and seed always give the same dataset.

    Raises:
        ConfigurationError for size < 1 or bounds / start of the wrong dimension.
        SingularityError if the oracle leaves the system domain.
    """
    if spec.size < 1:
        raise ConfigurationError(f"dataset size must be >= 1, got {spec.size}")
    substeps = spec.oracle_substeps or substeps
    seed = spec.seed if seed is None else seed
    width = 2 * system.dim

    if spec.mode == "region":
        region = np.asarray(spec.region, dtype=np.float64)
        if region.shape != (width, 2):
            raise ConfigurationError(
                f"region needs {width} (low, high) pairs for {system.name}, got {region.shape[0]}"
            )
        rng = np.random.default_rng(seed)
        states = rng.uniform(region[:, 0], region[:, 1], size=(spec.size, width))
        next_states = reference_flow(system, states, spec.h, substeps)
    else:
        start = np.asarray(spec.start, dtype=np.float64)
        if start.shape != (width,):
            raise ConfigurationError(
                f"trajectory start needs {width} entries for {system.name}, got {start.size}"
            )
        traj = reference_trajectory(system, start, spec.h, spec.size, substeps)
        states, next_states = traj.states[:-1], traj.states[1:]

    logger.info(
        "generated %s dataset: %d pairs of %s, h=%g, seed=%d",
        spec.mode,
        spec.size,
        system.name,
        spec.h,
        seed,
    )
    return FlowDataset(
        states=states,
        next_states=next_states,
        h=spec.h,
        provenance=DatasetProvenance(
            system=system.name,
            mode=spec.mode,
            region=spec.region,
            start=spec.start,
            oracle_substeps=substeps,
            seed=seed if spec.mode == "region" else None,
        ),
    )


# ---------------------------------------------------------------------------
# Files: CSV pairs + JSON provenance sidecar
# ---------------------------------------------------------------------------


def dataset_columns(d: int) -> List[str]:
    names = [f"p{i}" for i in range(1, d + 1)] + [f"q{i}" for i in range(1, d + 1)]
    return names + [f"{name}_next" for name in names]


def save_dataset(
    data: FlowDataset, directory: Union[str, Path], stem: str = "dataset"
) -> Tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"{stem}.csv"
    json_path = directory / f"{stem}.json"

    frame = pd.DataFrame(
        np.concatenate([data.states, data.next_states], axis=1),
        columns=dataset_columns(data.dim),
    )
    frame.to_csv(csv_path, index=False, float_format=FLOAT_FORMAT)
    sidecar = {"h": data.h, "provenance": data.provenance.model_dump(mode="json")}
    json_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True), encoding="utf-8")
    return csv_path, json_path


def load_dataset(csv_path: Union[str, Path]) -> FlowDataset:
    """Read a dataset CSV and its `.json` sidecar (same stem)."""
    csv_path = Path(csv_path)
    json_path = csv_path.with_suffix(".json")
    if not csv_path.exists() or not json_path.exists():
        raise ConfigurationError(f"dataset files not found: {csv_path} / {json_path}")

    frame = pd.read_csv(csv_path, float_precision="round_trip")
    width = frame.shape[1] // 2
    if frame.shape[1] % 2 or list(frame.columns) != dataset_columns(width // 2):
        raise ConfigurationError(f"unexpected dataset columns in {csv_path}: {list(frame.columns)}")

    values = frame.to_numpy(dtype=np.float64)
    try:
        sidecar = json.loads(json_path.read_text(encoding="utf-8"))
        return FlowDataset(
            states=values[:, :width],
            next_states=values[:, width:],
            h=sidecar["h"],
            provenance=DatasetProvenance.model_validate(sidecar["provenance"]),
        )
    except (KeyError, TypeError, json.JSONDecodeError, ValidationError) as exc:
        raise ConfigurationError(f"invalid dataset {csv_path}: {exc}") from exc

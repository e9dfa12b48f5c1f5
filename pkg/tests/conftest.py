# tests/conftest.py

from __future__ import annotations

from typing import Any, Callable

import numpy as np
import pytest

from hnet_target.config import HNetSettings
from hnet_target.diffnet.models import Activation, NetArchitecture
from hnet_target.expcli.datasets import generate_dataset
from hnet_target.expcli.models import PENDULUM_REGION, DatasetSpec, ExperimentConfig
from hnet_target.hnet_loss.models import FlowDataset, TrainConfig
from hnet_target.phasecore.systems import HarmonicOscillator, Kepler, Pendulum


@pytest.fixture(autouse=True)
def clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    # A developer's .env must not leak into the tests.
    for name in (
        "HNET_OUTPUT_DIR",
        "HNET_ORACLE_SUBSTEPS",
        "HNET_LOG_LEVEL",
        "HNET_TORCH_THREADS",
    ):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("hnet_target.expcli.cli.load_dotenv", lambda *a, **k: False)


@pytest.fixture
def pendulum() -> Pendulum:
    return Pendulum()


@pytest.fixture
def kepler() -> Kepler:
    return Kepler()


@pytest.fixture
def harmonic() -> HarmonicOscillator:
    return HarmonicOscillator()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_arch() -> NetArchitecture:
    return NetArchitecture(input_dim=2, hidden_widths=(8, 8), activation=Activation.TANH)


@pytest.fixture(scope="session")
def pendulum_table_data() -> tuple[FlowDataset, FlowDataset]:
    """4000 training and 4000 test pairs from the pendulum region, h = 0.1."""
    spec = DatasetSpec(region=PENDULUM_REGION, size=4000, h=0.1, seed=0)
    pendulum = Pendulum()
    return (
        generate_dataset(spec, pendulum, substeps=1000),
        generate_dataset(spec, pendulum, substeps=1000, seed=1),
    )


@pytest.fixture
def settings(tmp_path) -> HNetSettings:
    return HNetSettings(output_dir=tmp_path / "runs", oracle_substeps=1000)


@pytest.fixture
def tiny_config() -> Callable[..., ExperimentConfig]:
    """
    Factory for fast experiment configs: small nets, short training and
    small datasets. Keyword arguments override any top-level field.
    """

    def build(experiment: str, **overrides: Any) -> ExperimentConfig:
        base = ExperimentConfig.default(experiment)
        fields: dict[str, Any] = {
            "hidden_widths": (8,),
            "training": TrainConfig(iterations=15, learning_rate=1e-2, log_every=5),
            "flow_steps": 10,
            "flow_substeps": 5,
            "order_samples": 4,
        }
        if base.dataset.mode == "region":
            fields["dataset"] = DatasetSpec(
                region=PENDULUM_REGION, size=64, h=0.1, oracle_substeps=200
            )
        else:
            fields["dataset"] = base.dataset.model_copy(update={"size": 10, "oracle_substeps": 200})
            fields["prediction_steps"] = 20
        fields.update(overrides)
        return base.model_copy(update=fields)

    return build


# tests/test_expcli.py

from __future__ import annotations

import json

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

import hnet_target.expcli.runner as runner_module
from hnet_target.diffnet import initialize_parameters
from hnet_target.exceptions import ConfigurationError
from hnet_target.expcli import (
    PENDULUM_REGION,
    DatasetSpec,
    ExperimentConfig,
    ExperimentId,
    ExperimentRunner,
    generate_dataset,
    load_config,
    load_dataset,
    main,
    save_dataset,
)
from hnet_target.expcli.cli import apply_overrides
from hnet_target.hnet_loss import LossHistory, TrainingDivergedError
from hnet_target.integrators import MethodId
from hnet_target.phasecore import reference_flow


def write_config(path, config: ExperimentConfig):
    path.write_text(config.model_dump_json(exclude={"output_dir"}), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


def test_region_dataset_is_deterministic(pendulum):
    spec = DatasetSpec(region=PENDULUM_REGION, size=200, seed=17, oracle_substeps=100)

    first = generate_dataset(spec, pendulum)
    second = generate_dataset(spec, pendulum)
    other = generate_dataset(spec, pendulum, seed=18)

    np.testing.assert_array_equal(first.states, second.states)
    np.testing.assert_array_equal(first.next_states, second.next_states)
    assert not np.array_equal(first.states, other.states)
    assert first.provenance.seed == 17
    assert first.provenance.oracle_substeps == 100


def test_region_dataset_respects_bounds(pendulum):
    spec = DatasetSpec(region=PENDULUM_REGION, size=500, oracle_substeps=10)

    data = generate_dataset(spec, pendulum)

    bounds = np.asarray(PENDULUM_REGION)
    assert np.all(data.states >= bounds[:, 0]) and np.all(data.states <= bounds[:, 1])


def test_trajectory_dataset_chains_the_exact_flow(pendulum):
    spec = DatasetSpec(mode="trajectory", start=[0.0, 1.0], size=40, h=0.1, oracle_substeps=200)

    data = generate_dataset(spec, pendulum)

    assert len(data) == 40
    np.testing.assert_array_equal(data.states[1:], data.next_states[:-1])
    y = np.array([0.0, 1.0])
    for _ in range(40):
        y = reference_flow(pendulum, y, 0.1, substeps=200)
    np.testing.assert_array_equal(data.next_states[-1], y)


def test_empty_dataset_is_a_configuration_error(pendulum):
    with pytest.raises(ConfigurationError):
        generate_dataset(DatasetSpec(region=PENDULUM_REGION, size=0), pendulum)


def test_region_must_match_system_dimension(kepler):
    with pytest.raises(ConfigurationError):
        generate_dataset(DatasetSpec(region=PENDULUM_REGION, size=4), kepler)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mode": "region"},
        {"mode": "trajectory"},
        {"region": [(1.0, 1.0), (0.0, 1.0)]},
        {"region": [(0.0, float("inf")), (0.0, 1.0)]},
    ],
)
def test_dataset_spec_validation(kwargs):
    with pytest.raises(ValidationError):
        DatasetSpec(**kwargs)


def test_dataset_files_round_trip(pendulum, tmp_path):
    data = generate_dataset(DatasetSpec(region=PENDULUM_REGION, size=25, oracle_substeps=50), pendulum)

    csv_path, json_path = save_dataset(data, tmp_path)
    restored = load_dataset(csv_path)

    assert json_path.exists()
    assert list(pd.read_csv(csv_path).columns) == ["p1", "q1", "p1_next", "q1_next"]
    np.testing.assert_array_equal(restored.states, data.states)
    np.testing.assert_array_equal(restored.next_states, data.next_states)
    assert restored.h == data.h
    assert restored.provenance == data.provenance


def test_load_dataset_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_dataset(tmp_path / "missing.csv")

    (tmp_path / "bad.csv").write_text("a,b\n1,2\n", encoding="utf-8")
    (tmp_path / "bad.json").write_text('{"h": 0.1}', encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_dataset(tmp_path / "bad.csv")


# ---------------------------------------------------------------------------
# Configs
# ---------------------------------------------------------------------------


def test_shipped_defaults():
    table = ExperimentConfig.default("table1")
    kepler = ExperimentConfig.default(ExperimentId.KEPLER_PREDICT)
    nt = ExperimentConfig.default("nt_existence")

    assert table.dataset.size == 4000 and table.dataset.h == 0.1
    assert table.hidden_widths == (128, 128)
    assert table.training.iterations == 50_000
    assert table.test_dataset_seed == 1
    assert kepler.system == "kepler" and kepler.dataset.mode == "trajectory"
    assert kepler.dataset.start == [0.0, 1.0, 1.0, 0.2]
    assert nt.h_grid[0] == 0.1 and nt.h_grid[-1] == 1e-4


def test_config_hash_ignores_output_dir(tmp_path):
    config = ExperimentConfig.default("ime_orders")

    moved = config.model_copy(update={"output_dir": tmp_path})
    reseeded = apply_overrides(config, seed=5)

    assert moved.config_hash() == config.config_hash()
    assert reseeded.config_hash() != config.config_hash()
    assert reseeded.dataset.seed == 5 and reseeded.training.seed == 5


def test_load_config_round_trip(tmp_path):
    config = ExperimentConfig.default("pendulum_predict")

    loaded = load_config(write_config(tmp_path / "c.json", config))

    assert loaded == config


@pytest.mark.parametrize(
    "payload",
    [
        {"schema_version": 2, "experiment": "table1"},
        {"experiment": "table1", "unknown_field": 1},
        {"experiment": "table2"},
        [1, 2, 3],
    ],
)
def test_load_config_rejects_invalid_files(tmp_path, payload):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(payload), encoding="utf-8")

    with pytest.raises(ConfigurationError):
        load_config(path)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "nope.json")


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------


def test_ime_orders_report(settings, tmp_path):
    config = ExperimentConfig.default("ime_orders")

    report = ExperimentRunner(config, settings, output_dir=tmp_path / "a").run()
    again = ExperimentRunner(config, settings, output_dir=tmp_path / "b").run()

    orders = report.metrics["orders"]
    assert orders["H"] == pytest.approx(2.0, abs=0.2)
    assert orders["MH1"] == pytest.approx(3.0, abs=0.2)
    assert orders["MH2"] == pytest.approx(4.0, abs=0.2)
    ladder = report.metrics["method_orders"]
    assert ladder["explicit_euler"] == pytest.approx(2.0, abs=0.2)
    assert ladder["implicit_midpoint"] == pytest.approx(3.0, abs=0.2)
    assert ladder["implicit_trapezoidal"] == pytest.approx(3.0, abs=0.2)
    for name in ("ime_orders.csv", "method_orders.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert again.manifest.config_hash == report.manifest.config_hash


def test_nt_existence_report(settings, tmp_path):
    config = ExperimentConfig.default("nt_existence")

    report = ExperimentRunner(config, settings, output_dir=tmp_path).run()

    table = pd.read_csv(tmp_path / "nt_existence.csv", float_precision="round_trip")
    assert table["h"].tolist() == config.h_grid
    ordered = table.sort_values("h")["defect"].tolist()
    assert ordered == sorted(ordered)
    assert report.metrics["defect_ratio"] >= 100


def test_empty_h_grid_is_rejected(settings, tmp_path):
    for experiment in ("nt_existence", "ime_orders"):
        config = ExperimentConfig.default(experiment).model_copy(update={"h_grid": []})
        with pytest.raises(ConfigurationError):
            ExperimentRunner(config, settings, output_dir=tmp_path).run()


def test_tiny_table1_run_is_reproducible(settings, tiny_config, tmp_path):
    config = tiny_config("table1")

    report = ExperimentRunner(config, settings, output_dir=tmp_path / "a").run_table1()
    ExperimentRunner(config, settings, output_dir=tmp_path / "b").run_table1()

    assert report.status == "ok"
    losses = pd.read_csv(tmp_path / "a" / "loss_table.csv")
    assert losses.columns.tolist() == ["candidate", "train_loss", "test_loss"]
    assert losses["candidate"].tolist() == ["net", "H", "MH1", "MH2"]
    stderr = pd.read_csv(tmp_path / "a" / "loss_stderr.csv")
    assert stderr.columns.tolist() == ["candidate", "train_stderr", "test_stderr"]
    assert (stderr[["train_stderr", "test_stderr"]] > 0).all().all()
    assert losses["test_loss"].notna().all()
    flows = pd.read_csv(tmp_path / "a" / "flows.csv")
    assert len(flows) == config.flow_steps + 1
    assert {"t", "H_p1", "H_q1", "net_p1", "MH1_q1", "MH2_p1"} <= set(flows.columns)
    conservation = pd.read_csv(tmp_path / "a" / "conservation.csv")
    assert conservation.loc[0, ["H", "MH1", "MH2"]].tolist() == [0.0, 0.0, 0.0]
    for name in ("loss_table.csv", "loss_history.csv", "flows.csv", "conservation.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    assert set(report.metrics["target_gap"]) == {"H", "MH1", "MH2"}
    assert report.artifacts["checkpoint"] == "checkpoint.json"
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["manifest"]["seeds"] == {"dataset": 0, "test_dataset": 1, "training": 0}
    assert manifest["manifest"]["oracle_substeps"] == 200
    assert {"hnet_target", "numpy", "torch", "pandas"} <= set(manifest["manifest"]["versions"])


def test_tiny_prediction_run(settings, tiny_config, tmp_path):
    config = tiny_config("pendulum_predict")

    report = ExperimentRunner(config, settings, output_dir=tmp_path).run()

    assert set(report.metrics) == {"implicit_midpoint", "implicit_trapezoidal", "comparison"}
    for tag in ("implicit_midpoint", "implicit_trapezoidal"):
        frame = pd.read_csv(tmp_path / f"prediction_{tag}.csv")
        assert len(frame) == 21
        assert frame.loc[0, "global_error"] == 0.0
        assert frame.loc[0, "energy_drift"] == 0.0
        assert report.metrics[tag]["max_global_error"] == pytest.approx(frame["global_error"].max())
        assert (tmp_path / f"checkpoint_{tag}.json").exists()


def test_prediction_without_trapezoidal_has_no_comparison(settings, tiny_config, tmp_path):
    config = tiny_config("pendulum_predict", methods=[MethodId.IMPLICIT_MIDPOINT])

    report = ExperimentRunner(config, settings, output_dir=tmp_path).run()

    assert set(report.metrics) == {"implicit_midpoint"}


def test_prediction_comparison_flags_follow_metrics():
    metrics = {
        "implicit_midpoint": {"max_global_error": 0.02, "energy_drift_slope": -1e-6},
        "implicit_trapezoidal": {"max_global_error": 0.05, "energy_drift_slope": 4e-4},
    }

    comparison = ExperimentRunner._symplectic_comparison(metrics)

    assert comparison["midpoint_error_below_trapezoidal"] is True
    assert comparison["drift_slope_ratio"] == pytest.approx(2.5e-3)


@pytest.mark.slow
def test_default_table1_identifies_the_modified_hamiltonian(settings, tmp_path):
    report = ExperimentRunner(ExperimentConfig.default("table1"), settings, output_dir=tmp_path).run()

    assert report.status == "ok"
    metrics = report.metrics
    net, mh1 = metrics["losses"]["net"], metrics["losses"]["MH1"]
    assert net["train_loss"] <= 1e-5
    assert net["test_loss"] <= 1e-5
    assert net["train_loss"] < 10 * mh1["train_loss"]
    assert net["test_loss"] < 10 * mh1["test_loss"]
    assert metrics["target_gap"]["MH1"] < metrics["target_gap"]["H"]
    amplitude = metrics["conservation_amplitude"]
    assert amplitude["MH2"] < amplitude["MH1"] < amplitude["H"]
    assert metrics["final_train_loss"] <= 1e-2 * metrics["initial_train_loss"]
    train, test = metrics["final_train_loss"], metrics["final_test_loss"]
    assert abs(train - test) <= 3 * min(train, test)


@pytest.mark.slow
@pytest.mark.parametrize("experiment", ["pendulum_predict", "kepler_predict"])
def test_default_prediction_favours_symplectic_midpoint(settings, tmp_path, experiment):
    report = ExperimentRunner(ExperimentConfig.default(experiment), settings, output_dir=tmp_path).run()

    assert report.status == "ok"
    midpoint = report.metrics["implicit_midpoint"]
    trapezoidal = report.metrics["implicit_trapezoidal"]
    assert midpoint["truncated_at"] is None
    assert midpoint["max_global_error"] < trapezoidal["max_global_error"]
    assert abs(midpoint["energy_drift_slope"]) < 0.1 * abs(trapezoidal["energy_drift_slope"])
    for tag in ("implicit_midpoint", "implicit_trapezoidal"):
        history = report.metrics[tag]
        assert history["final_train_loss"] <= 1e-2 * history["initial_train_loss"]
    assert report.metrics["comparison"]["midpoint_error_below_trapezoidal"] is True



def test_train_then_eval_loss_with_checkpoint(settings, tiny_config, tmp_path):
    config = tiny_config("table1")
    runner = ExperimentRunner(config, settings, output_dir=tmp_path)

    trained = runner.run_train()
    evaluated = ExperimentRunner(config, settings, output_dir=tmp_path / "eval").run_eval_loss(
        checkpoint=tmp_path / "checkpoint.json"
    )

    assert list(evaluated.metrics["losses"]) == ["net", "H", "MH1", "MH2"]
    assert evaluated.metrics["losses"]["net"]["train_loss"] == pytest.approx(
        trained.metrics["final_train_loss"], rel=1e-10
    )


def test_generated_files_feed_later_runs(settings, tiny_config, tmp_path):
    config = tiny_config("table1")
    ExperimentRunner(config, settings, output_dir=tmp_path).generate_data()

    data = load_dataset(tmp_path / "dataset.csv")
    report = ExperimentRunner(config, settings, output_dir=tmp_path / "eval").run_eval_loss(data=data)

    assert (tmp_path / "test_dataset.csv").exists()
    assert len(data) == config.dataset.size
    assert report.metrics["losses"]["H"]["test_loss"] is None


def test_diverged_training_yields_failed_report(monkeypatch, settings, tiny_config, small_arch, tmp_path):
    def diverging(*args, **kwargs):
        history = LossHistory()
        history.record(1, 0.5)
        raise TrainingDivergedError(
            "training loss is not finite",
            iteration=2,
            checkpoint=initialize_parameters(small_arch, 0),
            history=history,
        )

    monkeypatch.setattr(runner_module, "train", diverging)
    config = tiny_config("table1", hidden_widths=(8, 8))

    report = ExperimentRunner(config, settings, output_dir=tmp_path).run_table1()

    assert report.status == "failed"
    assert report.metrics["diverged_at"] == 2
    assert "iteration 2" in report.messages[0]
    assert (tmp_path / "loss_history.csv").exists()
    assert (tmp_path / "checkpoint_last_finite.json").exists()


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------


def test_cli_nt_existence(tmp_path, capsys):
    config = ExperimentConfig.default("nt_existence").model_copy(update={"h_grid": [0.1, 0.01]})
    path = write_config(tmp_path / "nt.json", config)

    code = main(["nt-existence", "--config", str(path), "--out", str(tmp_path / "out")])

    assert code == 0
    assert (tmp_path / "out" / "nt_existence.csv").exists()
    assert (tmp_path / "out" / "manifest.json").exists()
    assert "defect_ratio" in capsys.readouterr().out


def test_cli_reports_configuration_errors(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"schema_version": 9, "experiment": "table1"}', encoding="utf-8")

    code = main(["table1", "--config", str(path), "--out", str(tmp_path)])

    assert code == 1
    assert "schema_version" in capsys.readouterr().err


def test_cli_exit_code_for_failed_runs(monkeypatch, tmp_path, tiny_config, small_arch):
    def diverging(*args, **kwargs):
        raise TrainingDivergedError(
            "training loss is not finite",
            iteration=1,
            checkpoint=initialize_parameters(small_arch, 0),
            history=LossHistory(),
        )

    monkeypatch.setattr(runner_module, "train", diverging)
    path = write_config(tmp_path / "t.json", tiny_config("table1", hidden_widths=(8, 8)))

    assert main(["train", "--config", str(path), "--out", str(tmp_path / "out")]) == 2


def test_cli_reads_settings_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("HNET_OUTPUT_DIR", str(tmp_path / "env-runs"))
    monkeypatch.setenv("HNET_ORACLE_SUBSTEPS", "100")
    config = ExperimentConfig.default("nt_existence").model_copy(update={"h_grid": [0.1]})
    path = write_config(tmp_path / "nt.json", config)

    assert main(["nt-existence", "--config", str(path)]) == 0

    manifest = json.loads(
        (tmp_path / "env-runs" / "nt_existence" / "manifest.json").read_text(encoding="utf-8")
    )
    assert manifest["manifest"]["oracle_substeps"] == 100

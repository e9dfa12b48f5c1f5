# hnet_target/expcli/runner.py

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..config import HNetSettings
from ..diffnet.checkpoint import load_checkpoint, save_checkpoint
from ..diffnet.models import NetArchitecture, NetParameters
from ..exceptions import ConfigurationError
from ..hnet_loss.candidates import AnalyticCandidate, CandidateHamiltonian, LearnedCandidate
from ..hnet_loss.exceptions import TrainingDivergedError
from ..hnet_loss.metrics import target_gap
from ..hnet_loss.models import FlowDataset, LossHistory
from ..hnet_loss.residuals import loss_summary
from ..hnet_loss.trainer import train
from ..ime.analysis import (
    candidate_flow,
    conservation_series,
    estimate_order,
    nt_existence_table,
    one_step_defects,
    oscillation_amplitude,
)
from ..ime.pendulum import TruncatedModifiedHamiltonian
from ..integrators.exceptions import DivergenceError
from ..integrators.models import MethodId, MethodSpec, get_method
from ..integrators.stepping import rollout
from ..phasecore.flow import field_of, reference_trajectory
from ..phasecore.models import Trajectory
from ..phasecore.systems import Kepler, Pendulum, get_system
from ..utils import linear_trend
from .datasets import generate_dataset, save_dataset
from .models import ExperimentConfig, ExperimentId, ExperimentReport
from .reports import build_manifest, trajectory_frame, write_frame, write_report

logger = logging.getLogger(__name__)

ORDER_LADDER = (
    MethodId.EXPLICIT_EULER,
    MethodId.SYMPLECTIC_EULER,
    MethodId.IMPLICIT_MIDPOINT,
    MethodId.IMPLICIT_TRAPEZOIDAL,
)


class ExperimentRunner:
    """
    Runs one ExperimentConfig and writes its artifacts (CSV tables,
    checkpoints, manifest.json) into a single output directory.

    Typical usage:

        runner = ExperimentRunner(ExperimentConfig.default("table1"))
        report = runner.run()

    Every run is deterministic: the same config, seeds and oracle settings
    reproduce the same CSV bytes.
    """

    def __init__(
        self,
        config: ExperimentConfig,
        settings: Optional[HNetSettings] = None,
        *,
        output_dir: Optional[Union[str, Path]] = None,
    ) -> None:
        self.config = config
        self.settings = settings or HNetSettings()
        self.system = get_system(config.system)
        self.output_dir = Path(
            output_dir
            or config.output_dir
            or self.settings.output_dir / config.experiment.value
        )
        self._artifacts: Dict[str, str] = {}

    @property
    def oracle_substeps(self) -> int:
        return self.config.dataset.oracle_substeps or self.settings.oracle_substeps

    @property
    def seeds(self) -> Dict[str, int]:
        return {
            "dataset": self.config.dataset.seed,
            "test_dataset": self.config.test_dataset_seed,
            "training": self.config.training.seed,
        }

    @property
    def architecture(self) -> NetArchitecture:
        return self.config.architecture(2 * self.system.dim)

    def run(self, *, data: Optional[FlowDataset] = None) -> ExperimentReport:
        """Dispatch on `config.experiment`."""
        experiment = self.config.experiment
        if experiment is ExperimentId.TABLE1:
            return self.run_table1(data=data)
        if experiment in (ExperimentId.PENDULUM_PREDICT, ExperimentId.KEPLER_PREDICT):
            return self.run_prediction(data=data)
        if experiment is ExperimentId.IME_ORDERS:
            return self.run_ime_orders()
        return self.run_nt_existence()

    # ------------------------------------------------------------------
    # Data
    # ------------------------------------------------------------------

    def datasets(self) -> Tuple[FlowDataset, Optional[FlowDataset]]:
        """
        Training data from `config.dataset`; in region mode also a fresh
        test dataset drawn with `config.test_dataset_seed`.
        """
        spec = self.config.dataset
        train_data = generate_dataset(spec, self.system, substeps=self.oracle_substeps)
        if spec.mode != "region":
            return train_data, None
        test_data = generate_dataset(
            spec,
            self.system,
            substeps=self.oracle_substeps,
            seed=self.config.test_dataset_seed,
        )
        return train_data, test_data

    def generate_data(self) -> ExperimentReport:
        train_data, test_data = self.datasets()
        self._save_dataset(train_data, "dataset")
        metrics: Dict[str, Any] = {"pairs": len(train_data), "h": train_data.h}
        if test_data is not None:
            self._save_dataset(test_data, "test_dataset")
            metrics["test_pairs"] = len(test_data)
        return self._report(metrics=metrics)

    def _resolve_data(
        self, data: Optional[FlowDataset]
    ) -> Tuple[FlowDataset, Optional[FlowDataset]]:
        if data is None:
            return self.datasets()
        if data.dim != self.system.dim:
            raise ConfigurationError(
                f"dataset has d={data.dim} but {self.system.name} has d={self.system.dim}"
            )
        return data, None

    # ------------------------------------------------------------------
    # Training and loss tables
    # ------------------------------------------------------------------

    def train_net(
        self,
        method: Union[MethodSpec, MethodId, str],
        data: FlowDataset,
        test_data: Optional[FlowDataset] = None,
    ) -> Tuple[NetParameters, LossHistory]:
        cfg = self.config.training.model_copy(update={"method": get_method(method).id})
        return train(self.architecture, None, data, cfg, test_data=test_data)

    def run_train(self, *, data: Optional[FlowDataset] = None) -> ExperimentReport:
        method = get_method(self.config.method)
        train_data, test_data = self._resolve_data(data)
        try:
            params, history = self.train_net(method, train_data, test_data)
        except TrainingDivergedError as exc:
            return self._training_failed(exc)

        self._save_training(params, history, method, train_data.h)
        return self._report(metrics=self._history_metrics(history))

    def run_eval_loss(
        self,
        *,
        data: Optional[FlowDataset] = None,
        checkpoint: Optional[Union[str, Path]] = None,
    ) -> ExperimentReport:
        """Loss table of the analytic candidates (plus a saved net, if given)."""
        train_data, test_data = self._resolve_data(data)
        candidates = self.analytic_candidates(train_data.h)
        if checkpoint is not None:
            record = load_checkpoint(checkpoint)
            candidates.insert(0, LearnedCandidate(record.architecture, record.to_parameters()))

        frame = self._loss_table(candidates, train_data, test_data)
        self._write_loss_table(frame)
        return self._report(metrics={"losses": self._loss_metrics(frame)})

    def analytic_candidates(self, h: float) -> List[TruncatedModifiedHamiltonian]:
        """H, plus MH1 and MH2 when a closed form exists for this system and method."""
        method = get_method(self.config.method)
        orders = [0]
        if isinstance(self.system, Pendulum) and method.id is MethodId.SYMPLECTIC_EULER:
            orders += [1, 2]
        return [TruncatedModifiedHamiltonian(self.system, method, k, h) for k in orders]

    def _loss_table(
        self,
        candidates: List[CandidateHamiltonian],
        train_data: FlowDataset,
        test_data: Optional[FlowDataset],
    ) -> pd.DataFrame:
        method = get_method(self.config.method)
        rows = []
        for cand in candidates:
            train_loss, train_err = loss_summary(method, cand, train_data)
            test_loss, test_err = (
                loss_summary(method, cand, test_data) if test_data is not None else (np.nan, np.nan)
            )
            rows.append(
                {
                    "candidate": cand.name,
                    "train_loss": train_loss,
                    "train_stderr": train_err,
                    "test_loss": test_loss,
                    "test_stderr": test_err,
                }
            )
            logger.info("%s loss under %s: train %.4e", cand.name, method.id.value, train_loss)
        return pd.DataFrame(rows)

    # ------------------------------------------------------------------
    # Learned target vs. modified Hamiltonians
    # ------------------------------------------------------------------

    def run_table1(self, *, data: Optional[FlowDataset] = None) -> ExperimentReport:
        """
        Train with the configured loss integrator, then compare the network
        with H, MH1 and MH2: loss table, flows from `flow_start` and the
        conservation of each candidate along the learned flow.
        """
        cfg = self.config
        method = get_method(cfg.method)
        train_data, test_data = self._resolve_data(data)
        try:
            params, history = self.train_net(method, train_data, test_data)
        except TrainingDivergedError as exc:
            return self._training_failed(exc)
        self._save_training(params, history, method, train_data.h)

        net = LearnedCandidate(self.architecture, params)
        candidates = self.analytic_candidates(train_data.h)
        losses = self._loss_table([net, *candidates], train_data, test_data)
        self._write_loss_table(losses)

        h, n = train_data.h, cfg.flow_steps
        start = np.asarray(cfg.flow_start, dtype=np.float64)
        exact = reference_trajectory(self.system, start, h, n, self.oracle_substeps)
        learned = candidate_flow(net, start, h, n, cfg.flow_substeps, cfg.solver)
        flows = [pd.DataFrame({"t": exact.times}), trajectory_frame(exact, "H")]
        flows.append(trajectory_frame(learned, "net"))
        for cand in candidates[1:]:
            flows.append(
                trajectory_frame(candidate_flow(cand, start, h, n, cfg.flow_substeps, cfg.solver), cand.name)
            )
        self._write("flows", pd.concat(flows, axis=1))

        conservation = {"t": learned.times}
        amplitudes = {}
        for cand in candidates:
            series = conservation_series(cand, learned)
            conservation[cand.name] = series
            amplitudes[cand.name] = oscillation_amplitude(series)
        self._write("conservation", pd.DataFrame(conservation))

        sample = (test_data if test_data is not None else train_data).states
        # Kepler is singular at the origin
        anchored = net.anchored(candidates[0], start if isinstance(self.system, Kepler) else None)
        metrics: Dict[str, Any] = {
            "losses": self._loss_metrics(losses),
            "target_gap": {c.name: target_gap(net, c, sample) for c in candidates},
            "anchored_max_deviation": {
                c.name: float(np.max(np.abs(anchored.value(sample) - c.value(sample))))
                for c in candidates
            },
            "conservation_amplitude": amplitudes,
            "flow_end_distance": float(np.linalg.norm(learned.states[-1] - exact.states[-1])),
        }
        metrics.update(self._history_metrics(history))
        return self._report(metrics=metrics)

    # ------------------------------------------------------------------
    # Prediction
    # ------------------------------------------------------------------

    def run_prediction(self, *, data: Optional[FlowDataset] = None) -> ExperimentReport:
        """
        For every method in `config.methods`: train on the trajectory data,
        roll the learned field forward with the same method from the
        first state and compare with the exact trajectory.
        """
        cfg = self.config
        train_data, _ = self._resolve_data(data)
        h = train_data.h
        start = train_data.states[0]
        n = cfg.prediction_steps or 5 * len(train_data)
        exact = reference_trajectory(self.system, start, h, n, self.oracle_substeps)
        energy = AnalyticCandidate.from_system(self.system)

        status = "ok"
        messages: List[str] = []
        metrics: Dict[str, Any] = {}
        for method in cfg.methods:
            spec = get_method(method)
            tag = spec.id.value
            try:
                params, history = self.train_net(spec, train_data)
            except TrainingDivergedError as exc:
                self._write(f"loss_history_{tag}", exc.history.to_frame())
                messages.append(f"{tag}: {exc}")
                status = "failed"
                continue
            self._save_training(params, history, spec, h, suffix=f"_{tag}")

            net = LearnedCandidate(self.architecture, params)
            truncated_at = None
            try:
                predicted = rollout(spec, field_of(net.gradient), start, h, n, cfg.solver)
            except DivergenceError as exc:
                predicted = exc.partial
                truncated_at = exc.step_index
                messages.append(f"{tag}: rollout stopped, {exc}")
                logger.warning("%s rollout stopped at step %s", tag, exc.step_index)

            m = len(predicted)
            reference = Trajectory(states=exact.states[:m], h=h)
            error = np.linalg.norm(predicted.states - reference.states, axis=1)
            drift = conservation_series(energy, predicted)
            frame = pd.concat(
                [
                    pd.DataFrame({"step": np.arange(m), "t": predicted.times}),
                    trajectory_frame(predicted, "pred"),
                    trajectory_frame(reference, "ref"),
                    pd.DataFrame({"global_error": error, "energy_drift": drift}),
                ],
                axis=1,
            )
            self._write(f"prediction_{tag}", frame)

            metrics[tag] = {
                "max_global_error": float(error.max()),
                "energy_drift_slope": linear_trend(predicted.times, drift) if m > 1 else None,
                "max_abs_energy_drift": float(np.abs(drift).max()),
                "steps": m - 1,
                "truncated_at": truncated_at,
                **self._history_metrics(history),
            }
            logger.info(
                "%s prediction: max error %.4e, drift slope %.4e",
                tag,
                metrics[tag]["max_global_error"],
                metrics[tag]["energy_drift_slope"],
            )
        comparison = self._symplectic_comparison(metrics)
        if comparison is not None:
            metrics["comparison"] = comparison
        return self._report(status=status, metrics=metrics, messages=messages)

    @staticmethod
    def _symplectic_comparison(metrics: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        """Midpoint against trapezoidal: global error and energy-drift slope."""
        mid = metrics.get(MethodId.IMPLICIT_MIDPOINT.value)
        trap = metrics.get(MethodId.IMPLICIT_TRAPEZOIDAL.value)
        if mid is None or trap is None:
            return None
        mid_slope, trap_slope = mid["energy_drift_slope"], trap["energy_drift_slope"]
        ratio = None
        if mid_slope is not None and trap_slope:
            ratio = abs(mid_slope) / abs(trap_slope)
        return {
            "midpoint_error_below_trapezoidal": mid["max_global_error"] < trap["max_global_error"],
            "drift_slope_ratio": ratio,
        }


    # ------------------------------------------------------------------
    # Inverse-modified-equation checks
    # ------------------------------------------------------------------

    def run_ime_orders(self) -> ExperimentReport:
        """
        Log-log slopes of the one-step defect for every available truncation
        under `config.method`, plus the order ladder of the integrator suite
        (truncation k = 0 under each method).
        """
        cfg = self.config
        if cfg.dataset.region is None:
            raise ConfigurationError("ime_orders samples its states from dataset.region")
        region = np.asarray(cfg.dataset.region, dtype=np.float64)
        if region.shape != (2 * self.system.dim, 2):
            raise ConfigurationError(f"region does not match {self.system.name}")
        if not cfg.h_grid:
            raise ConfigurationError("h grid is empty")
        rng = np.random.default_rng(cfg.dataset.seed)
        states = rng.uniform(
            region[:, 0], region[:, 1], size=(cfg.order_samples, 2 * self.system.dim)
        )

        truncation_rows, truncation_orders = self._order_rows(
            self.analytic_candidates(cfg.h_grid[0]), states, "truncation"
        )
        ladder = [
            TruncatedModifiedHamiltonian(self.system, m, 0, cfg.h_grid[0]) for m in ORDER_LADDER
        ]
        method_rows, method_orders = self._order_rows(ladder, states, "method")

        self._write("ime_orders", pd.DataFrame(truncation_rows))
        self._write("method_orders", pd.DataFrame(method_rows))
        return self._report(metrics={"orders": truncation_orders, "method_orders": method_orders})

    def _order_rows(
        self,
        truncations: List[TruncatedModifiedHamiltonian],
        states: np.ndarray,
        label: str,
    ) -> Tuple[List[Dict[str, Any]], Dict[str, float]]:
        h_grid = self.config.h_grid
        rows: List[Dict[str, Any]] = []
        orders: Dict[str, float] = {}
        for tmh in truncations:
            key = tmh.name if label == "truncation" else tmh.method.id.value
            defects = one_step_defects(
                self.system, tmh.method, tmh, states, h_grid, self.oracle_substeps, self.config.solver
            )
            orders[key] = estimate_order(h_grid, defects)
            rows.extend({label: key, "h": h, "defect": d} for h, d in zip(h_grid, defects))
            logger.info("%s %s: order %.3f", label, key, orders[key])
        return rows, orders

    def run_nt_existence(self) -> ExperimentReport:
        """Gradient-symmetry defect of the explicit-Euler target over `h_grid`."""
        cfg = self.config
        table = nt_existence_table(self.system, cfg.symmetry_state, cfg.h_grid, self.oracle_substeps)
        frame = pd.DataFrame(table, columns=["h", "defect"])
        self._write("nt_existence", frame)

        largest = max(table, key=lambda row: row[0])
        smallest = min(table, key=lambda row: row[0])
        metrics: Dict[str, Any] = {"defects": {f"{h:g}": d for h, d in table}}
        if smallest[1] > 0:
            metrics["defect_ratio"] = largest[1] / smallest[1]
        return self._report(metrics=metrics)

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _write(self, name: str, frame: pd.DataFrame) -> Path:
        path = write_frame(frame, self.output_dir / f"{name}.csv")
        self._artifacts[name] = path.name
        return path

    def _write_loss_table(self, frame: pd.DataFrame) -> None:
        self._write("loss_table", frame[["candidate", "train_loss", "test_loss"]])
        self._write("loss_stderr", frame[["candidate", "train_stderr", "test_stderr"]])

    def _save_dataset(self, data: FlowDataset, stem: str) -> None:
        csv_path, json_path = save_dataset(data, self.output_dir, stem)
        self._artifacts[stem] = csv_path.name
        self._artifacts[f"{stem}_provenance"] = json_path.name

    def _save_training(
        self,
        params: NetParameters,
        history: LossHistory,
        method: MethodSpec,
        h: float,
        suffix: str = "",
    ) -> None:
        path = save_checkpoint(
            self.output_dir / f"checkpoint{suffix}.json",
            self.architecture,
            params,
            metadata={
                "method": method.id.value,
                "h": h,
                "iterations": self.config.training.iterations,
                "final_train_loss": history.final_train_loss,
                "final_test_loss": history.final_test_loss,
                "config_hash": self.config.config_hash(),
            },
        )
        self._artifacts[f"checkpoint{suffix}"] = path.name
        self._write(f"loss_history{suffix}", history.to_frame())

    def _training_failed(self, exc: TrainingDivergedError) -> ExperimentReport:
        logger.error("training failed: %s", exc)
        self._write("loss_history", exc.history.to_frame())
        path = save_checkpoint(
            self.output_dir / "checkpoint_last_finite.json",
            self.architecture,
            exc.checkpoint,
            metadata={"diverged_at": exc.iteration},
        )
        self._artifacts["checkpoint_last_finite"] = path.name
        return self._report(
            status="failed",
            metrics={"diverged_at": exc.iteration, "pair_index": exc.pair_index},
            messages=[str(exc)],
        )

    @staticmethod
    def _history_metrics(history: LossHistory) -> Dict[str, Optional[float]]:
        return {
            "initial_train_loss": history.initial_train_loss,
            "final_train_loss": history.final_train_loss,
            "final_test_loss": history.final_test_loss,
        }

    @staticmethod
    def _loss_metrics(frame: pd.DataFrame) -> Dict[str, Dict[str, Optional[float]]]:
        out = {}
        for row in frame.itertuples(index=False):
            out[row.candidate] = {
                "train_loss": float(row.train_loss),
                "test_loss": None if np.isnan(row.test_loss) else float(row.test_loss),
            }
        return out

    def _report(
        self,
        *,
        status: str = "ok",
        metrics: Optional[Dict[str, Any]] = None,
        messages: Optional[List[str]] = None,
    ) -> ExperimentReport:
        manifest = build_manifest(
            self.config,
            oracle_substeps=self.oracle_substeps,
            seeds=self.seeds,
            solver=self.config.solver,
        )
        report = ExperimentReport(
            status=status,
            manifest=manifest,
            metrics=metrics or {},
            artifacts=dict(self._artifacts),
            messages=messages or [],
        )
        write_report(report, self.output_dir)
        return report

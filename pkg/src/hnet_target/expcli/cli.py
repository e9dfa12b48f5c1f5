# hnet_target/expcli/cli.py

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence

import torch
from dotenv import load_dotenv
from pydantic import ValidationError

from ..config import HNetSettings
from ..exceptions import ConfigurationError, HNetError
from .datasets import load_dataset
from .models import SCHEMA_VERSION, ExperimentConfig, ExperimentId, ExperimentReport
from .runner import ExperimentRunner

logger = logging.getLogger(__name__)

# Default experiment behind each subcommand when no --config is given.
COMMAND_DEFAULTS: Dict[str, ExperimentId] = {
    "gen-data": ExperimentId.TABLE1,
    "train": ExperimentId.TABLE1,
    "eval-loss": ExperimentId.TABLE1,
    "predict": ExperimentId.PENDULUM_PREDICT,
    "table1": ExperimentId.TABLE1,
    "ime-orders": ExperimentId.IME_ORDERS,
    "nt-existence": ExperimentId.NT_EXISTENCE,
}


def load_config(path: str | Path) -> ExperimentConfig:
    """Read an ExperimentConfig from JSON, rejecting unknown schema versions."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc

    version = raw.get("schema_version", SCHEMA_VERSION) if isinstance(raw, dict) else None
    if version != SCHEMA_VERSION:
        raise ConfigurationError(
            f"unsupported config schema_version {version!r} (expected {SCHEMA_VERSION})"
        )
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigurationError(
            f"invalid config {path}",
            details={"errors": exc.errors(include_url=False)},
        ) from exc


def apply_overrides(
    config: ExperimentConfig,
    *,
    out: Optional[str] = None,
    seed: Optional[int] = None,
) -> ExperimentConfig:
    """`--seed` replaces both the dataset and the training seed."""
    update: Dict[str, object] = {}
    if out is not None:
        update["output_dir"] = Path(out)
    if seed is not None:
        if seed < 0:
            raise ConfigurationError(f"seed must be >= 0, got {seed}")
        update["dataset"] = config.dataset.model_copy(update={"seed": seed})
        update["training"] = config.training.model_copy(update={"seed": seed})
    return config.model_copy(update=update) if update else config


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hnet-target",
        description="Learn Hamiltonians with the integrator as a loss hyper-parameter.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--config", help="Experiment config (JSON).")
        sub.add_argument("--out", help="Output directory.")
        sub.add_argument("--seed", type=int, help="Override dataset and training seeds.")
        return sub

    add("gen-data", "Generate training (and test) datasets from the exact flow.")
    for name, help_text in (
        ("train", "Train a network with the configured loss integrator."),
        ("table1", "Compare the learned target with H, MH1 and MH2."),
    ):
        add(name, help_text).add_argument("--data", help="Dataset CSV written by gen-data.")

    eval_loss = add("eval-loss", "Loss table of H, MH1, MH2 and optionally a saved net.")
    eval_loss.add_argument("--data", help="Dataset CSV written by gen-data.")
    eval_loss.add_argument("--checkpoint", help="Checkpoint JSON written by train.")

    predict = add("predict", "Train with each method and predict the trajectory.")
    predict.add_argument("--data", help="Dataset CSV written by gen-data.")
    predict.add_argument(
        "--system",
        choices=("pendulum", "kepler"),
        help="Shipped prediction experiment to run when no --config is given.",
    )

    add("ime-orders", "Order of the one-step defect of H, MH1 and MH2.")
    add("nt-existence", "Symmetry defect of the explicit-Euler network target.")
    return parser


def _configure(settings: HNetSettings) -> None:
    logging.basicConfig(
        level=settings.logging_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if settings.torch_threads is not None:
        torch.set_num_threads(settings.torch_threads)


def _config_for(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
    elif args.command == "predict" and getattr(args, "system", None) == "kepler":
        config = ExperimentConfig.default(ExperimentId.KEPLER_PREDICT)
    else:
        config = ExperimentConfig.default(COMMAND_DEFAULTS[args.command])
    return apply_overrides(config, out=args.out, seed=args.seed)


def _dispatch(runner: ExperimentRunner, args: argparse.Namespace) -> ExperimentReport:
    data = load_dataset(args.data) if getattr(args, "data", None) else None
    handlers: Dict[str, Callable[[], ExperimentReport]] = {
        "gen-data": runner.generate_data,
        "train": lambda: runner.run_train(data=data),
        "eval-loss": lambda: runner.run_eval_loss(
            data=data, checkpoint=getattr(args, "checkpoint", None)
        ),
        "predict": lambda: runner.run_prediction(data=data),
        "table1": lambda: runner.run_table1(data=data),
        "ime-orders": runner.run_ime_orders,
        "nt-existence": runner.run_nt_existence,
    }
    return handlers[args.command]()


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of the `hnet-target` command.

    Exit codes: 0 on success, 1 on configuration or numerical errors,
    2 when the run completed but reported a failure (e.g. diverged training).
    """
    load_dotenv()
    args = build_parser().parse_args(argv)

    try:
        settings = HNetSettings.from_env()
    except (ValidationError, ValueError) as exc:
        print(f"error: invalid HNET_* environment: {exc}", file=sys.stderr)
        return 1
    _configure(settings)

    try:
        config = _config_for(args)
        runner = ExperimentRunner(config, settings)
        report = _dispatch(runner, args)
    except HNetError as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return 1

    print(json.dumps(report.metrics, indent=2, sort_keys=True, default=str))
    print(f"artifacts written to {runner.output_dir}")
    return 0 if report.status == "ok" else 2


if __name__ == "__main__":
    sys.exit(main())

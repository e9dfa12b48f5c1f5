# hnet_target/utils.py

from __future__ import annotations

import hashlib
import json
import logging
from typing import Any, Callable, Sequence

import numpy as np

from .exceptions import ShapeError

logger = logging.getLogger(__name__)


def central_difference_gradient(
    func: Callable[[np.ndarray], float],
    x0: np.ndarray,
    eps: float = 1e-5,
) -> np.ndarray:
    """
    Centered finite-difference gradient of a scalar function of a vector.

    Used as an independent oracle for analytic and autograd gradients.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    grad = np.zeros_like(x0)
    x = x0.copy()
    for j in range(x0.size):
        x[j] = x0[j] + eps
        fplus = func(x)
        x[j] = x0[j] - eps
        fminus = func(x)
        x[j] = x0[j]
        grad[j] = (fplus - fminus) / (2 * eps)
    return grad


def central_difference_jacobian(
    func: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    eps: float = 1e-5,
) -> np.ndarray:
    """
    Centered finite-difference Jacobian D[i, j] = d func_i / d x_j.

    All 2n perturbed points are stacked into one batch so a vectorised
    `func` (accepting shape (m, n)) is evaluated once.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim != 1:
        raise ShapeError("Jacobian base point must be a vector", expected="(n,)", actual=x0.shape)
    n = x0.size
    offsets = eps * np.eye(n)
    points = np.concatenate([x0 + offsets, x0 - offsets], axis=0)
    values = np.asarray(func(points), dtype=np.float64)
    plus, minus = values[:n], values[n:]
    return ((plus - minus) / (2 * eps)).T


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def linear_trend(ts: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of values against ts."""
    ts = np.asarray(ts, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if ts.size < 2:
        return 0.0
    slope, _ = np.polyfit(ts, values, 1)
    return float(slope)


def stable_hash(payload: Any) -> str:
    """SHA-256 of the canonical (sorted-key) JSON rendering of payload."""
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()

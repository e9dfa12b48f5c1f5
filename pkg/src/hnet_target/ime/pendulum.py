# hnet_target/ime/pendulum.py

from __future__ import annotations

from typing import Tuple, Union

import numpy as np

from ..hnet_loss.candidates import AnalyticCandidate
from ..integrators.models import MethodId, MethodSpec, get_method
from ..phasecore.systems import AnalyticSystem, Pendulum
from .exceptions import UnsupportedTruncationError

ArrayLike = Union[float, np.ndarray]


def pendulum_mh(k: int, p: ArrayLike, q: ArrayLike, h: float) -> ArrayLike:
    """
    Order-k truncation of the inverse-modified Hamiltonian of the pendulum
    under symplectic Euler:

        MH1 = p^2/2 - cos q + (h/2) p sin q
        MH2 = MH1 + (h^2/6) (p^2 cos q + sin^2 q)
    """
    if k not in (1, 2):
        raise UnsupportedTruncationError(f"pendulum truncations exist for k in {{1, 2}}, got {k}")
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    value = 0.5 * p**2 - np.cos(q) + 0.5 * h * p * np.sin(q)
    if k == 2:
        value = value + (h**2 / 6.0) * (p**2 * np.cos(q) + np.sin(q) ** 2)
    return float(value) if value.ndim == 0 else value


def pendulum_mh_gradient(
    k: int, p: ArrayLike, q: ArrayLike, h: float
) -> Tuple[np.ndarray, np.ndarray]:
    """(dMHk/dp, dMHk/dq)."""
    if k not in (1, 2):
        raise UnsupportedTruncationError(f"pendulum truncations exist for k in {{1, 2}}, got {k}")
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    dp = p + 0.5 * h * np.sin(q)
    dq = np.sin(q) + 0.5 * h * p * np.cos(q)
    if k == 2:
        c = h**2 / 6.0
        dp = dp + c * 2.0 * p * np.cos(q)
        dq = dq + c * (2.0 * np.sin(q) * np.cos(q) - p**2 * np.sin(q))
    return dp, dq


class TruncatedModifiedHamiltonian(AnalyticCandidate):
    """
    Truncation of order k of the inverse-modified Hamiltonian of `base`
    under `method`, with h bound.

    Order 0 is the base Hamiltonian itself for any (system, method). Orders
    1 and 2 are shipped for the pendulum under symplectic Euler.
    """

    def __init__(
        self,
        base: AnalyticSystem,
        method: Union[MethodSpec, MethodId, str],
        k: int,
        h: float,
    ) -> None:
        self.base = base
        self.method = get_method(method)
        self.k = k
        self.h = h

        if k == 0:
            super().__init__("H", base.hamiltonian, base.gradient)
            return
        if not (
            isinstance(base, Pendulum)
            and self.method.id is MethodId.SYMPLECTIC_EULER
            and k in (1, 2)
        ):
            raise UnsupportedTruncationError(
                f"no closed-form order-{k} truncation for {base.name} under "
                f"{self.method.id.value}"
            )
        super().__init__(f"MH{k}", self._mh_value, self._mh_gradient)

    def at(self, h: float) -> "TruncatedModifiedHamiltonian":
        """Same truncation with a different step size bound."""
        return TruncatedModifiedHamiltonian(self.base, self.method, self.k, h)

    def _mh_value(self, arr: np.ndarray) -> np.ndarray:
        arr = self.base.validate(arr)
        return pendulum_mh(self.k, arr[..., 0], arr[..., 1], self.h)

    def _mh_gradient(self, arr: np.ndarray) -> np.ndarray:
        arr = self.base.validate(arr)
        dp, dq = pendulum_mh_gradient(self.k, arr[..., 0], arr[..., 1], self.h)
        return np.stack([dp, dq], axis=-1)

    def __repr__(self) -> str:
        return (
            f"TruncatedModifiedHamiltonian(base={self.base.name!r}, "
            f"method={self.method.id.value!r}, k={self.k}, h={self.h:g})"
        )

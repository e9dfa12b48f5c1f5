# hnet_target/hnet_loss/metrics.py

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from ..exceptions import ConfigurationError
from ..phasecore.models import PhaseState, as_phase_array
from .candidates import CandidateHamiltonian


def target_gap(
    cand_a: CandidateHamiltonian,
    cand_b: CandidateHamiltonian,
    sample: Union[np.ndarray, Sequence[PhaseState]],
) -> float:
    """
    RMS over the sample of A(y) - B(y) - c*, where c* is the sample mean of
    A - B. Removing c* makes the comparison blind to the additive constant
    that the loss cannot identify.
    """
    if isinstance(sample, (list, tuple)):
        if not sample:
            raise ConfigurationError("target gap needs a nonempty sample")
        states = np.stack([as_phase_array(s) for s in sample])
    else:
        states = np.atleast_2d(as_phase_array(sample))
    if states.shape[0] == 0:
        raise ConfigurationError("target gap needs a nonempty sample")

    diff = np.asarray(cand_a.value(states)) - np.asarray(cand_b.value(states))
    centered = diff - diff.mean()
    return float(np.sqrt(np.mean(centered**2)))

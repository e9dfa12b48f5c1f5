# tests/test_ime.py

from __future__ import annotations

import math

import numpy as np
import pytest

from hnet_target.exceptions import ConfigurationError
from hnet_target.expcli.models import PENDULUM_REGION
from hnet_target.hnet_loss import AnalyticCandidate, as_candidate
from hnet_target.ime import (
    PrecisionError,
    TruncatedModifiedHamiltonian,
    UnsupportedTruncationError,
    candidate_flow,
    conservation_series,
    estimate_order,
    gradient_symmetry_defect,
    nt_existence_table,
    one_step_defects,
    oscillation_amplitude,
    pendulum_mh,
    pendulum_mh_gradient,
    verify_target_order,
)
from hnet_target.integrators import step
from hnet_target.phasecore import field_of, reference_trajectory, symplecticity_defect
from hnet_target.utils import central_difference_gradient, central_difference_jacobian

H_GRID = [0.1, 0.05, 0.025, 0.0125]


@pytest.fixture
def region_states(rng) -> np.ndarray:
    bounds = np.asarray(PENDULUM_REGION)
    return rng.uniform(bounds[:, 0], bounds[:, 1], size=(10, 2))


# ---------------------------------------------------------------------------
# Closed-form pendulum truncations
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "k, p, q, expected",
    [
        (1, 1.0, 0.0, -0.5),
        (2, 1.0, 0.0, -0.5 + 0.01 / 6),
        (1, 0.0, 1.0, -math.cos(1.0)),
    ],
)
def test_pendulum_mh_values(k, p, q, expected):
    assert pendulum_mh(k, p, q, 0.1) == pytest.approx(expected, abs=1e-15)


def test_mh2_value_digits():
    assert pendulum_mh(2, 1.0, 0.0, 0.1) == pytest.approx(-0.4983333, abs=1e-7)


@pytest.mark.parametrize("k", [1, 2])
def test_zero_step_recovers_h(pendulum, k, rng):
    for p, q in rng.uniform(-1.0, 1.0, size=(5, 2)):
        assert pendulum_mh(k, p, q, 0.0) == pytest.approx(pendulum.hamiltonian([p, q]), abs=1e-15)


@pytest.mark.parametrize("k", [1, 2])
def test_mh_gradient_matches_finite_differences(k, rng):
    for p, q in rng.uniform(-1.5, 1.5, size=(5, 2)):
        fd = central_difference_gradient(lambda y: pendulum_mh(k, y[0], y[1], 0.1), np.array([p, q]))
        dp, dq = pendulum_mh_gradient(k, p, q, 0.1)
        np.testing.assert_allclose([dp, dq], fd, rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("k", [0, 3])
def test_unsupported_orders(k):
    with pytest.raises(UnsupportedTruncationError):
        pendulum_mh(k, 1.0, 0.0, 0.1)


def test_truncations_only_for_pendulum_under_symplectic_euler(pendulum, kepler):
    with pytest.raises(UnsupportedTruncationError):
        TruncatedModifiedHamiltonian(pendulum, "implicit_midpoint", 1, 0.1)
    with pytest.raises(UnsupportedTruncationError):
        TruncatedModifiedHamiltonian(kepler, "symplectic_euler", 1, 0.1)

    base = TruncatedModifiedHamiltonian(kepler, "implicit_midpoint", 0, 0.1)
    assert base.name == "H"
    assert base.value([0.0, 1.0, 1.0, 0.0]) == pytest.approx(kepler.hamiltonian([0.0, 1.0, 1.0, 0.0]))


def test_truncation_rebinds_h(pendulum):
    mh1 = TruncatedModifiedHamiltonian(pendulum, "symplectic_euler", 1, 0.1)

    rebound = mh1.at(0.05)

    assert rebound.name == "MH1"
    assert rebound.value([1.0, 1.0]) == pytest.approx(pendulum_mh(1, 1.0, 1.0, 0.05))
    assert "k=1" in repr(rebound)


# ---------------------------------------------------------------------------
# Order of the target error
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("k, expected", [(0, 2.0), (1, 3.0), (2, 4.0)])
def test_order_ladder(pendulum, region_states, k, expected):
    truncation = TruncatedModifiedHamiltonian(pendulum, "symplectic_euler", k, 0.1)

    slope = verify_target_order(pendulum, "symplectic_euler", truncation, region_states, H_GRID)

    assert slope == pytest.approx(expected, abs=0.2)


def test_one_step_defects_shrink_with_truncation_order(pendulum, region_states):
    defects = [
        one_step_defects(
            pendulum,
            "symplectic_euler",
            TruncatedModifiedHamiltonian(pendulum, "symplectic_euler", k, 0.1),
            region_states,
            H_GRID,
        )
        for k in (0, 1, 2)
    ]

    assert np.all(defects[0] > defects[1])
    assert np.all(defects[1] > defects[2])


def test_order_fit_refuses_round_off_defects(pendulum, region_states):
    mh2 = TruncatedModifiedHamiltonian(pendulum, "symplectic_euler", 2, 0.1)

    with pytest.raises(PrecisionError) as excinfo:
        verify_target_order(
            pendulum, "symplectic_euler", mh2, region_states, [1e-5, 5e-6, 2.5e-6, 1.25e-6]
        )

    assert excinfo.value.defect <= 1e-13


def test_estimate_order_on_exact_power_law():
    grid = [0.4, 0.2, 0.1, 0.05]

    assert estimate_order(grid, [h**3 for h in grid]) == pytest.approx(3.0, abs=1e-12)


def test_estimate_order_accepts_round_off_below_the_largest_h():
    grid = [0.4, 0.2, 0.1, 0.05]
    defects = [1e-3, 1e-6, 1e-10, 5e-14]

    slope = estimate_order(grid, defects)

    assert np.isfinite(slope)
    assert slope > 8.0


def test_estimate_order_refuses_round_off_at_the_largest_h():
    with pytest.raises(PrecisionError) as excinfo:
        estimate_order([0.4, 0.2, 0.1, 0.05], [5e-14, 1e-14, 1e-15, 1e-16])

    assert excinfo.value.h == 0.4


def test_estimate_order_refuses_zero_defect():
    with pytest.raises(PrecisionError) as excinfo:
        estimate_order([0.4, 0.2, 0.1, 0.05], [1e-3, 1e-6, 0.0, 1e-12])

    assert excinfo.value.h == 0.1



@pytest.mark.parametrize(
    "grid", [[0.1, 0.05, 0.025], [0.1, 0.05, 0.05, 0.01], [0.0125, 0.025, 0.05, 0.1], [0.1, 0.05, 0.0, -0.1]]
)
def test_order_grid_validation(pendulum, region_states, grid):
    h_only = TruncatedModifiedHamiltonian(pendulum, "symplectic_euler", 0, 0.1)

    with pytest.raises(ConfigurationError):
        one_step_defects(pendulum, "symplectic_euler", h_only, region_states, grid)


@pytest.mark.parametrize("k", [1, 2])
def test_symplectic_euler_on_truncations_stays_symplectic(pendulum, region_states, k):
    field = field_of(TruncatedModifiedHamiltonian(pendulum, "symplectic_euler", k, 0.1).gradient)
    for y in region_states[:5]:
        jac = central_difference_jacobian(lambda pts: step("symplectic_euler", field, pts, 0.1), y, 1e-6)
        assert symplecticity_defect(jac) <= 1e-6


# ---------------------------------------------------------------------------
# Existence of the explicit-Euler network target
# ---------------------------------------------------------------------------


def test_pendulum_target_gradient_is_not_symmetric(pendulum):
    coarse = gradient_symmetry_defect(pendulum, [0.0, 1.0], 0.1)
    fine = gradient_symmetry_defect(pendulum, [0.0, 1.0], 1e-3)

    assert coarse >= 1e-4
    # h |cos q| to leading order
    assert coarse == pytest.approx(0.1 * math.cos(1.0), rel=0.05)
    assert coarse / fine >= 50


def test_harmonic_target_defect_has_closed_form(harmonic):
    for h in (0.1, 0.5):
        defect = gradient_symmetry_defect(harmonic, [0.3, -0.2], h)
        assert defect == pytest.approx(2 * (1 - math.cos(h)) / h, rel=1e-6)


def test_nt_existence_table_grows_with_h(pendulum):
    table = nt_existence_table(pendulum, [0.0, 1.0], [0.01, 0.02, 0.05, 0.1])

    assert [h for h, _ in table] == [0.01, 0.02, 0.05, 0.1]
    defects = [d for _, d in table]
    assert defects == sorted(defects)


def test_nt_existence_table_rejects_empty_grid(pendulum):
    with pytest.raises(ConfigurationError):
        nt_existence_table(pendulum, [0.0, 1.0], [])


# ---------------------------------------------------------------------------
# Conservation series
# ---------------------------------------------------------------------------


def test_constant_candidate_has_flat_series(pendulum):
    traj = reference_trajectory(pendulum, [0.0, 1.0], 0.1, 10, substeps=100)
    constant = AnalyticCandidate(
        "const", lambda y: np.full(np.shape(y)[:-1], 3.0), lambda y: np.zeros_like(y)
    )

    np.testing.assert_array_equal(conservation_series(constant, traj), np.zeros(11))


def test_exact_flow_conserves_h(pendulum):
    traj = reference_trajectory(pendulum, [0.0, 1.0], 0.1, 50)

    series = conservation_series(as_candidate(pendulum), traj)

    assert series[0] == 0.0
    assert np.max(np.abs(series)) <= 1e-9
    assert oscillation_amplitude(series) <= 2e-9


def test_truncation_flow_conserves_its_own_hamiltonian(pendulum):
    mh1 = TruncatedModifiedHamiltonian(pendulum, "symplectic_euler", 1, 0.1)

    traj = candidate_flow(mh1, [0.0, 1.0], 0.1, 30, substeps=50)

    assert len(traj) == 31
    assert oscillation_amplitude(conservation_series(mh1, traj)) <= 1e-9
    assert oscillation_amplitude(conservation_series(as_candidate(pendulum), traj)) > 1e-3

# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from bernsteinpy.model.measures import ModelParams
from bernsteinpy.model.moran import MoranSimulator, MoranState
from bernsteinpy.process.analysis import genic_fixation
from bernsteinpy.utils.exceptions import AssumptionViolationError, ContractViolationError


def test_state_validation() -> None:
    with pytest.raises(ContractViolationError):
        MoranState(K=10, i=11)
    assert MoranState(K=10, i=4).x == 0.4


def test_population_must_hold_a_group(full: ModelParams) -> None:
    with pytest.raises(ContractViolationError):
        MoranSimulator(full, K=2)
    MoranSimulator(full, K=3)


def test_neutral_rates(neutral: ModelParams) -> None:
    moran = MoranSimulator(neutral, K=10)
    rates = moran.event_rates(4)
    assert np.isclose(rates["neutral_up"], 4 * 6 / 20)
    assert rates["neutral_up"] == rates["neutral_down"]
    assert rates["select_up"] == 0.0 and rates["mut_up"] == 0.0
    with pytest.raises(ContractViolationError):
        moran.event_rates(11)


def test_genic_selection_rates(genic: ModelParams) -> None:
    moran = MoranSimulator(genic, K=10)
    rates = moran.event_rates(4)
    # focal A next to an a partner turns a; a focal a never turns A under p = (0, 1, 1)
    assert np.isclose(rates["select_up"], 6 * 1.0 / 10 * 4 / 9)
    assert rates["select_down"] == 0.0
    assert moran.event_rates(10)["select_up"] == 0.0


def test_mutation_and_atom_rates(full: ModelParams) -> None:
    moran = MoranSimulator(full, K=20)
    rates = moran.event_rates(5)
    assert np.isclose(rates["mut_up"], 0.5 * 15 / 20)
    assert np.isclose(rates["mut_down"], 0.3 * 5 / 20)
    assert np.isclose(rates["large(0.5)"], 0.5 / (20 * 0.25))
    assert np.isclose(rates["env(-0.4)"], 0.2 / (20 * 0.4))


def test_boundary_is_absorbing_without_mutation(genic: ModelParams) -> None:
    moran = MoranSimulator(genic, K=10)
    state = moran.moran_step(MoranState(K=10, i=0), np.random.default_rng(0))
    assert state.i == 0 and math.isinf(state.clock)
    with pytest.raises(ContractViolationError):
        moran.moran_step(MoranState(K=12, i=3), np.random.default_rng(0))


def test_neutral_fixation_is_initial_frequency(neutral: ModelParams) -> None:
    summary = MoranSimulator(neutral, K=10, seed=3).moran_fixation(3, 4000)
    assert abs(summary["estimate"] - 0.3) < 4 * summary["se"]
    assert MoranSimulator(neutral, K=10).moran_fixation(0, 10)["estimate"] == 0.0


def test_fixation_refuses_mutations(theta_only: ModelParams) -> None:
    with pytest.raises(AssumptionViolationError):
        MoranSimulator(theta_only, K=10).moran_fixation(3, 10)


def test_moran_vs_sde_table(theta_only: ModelParams) -> None:
    table = MoranSimulator(theta_only, K=20, seed=1).moran_vs_sde(0.5, 0.2, [1, 2], 200, dt=0.01)
    assert list(table.columns) == ["k", "moran_estimate", "moran_se", "sde_estimate", "sde_se", "z"]
    assert list(table["k"]) == [1, 2]


@pytest.mark.slow
@pytest.mark.parametrize("K", [500])
def test_large_population_fixation(neutral: ModelParams, genic: ModelParams, K: int) -> None:
    summary = MoranSimulator(neutral, K=K, seed=8).moran_fixation(K // 2, 5000)
    assert abs(summary["estimate"] - 0.5) < 3 * summary["se"]
    summary = MoranSimulator(genic, K=K, seed=8).moran_fixation(K // 2, 5000)
    oracle = genic_fixation(0.5, 1.0)
    assert abs(summary["estimate"] - oracle) <= 0.05 * oracle

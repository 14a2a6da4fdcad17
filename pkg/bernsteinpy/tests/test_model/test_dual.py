# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from bernsteinpy.model.dual import DualSimulator, DualState, Event
from bernsteinpy.model.measures import ModelParams
from bernsteinpy.model.operators import CoefficientVector
from bernsteinpy.utils.exceptions import AbsorbedStateError, AssumptionViolationError, ContractViolationError, \
    ExplosionGuardError


def test_event_labels_and_targets() -> None:
    assert Event("coalesce", 3, None, 1.0).label == "coalesce(3)"
    assert Event("mut", 1, "a", 1.0).label == "mut(a,1)"
    assert Event("coalesce", 3, None, 1.0).target(5) == 3
    assert Event("select", 3, None, 1.0).target(5) == 7
    assert Event("env", 2, "A", 1.0).target(5) == 7
    assert Event("mut", 2, "A", 1.0).target(5) == 3


def test_catalog_matches_total_rate(full: ModelParams) -> None:
    dual = DualSimulator(full)
    for n in range(1, 10):
        catalog = dual.enumerate_events(n)
        assert np.isclose(catalog.total_rate, full.total_dual_rate(n))
        assert all(event.rate > 0 for event in catalog.events)
    assert len(dual.enumerate_events(0)) == 0


def test_neutral_single_line_is_frozen(neutral: ModelParams) -> None:
    dual = DualSimulator(neutral)
    assert len(dual.enumerate_events(1)) == 0
    path = dual.simulate_until([0, 1], t_end=5.0)
    assert path.final_state.v == CoefficientVector([0, 1])
    assert path.final_state.clock == 5.0
    assert path.n_events == 0
    state, event = dual.step_with_event(DualState(CoefficientVector([0, 1])), np.random.default_rng(0))
    assert event is None and math.isinf(state.clock)


def test_step_on_scalar_raises(theta_only: ModelParams) -> None:
    dual = DualSimulator(theta_only)
    with pytest.raises(AbsorbedStateError):
        dual.step(DualState(CoefficientVector([0.3])), np.random.default_rng(0))


def test_infinite_horizon_needs_mutations(genic: ModelParams) -> None:
    with pytest.raises(ContractViolationError):
        DualSimulator(genic).simulate_until([0, 1])
    with pytest.raises(AssumptionViolationError):
        DualSimulator(genic).replicate([0, 1], 10)


def test_boundary_constancy_along_trace(genic: ModelParams) -> None:
    dual = DualSimulator(genic, seed=3)
    path = dual.simulate_until([0, 0.5, 1], t_end=3.0, trace=True)
    assert list(path.trace.columns) == ["t", "L", "label", "event_kind", "v_serialized"]
    assert path.trace["event_kind"].iloc[0] == "start"
    assert path.final_state.v.first == 0.0 and path.final_state.v.last == 1.0
    assert (path.trace["L"] >= 1).all()


def test_explosion_guard_names_the_condition(violating: ModelParams) -> None:
    dual = DualSimulator(violating, l_max=5, seed=1)
    with pytest.raises(ExplosionGuardError) as err:
        dual.simulate_until([0, 1], t_end=1e6)
    assert "recurrence condition" in str(err.value)


def test_mutations_absorb(theta_only: ModelParams) -> None:
    dual = DualSimulator(theta_only, seed=11)
    path = dual.simulate_until(CoefficientVector.unit(5))
    assert path.absorbed
    assert path.v_inf in (0.0, 1.0)
    assert path.final_state.label in ("a", "A")


def test_first_moment_of_theta_only(theta_only: ModelParams) -> None:
    values = DualSimulator(theta_only, seed=5).replicate(CoefficientVector.unit(1), 4000)
    expected = 0.5 / 1.25
    se = math.sqrt(expected * (1 - expected) / values.size)
    assert abs(values.mean() - expected) < 4 * se


def test_replicas_do_not_depend_on_count(full: ModelParams) -> None:
    dual = DualSimulator(full, seed=7)
    few = dual.replicate([0, 0.4, 1], 10)
    more = dual.replicate([0, 0.4, 1], 20)
    assert np.array_equal(few, more[:10])
    assert np.array_equal(few, DualSimulator(full, seed=7).replicate([0, 0.4, 1], 10))


def test_stationary_functional_refuses_mutations(full: ModelParams, violating: ModelParams) -> None:
    with pytest.raises(AssumptionViolationError):
        DualSimulator(full).stationary_functional(0.5, horizon=10.0)
    with pytest.raises(AssumptionViolationError):
        DualSimulator(violating).stationary_functional(0.5, horizon=10.0)


def test_stationary_functional_is_exact_for_neutral(neutral: ModelParams) -> None:
    table = DualSimulator(neutral).stationary_functional([0.0, 0.3, 1.0], horizon=50.0)
    assert np.allclose(table["estimate"], [0.0, 0.3, 1.0])
    assert np.allclose(table["se"], 0.0)


def test_delta_for_kingman(neutral: ModelParams) -> None:
    dual = DualSimulator(neutral)
    assert dual.delta(4) == 6.0
    f = dual.lyapunov_function(3)
    assert f[0] == f[1] == 0.0
    assert np.isclose(f[2], 2 / 1 * math.log(2))


def test_lyapunov_drift_with_finite_c(finite_c: ModelParams) -> None:
    report = DualSimulator(finite_c).lyapunov_report(1, 500)
    n0 = report.attrs["n0"]
    assert n0 is not None and n0 <= 50
    window = report[(report["n"] >= n0) & (report["n"] <= 10 * n0)]
    assert (window["drift"] < 0).all()
    assert np.isfinite(report.attrs["c_lambda"])


def test_lyapunov_drift_when_condition_fails(violating: ModelParams) -> None:
    report = DualSimulator(violating).lyapunov_report(1, 300)
    assert report.attrs["n0"] is None or report.attrs["n0"] > 100


@pytest.mark.slow
def test_absorption_before_horizon(full: ModelParams) -> None:
    dual = DualSimulator(full, seed=2)
    paths = [dual.simulate_until(CoefficientVector.unit(5), t_end=1e3, rng=dual.rng(j)) for j in range(10_000)]
    assert np.mean([p.absorbed for p in paths]) >= 0.999


def test_lyapunov_drift_with_mutation_only(theta_only: ModelParams) -> None:
    report = DualSimulator(theta_only).lyapunov_report(1, 1000)
    assert report.attrs["n0"] == 2
    assert (report[report["n"] >= 2]["drift"] < 0).all()
    assert report["drift"].iloc[0] == 0.0
    assert math.isinf(report.attrs["c_lambda"])

# -*- coding: utf-8 -*-
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bernsteinpy.data.data_readiness import load_params
from bernsteinpy.model.measures import ModelParams
from bernsteinpy.model.operators import CoefficientVector
from bernsteinpy.process.analysis import MomentTable, beta_moments, duality_gap, expected_absorbed_value, \
    fixation_probability, generator_residual, genic_fixation, recursion_coeffs, recursion_coeffs_from_operators, \
    recursion_residual, recursion_upper, stationary_moments
from bernsteinpy.utils.exceptions import AssumptionViolationError, ContractViolationError, \
    EnumerationTooLargeError

FULL = load_params("full")
small_vectors = st.integers(1, 4).flatmap(lambda n: st.lists(st.floats(-1, 1), min_size=n + 1, max_size=n + 1))


@settings(deadline=None, max_examples=40)
@given(st.floats(0, 1), small_vectors)
def test_generators_agree(x: float, entries: list) -> None:
    assert generator_residual(FULL, x, entries) <= 1e-10


def test_generators_on_constants(neutral: ModelParams, genic: ModelParams) -> None:
    for params in (neutral, genic, FULL):
        assert generator_residual(params, 0.4, [0.7, 0.7, 0.7]) <= 1e-12


def test_generator_dimension_limit() -> None:
    with pytest.raises(EnumerationTooLargeError):
        generator_residual(FULL, 0.5, np.zeros(8))
    with pytest.raises(ContractViolationError):
        generator_residual(FULL, 1.5, [0, 1])


def test_duality_gap_at_time_zero() -> None:
    gap = duality_gap(FULL, 0.3, [0.0, 0.5, 1.0], t=0.0, reps=10)
    assert gap["z"] == 0.0
    assert np.isclose(gap["lhs"]["estimate"], 0.3)
    assert gap["lhs"] == gap["rhs"]


def test_recursion_upper() -> None:
    assert recursion_upper(1, 2) == 2
    assert recursion_upper(2, 5) == 6
    assert recursion_upper(4, 3) == 8


def test_theta_only_first_recursion(theta_only: ModelParams) -> None:
    coeffs = recursion_coeffs(theta_only, 1)
    assert np.isclose(coeffs.alpha_n, 1.25)
    assert np.isclose(coeffs.alpha_nk[0], 0.5)
    assert np.allclose(coeffs.alpha_nk[1:], 0.0)


@pytest.mark.parametrize("n", range(1, 5))
def test_beta_moments_solve_the_recursion(theta_only: ModelParams, n: int) -> None:
    rho = MomentTable.exact(beta_moments(0.5, 0.75, recursion_upper(n, theta_only.sel.kappa)))
    assert recursion_residual(theta_only, n, rho)["residual"] <= 1e-10


@pytest.mark.parametrize("n", range(1, 5))
def test_closed_form_matches_operators(n: int) -> None:
    closed = recursion_coeffs(FULL, n)
    derived = recursion_coeffs_from_operators(FULL, n)
    assert np.isclose(closed.alpha_n, FULL.total_dual_rate(n))
    assert np.isclose(closed.alpha_n, derived.alpha_n)
    assert np.allclose(closed.alpha_nk, derived.alpha_nk, atol=1e-9)


def test_recursion_needs_enough_moments() -> None:
    with pytest.raises(ContractViolationError):
        recursion_residual(FULL, 3, MomentTable.exact([1.0, 0.5, 0.4]))
    with pytest.raises(ContractViolationError):
        recursion_coeffs(FULL, 0)


def test_moment_table() -> None:
    with pytest.raises(ContractViolationError):
        MomentTable.exact([0.9, 0.5])
    table = MomentTable(rho=np.array([1.0, 0.5, 0.3]), se=np.array([0.0, 0.01, 0.02]))
    value, se = table.combine(np.array([0.0, 2.0, -1.0]))
    assert np.isclose(value, 0.7)
    assert np.isclose(se, np.sqrt(0.02 ** 2 + 0.02 ** 2))
    assert table.is_monotone()
    assert not MomentTable.exact([1.0, 0.3, 0.6]).is_monotone()
    assert list(table.to_frame().columns) == ["n", "rho", "se", "ci_low", "ci_high"]


def test_expected_absorbed_value() -> None:
    rho = MomentTable.exact(beta_moments(0.5, 0.75, 3))
    assert np.isclose(expected_absorbed_value(CoefficientVector.unit(3), rho), rho.rho[3])
    assert np.isclose(expected_absorbed_value([0.6, 0.6, 0.6], rho), 0.6)
    with pytest.raises(ContractViolationError):
        expected_absorbed_value(CoefficientVector.unit(5), rho)


def test_beta_moments() -> None:
    assert np.allclose(beta_moments(0.5, 0.75, 2), [1.0, 0.4, 0.4 * 2 / 3.5])


def test_genic_fixation() -> None:
    assert genic_fixation(0.3, 0.0) == 0.3
    assert genic_fixation(0.3, 1.0) > 0.3
    assert np.allclose(genic_fixation(np.array([0.0, 1.0]), 2.0), [0.0, 1.0])


def test_stationary_moments_theta_only(theta_only: ModelParams) -> None:
    rho = stationary_moments(theta_only, 2, 4000, seed=3)
    assert rho.rho[0] == 1.0 and rho.se[0] == 0.0
    assert abs(rho.rho[1] - 0.4) < 4 * rho.se[1]
    assert rho.is_monotone()


def test_stationary_moments_need_mutations(genic: ModelParams) -> None:
    with pytest.raises(AssumptionViolationError):
        stationary_moments(genic, 2, 10)


def test_fixation_refuses_mutations(theta_only: ModelParams) -> None:
    with pytest.raises(AssumptionViolationError):
        fixation_probability(theta_only, 0.5, horizon=10.0)


def test_neutral_fixation_is_identity(neutral: ModelParams) -> None:
    table = fixation_probability(neutral, [0.0, 0.3, 1.0], horizon=20.0)
    assert np.allclose(table["estimate"], [0.0, 0.3, 1.0])
    assert table.attrs["monotone"]


@pytest.mark.slow
def test_genic_fixation_matches_diffusion(genic: ModelParams) -> None:
    xs = np.linspace(0, 1, 11)
    table = fixation_probability(genic, xs, horizon=1000.0, seed=1)
    assert np.max(np.abs(table["estimate"] - genic_fixation(xs, 1.0))) <= 0.02


@pytest.mark.slow
def test_duality_on_a_grid() -> None:
    for x in (0.2, 0.5, 0.8):
        for t in (0.1, 0.5, 1.0):
            gap = duality_gap(FULL, x, [0.0, 0.3, 1.0], t=t, reps=20_000, seed=5)
            assert abs(gap["z"]) <= 4.0


@pytest.mark.slow
def test_beta_moments_from_the_dual(theta_only: ModelParams) -> None:
    rho = stationary_moments(theta_only, 3, 100_000, seed=2)
    exact = beta_moments(0.5, 0.75, 3)
    assert np.all(np.abs(rho.rho - exact) <= 3 * rho.se + 1e-12)

# -*- coding: utf-8 -*-
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bernsteinpy.model.func._bernstein import bernstein_derivative, bernstein_to_monomial
from bernsteinpy.model.operators import CoefficientVector, EnvOperatorMode, bernstein_eval, coalesce, env_A, \
    env_a, env_a_unit, mut_A, mut_a, operator_matrix, select_branch, select_branch_unit
from bernsteinpy.model.selection import SelectionKernel
from bernsteinpy.utils.exceptions import ContractViolationError, EnumerationTooLargeError

SELECTION = SelectionKernel.from_lists(3, [0.5, 0.3], [[0, 0.8, 1], [0, 0.3, 0.9, 1]])
vectors = st.integers(1, 8).flatmap(lambda n: st.lists(st.floats(-1, 1), min_size=n + 1, max_size=n + 1))


def _operators(n: int):
    """Every operator available from n lines, as (name, callable)."""
    ops = [(f"coalesce({k})", lambda v, k=k: coalesce(v, k)) for k in range(2, n + 1)]
    ops += [(f"select({ell})", lambda v, ell=ell: select_branch(v, ell, SELECTION)) for ell in (2, 3)]
    ops += [(f"env(a,{ell})", lambda v, ell=ell: env_a(v, ell)) for ell in range(1, n + 1) if n + ell <= 12]
    ops += [(f"env(A,{ell})", lambda v, ell=ell: env_A(v, ell)) for ell in range(1, n + 1) if n + ell <= 12]
    return ops


def test_coefficient_vector_basics() -> None:
    v = CoefficientVector([0.0, 0.5, 1.0])
    assert v.n == 2 and v.dim == 3
    assert v.first == 0.0 and v.last == 1.0
    assert CoefficientVector.unit(2) == CoefficientVector([0, 0, 1])
    assert CoefficientVector.constant(0.5, 1).is_scalar() is False
    assert CoefficientVector([0.25]).is_scalar()
    with pytest.raises(ValueError):
        v.entries[0] = 1.0
    with pytest.raises(ContractViolationError):
        CoefficientVector([])
    with pytest.raises(ContractViolationError):
        CoefficientVector([0.0, float("inf")])


def test_serialize_truncates() -> None:
    assert CoefficientVector([0, 0.5, 1]).serialize() == "0;0.5;1"
    assert CoefficientVector(np.zeros(20)).serialize(max_entries=3).endswith("...(20)")


def test_coalesce_examples() -> None:
    assert coalesce([0, 0, 0, 1], 2) == CoefficientVector([0, 0, 1])
    assert coalesce([0, 0, 1], 2) == CoefficientVector([0, 1])
    assert np.allclose(coalesce([0, 1, 2, 3], 3).entries, [0, 3])
    with pytest.raises(ContractViolationError):
        coalesce([0, 1], 2)


def test_select_branch_examples() -> None:
    genic = SelectionKernel.genic(1.0)
    assert select_branch([0, 1], 2, genic) == CoefficientVector([0, 1, 1])
    assert np.allclose(select_branch([0, 1], 2, SelectionKernel.neutral()).entries, [0, 0.5, 1])
    with pytest.raises(ContractViolationError):
        select_branch([0, 1], 3, genic)


def test_mutation_examples() -> None:
    assert mut_a([1, 2, 3], 1) == CoefficientVector([2, 3])
    assert mut_A([1, 2, 3], 1) == CoefficientVector([1, 2])
    assert mut_a([1, 2, 3], 2) == CoefficientVector([3])
    with pytest.raises(ContractViolationError):
        mut_A([1, 2, 3], 3)


def test_env_examples() -> None:
    assert np.allclose(env_a([0, 1], 1).entries, [0, 1, 1])
    assert np.allclose(env_A([0, 1], 1).entries, [0, 0, 1])
    with pytest.raises(ContractViolationError):
        env_a([0, 1], 2)


@pytest.mark.parametrize("n", range(1, 6))
def test_unit_closed_forms(n: int) -> None:
    for ell in (2, 3):
        assert np.allclose(select_branch_unit(n, ell, SELECTION),
                           select_branch(CoefficientVector.unit(n), ell, SELECTION).entries, atol=1e-14)
    for ell in range(1, n + 1):
        assert np.allclose(env_a_unit(n, ell), env_a(CoefficientVector.unit(n), ell).entries, atol=1e-14)


@pytest.mark.parametrize("n", range(1, 9))
def test_operators_are_markov_kernels(n: int) -> None:
    for name, op in _operators(n):
        matrix = operator_matrix(op, n + 1)
        assert np.all(matrix >= -1e-15), name
        assert np.allclose(matrix.sum(axis=1), 1.0, atol=1e-12), name


@settings(deadline=None)
@given(vectors)
def test_boundary_and_sup_norm(entries: list) -> None:
    v = CoefficientVector(entries)
    for name, op in _operators(v.n):
        w = op(v)
        assert w.first == v.first and w.last == v.last, name
        assert w.sup_norm <= v.sup_norm * (1 + 1e-12) + 1e-15, name


def test_env_exact_limit_and_monte_carlo(rng: np.random.Generator) -> None:
    v = CoefficientVector(np.linspace(0, 1, 8) ** 2)
    with pytest.raises(EnumerationTooLargeError):
        env_a(v, 6)
    mode = EnvOperatorMode(mode="monte_carlo", se_budget=5e-3, limit=9)
    estimate = env_a(v, 3, mode=mode, rng=rng)
    exact = env_a(v, 3)
    assert estimate.first == exact.first and estimate.last == exact.last
    assert np.max(np.abs(estimate.entries - exact.entries)) < 6 * 5e-3
    with pytest.raises(ContractViolationError):
        env_a(v, 3, mode=mode)
    with pytest.raises(ContractViolationError):
        EnvOperatorMode(mode="approximate")


def test_bernstein_eval() -> None:
    assert np.isclose(bernstein_eval(0.3, CoefficientVector.unit(3)), 0.3 ** 3)
    assert np.isclose(bernstein_eval(0.3, [0.7, 0.7, 0.7]), 0.7)
    assert np.allclose(bernstein_eval(np.array([0.0, 1.0]), [0.2, 0.9, 0.4]), [0.2, 0.4])
    with pytest.raises(ContractViolationError):
        bernstein_eval(1.2, [0, 1])


def test_monomial_conversion_and_derivatives() -> None:
    assert np.allclose(bernstein_to_monomial(np.array([0, 0, 1.0])), [0, 0, 1])
    assert np.allclose(bernstein_to_monomial(np.array([0.5, 0.5, 0.5])), [0.5, 0, 0])
    # H(x, (0, 1/2, 1)) = x
    assert np.isclose(bernstein_derivative(np.array([0, 0.5, 1.0]), 0.4, 1), 1.0)
    assert np.isclose(bernstein_derivative(np.array([0, 0, 0, 1.0]), 0.5, 2), 6 * 0.5)
    assert bernstein_derivative(np.array([0, 1.0]), 0.5, 2) == 0.0

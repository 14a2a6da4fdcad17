# -*- coding: utf-8 -*-
import numpy as np
import pytest

from bernsteinpy.model.forward import ForwardConfig, ForwardSimulator, JumpCatalog, JumpChannel
from bernsteinpy.model.measures import ModelParams
from bernsteinpy.utils.exceptions import ContractViolationError


def test_config_validation() -> None:
    with pytest.raises(ContractViolationError):
        ForwardConfig(x0=1.2, t_end=1.0)
    with pytest.raises(ContractViolationError):
        ForwardConfig(x0=0.5, t_end=0.1, dt=0.5)
    with pytest.raises(ContractViolationError):
        ForwardConfig(x0=0.5, t_end=-1.0)
    cfg = ForwardConfig(x0=0.5, t_end=1.0, dt=0.3)
    assert cfg.n_steps == 4
    assert np.isclose(cfg.step_size, 0.25)
    assert ForwardConfig(x0=0.5, t_end=0.0).n_steps == 0


def test_jump_channels() -> None:
    x = np.array([0.2, 0.6])
    u = np.array([0.1, 0.9])
    assert np.allclose(JumpChannel("neutral", 0.5, 1.0).apply(x, u), [0.2 + 0.5 * 0.8, 0.6 - 0.5 * 0.6])
    assert np.allclose(JumpChannel("env", -0.5, 1.0).apply(x, u), x - 0.5 * x * (1 - x))
    assert np.allclose(JumpChannel("coordmut", 0.5, 1.0).apply(x, u), x + 0.5 * (1 - x))
    assert np.allclose(JumpChannel("coordmut", -0.5, 1.0).apply(x, u), 0.5 * x)


def test_jump_catalog_rates(full: ModelParams) -> None:
    catalog = JumpCatalog.from_params(full)
    assert len(catalog.channels) == 5
    expected = 0.5 / 0.25 + 0.2 / 0.3 + 0.2 / 0.4 + 0.2 / 0.5 + 0.1 / 0.5
    assert np.isclose(catalog.total_rate, expected)
    assert np.isclose(catalog.probabilities.sum(), 1.0)


def test_boundaries_absorb_without_mutation(genic: ModelParams) -> None:
    forward = ForwardSimulator(genic)
    assert np.all(forward.terminal_values(ForwardConfig(x0=0.0, t_end=1.0, dt=0.01), 50) == 0.0)
    assert np.all(forward.terminal_values(ForwardConfig(x0=1.0, t_end=1.0, dt=0.01), 50) == 1.0)


def test_time_zero_moment_is_exact(full: ModelParams) -> None:
    forward = ForwardSimulator(full)
    estimate = forward.moment_estimate(ForwardConfig(x0=0.3, t_end=0.0), 2, 100)
    assert estimate["estimate"] == 0.3 ** 2 and estimate["se"] == 0.0


def test_neutral_mean_is_a_martingale(neutral: ModelParams) -> None:
    forward = ForwardSimulator(neutral, seed=4)
    estimate = forward.moment_estimate(ForwardConfig(x0=0.3, t_end=0.5, dt=0.01), 1, 4000)
    assert abs(estimate["estimate"] - 0.3) < 4 * estimate["se"]


def test_path_and_jump_log(full: ModelParams) -> None:
    forward = ForwardSimulator(full, seed=9)
    path = forward.simulate_path(ForwardConfig(x0=0.5, t_end=2.0, dt=0.01))
    assert path.values.shape == (201,)
    assert np.all((path.values >= 0) & (path.values <= 1))
    assert list(path.jump_log.columns) == ["t", "channel", "r", "x_before", "x_after"]
    again = ForwardSimulator(full, seed=9).simulate_path(ForwardConfig(x0=0.5, t_end=2.0, dt=0.01))
    assert np.array_equal(path.values, again.values)
    assert list(path.to_frame().columns) == ["t", "x"]


def test_absorption_fraction(genic: ModelParams) -> None:
    summary = ForwardSimulator(genic, seed=1).absorption_fraction(ForwardConfig(x0=0.5, t_end=0.05, dt=0.01), 200)
    assert 0.0 <= summary["estimate"] <= 1.0
    assert summary["unabsorbed"] > 0.5


def test_time_average_moments_shape(theta_only: ModelParams) -> None:
    forward = ForwardSimulator(theta_only, seed=2)
    burn = ForwardConfig(x0=0.5, t_end=0.1, dt=0.01)
    window = ForwardConfig(x0=0.5, t_end=0.2, dt=0.01)
    averages = forward.time_average_moments(burn, window, 3, 20)
    assert averages.shape == (3, 20)
    # x^1 >= x^2 >= x^3 on [0, 1]
    assert np.all(averages[0] >= averages[1] - 1e-12) and np.all(averages[1] >= averages[2] - 1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["full", "genic", "theta_only"])
@pytest.mark.parametrize("k", [1, 2])
def test_halving_the_step_stays_within_the_interval(name: str, k: int, request) -> None:
    params = request.getfixturevalue(name)
    coarse = ForwardSimulator(params, seed=11).moment_estimate(ForwardConfig(x0=0.4, t_end=0.5, dt=0.02), k, 20_000)
    fine = ForwardSimulator(params, seed=12).moment_estimate(ForwardConfig(x0=0.4, t_end=0.5, dt=0.01), k, 20_000)
    # 99.9% two-sided
    assert abs(coarse["estimate"] - fine["estimate"]) <= 3.29 * np.hypot(coarse["se"], fine["se"])

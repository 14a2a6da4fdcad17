# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from bernsteinpy.data.statistic import batch_means, confidence_interval, mc_summary, monotone_within, \
    pmf_agreement, standard_error, z_score


def test_standard_error() -> None:
    assert math.isnan(standard_error(np.array([1.0])))
    assert np.isclose(standard_error(np.array([0.0, 2.0])), 1.0)


def test_mc_summary_of_constant_samples() -> None:
    summary = mc_summary(np.full(10, 0.25))
    assert summary["estimate"] == 0.25 and summary["se"] == 0.0
    assert summary["ci_low"] == summary["ci_high"] == 0.25
    assert summary["reps"] == 10
    assert mc_summary(np.array([0.7]))["se"] == 0.0


def test_confidence_interval_width() -> None:
    low, high = confidence_interval(1.0, 0.5)
    assert np.isclose(high - 1.0, 1.959964 * 0.5, atol=1e-6)
    assert np.isclose(low + high, 2.0)


def test_batch_means_of_a_step_function() -> None:
    # 0 on [0, 1), 1 afterwards
    summary = batch_means(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 0.0, 4.0, batches=4)
    assert np.allclose(summary["batch_averages"], [0.0, 1.0, 1.0, 1.0])
    assert np.isclose(summary["estimate"], 0.75)
    with pytest.raises(ValueError):
        batch_means(np.array([0.0]), np.array([1.0]), 1.0, 1.0, batches=4)


def test_z_score() -> None:
    assert z_score(1.0, 0.0, 1.0, 0.0) == 0.0
    assert z_score(2.0, 0.0, 1.0, 0.0) == math.inf
    assert np.isclose(z_score(1.0, 0.3, 0.0, 0.4), 2.0)


def test_pmf_agreement() -> None:
    draws = np.array([0, 1, 1, 0] * 500)
    assert pmf_agreement(draws, np.array([0.5, 0.5]))
    assert not pmf_agreement(draws, np.array([0.9, 0.1]))
    assert not pmf_agreement(np.array([0, 2]), np.array([0.5, 0.5]))


def test_monotone_within() -> None:
    assert monotone_within([1.0, 0.6, 0.61], [0.0, 0.01, 0.01])
    assert not monotone_within([1.0, 0.6, 0.7], [0.0, 0.01, 0.01])
    assert monotone_within([0.0, 0.5, 1.0], [0.0, 0.0, 0.0], increasing=True)

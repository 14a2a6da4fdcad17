# -*- coding: utf-8 -*-
import math
from typing import Dict, Sequence

import numpy as np
from scipy.stats import norm

from bernsteinpy.global_variable import Z_THRESHOLD


def standard_error(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float("nan")
    return float(np.std(x, ddof=1) / np.sqrt(x.size))


def confidence_interval(mean: float, se: float, level: float = 0.95) -> tuple:
    z = norm.ppf(0.5 + level / 2)
    return mean - z * se, mean + z * se


def mc_summary(samples: np.ndarray, level: float = 0.95) -> Dict[str, float]:
    """Ensemble mean with standard error and normal confidence interval.

    :param samples: one value per independent replica
    :param level: confidence level of the interval
    :return: estimate, se, ci_low, ci_high, reps
    """
    samples = np.asarray(samples, dtype=float)
    mean = float(np.mean(samples))
    se = standard_error(samples) if samples.size > 1 else 0.0
    if np.isnan(se):
        se = 0.0
    low, high = confidence_interval(mean, se, level)
    return {"estimate": mean, "se": se, "ci_low": low, "ci_high": high, "reps": int(samples.size)}


def batch_means(times: np.ndarray, values: np.ndarray, start: float, end: float, batches: int,
                level: float = 0.95) -> Dict[str, float]:
    """Time average of a right-continuous step function over [start, end] with a batch-means CI.

    ``values[j]`` holds on [times[j], times[j+1]); the last value holds until ``end``.
    The window is cut into ``batches`` equal sub-windows, whose averages are treated as
    approximately independent.
    """
    if end <= start or batches < 2:
        raise ValueError("batch means need end > start and at least two batches")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    edges = np.linspace(start, end, batches + 1)
    # integral of the step function from times[0] up to each edge
    segment_ends = np.append(times[1:], np.inf)
    averages = np.empty(batches)
    for b in range(batches):
        lo, hi = edges[b], edges[b + 1]
        overlap = np.clip(np.minimum(segment_ends, hi) - np.maximum(times, lo), 0.0, None)
        averages[b] = float(np.sum(overlap * values) / (hi - lo))
    mean = float(np.mean(averages))
    se = float(np.std(averages, ddof=1) / np.sqrt(batches))
    low, high = confidence_interval(mean, se, level)
    return {"estimate": mean, "se": se, "ci_low": low, "ci_high": high, "batches": batches,
            "batch_averages": averages.tolist()}


def z_score(a: float, se_a: float, b: float, se_b: float) -> float:
    """(a - b) / sqrt(se_a^2 + se_b^2); 0 for identical exact values."""
    scale = math.sqrt(se_a ** 2 + se_b ** 2)
    if scale == 0:
        return 0.0 if a == b else math.copysign(math.inf, a - b)
    return (a - b) / scale


def pmf_agreement(draws: np.ndarray, pmf: np.ndarray, n_se: float = 4.0) -> bool:
    """Empirical frequencies of integer ``draws`` match ``pmf`` within ``n_se`` binomial SEs per point."""
    draws = np.asarray(draws, dtype=int)
    counts = np.bincount(draws, minlength=len(pmf))
    if len(counts) > len(pmf):
        return False
    frequency = counts / draws.size
    se = np.sqrt(pmf * (1 - pmf) / draws.size)
    # points of probability 0 or 1 must be hit exactly
    return bool(np.all(np.abs(frequency - pmf) <= n_se * se + 1e-12))


def monotone_within(estimates: Sequence[float], se: Sequence[float], n_se: float = Z_THRESHOLD,
                    increasing: bool = False) -> bool:
    """Consecutive estimates never move against the expected direction by more than ``n_se`` joint SEs."""
    estimates = np.asarray(estimates, dtype=float)
    se = np.asarray(se, dtype=float)
    step = np.diff(estimates) if not increasing else -np.diff(estimates)
    slack = n_se * np.sqrt(se[:-1] ** 2 + se[1:] ** 2)
    return bool(np.all(step <= slack + 1e-12))

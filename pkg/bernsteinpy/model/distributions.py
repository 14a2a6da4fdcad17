# -*- coding: utf-8 -*-
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import binom

from bernsteinpy.global_variable import EXACT_ENUMERATION_LIMIT
from bernsteinpy.utils.exceptions import ContractViolationError, EnumerationTooLargeError


def binom_pmf(n: int, x: float) -> np.ndarray:
    """pmf of Binomial(n, x) on 0..n."""
    if n < 0 or not 0 <= x <= 1:
        raise ContractViolationError(f"Binomial needs n >= 0 and x in [0, 1], got ({n}, {x})")
    return binom.pmf(np.arange(n + 1), n, x)


def binom_sample(n: int, x: float, rng: np.random.Generator, size=None):
    if n < 0 or not 0 <= x <= 1:
        raise ContractViolationError(f"Binomial needs n >= 0 and x in [0, 1], got ({n}, {x})")
    return rng.binomial(n, x, size=size)


def hyp_pmf(n: int, k: int, j: int) -> np.ndarray:
    """pmf of Hyp(n, k, j) (red balls among j drawn from n with k red) on 0..min(k, j).

    Probabilities are ratios of exact integers, so a certain outcome has probability 1.0 exactly.
    """
    if not 0 <= k <= n or not 0 <= j <= n:
        raise ContractViolationError(f"Hyp needs 0 <= k, j <= n, got ({n}, {k}, {j})")
    total = math.comb(n, j)
    return np.array([math.comb(k, m) * math.comb(n - k, j - m) / total for m in range(min(k, j) + 1)])


def hyp_sample(n: int, k: int, j: int, rng: np.random.Generator, size=None):
    if not 0 <= k <= n or not 0 <= j <= n:
        raise ContractViolationError(f"Hyp needs 0 <= k, j <= n, got ({n}, {k}, {j})")
    if j == 0 or k == 0:
        return 0 if size is None else np.zeros(size, dtype=int)
    return rng.hypergeometric(k, n - k, j, size=size)


@dataclass(frozen=True)
class HPParams:
    """Hypergeometric pairing: ``total`` balls, ``pairs`` of them paired, ``red`` of them red."""

    total: int
    pairs: int
    red: int

    def __post_init__(self) -> None:
        if self.pairs < 1 or 2 * self.pairs > self.total or not 0 <= self.red <= self.total:
            raise ContractViolationError(f"HP needs 1 <= pairs, 2 pairs <= total, 0 <= red <= total, got {self}")

    @property
    def groups(self) -> int:
        return self.total - self.pairs


@lru_cache(maxsize=None)
def _hp_counts(total: int, pairs: int, red: int) -> tuple:
    # pair g holds balls 2g and 2g+1; by symmetry a fixed pairing with a uniform red set
    # has the same law as a fixed red set with a uniform pairing
    group_of = [b // 2 if b < 2 * pairs else b - pairs for b in range(total)]
    counts = [0] * (total - pairs + 1)
    for chosen in itertools.combinations(range(total), red):
        counts[len({group_of[b] for b in chosen})] += 1
    return tuple(counts)


def hp_pmf(params: HPParams, limit: int = EXACT_ENUMERATION_LIMIT) -> np.ndarray:
    """Exact pmf of HP(total, pairs, red) on 0..groups by enumeration.

    Raises
    ------
    EnumerationTooLargeError
        When ``total`` exceeds ``limit``.
    """
    if params.total > limit:
        raise EnumerationTooLargeError(f"HP({params.total}, {params.pairs}, {params.red}) is too large for "
                                       f"exact pmf (total > {limit})")
    counts = _hp_counts(params.total, params.pairs, params.red)
    denominator = math.comb(params.total, params.red)
    return np.array([c / denominator for c in counts])


def hp_sample(params: HPParams, rng: np.random.Generator, size=None):
    """Shuffle the balls, pair off the first 2 pairs positions, count groups with a red ball."""
    n_draws = 1 if size is None else int(size)
    labels = np.tile(np.arange(params.total), (n_draws, 1))
    is_red = rng.permuted(labels, axis=1) < params.red
    paired = is_red[:, :2 * params.pairs].reshape(n_draws, params.pairs, 2).any(axis=2).sum(axis=1)
    singles = is_red[:, 2 * params.pairs:].sum(axis=1)
    draws = paired + singles
    return int(draws[0]) if size is None else draws


def _check_r(n: int, ell: int, i: int) -> None:
    if not 0 <= ell <= n or not 0 <= i <= n + ell:
        raise ContractViolationError(f"R needs 0 <= l <= n and 0 <= i <= n + l, got ({n}, {ell}, {i})")


def ra_pmf(n: int, ell: int, i: int, limit: int = EXACT_ENUMERATION_LIMIT) -> np.ndarray:
    """pmf of R^a_{n,l,i} ~ HP(n+l, l, i) on 0..n; with l = 0 there is no pairing and R = i."""
    _check_r(n, ell, i)
    if ell == 0:
        out = np.zeros(n + 1)
        out[i] = 1.0
        return out
    return hp_pmf(HPParams(n + ell, ell, i), limit=limit)


def rA_pmf(n: int, ell: int, i: int, limit: int = EXACT_ENUMERATION_LIMIT) -> np.ndarray:
    """pmf of R^A_{n,l,i} = n - HP(n+l, l, n+l-i) on 0..n."""
    return ra_pmf(n, ell, n + ell - i, limit=limit)[::-1].copy()


def ra_sample(n: int, ell: int, i: int, rng: np.random.Generator, size=None):
    _check_r(n, ell, i)
    if ell == 0:
        return i if size is None else np.full(size, i)
    return hp_sample(HPParams(n + ell, ell, i), rng, size=size)


def rA_sample(n: int, ell: int, i: int, rng: np.random.Generator, size=None):
    """R^A_{n,l,i} = n - HP(n+l, l, n+l-i)."""
    _check_r(n, ell, i)
    return n - ra_sample(n, ell, n + ell - i, rng, size=size)


def env_composite_pmf(n: int, r: float, x: float, limit: int = 16) -> np.ndarray:
    """Exact pmf of R^a_{n, J, I} with J ~ Bin(n, r) and I ~ Bin(n + J, x).

    The result equals the Binomial(n, x + r x (1 - x)) pmf.
    """
    out = np.zeros(n + 1)
    for j, p_j in enumerate(binom_pmf(n, r)):
        if p_j == 0:
            continue
        for i, p_i in enumerate(binom_pmf(n + j, x)):
            if p_i == 0:
                continue
            out += p_j * p_i * ra_pmf(n, j, i, limit=limit)
    return out


def mutation_composite_pmf(n: int, r: float, x: float) -> np.ndarray:
    """Exact pmf of I + J with J ~ Bin(n, r) and I ~ Bin(n - J, x).

    The result equals the Binomial(n, x + r (1 - x)) pmf.
    """
    out = np.zeros(n + 1)
    for j, p_j in enumerate(binom_pmf(n, r)):
        out[j:] += p_j * binom_pmf(n - j, x)
    return out

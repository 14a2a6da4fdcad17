# -*- coding: utf-8 -*-
import math
from typing import Union

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom

from bernsteinpy.global_variable import EXACT_BINOMIAL_LIMIT


def binom_coef(n: int, k: int) -> float:
    """Binomial coefficient C(n, k) as a float; zero outside 0 <= k <= n.

    Exact integer arithmetic up to ``EXACT_BINOMIAL_LIMIT``, log-gamma beyond.
    """
    if k < 0 or k > n or n < 0:
        return 0.0
    if n <= EXACT_BINOMIAL_LIMIT:
        return float(math.comb(n, k))
    return float(np.exp(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)))


def bernstein_basis(m: int, x: Union[float, np.ndarray]) -> np.ndarray:
    """Bernstein basis B_{i,m}(x), i = 0..m.

    For scalar x returns shape (m+1,); for an array of x returns shape (len(x), m+1).
    """
    i = np.arange(m + 1)
    if np.ndim(x) == 0:
        return binom.pmf(i, m, float(x))
    x = np.asarray(x, dtype=float)
    return binom.pmf(i[None, :], m, x[:, None])


def bernstein_polynomial(w: np.ndarray, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Evaluate sum_i w_i B_{i,m}(x) with m = len(w) - 1."""
    w = np.asarray(w, dtype=float)
    basis = bernstein_basis(len(w) - 1, x)
    if np.ndim(x) == 0:
        return float(basis @ w)
    return basis @ w


def derivative_coefficients(w: np.ndarray, order: int) -> np.ndarray:
    """Bernstein coefficients of the ``order``-th derivative.

    d^r/dx^r sum_i w_i B_{i,m} = m!/(m-r)! sum_i (Delta^r w)_i B_{i,m-r}.
    Returns an empty array when the derivative vanishes identically.
    """
    w = np.asarray(w, dtype=float)
    m = len(w) - 1
    if order > m:
        return np.zeros(0)
    falling = float(math.perm(m, order))
    return falling * np.diff(w, n=order)


def bernstein_derivative(w: np.ndarray, x: float, order: int = 1) -> float:
    coefficients = derivative_coefficients(w, order)
    if len(coefficients) == 0:
        return 0.0
    return bernstein_polynomial(coefficients, x)


def bernstein_to_monomial(w: np.ndarray) -> np.ndarray:
    """Monomial coefficients c_k with sum_i w_i B_{i,m}(x) = sum_k c_k x^k.

    c_k = sum_{i<=k} w_i C(m,i) C(m-i,k-i) (-1)^(k-i), evaluated with exact integers.
    """
    w = np.asarray(w, dtype=float)
    m = len(w) - 1
    out = np.zeros(m + 1)
    for k in range(m + 1):
        total = 0.0
        for i in range(k + 1):
            total += w[i] * math.comb(m, i) * math.comb(m - i, k - i) * (-1) ** (k - i)
        out[k] = total
    return out

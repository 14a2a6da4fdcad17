# -*- coding: utf-8 -*-
"""Bernstein-basis operators acting on coefficient vectors.

Every operator maps R^{n+1} to a space of another dimension and is a Markov
kernel on indices. Rows are probability vectors, hence constants are preserved
and sup-norms never grow. Coalescence, selection and environment also keep the
first and last entries.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np

from bernsteinpy.global_variable import DEFAULT_SE_BUDGET, ENV_OPERATOR_MODES, EXACT_ENUMERATION_LIMIT, \
    MAX_MC_OPERATOR_DRAWS
from bernsteinpy.model.distributions import hyp_pmf, rA_pmf, ra_pmf, ra_sample
from bernsteinpy.model.func._bernstein import bernstein_polynomial
from bernsteinpy.model.selection import SelectionKernel
from bernsteinpy.utils.exceptions import ContractViolationError, EnumerationTooLargeError

logger = logging.getLogger(__name__)


class CoefficientVector(object):
    """Coefficients v_0..v_n of a polynomial in the Bernstein basis of degree n."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Union[Sequence[float], np.ndarray]) -> None:
        array = np.array(entries, dtype=float, copy=True).reshape(-1)
        if array.size < 1:
            raise ContractViolationError("a coefficient vector needs at least one entry")
        if not np.all(np.isfinite(array)):
            raise ContractViolationError("coefficient entries must be finite")
        array.setflags(write=False)
        self._entries = array

    @classmethod
    def unit(cls, n: int) -> "CoefficientVector":
        """e_n = (0, ..., 0, 1) of dimension n + 1, so that H(x, e_n) = x^n."""
        entries = np.zeros(n + 1)
        entries[n] = 1.0
        return cls(entries)

    @classmethod
    def constant(cls, c: float, n: int) -> "CoefficientVector":
        return cls(np.full(n + 1, float(c)))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def n(self) -> int:
        return self._entries.size - 1

    @property
    def dim(self) -> int:
        return self._entries.size

    def is_scalar(self) -> bool:
        return self._entries.size == 1

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self._entries)))

    @property
    def first(self) -> float:
        return float(self._entries[0])

    @property
    def last(self) -> float:
        return float(self._entries[-1])

    def __len__(self) -> int:
        return self._entries.size

    def __getitem__(self, item):
        return self._entries[item]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return self._entries.shape == other._entries.shape and bool(np.all(self._entries == other._entries))

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __repr__(self) -> str:
        return f"CoefficientVector({self._entries.tolist()})"

    def serialize(self, max_entries: int = 16) -> str:
        """Compact text form for traces, truncated after ``max_entries`` entries."""
        shown = ";".join(f"{v:.6g}" for v in self._entries[:max_entries])
        return shown if self.dim <= max_entries else f"{shown};...({self.dim})"


def _as_vector(v) -> CoefficientVector:
    return v if isinstance(v, CoefficientVector) else CoefficientVector(v)


def coalesce(v, k: int) -> CoefficientVector:
    """C^{n,k}: k of the n lines merge; (Cv)_i = i/(n-k+1) v_{i+k-1} + (1 - i/(n-k+1)) v_i."""
    v = _as_vector(v)
    n = v.n
    if n < 2 or not 2 <= k <= n:
        raise ContractViolationError(f"coalesce needs n >= 2 and 2 <= k <= n, got n = {n}, k = {k}")
    m = n - k + 1
    i = np.arange(m + 1)
    weight = i / m
    return CoefficientVector(weight * v.entries[i + k - 1] + (1.0 - weight) * v.entries[i])


@lru_cache(maxsize=None)
def _selection_weights(n: int, ell: int, sel: SelectionKernel) -> np.ndarray:
    # row i: weights on v_0..v_n of E[p_K v_{i+1-K} + (1 - p_K) v_{i-K}], K ~ Hyp(n+l-1, i, l)
    table = np.zeros((n + ell, n + 1))
    row_p = sel.p[ell - 2]
    for i in range(n + ell):
        pmf = hyp_pmf(n + ell - 1, i, ell)
        for k, prob in enumerate(pmf):
            if prob == 0:
                continue
            table[i, i + 1 - k] += prob * row_p[k]
            table[i, i - k] += prob * (1.0 - row_p[k])
    table.setflags(write=False)
    return table


def select_branch(v, ell: int, sel: SelectionKernel) -> CoefficientVector:
    """D^{n,l}: the focal line branches into an interacting group of size l."""
    v = _as_vector(v)
    if not 2 <= ell <= sel.kappa:
        raise ContractViolationError(f"select_branch needs 2 <= l <= kappa = {sel.kappa}, got {ell}")
    if v.n < 1:
        raise ContractViolationError("select_branch needs at least one line")
    return CoefficientVector(_selection_weights(v.n, ell, sel) @ v.entries)


def select_branch_unit(n: int, ell: int, sel: SelectionKernel) -> np.ndarray:
    """Closed form of D^{n,l} e_n: entry i = p_{i+1-n} C(l, n+l-1-i) / C(n+l-1, n+l-1-i) for i >= n."""
    out = np.zeros(n + ell)
    for i in range(n, n + ell):
        out[i] = sel.p_of(ell, i + 1 - n) * math.comb(ell, n + ell - 1 - i) / math.comb(n + ell - 1, n + ell - 1 - i)
    return out


def mut_a(v, k: int) -> CoefficientVector:
    """M_a^{n,k}: k lines are resolved to type a, (v_{i+k})_{i=0..n-k}."""
    v = _as_vector(v)
    if not 1 <= k <= v.n:
        raise ContractViolationError(f"mut_a needs 1 <= k <= n = {v.n}, got {k}")
    return CoefficientVector(v.entries[k:])


def mut_A(v, k: int) -> CoefficientVector:
    """M_A^{n,k}: k lines are resolved to type A, (v_i)_{i=0..n-k}."""
    v = _as_vector(v)
    if not 1 <= k <= v.n:
        raise ContractViolationError(f"mut_A needs 1 <= k <= n = {v.n}, got {k}")
    return CoefficientVector(v.entries[:v.n - k + 1])


@lru_cache(maxsize=None)
def _env_table(n: int, ell: int, favoured: str, limit: int) -> np.ndarray:
    pmf = ra_pmf if favoured == "a" else rA_pmf
    table = np.vstack([pmf(n, ell, i, limit=limit) for i in range(n + ell + 1)])
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class EnvOperatorMode:
    """How S_a / S_A are evaluated.

    ``exact`` enumerates the pairing law and refuses n + l above the cutoff;
    ``monte_carlo`` enumerates where allowed and otherwise averages pairing
    draws per entry, with the draw count set by ``se_budget``.
    """

    mode: str = "exact"
    se_budget: float = DEFAULT_SE_BUDGET
    limit: int = EXACT_ENUMERATION_LIMIT
    max_draws: int = MAX_MC_OPERATOR_DRAWS

    def __post_init__(self) -> None:
        if self.mode not in ENV_OPERATOR_MODES:
            raise ContractViolationError(f"env operator mode must be one of {ENV_OPERATOR_MODES}, got {self.mode}")
        if self.se_budget <= 0:
            raise ContractViolationError("se_budget must be positive")


EXACT = EnvOperatorMode()


def _env_apply(v: CoefficientVector, ell: int, favoured: str, mode: EnvOperatorMode,
               rng: Optional[np.random.Generator]) -> CoefficientVector:
    n = v.n
    if not 1 <= ell <= n:
        raise ContractViolationError(f"env operator needs 1 <= l <= n = {n}, got {ell}")
    if n + ell <= mode.limit:
        return CoefficientVector(_env_table(n, ell, favoured, mode.limit) @ v.entries)
    if mode.mode == "exact":
        raise EnumerationTooLargeError(f"env operator with n + l = {n + ell} exceeds the exact limit {mode.limit}; "
                                       f"enable the Monte Carlo operator mode")
    if rng is None:
        raise ContractViolationError("Monte Carlo env operator needs an rng stream")
    spread = 0.5 * float(np.max(v.entries) - np.min(v.entries))
    draws = max(1, math.ceil((spread / mode.se_budget) ** 2))
    if draws > mode.max_draws:
        raise EnumerationTooLargeError(f"env operator needs {draws} draws per entry for se {mode.se_budget}, "
                                       f"beyond the Monte Carlo budget {mode.max_draws}")
    logger.debug(f"Monte Carlo env operator: n = {n}, l = {ell}, draws = {draws}")
    out = np.empty(n + ell + 1)
    out[0], out[-1] = v.entries[0], v.entries[-1]
    for i in range(1, n + ell):
        if favoured == "a":
            r = ra_sample(n, ell, i, rng, size=draws)
        else:
            r = n - ra_sample(n, ell, n + ell - i, rng, size=draws)
        out[i] = float(np.mean(v.entries[r]))
    return CoefficientVector(out)


def env_a(v, ell: int, mode: EnvOperatorMode = EXACT, rng: Optional[np.random.Generator] = None) \
        -> CoefficientVector:
    """S_a^{n,l}: l lines branch in an a-favouring environment; entry i = E[v_R], R ~ HP(n+l, l, i)."""
    return _env_apply(_as_vector(v), ell, "a", mode, rng)


def env_A(v, ell: int, mode: EnvOperatorMode = EXACT, rng: Optional[np.random.Generator] = None) \
        -> CoefficientVector:
    """S_A^{n,l}: entry i = E[v_R], R ~ n - HP(n+l, l, n+l-i)."""
    return _env_apply(_as_vector(v), ell, "A", mode, rng)


def env_a_unit(n: int, ell: int) -> np.ndarray:
    """Closed form of S_a^{n,l} e_n: entry i = 2^{n+l-i} C(l, n+l-i) / C(n+l, n+l-i) for i >= n."""
    out = np.zeros(n + ell + 1)
    for i in range(n, n + ell + 1):
        out[i] = 2 ** (n + ell - i) * math.comb(ell, n + ell - i) / math.comb(n + ell, n + ell - i)
    return out


def bernstein_eval(x, w) -> Union[float, np.ndarray]:
    """Duality functional H(x, w) = sum_i w_i C(m, i) x^i (1 - x)^(m - i)."""
    if np.any(np.asarray(x) < 0) or np.any(np.asarray(x) > 1):
        raise ContractViolationError(f"x must lie in [0, 1], got {x}")
    return bernstein_polynomial(_as_vector(w).entries, x)


def operator_matrix(apply: Callable[[CoefficientVector], CoefficientVector], in_dim: int) -> np.ndarray:
    """Materialize a linear operator column by column from unit vectors."""
    columns = []
    for j in range(in_dim):
        unit = np.zeros(in_dim)
        unit[j] = 1.0
        columns.append(apply(CoefficientVector(unit)).entries)
    return np.column_stack(columns)

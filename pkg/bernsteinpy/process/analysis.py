# -*- coding: utf-8 -*-
"""Verification layer: Bernstein duality checks, fixation probabilities, stationary
moments and moment-recursion residuals."""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from bernsteinpy.data.statistic import mc_summary, monotone_within, z_score
from bernsteinpy.global_variable import DEFAULT_BATCHES, DEFAULT_DT, DEFAULT_L_MAX, EXACT_ENUMERATION_LIMIT, \
    GENERATOR_MAX_DIM, RECURSION_EXACT_LIMIT, Z_THRESHOLD
from bernsteinpy.model.dual import DualSimulator
from bernsteinpy.model.forward import ForwardConfig, ForwardSimulator
from bernsteinpy.model.func._bernstein import bernstein_derivative, bernstein_polynomial, bernstein_to_monomial
from bernsteinpy.model.measures import ModelParams
from bernsteinpy.model.operators import EXACT, CoefficientVector, EnvOperatorMode, bernstein_eval
from bernsteinpy.utils.exceptions import AssumptionViolationError, ContractViolationError, \
    EnumerationTooLargeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MomentTable:
    """Stationary moments rho_0..rho_nmax with their standard errors; rho_0 = 1 exactly."""

    rho: np.ndarray
    se: np.ndarray
    reps: int = 0

    def __post_init__(self) -> None:
        if len(self.rho) != len(self.se) or len(self.rho) == 0:
            raise ContractViolationError("rho and se must be nonempty and of equal length")
        if self.rho[0] != 1.0:
            raise ContractViolationError(f"rho_0 must be 1, got {self.rho[0]}")

    @classmethod
    def exact(cls, rho: Sequence[float]) -> "MomentTable":
        """A table of known moments, with zero standard errors."""
        rho = np.asarray(rho, dtype=float)
        return cls(rho=rho, se=np.zeros_like(rho))

    @property
    def n_max(self) -> int:
        return len(self.rho) - 1

    def combine(self, coefficients: np.ndarray) -> tuple:
        """sum_k c_k rho_k with its propagated standard error."""
        coefficients = np.asarray(coefficients, dtype=float)
        if len(coefficients) - 1 > self.n_max:
            raise ContractViolationError(
                f"moment table too short: need rho up to {len(coefficients) - 1}, have up to {self.n_max}")
        k = len(coefficients)
        value = float(coefficients @ self.rho[:k])
        se = float(math.sqrt(np.sum((coefficients * self.se[:k]) ** 2)))
        return value, se

    def is_monotone(self, n_se: float = Z_THRESHOLD) -> bool:
        """1 = rho_0 >= rho_1 >= ... >= 0 within ``n_se`` standard errors."""
        bounded = bool(np.all(self.rho >= -n_se * self.se - 1e-12))
        return bounded and monotone_within(self.rho, self.se, n_se)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"n": np.arange(self.n_max + 1), "rho": self.rho, "se": self.se,
                             "ci_low": self.rho - 1.96 * self.se, "ci_high": self.rho + 1.96 * self.se})


@dataclass(frozen=True)
class RecursionCoeffs:
    """alpha_n rho_n = sum_k alpha_{n,k} rho_k for k = 0..upper."""

    n: int
    alpha_n: float
    alpha_nk: np.ndarray

    @property
    def upper(self) -> int:
        return len(self.alpha_nk) - 1

    def residual_coefficients(self) -> np.ndarray:
        """c with c . rho = alpha_n rho_n - sum_k alpha_{n,k} rho_k."""
        c = -np.asarray(self.alpha_nk, dtype=float).copy()
        c[self.n] += self.alpha_n
        return c

    def to_dict(self) -> dict:
        return {"n": self.n, "alpha_n": self.alpha_n, "alpha_nk": self.alpha_nk.tolist(), "upper": self.upper}


def recursion_upper(n: int, kappa: int) -> int:
    # the upper summation limit is read as the maximum of the selection and environment blocks
    return max(n + kappa - 1, 2 * n)


def _require_stationary(params: ModelParams, force: bool) -> None:
    report = params.check_assumption()
    if not report.verdict:
        if not force:
            raise AssumptionViolationError(f"recurrence condition fails: {report.to_dict()}; use force to override")
        logger.warning(f"recurrence condition fails for '{params.name}', running anyway")


# Bernstein duality


def duality_gap(params: ModelParams, x: float, v, t: float, reps: int, seed: int = 0, dt: float = DEFAULT_DT,
                l_max: int = DEFAULT_L_MAX, env_mode: EnvOperatorMode = EXACT, n_jobs: int = 1) -> Dict:
    """Compare E_x[H(X_t, v)] from the forward process with E_v[H(x, V_t)] from the dual.

    Parameters
    ----------
    params : ModelParams
        The model.

    x : float
        Initial frequency of the forward process, in [0, 1].

    v : sequence of float or CoefficientVector
        Initial state of the dual.

    t : float
        Common time horizon.

    reps : int
        Replicas on each side.

    Returns
    -------
    report : dict
        ``lhs`` and ``rhs`` summaries (estimate, se, ci_low, ci_high) and their joint ``z``.
    """
    if not 0 <= x <= 1:
        raise ContractViolationError(f"x must lie in [0, 1], got {x}")
    v = v if isinstance(v, CoefficientVector) else CoefficientVector(v)
    if t == 0:
        exact = bernstein_eval(x, v)
        side = {"estimate": exact, "se": 0.0, "ci_low": exact, "ci_high": exact, "reps": reps}
        return {"x": x, "t": t, "v": v.entries.tolist(), "lhs": dict(side), "rhs": dict(side), "z": 0.0}
    forward = ForwardSimulator(params, seed=seed, n_jobs=n_jobs, stream=(0,))
    terminal = forward.terminal_values(ForwardConfig(x0=x, t_end=t, dt=min(dt, t)), reps)
    lhs = mc_summary(bernstein_eval(terminal, v))
    dual = DualSimulator(params, l_max=l_max, env_mode=env_mode, seed=seed, n_jobs=n_jobs, stream=(1,))
    rhs = mc_summary(dual.replicate(v, reps, t_end=t, x=x))
    z = z_score(lhs["estimate"], lhs["se"], rhs["estimate"], rhs["se"])
    logger.info(f"duality gap at x = {x}, t = {t}: lhs {lhs['estimate']:.6f}, rhs {rhs['estimate']:.6f}, z {z:.3f}")
    return {"x": x, "t": t, "v": v.entries.tolist(), "lhs": lhs, "rhs": rhs, "z": z}


def forward_generator(params: ModelParams, x: float, w) -> float:
    """A H(., w)(x) from the atom sums of the forward generator."""
    w = (w if isinstance(w, CoefficientVector) else CoefficientVector(w)).entries
    h = bernstein_polynomial(w, x)
    value = (params.sel.d_poly(x) + params.theta_a * (1 - x) - params.theta_A * x) * bernstein_derivative(w, x, 1)
    value += 0.5 * params.lambda0 * x * (1 - x) * bernstein_derivative(w, x, 2)
    for r, weight in params.lambda_tail:
        up = bernstein_polynomial(w, x + r * (1 - x))
        down = bernstein_polynomial(w, x - r * x)
        value += weight / r ** 2 * (x * (up - h) + (1 - x) * (down - h))
    for r, weight in params.mu:
        value += weight / abs(r) * (bernstein_polynomial(w, x + r * x * (1 - x)) - h)
    for r, weight in params.nu:
        target = x + r * (1 - x) if r > 0 else x + r * x
        value += weight / abs(r) * (bernstein_polynomial(w, target) - h)
    return float(value)


def dual_generator(params: ModelParams, x: float, w) -> float:
    """B H(x, .)(w): rate-weighted differences over the dual event catalog, env operators in exact mode."""
    w = w if isinstance(w, CoefficientVector) else CoefficientVector(w)
    dual = DualSimulator(params, env_mode=EXACT, check_invariants=False)
    h = bernstein_eval(x, w)
    value = 0.0
    for event in dual.enumerate_events(w.n).events:
        value += event.rate * (bernstein_eval(x, dual.apply_event(w, event)) - h)
    return float(value)


def generator_residual(params: ModelParams, x: float, w) -> float:
    """|A H(., w)(x) - B H(x, .)(w)|; zero up to roundoff."""
    w = w if isinstance(w, CoefficientVector) else CoefficientVector(w)
    if not 0 <= x <= 1:
        raise ContractViolationError(f"x must lie in [0, 1], got {x}")
    if w.dim > GENERATOR_MAX_DIM:
        raise EnumerationTooLargeError(
            f"dim(w) = {w.dim} exceeds {GENERATOR_MAX_DIM}; env operators cannot run in exact mode")
    return abs(forward_generator(params, x, w) - dual_generator(params, x, w))


# fixation


def genic_fixation(x, s: float, lambda0: float = 1.0):
    """Diffusion fixation probability (1 - exp(-2 s x / lambda0)) / (1 - exp(-2 s / lambda0)); x when s = 0."""
    x = np.asarray(x, dtype=float)
    if s == 0:
        out = x
    else:
        out = np.expm1(-2 * s * x / lambda0) / np.expm1(-2 * s / lambda0)
    return float(out) if out.ndim == 0 else out


def fixation_probability(params: ModelParams, x, horizon: float, burn_in: Optional[float] = None,
                         batches: int = DEFAULT_BATCHES, seed: int = 0, l_max: int = DEFAULT_L_MAX,
                         env_mode: EnvOperatorMode = EXACT, forward_reps: int = 0, forward_t: float = 20.0,
                         dt: float = DEFAULT_DT, force: bool = False, n_jobs: int = 1) -> pd.DataFrame:
    """f(x) = P_x(X absorbed at 1) as the time average of H(x, V_t) from V_0 = e_1.

    One dual path serves the whole x grid. With ``forward_reps > 0`` a forward estimate
    (fraction of paths at 1 by ``forward_t``) is added per x.

    Raises
    ------
    AssumptionViolationError
        Mutations are present, or the recurrence condition fails and ``force`` is False.
    """
    if params.has_mutations():
        raise AssumptionViolationError("fixation needs a mutation-free model (theta = 0, nu = 0)")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    dual = DualSimulator(params, l_max=l_max, env_mode=env_mode, seed=seed, stream=(0,))
    table = dual.stationary_functional(xs, horizon=horizon, burn_in=burn_in, batches=batches, force=force)
    # H(0, v) = v_0 = 0 and H(1, v) = v_last = 1 along the whole path
    table.loc[table["x"] == 0.0, ["estimate", "se", "ci_low", "ci_high"]] = 0.0
    table.loc[table["x"] == 1.0, ["estimate", "se", "ci_low", "ci_high"]] = 1.0
    if forward_reps > 0:
        forward = ForwardSimulator(params, seed=seed, n_jobs=n_jobs, stream=(1,))
        estimates, errors, unabsorbed = [], [], []
        for xi in xs:
            summary = forward.absorption_fraction(ForwardConfig(x0=float(xi), t_end=forward_t, dt=dt), forward_reps)
            estimates.append(summary["estimate"])
            errors.append(summary["se"])
            unabsorbed.append(summary["unabsorbed"])
        table["forward_estimate"] = estimates
        table["forward_se"] = errors
        table["forward_unabsorbed"] = unabsorbed
        table["z"] = [z_score(a, sa, b, sb) for a, sa, b, sb in
                      zip(table["estimate"], table["se"], table["forward_estimate"], table["forward_se"])]
    table.attrs["monotone"] = monotone_within(table["estimate"], table["se"], increasing=True) \
        if np.all(np.diff(xs) >= 0) else None
    return table


# stationary moments


def beta_moments(theta_a: float, theta_A: float, n_max: int, lambda0: float = 1.0) -> np.ndarray:
    """Moments 0..n_max of Beta(2 theta_a / lambda0, 2 theta_A / lambda0), the stationary law without jumps or selection."""
    a, b = 2 * theta_a / lambda0, 2 * theta_A / lambda0
    rho = np.ones(n_max + 1)
    for j in range(n_max):
        rho[j + 1] = rho[j] * (a + j) / (a + b + j)
    return rho


def stationary_moments(params: ModelParams, n_max: int, reps: int, seed: int = 0, l_max: int = DEFAULT_L_MAX,
                       env_mode: EnvOperatorMode = EXACT, force: bool = False, n_jobs: int = 1) -> MomentTable:
    """rho_n = E_{e_n}[V_inf] for n = 0..n_max, each from ``reps`` absorbed dual paths.

    Every n has its own stream family, so tables for different n_max share their common rows.
    """
    if not params.has_mutations():
        raise AssumptionViolationError("stationary moments need mutations (theta > 0 or nu != 0)")
    if n_max < 0:
        raise ContractViolationError(f"n_max must be nonnegative, got {n_max}")
    _require_stationary(params, force)
    rho, se = np.ones(n_max + 1), np.zeros(n_max + 1)
    for n in range(1, n_max + 1):
        dual = DualSimulator(params, l_max=l_max, env_mode=env_mode, seed=seed, n_jobs=n_jobs, stream=(n,))
        summary = mc_summary(dual.replicate(CoefficientVector.unit(n), reps))
        rho[n], se[n] = summary["estimate"], summary["se"]
        logger.debug(f"rho_{n} = {rho[n]:.6f} +- {se[n]:.6f}")
    return MomentTable(rho=rho, se=se, reps=reps)


def forward_stationary_moments(params: ModelParams, n_max: int, reps: int, t_burn: float, horizon: float,
                               x0: float = 0.5, dt: float = DEFAULT_DT, seed: int = 0, n_jobs: int = 1) \
        -> pd.DataFrame:
    """E[X_inf^k], k = 1..n_max, from time averages of ``reps`` independent long forward runs.

    Each run is burnt in for ``t_burn`` and then averaged over ``horizon``; the spread of the
    per-run averages gives the standard error.
    """
    if not params.has_mutations():
        raise AssumptionViolationError("the forward process has a stationary law only with mutations")
    forward = ForwardSimulator(params, seed=seed, n_jobs=n_jobs)
    burn = ForwardConfig(x0=x0, t_end=t_burn, dt=min(dt, t_burn) if t_burn > 0 else dt)
    window = ForwardConfig(x0=x0, t_end=horizon, dt=min(dt, horizon))
    averages = forward.time_average_moments(burn, window, n_max, reps)
    rows = []
    for k in range(1, n_max + 1):
        rows.append({"k": k, **mc_summary(averages[k - 1])})
    return pd.DataFrame(rows)


def expected_absorbed_value(v, rho: MomentTable) -> float:
    """E_v[V_inf] = sum_k (monomial coefficient k of H(., v)) rho_k."""
    v = v if isinstance(v, CoefficientVector) else CoefficientVector(v)
    return rho.combine(bernstein_to_monomial(v.entries))[0]


def absorbed_value_estimate(params: ModelParams, v, reps: int, seed: int = 0, l_max: int = DEFAULT_L_MAX,
                            env_mode: EnvOperatorMode = EXACT, n_jobs: int = 1) -> Dict[str, float]:
    """Direct Monte Carlo E_v[V_inf] from ``reps`` dual paths started at v."""
    v = v if isinstance(v, CoefficientVector) else CoefficientVector(v)
    dual = DualSimulator(params, l_max=l_max, env_mode=env_mode, seed=seed, n_jobs=n_jobs, stream=(0,))
    return mc_summary(dual.replicate(v, reps))


# moment recursion


def recursion_coeffs(params: ModelParams, n: int) -> RecursionCoeffs:
    """alpha_n and alpha_{n,k} from the closed displays, with exact factorials.

    Parameters
    ----------
    params : ModelParams
        The model; only atomic measures enter.

    n : int
        1 <= n <= RECURSION_EXACT_LIMIT.
    """
    if not 1 <= n <= RECURSION_EXACT_LIMIT:
        raise ContractViolationError(f"recursion coefficients need 1 <= n <= {RECURSION_EXACT_LIMIT}, got {n}")
    sel = params.sel
    fact = math.factorial
    comb = math.comb

    alpha_n = params.closed_form_dual_rate(n)

    upper = recursion_upper(n, sel.kappa)
    alpha = np.zeros(upper + 1)
    # coalescence and mutation lower the degree
    for k in range(n):
        alpha[k] += comb(n, k) * (params.mut_rate(n, n - k, "a") + (params.theta_a if k == n - 1 else 0.0))
        if k >= 1:
            alpha[k] += comb(n, k - 1) * params.lambda_rate(n, n - k + 1)
    # selective branching
    for k in range(n, n + sel.kappa):
        for ell in range(max(2, k - n + 1), sel.kappa + 1):
            inner = 0.0
            for i in range(n, k + 1):
                inner += (-1) ** (k - i) * sel.p_of(ell, i + 1 - n) * fact(ell) \
                    / (fact(n + ell - 1 - k) * fact(k - i) * fact(i + 1 - n))
            alpha[k] += n * sel.beta_of(ell) * inner
    # environmental branching
    for k in range(n, 2 * n + 1):
        if k >= n + 1:
            alpha[k] += comb(n, k - n) * params.env_rate(n, k - n, "A")
        for ell in range(max(1, k - n), n + 1):
            inner = 0.0
            for i in range(n, k + 1):
                inner += (-1) ** (k - i) * 2 ** (n + ell - i) * fact(ell) \
                    / (fact(n + ell - k) * fact(k - i) * fact(i - n))
            alpha[k] += comb(n, ell) * params.env_rate(n, ell, "a") * inner
    return RecursionCoeffs(n=n, alpha_n=float(alpha_n), alpha_nk=alpha)


def recursion_coeffs_from_operators(params: ModelParams, n: int) -> RecursionCoeffs:
    """The same coefficients from sum over events of rate times the monomial coefficients of H(., Op e_n)."""
    if not 1 <= n <= EXACT_ENUMERATION_LIMIT // 2:
        raise ContractViolationError(f"operator-derived coefficients need 1 <= n <= {EXACT_ENUMERATION_LIMIT // 2}")
    dual = DualSimulator(params, env_mode=EXACT, check_invariants=False)
    unit = CoefficientVector.unit(n)
    alpha = np.zeros(recursion_upper(n, params.sel.kappa) + 1)
    catalog = dual.enumerate_events(n)
    for event in catalog.events:
        monomial = bernstein_to_monomial(dual.apply_event(unit, event).entries)
        alpha[:len(monomial)] += event.rate * monomial
    return RecursionCoeffs(n=n, alpha_n=catalog.total_rate, alpha_nk=alpha)


def recursion_residual(params: ModelParams, n: int, rho: MomentTable) -> Dict[str, float]:
    """|alpha_n rho_n - sum_k alpha_{n,k} rho_k| with its propagated standard error.

    Raises
    ------
    ContractViolationError
        ``rho`` stops before max(n + kappa - 1, 2n).
    """
    coeffs = recursion_coeffs(params, n)
    if rho.n_max < coeffs.upper:
        raise ContractViolationError(f"moment table too short: recursion {n} needs rho up to {coeffs.upper}, "
                                     f"have up to {rho.n_max}")
    value, se = rho.combine(coeffs.residual_coefficients())
    residual = abs(value)
    scaled = residual / se if se > 0 else (0.0 if residual < 1e-12 else math.inf)
    return {"n": n, "upper": coeffs.upper, "alpha_n": coeffs.alpha_n, "residual": residual, "se": se,
            "scaled": scaled}

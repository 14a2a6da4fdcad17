# -*- coding: utf-8 -*-
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from bernsteinpy.data.statistic import mc_summary, z_score
from bernsteinpy.global_variable import DATASET_OUTPUT_PATH, DEFAULT_DT, DEFAULT_FIXATION_HORIZON, \
    DEFAULT_FORWARD_HORIZON, DEFAULT_L_MAX, DEFAULT_N_MAX, DEFAULT_POPULATION_SIZE, DEFAULT_REPLICAS, \
    DUALITY_T_GRID, DUALITY_X_GRID, FIXATION_GRID_POINTS, FIXATION_TOLERANCE, GENERATOR_MAX_DIM, \
    GENERATOR_TOLERANCE, LYAPUNOV_N_MAX, MAX_Z_EXCURSIONS, OUTPUT_FORMATS, SUBCOMMANDS, TOOL_VERSION, Z_THRESHOLD
from bernsteinpy.model.dual import DualSimulator
from bernsteinpy.model.forward import ForwardConfig, ForwardSimulator
from bernsteinpy.model.func._bernstein import bernstein_to_monomial
from bernsteinpy.model.measures import ModelParams
from bernsteinpy.model.moran import MoranSimulator
from bernsteinpy.model.operators import CoefficientVector, EnvOperatorMode, bernstein_eval
from bernsteinpy.process.analysis import MomentTable, absorbed_value_estimate, beta_moments, duality_gap, \
    expected_absorbed_value, fixation_probability, generator_residual, genic_fixation, recursion_coeffs, \
    recursion_coeffs_from_operators, recursion_residual, recursion_upper, stationary_moments
from bernsteinpy.utils.base import config_hash, replica_rng, save_data, save_json
from bernsteinpy.utils.exceptions import ContractViolationError

logger = logging.getLogger(__name__)


@dataclass
class RunOptions:
    """Command-line options shared by every subcommand; None means the subcommand's own default."""

    seed: int = 0
    replicas: int = DEFAULT_REPLICAS
    t: Optional[float] = None
    x0: Optional[float] = None
    dt: float = DEFAULT_DT
    v: Optional[List[float]] = None
    n_max: int = DEFAULT_N_MAX
    out: str = DATASET_OUTPUT_PATH
    fmt: str = "json"
    force: bool = False
    population_size: int = DEFAULT_POPULATION_SIZE
    l_max: int = DEFAULT_L_MAX
    env_mode: str = "exact"
    n_jobs: int = 1

    def __post_init__(self) -> None:
        if self.fmt not in OUTPUT_FORMATS:
            raise ContractViolationError(f"format must be one of {OUTPUT_FORMATS}, got {self.fmt}")
        if self.replicas < 1:
            raise ContractViolationError(f"replicas must be positive, got {self.replicas}")
        if self.x0 is not None and not 0 <= self.x0 <= 1:
            raise ContractViolationError(f"x0 must lie in [0, 1], got {self.x0}")
        if self.t is not None and self.t < 0:
            raise ContractViolationError(f"t must be nonnegative, got {self.t}")

    @property
    def env_operator_mode(self) -> EnvOperatorMode:
        return EnvOperatorMode(mode=self.env_mode)

    def to_dict(self) -> Dict[str, Any]:
        # the output directory does not influence results
        return {k: v for k, v in self.__dict__.items() if k != "out"}


@dataclass
class RunRecord:
    """Everything needed to reproduce a run; ``timestamp`` is the only non-deterministic field."""

    command: str
    config: Dict[str, Any]
    config_hash: str
    seed: int
    options: Dict[str, Any]
    outputs: Dict[str, Any] = field(default_factory=dict)
    verdict: bool = True
    tool_version: str = TOOL_VERSION
    timestamp: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


CheckResult = Tuple[Dict[str, Any], Dict[str, pd.DataFrame], bool]


def _z_excursions(z: pd.Series) -> int:
    return int(np.sum(np.abs(np.asarray(z, dtype=float)) > Z_THRESHOLD))


def genic_strength(params: ModelParams) -> Optional[float]:
    """s when the model is a Wright-Fisher diffusion with drift s x (1-x) and nothing else, else None."""
    if params.lambda0 <= 0 or not params.lambda_tail.is_zero() or not params.mu.is_zero() or params.has_mutations():
        return None
    c = params.sel.monomial_coefficients()
    if len(c) < 3 or np.any(np.abs(c[3:]) > 1e-12) or abs(c[0]) > 1e-12 or abs(c[1] + c[2]) > 1e-12:
        return None
    return float(c[1])


def beta_oracle(params: ModelParams, n_max: int) -> Optional[np.ndarray]:
    """Beta moments when the model is a Wright-Fisher diffusion with individual mutation only, else None."""
    if params.lambda0 <= 0 or not params.lambda_tail.is_zero() or not params.mu.is_zero() \
            or not params.nu.is_zero() or params.sel.total_beta > 0 or params.theta_a <= 0 or params.theta_A <= 0:
        return None
    return beta_moments(params.theta_a, params.theta_A, n_max, lambda0=params.lambda0)


def _random_vector(seed: int, dim: int) -> List[float]:
    # a stream outside the replica key space
    return replica_rng(seed, 2 ** 31 - 1).random(dim).round(6).tolist()


class CheckSelection(object):
    """Run one subcommand on a model and assemble its run record."""

    def __init__(self, command: str) -> None:
        if command not in SUBCOMMANDS:
            raise ContractViolationError(f"unknown subcommand {command}, expected one of {SUBCOMMANDS}")
        self.command = command

    def activate(self, params: ModelParams, config: Dict[str, Any], options: RunOptions) -> RunRecord:
        print(f"-----* {self.command} on '{params.name}' *-----")
        logger.debug(f"{self.command}: options {options.to_dict()}")
        if self.command == "check":
            outputs, tables, verdict = self.check(params, options)
        elif self.command == "simulate-forward":
            outputs, tables, verdict = self.simulate_forward(params, options)
        elif self.command == "simulate-dual":
            outputs, tables, verdict = self.simulate_dual(params, options)
        elif self.command == "moran":
            outputs, tables, verdict = self.moran(params, options)
        elif self.command == "duality":
            outputs, tables, verdict = self.duality(params, options)
        elif self.command == "fixation":
            outputs, tables, verdict = self.fixation(params, options)
        elif self.command == "moments":
            outputs, tables, verdict = self.moments(params, options)
        else:
            outputs, tables, verdict = self.recursion(params, options)

        name = self.command.replace("-", "_")
        for table_name, table in tables.items():
            if options.fmt == "csv":
                outputs[table_name] = save_data(table, f"{name}_{table_name}", options.out)
            else:
                outputs[table_name] = table.to_dict(orient="records")
        record = RunRecord(command=self.command, config=config, config_hash=config_hash(config), seed=options.seed,
                           options=options.to_dict(), outputs=outputs, verdict=bool(verdict),
                           timestamp=datetime.now().isoformat(timespec="seconds"))
        save_json(record.to_dict(), f"{name}_report", options.out)
        print(f"Verdict: {'PASS' if record.verdict else 'FAIL'}")
        logger.info(f"{self.command} verdict {record.verdict}")
        return record

    @staticmethod
    def check(params: ModelParams, options: RunOptions) -> CheckResult:
        report = params.check_assumption()
        dual = DualSimulator(params, l_max=options.l_max, seed=options.seed)
        lyapunov = dual.lyapunov_report(1, LYAPUNOV_N_MAX)
        n0 = lyapunov.attrs["n0"]
        outputs = {"assumption": report.to_dict(), "c_infinite": report.c_infinite,
                   "rate_bound_constant": params.rate_bound_constant(), "has_mutations": params.has_mutations(),
                   "lyapunov_n0": n0, "params": params.to_dict()}
        if report.c_infinite:
            print("c(Lambda) is infinite: the recurrence condition holds trivially.")
        return outputs, {"lyapunov": lyapunov}, report.verdict

    @staticmethod
    def simulate_forward(params: ModelParams, options: RunOptions) -> CheckResult:
        x0 = 0.5 if options.x0 is None else options.x0
        t = 1.0 if options.t is None else options.t
        cfg = ForwardConfig(x0=x0, t_end=t, dt=min(options.dt, t) if t > 0 else options.dt, seed=options.seed)
        forward = ForwardSimulator(params, seed=options.seed, n_jobs=options.n_jobs)
        forward.show_info()
        path = forward.simulate_path(cfg)
        rows = []
        for k in range(1, options.n_max + 1):
            rows.append({"k": k, **forward.moment_estimate(cfg, k, options.replicas)})
        outputs: Dict[str, Any] = {"x0": x0, "t": t, "summary": forward.summary(), "jumps": len(path.jump_log)}
        if not params.has_mutations() and t > 0:
            outputs["absorption"] = forward.absorption_fraction(cfg, options.replicas)
        return outputs, {"path": path.to_frame(), "jump_log": path.jump_log, "moments": pd.DataFrame(rows)}, True

    @staticmethod
    def simulate_dual(params: ModelParams, options: RunOptions) -> CheckResult:
        v0 = CoefficientVector(options.v if options.v is not None else [0.0, 1.0])
        t = options.t if options.t is not None else (math.inf if params.has_mutations() else 1.0)
        dual = DualSimulator(params, l_max=options.l_max, env_mode=options.env_operator_mode, seed=options.seed,
                             n_jobs=options.n_jobs)
        dual.show_info()
        trace = dual.simulate_until(v0, t_end=t, rng=dual.rng(0), trace=True).trace
        paths = [dual.simulate_until(v0, t_end=t, rng=dual.rng(j + 1)) for j in range(options.replicas)]
        absorbed = np.array([p.absorbed for p in paths])
        outputs: Dict[str, Any] = {"v0": v0.entries.tolist(), "t": t, "summary": dual.summary(),
                                   "absorbed_fraction": float(absorbed.mean()),
                                   "max_L": int(max(p.max_L for p in paths)),
                                   "mean_events": float(np.mean([p.n_events for p in paths]))}
        if absorbed.any():
            outputs["v_inf"] = mc_summary(np.array([p.v_inf for p in paths if p.absorbed]))
        if options.x0 is not None:
            outputs["h_x_vt"] = mc_summary(np.array([bernstein_eval(options.x0, p.final_state.v) for p in paths]))
        return outputs, {"trace": trace}, True

    @staticmethod
    def moran(params: ModelParams, options: RunOptions) -> CheckResult:
        x0 = 0.5 if options.x0 is None else options.x0
        t = 1.0 if options.t is None else options.t
        moran = MoranSimulator(params, options.population_size, seed=options.seed, n_jobs=options.n_jobs)
        moran.show_info()
        i0 = int(round(x0 * moran.K))
        outputs: Dict[str, Any] = {"K": moran.K, "i0": i0, "event_rates": moran.event_rates(i0)}
        verdict = True
        tables: Dict[str, pd.DataFrame] = {}
        if not params.has_mutations():
            fixation = moran.moran_fixation(i0, options.replicas)
            outputs["fixation"] = fixation
            s = genic_strength(params)
            if s is not None:
                oracle = genic_fixation(i0 / moran.K, s, params.lambda0)
                outputs["diffusion_fixation"] = oracle
                if s == 0:
                    verdict = abs(fixation["estimate"] - oracle) <= Z_THRESHOLD * max(fixation["se"], 1e-12)
                else:
                    verdict = abs(fixation["estimate"] - oracle) <= 0.05 * oracle
        if t > 0:
            table = moran.moran_vs_sde(x0, t, list(range(1, options.n_max + 1)), options.replicas, options.dt)
            tables["moran_vs_sde"] = table
            verdict = verdict and _z_excursions(table["z"]) <= MAX_Z_EXCURSIONS
        return outputs, tables, verdict

    @staticmethod
    def duality(params: ModelParams, options: RunOptions) -> CheckResult:
        xs = DUALITY_X_GRID if options.x0 is None else [options.x0]
        ts = DUALITY_T_GRID if options.t is None else [options.t]
        vs = [options.v] if options.v is not None else [[0.0, 1.0], [0.0, 0.0, 1.0], _random_vector(options.seed, 3)]
        rows = []
        for v in vs:
            for x in xs:
                for t in ts:
                    gap = duality_gap(params, x, v, t, options.replicas, seed=options.seed, dt=options.dt,
                                      l_max=options.l_max, env_mode=options.env_operator_mode, n_jobs=options.n_jobs)
                    rows.append({"v": ",".join(f"{e:g}" for e in v), "x": x, "t": t,
                                 "lhs": gap["lhs"]["estimate"], "lhs_se": gap["lhs"]["se"],
                                 "rhs": gap["rhs"]["estimate"], "rhs_se": gap["rhs"]["se"], "z": gap["z"]})
        gaps = pd.DataFrame(rows)
        residuals = []
        for v in vs:
            if len(v) > GENERATOR_MAX_DIM:
                continue
            for x in np.linspace(0, 1, 11):
                residuals.append({"v": ",".join(f"{e:g}" for e in v), "x": float(x),
                                  "residual": generator_residual(params, float(x), v)})
        generator = pd.DataFrame(residuals, columns=["v", "x", "residual"])
        excursions = _z_excursions(gaps["z"])
        max_residual = float(generator["residual"].max()) if len(generator) else 0.0
        outputs = {"z_excursions": excursions, "max_abs_z": float(gaps["z"].abs().max()),
                   "max_generator_residual": max_residual}
        verdict = excursions <= MAX_Z_EXCURSIONS and max_residual <= GENERATOR_TOLERANCE
        return outputs, {"gaps": gaps, "generator": generator}, verdict

    @staticmethod
    def fixation(params: ModelParams, options: RunOptions) -> CheckResult:
        xs = np.linspace(0, 1, FIXATION_GRID_POINTS) if options.x0 is None else np.array([options.x0])
        horizon = DEFAULT_FIXATION_HORIZON if options.t is None else options.t
        table = fixation_probability(params, xs, horizon=horizon, seed=options.seed, l_max=options.l_max,
                                     env_mode=options.env_operator_mode, forward_reps=options.replicas,
                                     forward_t=DEFAULT_FORWARD_HORIZON, dt=options.dt, force=options.force,
                                     n_jobs=options.n_jobs)
        monotone = table.attrs.get("monotone")
        verdict = monotone is not False
        outputs: Dict[str, Any] = {"horizon": horizon, "monotone": monotone}
        s = genic_strength(params)
        if s is not None:
            table["oracle"] = genic_fixation(table["x"].to_numpy(), s, params.lambda0)
            error = float(np.max(np.abs(table["estimate"] - table["oracle"])))
            forward_error = float(np.max(np.abs(table["forward_estimate"] - table["oracle"])))
            outputs.update({"genic_s": s, "max_oracle_error": error, "max_forward_oracle_error": forward_error})
            verdict = verdict and error <= FIXATION_TOLERANCE and forward_error <= FIXATION_TOLERANCE
        return outputs, {"fixation": table}, verdict

    @staticmethod
    def moments(params: ModelParams, options: RunOptions) -> CheckResult:
        rho = stationary_moments(params, options.n_max, options.replicas, seed=options.seed, l_max=options.l_max,
                                 env_mode=options.env_operator_mode, force=options.force, n_jobs=options.n_jobs)
        table = rho.to_frame()
        verdict = rho.is_monotone()
        outputs: Dict[str, Any] = {"monotone": verdict}
        oracle = beta_oracle(params, options.n_max)
        if oracle is not None:
            table["oracle"] = oracle
            table["z"] = [z_score(r, s, o, 0.0) for r, s, o in zip(rho.rho, rho.se, oracle)]
            verdict = verdict and _z_excursions(table["z"]) == 0
        v = options.v if options.v is not None else _random_vector(options.seed, min(3, options.n_max + 1))
        if len(v) - 1 <= rho.n_max:
            formula = expected_absorbed_value(v, rho)
            formula_se = rho.combine(bernstein_to_monomial(np.asarray(v, dtype=float)))[1]
            direct = absorbed_value_estimate(params, v, options.replicas, seed=options.seed + 1, l_max=options.l_max,
                                             env_mode=options.env_operator_mode, n_jobs=options.n_jobs)
            z = z_score(formula, formula_se, direct["estimate"], direct["se"])
            outputs["absorbed_value"] = {"v": list(v), "formula": formula, "formula_se": formula_se, "direct": direct,
                                         "z": z}
            verdict = verdict and abs(z) <= Z_THRESHOLD
        return outputs, {"moments": table}, verdict

    @staticmethod
    def recursion(params: ModelParams, options: RunOptions) -> CheckResult:
        upper = recursion_upper(options.n_max, params.sel.kappa)
        rho = stationary_moments(params, upper, options.replicas, seed=options.seed, l_max=options.l_max,
                                 env_mode=options.env_operator_mode, force=options.force, n_jobs=options.n_jobs)
        oracle = beta_oracle(params, upper)
        rows = []
        for n in range(1, options.n_max + 1):
            row = recursion_residual(params, n, rho)
            if n <= 6:
                closed = recursion_coeffs(params, n)
                derived = recursion_coeffs_from_operators(params, n)
                row["operator_mismatch"] = float(max(abs(closed.alpha_n - derived.alpha_n),
                                                     np.max(np.abs(closed.alpha_nk - derived.alpha_nk))))
            if oracle is not None:
                row["exact_residual"] = recursion_residual(params, n, MomentTable.exact(oracle))["residual"]
            rows.append(row)
        table = pd.DataFrame(rows)
        verdict = bool(np.all(table["scaled"] <= Z_THRESHOLD))
        if "operator_mismatch" in table:
            verdict = verdict and bool(np.all(table["operator_mismatch"] <= 1e-9 * max(1.0, table["alpha_n"].max())))
        if "exact_residual" in table:
            verdict = verdict and bool(np.all(table["exact_residual"] <= 1e-10))
        outputs = {"upper_limit_reading": "max(n + kappa - 1, 2n)", "moments": rho.to_frame().to_dict(orient="records")}
        return outputs, {"residuals": table}, verdict

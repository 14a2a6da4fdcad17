# -*- coding: utf-8 -*-
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from bernsteinpy.data.statistic import mc_summary
from bernsteinpy.global_variable import DEFAULT_DT, REPLICA_BLOCK_SIZE
from bernsteinpy.model._base import SimulatorBase
from bernsteinpy.model.measures import ModelParams
from bernsteinpy.utils.exceptions import ContractViolationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForwardConfig:
    x0: float
    t_end: float
    dt: float = DEFAULT_DT
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.x0 <= 1:
            raise ContractViolationError(f"x0 must lie in [0, 1], got {self.x0}")
        if self.t_end < 0 or self.dt <= 0:
            raise ContractViolationError(f"need t_end >= 0 and dt > 0, got ({self.t_end}, {self.dt})")
        if self.t_end > 0 and self.dt > self.t_end:
            raise ContractViolationError(f"dt = {self.dt} exceeds t_end = {self.t_end}")

    @property
    def n_steps(self) -> int:
        return 0 if self.t_end == 0 else math.ceil(self.t_end / self.dt - 1e-9)

    @property
    def step_size(self) -> float:
        return self.t_end / self.n_steps if self.n_steps else 0.0


@dataclass(frozen=True)
class JumpChannel:
    """``neutral``: x -> x + r(1-x) if u <= x else x - r x, at rate w/r^2.
    ``env``: x -> x + r x (1-x), at rate w/|r|.
    ``coordmut``: x -> x + r(1-x) for r > 0, x -> x - |r| x for r < 0, at rate w/|r|.
    """

    kind: str
    r: float
    rate: float

    def apply(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        r = self.r
        if self.kind == "neutral":
            return np.where(u <= x, x + r * (1 - x), x - r * x)
        if self.kind == "env":
            return x + r * x * (1 - x)
        if r > 0:
            return x + r * (1 - x)
        return x + r * x


@dataclass(frozen=True)
class JumpCatalog:
    channels: Tuple[JumpChannel, ...]

    @classmethod
    def from_params(cls, params: ModelParams) -> "JumpCatalog":
        channels: List[JumpChannel] = []
        for r, w in params.lambda_tail:
            channels.append(JumpChannel("neutral", r, w / r ** 2))
        for r, w in params.mu:
            channels.append(JumpChannel("env", r, w / abs(r)))
        for r, w in params.nu:
            channels.append(JumpChannel("coordmut", r, w / abs(r)))
        return cls(tuple(channels))

    @property
    def total_rate(self) -> float:
        return float(sum(c.rate for c in self.channels))

    @property
    def probabilities(self) -> np.ndarray:
        rates = np.array([c.rate for c in self.channels])
        return rates / rates.sum()


@dataclass
class ForwardPath:
    times: np.ndarray
    values: np.ndarray
    jump_log: pd.DataFrame

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times, "x": self.values})


class ForwardSimulator(SimulatorBase):
    """Operator-splitting scheme for the Lambda-Wright-Fisher jump diffusion.

    Each step of length dt: Euler-Maruyama for drift and Wright-Fisher noise, clamped
    to [0, 1], then a Poisson number of jumps from the finite atomic jump catalog.
    Ensembles are vectorized over replicas.
    """

    name = "Lambda-Wright-Fisher Jump Diffusion"
    special_function = ['Path Simulation', 'Moment Estimate', 'Absorption Fraction']

    def __init__(self, params: ModelParams, seed: int = 0, n_jobs: int = 1, stream: Tuple[int, ...] = ()) -> None:
        super().__init__(params, seed=seed, n_jobs=n_jobs, stream=stream)
        self.jumps = JumpCatalog.from_params(params)
        self.freeze_at_boundary = not params.has_mutations()

    def drift(self, x: np.ndarray) -> np.ndarray:
        p = self.params
        return p.sel.d_poly(x) + p.theta_a * (1 - x) - p.theta_A * x

    def _advance(self, x: np.ndarray, dt: float, rng: np.random.Generator,
                 log: Optional[list] = None, t: float = 0.0) -> np.ndarray:
        active = np.ones(x.shape, dtype=bool)
        if self.freeze_at_boundary:
            active = (x > 0) & (x < 1)
            if not active.any():
                return x
        xa = x[active]
        noise = rng.standard_normal(xa.shape)
        xa = xa + self.drift(xa) * dt + np.sqrt(self.params.lambda0 * xa * (1 - xa)) * math.sqrt(dt) * noise
        xa = np.clip(xa, 0.0, 1.0)
        if self.jumps.channels:
            counts = rng.poisson(self.jumps.total_rate * dt, size=xa.shape)
            for j in range(int(counts.max(initial=0))):
                firing = counts > j
                choice = rng.choice(len(self.jumps.channels), size=int(firing.sum()), p=self.jumps.probabilities)
                u = rng.random(choice.shape)
                before = xa[firing]
                after = before.copy()
                for c, channel in enumerate(self.jumps.channels):
                    hit = choice == c
                    if hit.any():
                        after[hit] = channel.apply(before[hit], u[hit])
                xa[firing] = np.clip(after, 0.0, 1.0)
                if log is not None:
                    for c, b, a in zip(choice, before, after):
                        channel = self.jumps.channels[c]
                        log.append((t, channel.kind, channel.r, float(b), float(a)))
        out = x.copy()
        out[active] = xa
        return out

    def simulate_path(self, cfg: ForwardConfig, rng: Optional[np.random.Generator] = None) -> ForwardPath:
        """One trajectory on the step grid, with a log of every jump."""
        rng = self.rng(0) if rng is None else rng
        h = cfg.step_size
        times = np.arange(cfg.n_steps + 1) * h
        values = np.empty(cfg.n_steps + 1)
        values[0] = cfg.x0
        x = np.array([cfg.x0])
        log: list = []
        for s in range(cfg.n_steps):
            x = self._advance(x, h, rng, log=log, t=times[s + 1])
            values[s + 1] = x[0]
        jump_log = pd.DataFrame(log, columns=["t", "channel", "r", "x_before", "x_after"])
        return ForwardPath(times=times, values=values, jump_log=jump_log)

    def _block_terminal(self, block: int, cfg: ForwardConfig, size: int) -> np.ndarray:
        rng = self.rng(block)
        x = np.full(size, cfg.x0, dtype=float)
        h = cfg.step_size
        for _ in range(cfg.n_steps):
            x = self._advance(x, h, rng)
            if self.freeze_at_boundary and np.all((x == 0) | (x == 1)):
                break
        return x

    def terminal_values(self, cfg: ForwardConfig, reps: int) -> np.ndarray:
        """X_t for ``reps`` replicas; blocks of replicas share one stream keyed by (seed, block)."""
        if cfg.n_steps == 0:
            return np.full(reps, cfg.x0, dtype=float)
        sizes = [min(REPLICA_BLOCK_SIZE, reps - start) for start in range(0, reps, REPLICA_BLOCK_SIZE)]
        blocks = self.fan_out(lambda b: self._block_terminal(b, cfg, sizes[b]), list(range(len(sizes))))
        return np.concatenate(blocks)

    def _block_time_average(self, block: int, burn: ForwardConfig, window: ForwardConfig, n_max: int,
                            size: int) -> np.ndarray:
        rng = self.rng(block)
        x = np.full(size, burn.x0, dtype=float)
        for _ in range(burn.n_steps):
            x = self._advance(x, burn.step_size, rng)
        powers = np.arange(1, n_max + 1)[:, None]
        sums = np.zeros((n_max, size))
        for _ in range(window.n_steps):
            x = self._advance(x, window.step_size, rng)
            sums += x[None, :] ** powers
        return sums / window.n_steps

    def time_average_moments(self, burn: ForwardConfig, window: ForwardConfig, n_max: int, reps: int) -> np.ndarray:
        """Per-replica time averages of X^k, k = 1..n_max, over ``window`` after a ``burn`` run.

        Returns an array of shape (n_max, reps).
        """
        if window.n_steps == 0:
            raise ContractViolationError("the averaging window must have positive length")
        sizes = [min(REPLICA_BLOCK_SIZE, reps - start) for start in range(0, reps, REPLICA_BLOCK_SIZE)]
        blocks = self.fan_out(lambda b: self._block_time_average(b, burn, window, n_max, sizes[b]),
                              list(range(len(sizes))))
        return np.concatenate(blocks, axis=1)

    def moment_estimate(self, cfg: ForwardConfig, k: int, reps: int) -> dict:
        """E[X_t^k] with standard error and confidence interval."""
        if k < 0:
            raise ContractViolationError(f"moment order must be nonnegative, got {k}")
        if cfg.n_steps == 0:
            exact = cfg.x0 ** k
            return {"estimate": exact, "se": 0.0, "ci_low": exact, "ci_high": exact, "reps": reps}
        values = self.terminal_values(cfg, reps)
        return mc_summary(values ** k)

    def absorption_fraction(self, cfg: ForwardConfig, reps: int) -> dict:
        """Fraction of replicas fixed at 1 by t_end, plus the fraction still in (0, 1)."""
        values = self.terminal_values(cfg, reps)
        summary = mc_summary((values == 1.0).astype(float))
        summary["unabsorbed"] = float(np.mean((values > 0) & (values < 1)))
        if summary["unabsorbed"] > 0:
            logger.warning(f"{summary['unabsorbed']:.4f} of forward paths unabsorbed at t = {cfg.t_end}")
        return summary

    def summary(self) -> dict:
        return {"simulator": self.name, "jump_channels": len(self.jumps.channels),
                "jump_rate": self.jumps.total_rate, "seed": self.seed}

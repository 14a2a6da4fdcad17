# -*- coding: utf-8 -*-
import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import hypergeom

from bernsteinpy.data.statistic import mc_summary, z_score
from bernsteinpy.global_variable import DEFAULT_DT, REPLICA_BLOCK_SIZE
from bernsteinpy.model._base import SimulatorBase
from bernsteinpy.model.forward import ForwardConfig, ForwardSimulator
from bernsteinpy.model.measures import ModelParams
from bernsteinpy.utils.exceptions import AssumptionViolationError, ContractViolationError

logger = logging.getLogger(__name__)

# state-dependent channels, with the sign of their +-1 step
STEP_CHANNELS = (("neutral_up", 1), ("neutral_down", -1), ("select_up", 1), ("select_down", -1),
                 ("mut_up", 1), ("mut_down", -1))


@dataclass(frozen=True)
class MoranState:
    K: int
    i: int
    clock: float = 0.0

    def __post_init__(self) -> None:
        if not 0 <= self.i <= self.K:
            raise ContractViolationError(f"need 0 <= i <= K, got i = {self.i}, K = {self.K}")

    @property
    def x(self) -> float:
        return self.i / self.K


class MoranSimulator(SimulatorBase):
    """Frequency chain of the K-individual Moran model with K-scaled parameters.

    Rates are in Moran time; process time t corresponds to Moran time K t.
    """

    name = "Moran Model"
    special_function = ['Event Rates', 'Fixation Probability', 'Moran vs SDE']

    def __init__(self, params: ModelParams, K: int, seed: int = 0, n_jobs: int = 1,
                 stream: Tuple[int, ...] = ()) -> None:
        super().__init__(params, seed=seed, n_jobs=n_jobs, stream=stream)
        if K < max(2, params.sel.kappa):
            raise ContractViolationError(f"population size must be at least max(2, kappa), got {K}")
        self.K = int(K)
        i = np.arange(self.K + 1)
        neutral = params.lambda0 * i * (self.K - i) / (2 * self.K)
        select_up, select_down = self._selection_rates(i)
        self._step_rates = np.vstack([neutral, neutral, select_up, select_down,
                                      params.theta_a * (self.K - i) / self.K, params.theta_A * i / self.K])
        self._atom_channels: List[Tuple[str, float]] = []
        atom_rates = []
        for r, w in params.lambda_tail:
            self._atom_channels.append(("large", r))
            atom_rates.append(w / (self.K * r ** 2))
        for r, w in params.mu:
            self._atom_channels.append(("env", r))
            atom_rates.append(w / (self.K * abs(r)))
        for r, w in params.nu:
            self._atom_channels.append(("coord", r))
            atom_rates.append(w / (self.K * abs(r)))
        self._atom_rates = np.array(atom_rates, dtype=float)

    def _selection_rates(self, i: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        # a focal individual gathers l - 1 others; it turns a w.p. p_j (focal A, j type-a others)
        # and turns A w.p. 1 - p_{j+1} (focal a)
        K, sel = self.K, self.params.sel
        up, down = np.zeros(K + 1), np.zeros(K + 1)
        for ell in range(2, sel.kappa + 1):
            beta = sel.beta_of(ell)
            if beta == 0:
                continue
            p = np.asarray(sel.p[ell - 2])
            j = np.arange(ell)
            i_up = np.minimum(i, K - 1)
            weights_up = hypergeom.pmf(j[None, :], K - 1, i_up[:, None], ell - 1)
            up += (K - i) * beta / K * (weights_up @ p[:ell])
            i_minus = np.maximum(i - 1, 0)
            weights_down = hypergeom.pmf(j[None, :], K - 1, i_minus[:, None], ell - 1)
            down += i * beta / K * (weights_down @ (1 - p[1:]))
        return up, down

    def event_rates(self, i: int) -> Dict[str, float]:
        """Rate of every event class at state i, in Moran time."""
        if not 0 <= i <= self.K:
            raise ContractViolationError(f"need 0 <= i <= K, got {i}")
        rates = {name: float(self._step_rates[c, i]) for c, (name, _) in enumerate(STEP_CHANNELS)}
        for (kind, r), rate in zip(self._atom_channels, self._atom_rates):
            rates[f"{kind}({r:g})"] = rates.get(f"{kind}({r:g})", 0.0) + float(rate)
        return rates

    def _rates(self, i: np.ndarray) -> np.ndarray:
        state = self._step_rates[:, i].T
        if self._atom_rates.size == 0:
            return state
        return np.hstack([state, np.broadcast_to(self._atom_rates, (i.size, self._atom_rates.size))])

    def _apply(self, i: np.ndarray, channel: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        K = self.K
        new = i.copy()
        for c, (_, sign) in enumerate(STEP_CHANNELS):
            new[channel == c] += sign
        for offset, (kind, r) in enumerate(self._atom_channels):
            hit = np.flatnonzero(channel == len(STEP_CHANNELS) + offset)
            if hit.size == 0:
                continue
            cur = i[hit]
            q = abs(r)
            if kind == "large":
                parent_a = rng.random(hit.size) < cur / K
                gain = rng.binomial(K - cur, q)
                loss = rng.binomial(cur, q)
                new[hit] = np.where(parent_a, cur + gain, cur - loss)
            elif kind == "env":
                # newborns of the favoured type replace a uniform group of the same size
                born = rng.binomial(cur if r > 0 else K - cur, q)
                converted = np.zeros(hit.size, dtype=int)
                some = born > 0
                if r > 0:
                    converted[some] = rng.hypergeometric(K - cur[some], cur[some], born[some])
                    new[hit] = cur + converted
                else:
                    converted[some] = rng.hypergeometric(cur[some], K - cur[some], born[some])
                    new[hit] = cur - converted
            else:
                new[hit] = cur + rng.binomial(K - cur, q) if r > 0 else cur - rng.binomial(cur, q)
        return new

    def _batch_step(self, i: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        rates = self._rates(i)
        total = rates.sum(axis=1)
        dt = np.full(i.size, np.inf)
        moving = total > 0
        dt[moving] = rng.exponential(1.0 / total[moving])
        cumulative = np.cumsum(rates, axis=1)
        u = rng.random(i.size) * total
        channel = (cumulative <= u[:, None]).sum(axis=1)
        channel = np.minimum(channel, rates.shape[1] - 1)
        channel[~moving] = -1
        return self._apply(i, channel, rng), dt

    def moran_step(self, state: MoranState, rng: np.random.Generator) -> MoranState:
        if state.K != self.K:
            raise ContractViolationError(f"state has K = {state.K}, simulator has K = {self.K}")
        new, dt = self._batch_step(np.array([state.i]), rng)
        return MoranState(self.K, int(new[0]), state.clock + float(dt[0]))

    def _block_fixation(self, block: int, i0: int, size: int) -> np.ndarray:
        rng = self.rng(block)
        i = np.full(size, i0, dtype=int)
        active = np.flatnonzero((i > 0) & (i < self.K))
        while active.size:
            i[active], dt = self._batch_step(i[active], rng)
            # states without any event never leave the interior
            active = active[np.isfinite(dt) & (i[active] > 0) & (i[active] < self.K)]
        return (i == self.K).astype(float)

    def moran_fixation(self, i0: int, reps: int) -> dict:
        """Probability that type a fixes, from i0 type-a individuals."""
        if self.params.has_mutations():
            raise AssumptionViolationError("fixation needs a mutation-free model (theta = 0, nu = 0)")
        if not 0 <= i0 <= self.K:
            raise ContractViolationError(f"need 0 <= i0 <= K, got {i0}")
        sizes = [min(REPLICA_BLOCK_SIZE, reps - start) for start in range(0, reps, REPLICA_BLOCK_SIZE)]
        fixed = np.concatenate(self.fan_out(lambda b: self._block_fixation(b, i0, sizes[b]),
                                            list(range(len(sizes)))))
        summary = mc_summary(fixed)
        summary.update({"K": self.K, "i0": i0})
        return summary

    def _block_terminal(self, block: int, i0: int, horizon: float, size: int) -> np.ndarray:
        rng = self.rng(block)
        i = np.full(size, i0, dtype=int)
        clock = np.zeros(size)
        active = np.arange(size)
        while active.size:
            new, dt = self._batch_step(i[active], rng)
            arriving = clock[active] + dt <= horizon
            i[active[arriving]] = new[arriving]
            clock[active[arriving]] += dt[arriving]
            active = active[arriving]
        return i / self.K

    def terminal_frequencies(self, x0: float, t: float, reps: int) -> np.ndarray:
        """X^{(K)} at process time t (Moran time K t) for ``reps`` replicas."""
        i0 = int(round(x0 * self.K))
        sizes = [min(REPLICA_BLOCK_SIZE, reps - start) for start in range(0, reps, REPLICA_BLOCK_SIZE)]
        return np.concatenate(self.fan_out(lambda b: self._block_terminal(b, i0, self.K * t, sizes[b]),
                                           list(range(len(sizes)))))

    def moran_vs_sde(self, x0: float, t: float, moments: Sequence[int], reps: int,
                     dt: float = DEFAULT_DT) -> pd.DataFrame:
        """Moments of X^{(K)}_{Kt} next to forward SDE moments at time t, with joint z-scores."""
        moran = self.terminal_frequencies(x0, t, reps)
        forward = ForwardSimulator(self.params, seed=self.seed, n_jobs=self.n_jobs, stream=self.stream + (1,))
        sde = forward.terminal_values(ForwardConfig(x0=round(x0 * self.K) / self.K, t_end=t, dt=min(dt, t)), reps)
        rows = []
        for k in moments:
            m, s = mc_summary(moran ** k), mc_summary(sde ** k)
            rows.append({"k": k, "moran_estimate": m["estimate"], "moran_se": m["se"],
                         "sde_estimate": s["estimate"], "sde_se": s["se"],
                         "z": z_score(m["estimate"], m["se"], s["estimate"], s["se"])})
        return pd.DataFrame(rows)

    def summary(self) -> dict:
        return {"simulator": self.name, "K": self.K, "seed": self.seed}

# -*- coding: utf-8 -*-
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from bernsteinpy.data.statistic import batch_means
from bernsteinpy.global_variable import DEFAULT_BATCHES, DEFAULT_BURN_IN_FRACTION, DEFAULT_L_MAX, \
    RATE_TOLERANCE, REPLICA_BLOCK_SIZE
from bernsteinpy.model._base import SimulatorBase
from bernsteinpy.model.func._bernstein import binom_coef
from bernsteinpy.model.measures import TYPES, ModelParams
from bernsteinpy.model.operators import EXACT, CoefficientVector, EnvOperatorMode, bernstein_eval, coalesce, \
    env_A, env_a, mut_A, mut_a, select_branch
from bernsteinpy.utils.exceptions import AbsorbedStateError, AssumptionViolationError, ContractViolationError, \
    ExplosionGuardError, InvariantViolationError

logger = logging.getLogger(__name__)

EVENT_KINDS = ("coalesce", "select", "mut", "env")


@dataclass(frozen=True)
class Event:
    """One transition channel of the dual: ``kind`` with group size ``size`` and, for mut/env, a type."""

    kind: str
    size: int
    type: Optional[str]
    rate: float

    @property
    def label(self) -> str:
        if self.type is None:
            return f"{self.kind}({self.size})"
        return f"{self.kind}({self.type},{self.size})"

    def target(self, n: int) -> int:
        """Line count after the event fires from ``n`` lines."""
        if self.kind == "coalesce":
            return n - self.size + 1
        if self.kind == "select":
            return n + self.size - 1
        if self.kind == "env":
            return n + self.size
        return n - self.size


@dataclass(frozen=True)
class EventCatalog:
    n: int
    events: Tuple[Event, ...]

    @property
    def rates(self) -> np.ndarray:
        return np.array([event.rate for event in self.events], dtype=float)

    @property
    def total_rate(self) -> float:
        return float(np.sum(self.rates)) if self.events else 0.0

    def as_dict(self) -> Dict[str, float]:
        return {event.label: event.rate for event in self.events}

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class DualState:
    v: CoefficientVector
    label: str = "a"
    clock: float = 0.0

    @property
    def L(self) -> int:
        return self.v.n

    def is_absorbed(self) -> bool:
        return self.v.is_scalar()


@dataclass
class DualPath:
    """Summary of one dual trajectory."""

    initial: CoefficientVector
    final_state: DualState
    absorbed: bool
    event_counts: Dict[str, int] = field(default_factory=dict)
    max_L: int = 0
    trace: Optional[pd.DataFrame] = None

    @property
    def v_inf(self) -> Optional[float]:
        return self.final_state.v.first if self.absorbed else None

    @property
    def n_events(self) -> int:
        return int(sum(self.event_counts.values()))

    def to_dict(self) -> dict:
        return {"initial": self.initial.entries.tolist(), "final": self.final_state.v.entries.tolist(),
                "final_label": self.final_state.label, "clock": self.final_state.clock,
                "absorbed": self.absorbed, "v_inf": self.v_inf, "event_counts": dict(self.event_counts),
                "n_events": self.n_events, "max_L": self.max_L}


class DualSimulator(SimulatorBase):
    """Gillespie simulation of the Bernstein coefficient process V and its line count L = dim(V) - 1."""

    name = "Bernstein Coefficient Process"
    special_function = ['Event Catalog', 'Absorption', 'Stationary Functional', 'Lyapunov Report']

    def __init__(self, params: ModelParams, l_max: int = DEFAULT_L_MAX, env_mode: EnvOperatorMode = EXACT,
                 seed: int = 0, n_jobs: int = 1, check_invariants: bool = True,
                 stream: Tuple[int, ...] = ()) -> None:
        super().__init__(params, seed=seed, n_jobs=n_jobs, stream=stream)
        self.l_max = int(l_max)
        self.env_mode = env_mode
        self.check_invariants = check_invariants
        if env_mode.mode == "monte_carlo":
            logger.warning(f"Monte Carlo env operators engaged above n + l = {env_mode.limit}")
        self._catalogs: Dict[int, EventCatalog] = {}

    def enumerate_events(self, n: int) -> EventCatalog:
        """All channels with positive rate out of a state with ``n`` lines."""
        if n < 0:
            raise ContractViolationError(f"n must be nonnegative, got {n}")
        if n in self._catalogs:
            return self._catalogs[n]
        params = self.params
        events: List[Event] = []
        if n >= 1:
            for k, rate in enumerate(params.coalescence_event_rates(n), start=2):
                events.append(Event("coalesce", k, None, float(rate)))
            for ell in range(2, params.sel.kappa + 1):
                events.append(Event("select", ell, None, n * params.sel.beta_of(ell)))
            for c in TYPES:
                for ell, rate in enumerate(params.mut_event_rates(n, c), start=1):
                    events.append(Event("mut", ell, c, float(rate)))
            for c in TYPES:
                for ell, rate in enumerate(params.env_event_rates(n, c), start=1):
                    events.append(Event("env", ell, c, float(rate)))
        catalog = EventCatalog(n=n, events=tuple(e for e in events if e.rate > 0))
        for label, expected in (("dual rate", params.total_dual_rate(n)),
                                ("closed-form dual rate", params.closed_form_dual_rate(n))):
            if abs(catalog.total_rate - expected) > RATE_TOLERANCE * max(1.0, expected):
                raise InvariantViolationError(f"catalog total {catalog.total_rate} differs from the {label} {expected}")
        self._catalogs[n] = catalog
        return catalog

    def apply_event(self, v: CoefficientVector, event: Event,
                    rng: Optional[np.random.Generator] = None) -> CoefficientVector:
        if event.kind == "coalesce":
            return coalesce(v, event.size)
        if event.kind == "select":
            return select_branch(v, event.size, self.params.sel)
        if event.kind == "mut":
            return mut_a(v, event.size) if event.type == "a" else mut_A(v, event.size)
        if event.kind == "env":
            apply = env_a if event.type == "a" else env_A
            return apply(v, event.size, mode=self.env_mode, rng=rng)
        raise ContractViolationError(f"unknown event kind {event.kind}")

    def step(self, state: DualState, rng: np.random.Generator) -> DualState:
        """Advance to the next event; with no event possible the clock moves to infinity."""
        return self.step_with_event(state, rng)[0]

    def step_with_event(self, state: DualState, rng: np.random.Generator) -> Tuple[DualState, Optional[Event]]:
        """Like ``step``, also returning the event that fired (None when no event is possible).

        Raises
        ------
        AbsorbedStateError
            The state is already scalar.

        ExplosionGuardError
            The line count would exceed ``l_max``.
        """
        if state.is_absorbed():
            raise AbsorbedStateError("the dual is absorbed in a scalar state; no further events")
        catalog = self.enumerate_events(state.L)
        total = catalog.total_rate
        if total == 0:
            return DualState(state.v, state.label, math.inf), None
        dt = rng.exponential(1.0 / total)
        index = int(np.searchsorted(np.cumsum(catalog.rates), rng.random() * total, side="right"))
        event = catalog.events[min(index, len(catalog) - 1)]
        if event.target(state.L) > self.l_max:
            raise ExplosionGuardError(
                f"line count would reach {event.target(state.L)} > L_max = {self.l_max}; the recurrence condition "
                f"b(beta) + mu(-1,1) < c(Lambda) + nu(-1,1) + theta is likely violated")
        v = self.apply_event(state.v, event, rng)
        label = event.type if event.kind in ("mut", "env") else state.label
        return DualState(v, label, state.clock + dt), event

    def _check_step(self, initial: CoefficientVector, v: CoefficientVector) -> None:
        if v.sup_norm > initial.sup_norm * (1 + 1e-12) + 1e-15:
            raise InvariantViolationError(f"sup-norm grew from {initial.sup_norm} to {v.sup_norm}")
        if not self.params.has_mutations() and (v.first != initial.first or v.last != initial.last):
            raise InvariantViolationError("first and last coefficients must stay constant without mutations")

    def simulate_until(self, v0, t_end: float = math.inf, rng: Optional[np.random.Generator] = None,
                       label: str = "a", trace: bool = False, max_events: Optional[int] = None) -> DualPath:
        """Run until ``t_end`` or absorption in a scalar state."""
        v0 = v0 if isinstance(v0, CoefficientVector) else CoefficientVector(v0)
        if math.isinf(t_end) and not self.params.has_mutations() and not v0.is_scalar() and max_events is None:
            raise ContractViolationError("without mutations the dual never absorbs; give a finite t_end")
        rng = self.rng(0) if rng is None else rng
        state = DualState(v0, label, 0.0)
        counts: Counter = Counter()
        max_L = state.L
        rows = [(0.0, state.L, state.label, "start", v0.serialize())] if trace else None
        while not state.is_absorbed():
            if max_events is not None and sum(counts.values()) >= max_events:
                break
            new_state, event = self.step_with_event(state, rng)
            if event is None or new_state.clock > t_end:
                state = DualState(state.v, state.label, min(t_end, new_state.clock))
                break
            state = new_state
            counts[event.label] += 1
            max_L = max(max_L, state.L)
            if self.check_invariants:
                self._check_step(v0, state.v)
            if trace:
                rows.append((state.clock, state.L, state.label, event.label, state.v.serialize()))
        table = pd.DataFrame(rows, columns=["t", "L", "label", "event_kind", "v_serialized"]) if trace else None
        return DualPath(initial=v0, final_state=state, absorbed=state.is_absorbed(), event_counts=dict(counts),
                        max_L=max_L, trace=table)

    def _block_values(self, block: int, v0: CoefficientVector, reps: int, t_end: float, x: Optional[float]) \
            -> np.ndarray:
        rng = self.rng(block)
        values = np.empty(reps)
        for j in range(reps):
            path = self.simulate_until(v0, t_end=t_end, rng=rng)
            v = path.final_state.v
            values[j] = v.first if x is None else bernstein_eval(x, v)
        return values

    def replicate(self, v0, reps: int, t_end: float = math.inf, x: Optional[float] = None) -> np.ndarray:
        """One value per replica: H(x, V_t) when ``x`` is given, else the absorbed scalar V_inf.

        Replicas are grouped in fixed-size blocks, each with its own stream, so the first
        replicas do not depend on ``reps``.
        """
        v0 = v0 if isinstance(v0, CoefficientVector) else CoefficientVector(v0)
        if x is None and not self.params.has_mutations() and not v0.is_scalar():
            raise AssumptionViolationError("absorbed values need mutations; the dual never absorbs otherwise")
        sizes = [min(REPLICA_BLOCK_SIZE, reps - start) for start in range(0, reps, REPLICA_BLOCK_SIZE)]
        blocks = self.fan_out(lambda b: self._block_values(b, v0, sizes[b], t_end, x), list(range(len(sizes))))
        return np.concatenate(blocks) if blocks else np.zeros(0)

    def _require_stationary_regime(self, force: bool = False) -> None:
        if self.params.has_mutations():
            raise AssumptionViolationError("the stationary functional needs theta = 0 and nu = 0")
        report = self.params.check_assumption()
        if not report.verdict:
            if not force:
                raise AssumptionViolationError(f"recurrence condition fails: {report.to_dict()}")
            logger.warning(f"recurrence condition fails for '{self.params.name}', running anyway")

    def stationary_path(self, end: float, rng: np.random.Generator) -> Tuple[np.ndarray, List[CoefficientVector]]:
        """Jump times and states of V on [0, end] started from e_1."""
        state = DualState(CoefficientVector.unit(1))
        times, vectors = [0.0], [state.v]
        while True:
            new_state, event = self.step_with_event(state, rng)
            if event is None or new_state.clock > end:
                break
            state = new_state
            if self.check_invariants:
                self._check_step(vectors[0], state.v)
            times.append(state.clock)
            vectors.append(state.v)
        return np.array(times), vectors

    def stationary_functional(self, x, horizon: float, burn_in: Optional[float] = None,
                              batches: int = DEFAULT_BATCHES, rng: Optional[np.random.Generator] = None,
                              force: bool = False):
        """Time average of H(x, V_t) from V_0 = e_1, with a batch-means confidence interval.

        ``x`` may be a float (returns one summary dict) or a sequence (returns a DataFrame).
        """
        self._require_stationary_regime(force)
        burn_in = DEFAULT_BURN_IN_FRACTION * horizon if burn_in is None else burn_in
        rng = self.rng(0) if rng is None else rng
        times, vectors = self.stationary_path(burn_in + horizon, rng)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        summaries = []
        for xi in xs:
            values = np.array([bernstein_eval(xi, v) for v in vectors])
            summary = batch_means(times, values, burn_in, burn_in + horizon, batches)
            summary.pop("batch_averages")
            summaries.append({"x": float(xi), **summary})
        logger.info(f"stationary functional over {len(times) - 1} events, horizon {horizon}")
        if np.ndim(x) == 0:
            return summaries[0]
        return pd.DataFrame(summaries)

    def delta(self, n: int) -> float:
        """delta(n) = C(n,2) Lambda({0}) - n sum w log(1 - (n r - 1 + (1-r)^n) / n) / r^2."""
        r, w = self.params.lambda_tail.locations, self.params.lambda_tail.weights
        tail = -n * float(np.sum(w * np.log1p(-(n * r - 1 + (1 - r) ** n) / n) / r ** 2))
        return binom_coef(n, 2) * self.params.lambda0 + tail

    def lyapunov_function(self, n_max: int) -> np.ndarray:
        """f(0..n_max) with f(l) = sum_{k=2}^{l} k / delta(k) log(k / (k-1))."""
        f = np.zeros(n_max + 1)
        for k in range(2, n_max + 1):
            d = self.delta(k)
            f[k] = f[k - 1] + (k / d * math.log(k / (k - 1)) if d > 0 else math.inf)
        return f

    def lyapunov_report(self, n_lo: int, n_hi: int) -> pd.DataFrame:
        """delta(n), f(n) and the drift of f under the line-counting chain for n_lo <= n <= n_hi.

        ``attrs["n0"]`` holds the first n from which the drift stays negative up to n_hi (None if none).
        """
        if not 1 <= n_lo <= n_hi:
            raise ContractViolationError(f"need 1 <= n_lo <= n_hi, got ({n_lo}, {n_hi})")
        f = self.lyapunov_function(2 * n_hi + self.params.sel.kappa)
        rows = []
        for n in range(n_lo, n_hi + 1):
            catalog = self.enumerate_events(n)
            with np.errstate(invalid="ignore"):
                drift = float(sum(e.rate * (f[e.target(n)] - f[n]) for e in catalog.events))
            rows.append({"n": n, "delta": self.delta(n), "f": f[n], "drift": drift})
        report = pd.DataFrame(rows)
        negative = (report["drift"] < 0).to_numpy()
        n0 = None
        for index in range(len(negative) - 1, -1, -1):
            if not negative[index]:
                break
            n0 = int(report["n"].iloc[index])
        report["persistent_negative"] = report["n"] >= n0 if n0 is not None else False
        report.attrs["n0"] = n0
        report.attrs["c_lambda"] = self.params.c_lambda()
        return report

    def summary(self) -> dict:
        return {"simulator": self.name, "l_max": self.l_max, "env_mode": self.env_mode.mode, "seed": self.seed}

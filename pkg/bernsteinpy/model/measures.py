# -*- coding: utf-8 -*-
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, Sequence, Tuple

import numpy as np
from scipy.stats import binom

from bernsteinpy.global_variable import MIN_ATOM_WEIGHT
from bernsteinpy.model.func._bernstein import binom_coef
from bernsteinpy.model.selection import SelectionKernel
from bernsteinpy.utils.exceptions import ContractViolationError, InvalidConfigError

logger = logging.getLogger(__name__)

SUPPORTS = ("unit", "signed")
TYPES = ("a", "A")


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite measure given as weighted point masses.

    ``support`` is "unit" for (0, 1] (the tail of Lambda) and "signed" for
    (-1, 1) without 0 (mu and nu).
    """

    atoms: Tuple[Tuple[float, float], ...] = ()
    support: str = "signed"
    _locations: np.ndarray = field(init=False, repr=False, compare=False)
    _weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        locations = np.array([r for r, _ in self.atoms], dtype=float)
        weights = np.array([w for _, w in self.atoms], dtype=float)
        locations.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "_locations", locations)
        object.__setattr__(self, "_weights", weights)

    @classmethod
    def from_atoms(cls, atoms: Iterable[Sequence[float]], support: str = "signed",
                   name: str = "measure") -> "AtomicMeasure":
        """Validate supports and weights, merge duplicate locations.

        Raises
        ------
        InvalidConfigError
            For a bad pair, a location outside the support or a non-positive weight.
        """
        if support not in SUPPORTS:
            raise ContractViolationError(f"unknown support '{support}'")
        merged: Dict[float, float] = {}
        for index, atom in enumerate(atoms):
            if len(atom) != 2:
                raise InvalidConfigError("every atom must be a [location, weight] pair", f"{name}[{index}]")
            r, w = float(atom[0]), float(atom[1])
            if not (np.isfinite(r) and np.isfinite(w)):
                raise InvalidConfigError("atom entries must be finite", f"{name}[{index}]")
            if support == "unit" and not 0 < r <= 1:
                raise InvalidConfigError(f"location {r} outside (0, 1]", f"{name}[{index}]")
            if support == "signed" and not (-1 < r < 1 and r != 0):
                raise InvalidConfigError(f"location {r} outside (-1, 1) without 0", f"{name}[{index}]")
            if w <= 0:
                raise InvalidConfigError(f"weight {w} must be strictly positive", f"{name}[{index}]")
            merged[r] = merged.get(r, 0.0) + w
        for r, w in merged.items():
            if w < MIN_ATOM_WEIGHT:
                raise InvalidConfigError(f"merged weight {w} at {r} is below {MIN_ATOM_WEIGHT}", name)
        return cls(atoms=tuple(sorted(merged.items())), support=support)

    @property
    def locations(self) -> np.ndarray:
        return self._locations

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def mass(self) -> float:
        return float(np.sum(self._weights))

    def is_zero(self) -> bool:
        return len(self.atoms) == 0

    def part(self, sign: str) -> "AtomicMeasure":
        """Atoms with r > 0 (``sign="a"``) or r < 0 (``sign="A"``)."""
        keep = [(r, w) for r, w in self.atoms if (r > 0) == (sign == "a")]
        return AtomicMeasure(atoms=tuple(keep), support=self.support)

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        return iter(self.atoms)

    def to_list(self):
        return [[r, w] for r, w in self.atoms]


@dataclass(frozen=True)
class AssumptionReport:
    b: float
    c: float
    mu_mass: float
    nu_mass: float
    theta: float
    verdict: bool

    @property
    def c_infinite(self) -> bool:
        return math.isinf(self.c)

    def to_dict(self) -> Dict[str, Any]:
        return {"b": self.b, "c": self.c, "c_infinite": self.c_infinite, "mu_mass": self.mu_mass,
                "nu_mass": self.nu_mass, "theta": self.theta, "verdict": self.verdict}


@dataclass(frozen=True)
class ModelParams:
    """Full parameter set of the two-type Lambda-Wright-Fisher model.

    Parameters
    ----------
    lambda0 : float
        Mass of Lambda at 0 (the Wright-Fisher diffusion part).

    lambda_tail : AtomicMeasure
        Lambda restricted to (0, 1].

    mu, nu : AtomicMeasure
        Environment and coordinated-mutation measures on (-1, 1) without 0.

    theta_a, theta_A : float
        Individual mutation rates towards a and towards A.

    sel : SelectionKernel
        Frequency-dependent selection mechanism.
    """

    lambda0: float = 0.0
    lambda_tail: AtomicMeasure = AtomicMeasure(support="unit")
    mu: AtomicMeasure = AtomicMeasure()
    nu: AtomicMeasure = AtomicMeasure()
    theta_a: float = 0.0
    theta_A: float = 0.0
    sel: SelectionKernel = SelectionKernel.neutral()
    name: str = "model"

    def __post_init__(self) -> None:
        for label, value in (("lambda0", self.lambda0), ("theta_a", self.theta_a), ("theta_A", self.theta_A)):
            if not np.isfinite(value) or value < 0:
                raise InvalidConfigError(f"must be a finite nonnegative real, got {value}", label)
        violations = self.sel.validate()
        if violations:
            raise InvalidConfigError("; ".join(violations), "selection")

    @property
    def theta(self) -> float:
        return self.theta_a + self.theta_A

    def theta_of(self, c: str) -> float:
        return self.theta_a if c == "a" else self.theta_A

    def has_mutations(self) -> bool:
        return self.theta > 0 or not self.nu.is_zero()

    # group rates

    def lambda_rate(self, n: int, ell: int) -> float:
        """Rate at which a given group of ``ell`` out of ``n`` lines coalesces."""
        if n < 2 or not 2 <= ell <= n:
            raise ContractViolationError(f"lambda_rate needs n >= 2 and 2 <= l <= n, got ({n}, {ell})")
        r, w = self.lambda_tail.locations, self.lambda_tail.weights
        tail = float(np.sum(w * r ** (ell - 2) * (1.0 - r) ** (n - ell)))
        return (self.lambda0 if ell == 2 else 0.0) + tail

    def mut_rate(self, n: int, ell: int, c: str) -> float:
        """Rate at which a given group of ``ell`` out of ``n`` lines undergoes a coordinated c-mutation."""
        return self._signed_rate(self.nu, n, ell, c)

    def env_rate(self, n: int, ell: int, c: str) -> float:
        """Rate at which a given group of ``ell`` out of ``n`` lines branches in a c-favouring environment."""
        return self._signed_rate(self.mu, n, ell, c)

    @staticmethod
    def _signed_rate(measure: AtomicMeasure, n: int, ell: int, c: str) -> float:
        if n < 1 or not 1 <= ell <= n:
            raise ContractViolationError(f"rate needs n >= 1 and 1 <= l <= n, got ({n}, {ell})")
        if c not in TYPES:
            raise ContractViolationError(f"type must be 'a' or 'A', got {c!r}")
        r = np.abs(measure.locations)
        mask = measure.locations > 0 if c == "a" else measure.locations < 0
        w = measure.weights[mask]
        r = r[mask]
        return float(np.sum(w * r ** (ell - 1) * (1.0 - r) ** (n - ell)))

    # event rates, i.e. group rate times the number of groups

    def coalescence_event_rates(self, n: int) -> np.ndarray:
        """C(n, k) lambda_{n,k} for k = 2..n, through the binomial pmf so that large n stays finite."""
        if n < 2:
            return np.zeros(0)
        k = np.arange(2, n + 1)
        r, w = self.lambda_tail.locations, self.lambda_tail.weights
        rates = np.sum(w[:, None] * binom.pmf(k[None, :], n, r[:, None]) / r[:, None] ** 2, axis=0)
        rates = np.asarray(rates, dtype=float).reshape(-1)
        if rates.size == 0:
            rates = np.zeros(n - 1)
        rates[0] += binom_coef(n, 2) * self.lambda0
        return rates

    def mut_event_rates(self, n: int, c: str) -> np.ndarray:
        """C(n, l) m^c_{n,l} + 1{l = 1} n theta_c for l = 1..n."""
        rates = self._signed_event_rates(self.nu, n, c)
        if n >= 1:
            rates[0] += n * self.theta_of(c)
        return rates

    def env_event_rates(self, n: int, c: str) -> np.ndarray:
        """C(n, l) sigma^c_{n,l} for l = 1..n."""
        return self._signed_event_rates(self.mu, n, c)

    @staticmethod
    def _signed_event_rates(measure: AtomicMeasure, n: int, c: str) -> np.ndarray:
        if c not in TYPES:
            raise ContractViolationError(f"type must be 'a' or 'A', got {c!r}")
        if n < 1:
            return np.zeros(0)
        ell = np.arange(1, n + 1)
        mask = measure.locations > 0 if c == "a" else measure.locations < 0
        r = np.abs(measure.locations[mask])
        w = measure.weights[mask]
        if r.size == 0:
            return np.zeros(n)
        return np.sum(w[:, None] * binom.pmf(ell[None, :], n, r[:, None]) / r[:, None], axis=0)

    def coalescence_event_rate(self, n: int, k: int) -> float:
        if n < 2 or not 2 <= k <= n:
            raise ContractViolationError(f"coalescence needs n >= 2 and 2 <= k <= n, got ({n}, {k})")
        return float(self.coalescence_event_rates(n)[k - 2])

    def mut_event_rate(self, n: int, ell: int, c: str) -> float:
        if n < 1 or not 1 <= ell <= n:
            raise ContractViolationError(f"rate needs n >= 1 and 1 <= l <= n, got ({n}, {ell})")
        return float(self.mut_event_rates(n, c)[ell - 1])

    def env_event_rate(self, n: int, ell: int, c: str) -> float:
        if n < 1 or not 1 <= ell <= n:
            raise ContractViolationError(f"rate needs n >= 1 and 1 <= l <= n, got ({n}, {ell})")
        return float(self.env_event_rates(n, c)[ell - 1])

    def total_dual_rate(self, n: int) -> float:
        """Sum of all transition rates out of a dual state with ``n`` lines."""
        if n < 0:
            raise ContractViolationError(f"n must be nonnegative, got {n}")
        if n == 0:
            return 0.0
        total = float(np.sum(self.coalescence_event_rates(n))) + n * self.sel.total_beta
        for c in TYPES:
            total += float(np.sum(self.mut_event_rates(n, c))) + float(np.sum(self.env_event_rates(n, c)))
        return total

    def closed_form_dual_rate(self, n: int) -> float:
        """alpha_n = C(n,2) lambda0 + n (theta + sum beta) + atom sums, summed in closed form over group sizes."""
        if n < 0:
            raise ContractViolationError(f"n must be nonnegative, got {n}")
        if n == 0:
            return 0.0
        total = n * (n - 1) / 2 * self.lambda0 + n * (self.theta + self.sel.total_beta)
        r, w = self.lambda_tail.locations, self.lambda_tail.weights
        total += float(np.sum(w * (1 - (1 - r) ** n - n * r * (1 - r) ** (n - 1)) / r ** 2))
        for measure in (self.mu, self.nu):
            r, w = np.abs(measure.locations), measure.weights
            total += float(np.sum(w * (1 - (1 - r) ** n) / r))
        return total

    def rate_bound_constant(self) -> float:
        """C with total_dual_rate(n) <= C n^2; an atom of Lambda at 1 is counted."""
        return self.lambda0 + self.lambda_tail.mass + self.mu.mass + self.nu.mass + self.theta + self.sel.total_beta

    # recurrence condition

    def b_beta(self) -> float:
        return self.sel.b_beta()

    def c_lambda(self) -> float:
        """c(Lambda) = sum w |log(1 - r)| / r^2, infinite with an atom at 0 or 1."""
        if self.lambda0 > 0:
            return math.inf
        r, w = self.lambda_tail.locations, self.lambda_tail.weights
        if np.any(r == 1.0):
            return math.inf
        return float(np.sum(w * np.abs(np.log1p(-r)) / r ** 2))

    def check_assumption(self) -> AssumptionReport:
        b, c = self.b_beta(), self.c_lambda()
        verdict = math.isinf(c) or b + self.mu.mass < c + self.nu.mass + self.theta
        report = AssumptionReport(b=b, c=c, mu_mass=self.mu.mass, nu_mass=self.nu.mass,
                                  theta=self.theta, verdict=bool(verdict))
        logger.debug(f"recurrence condition for '{self.name}': {report.to_dict()}")
        return report

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "lambda0": self.lambda0,
            "lambda_atoms": self.lambda_tail.to_list(),
            "mu_atoms": self.mu.to_list(),
            "nu_atoms": self.nu.to_list(),
            "theta_a": self.theta_a,
            "theta_A": self.theta_A,
            "selection": self.sel.to_dict(),
        }

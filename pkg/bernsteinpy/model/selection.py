# -*- coding: utf-8 -*-
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from bernsteinpy.model.func._bernstein import bernstein_basis


@dataclass(frozen=True)
class SelectionKernel:
    """Frequency-dependent selection mechanism (kappa, beta, p).

    Parameters
    ----------
    kappa : int
        Maximal size of an interacting group, kappa >= 2.

    beta : tuple of float
        Interaction rates beta_l for l = 2..kappa, stored from index 0.

    p : tuple of tuple of float
        Row l-2 holds p_0^(l), ..., p_l^(l): the probability that the focal
        individual ends up of type a when the group holds i type-a members.
    """

    kappa: int
    beta: Tuple[float, ...]
    p: Tuple[Tuple[float, ...], ...]

    @classmethod
    def neutral(cls) -> "SelectionKernel":
        return cls(kappa=2, beta=(0.0,), p=((0.0, 0.5, 1.0),))

    @classmethod
    def genic(cls, s: float) -> "SelectionKernel":
        """Pairwise interaction with p_1^(2) = 1, so d(x) = s x (1 - x)."""
        return cls(kappa=2, beta=(float(s),), p=((0.0, 1.0, 1.0),))

    @classmethod
    def from_lists(cls, kappa: int, beta: Sequence[float], p: Sequence[Sequence[float]]) -> "SelectionKernel":
        return cls(kappa=int(kappa),
                   beta=tuple(float(b) for b in beta),
                   p=tuple(tuple(float(q) for q in row) for row in p))

    def beta_of(self, ell: int) -> float:
        return self.beta[ell - 2]

    def p_of(self, ell: int, i: int) -> float:
        return self.p[ell - 2][i]

    @property
    def total_beta(self) -> float:
        return float(sum(self.beta))

    def b_beta(self) -> float:
        """b(beta) = sum_l beta_l (l - 1)."""
        return float(sum(b * (ell - 1) for ell, b in zip(range(2, self.kappa + 1), self.beta)))

    def validate(self) -> List[str]:
        """Check every kernel constraint; an empty list means the kernel is valid."""
        violations = []
        if int(self.kappa) != self.kappa or self.kappa < 2:
            violations.append(f"kappa must be an integer >= 2, got {self.kappa}")
            return violations
        if len(self.beta) != self.kappa - 1:
            violations.append(f"beta needs {self.kappa - 1} entries (l = 2..{self.kappa}), got {len(self.beta)}")
        if len(self.p) != self.kappa - 1:
            violations.append(f"p needs {self.kappa - 1} rows (l = 2..{self.kappa}), got {len(self.p)}")
        for ell, b in zip(range(2, self.kappa + 1), self.beta):
            if not np.isfinite(b) or b < 0:
                violations.append(f"beta nonnegative: beta_{ell} = {b}")
        for ell, row in zip(range(2, self.kappa + 1), self.p):
            if len(row) != ell + 1:
                violations.append(f"p row for l = {ell} needs {ell + 1} entries, got {len(row)}")
                continue
            if row[0] != 0:
                violations.append(f"p_0 must be 0 (l = {ell}, got {row[0]})")
            if row[ell] != 1:
                violations.append(f"p_l must be 1 (l = {ell}, got {row[ell]})")
            for i, q in enumerate(row):
                if not 0 <= q <= 1:
                    violations.append(f"p_{i}^({ell}) must lie in [0, 1], got {q}")
        return violations

    def d_poly(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Selection polynomial sum_l beta_l sum_i B_{i,l}(x) (p_i^(l) - i/l), in Bernstein form."""
        scalar = np.ndim(x) == 0
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        total = np.zeros_like(x_arr)
        for ell, b in zip(range(2, self.kappa + 1), self.beta):
            if b == 0:
                continue
            weights = np.asarray(self.p[ell - 2]) - np.arange(ell + 1) / ell
            total += b * (bernstein_basis(ell, x_arr) @ weights)
        return float(total[0]) if scalar else total

    def monomial_coefficients(self) -> np.ndarray:
        """Coefficients c_0..c_kappa of d in the monomial basis."""
        coefficients = np.zeros(self.kappa + 1)
        for ell, b in zip(range(2, self.kappa + 1), self.beta):
            for i in range(ell + 1):
                weight = b * math.comb(ell, i) * (self.p[ell - 2][i] - i / ell)
                # x^i (1-x)^(l-i) = sum_j C(l-i, j) (-1)^j x^(i+j)
                for j in range(ell - i + 1):
                    coefficients[i + j] += weight * math.comb(ell - i, j) * (-1) ** j
        return coefficients

    def to_dict(self) -> Dict[str, Any]:
        return {"kappa": self.kappa, "beta": list(self.beta), "p": [list(row) for row in self.p]}

"""Almost-regular LDPC ensembles: fixed column weight, rows of weight dv or dv+1."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rate = Union[float, Fraction]


class InfeasibleEnsemble(ValueError):
    pass


@dataclass(frozen=True)
class EnsembleSpec:
    rate: Rate
    dv: int

    def __post_init__(self):
        if not 0 <= self.rate < 1:
            raise ValueError(f"rate must lie in [0, 1), got {self.rate}")
        if self.dv < 2:
            raise ValueError(f"dv must be at least 2, got {self.dv}")

    @classmethod
    def from_code_size(cls, n: int, k: int, dv: int) -> EnsembleSpec:
        return cls(Fraction(k, n), dv)

    @property
    def mean_row_weight(self) -> float:
        return self.dv / (1 - float(self.rate))


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective degree fractions as ``((degree, fraction), ...)``."""

    lambda_coeffs: tuple[tuple[int, float], ...]
    rho_coeffs: tuple[tuple[int, float], ...]

    def __post_init__(self):
        for name, coeffs in (("lambda", self.lambda_coeffs), ("rho", self.rho_coeffs)):
            if not coeffs:
                raise ValueError(f"{name} has no terms")
            if any(not 0 <= c <= 1 for _, c in coeffs) or any(d < 1 for d, _ in coeffs):
                raise ValueError(f"{name} coefficients must be in [0, 1] with degrees >= 1")
            if abs(sum(c for _, c in coeffs) - 1) > 1e-12:
                raise ValueError(f"{name} coefficients must sum to 1")

    def lam(self, y: float) -> float:
        return sum(c * y ** (d - 1) for d, c in self.lambda_coeffs)

    def rho(self, y: float) -> float:
        return sum(c * y ** (d - 1) for d, c in self.rho_coeffs)


def feasibility(spec: EnsembleSpec) -> bool:
    """Whether ``R < 1/(dv+1)``, so every row can have weight dv or dv+1."""
    return spec.rate * (spec.dv + 1) < 1


def row_weight_profile(n: int, k: int, dv: int) -> tuple[int, int]:
    """Return (rows of weight dv, rows of weight dv+1) = (r - k*dv, k*dv).

    Accepts the boundary ``k/n = 1/(dv+1)``, where every row has weight dv+1.
    """
    if not 0 <= k < n:
        raise ValueError(f"need 0 <= k < n, got n={n}, k={k}")
    r = n - k
    if r - k * dv < 0:
        raise InfeasibleEnsemble(f"k/n = {k}/{n} exceeds 1/(dv+1) = 1/{dv + 1}")
    return r - k * dv, k * dv


def edge_distributions(spec: EnsembleSpec) -> DegreeDistribution:
    if not feasibility(spec):
        raise InfeasibleEnsemble(f"rate {float(spec.rate)} is not below 1/(dv+1) = 1/{spec.dv + 1}")
    heavy = float(spec.rate * (1 + spec.dv))
    rho = [(spec.dv, 1.0 - heavy)]
    if heavy > 0:
        rho.append((spec.dv + 1, heavy))
    return DegreeDistribution(((spec.dv, 1.0),), tuple(rho))


def format_polynomial(coeffs) -> str:
    """Render ``[(i, c), ...]`` as ``c*x^(i-1) + ...``."""
    terms = []
    for d, c in coeffs:
        e = d - 1
        power = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
        terms.append(f"{c:.6g}" + (f"*{power}" if power else ""))
    return " + ".join(terms)

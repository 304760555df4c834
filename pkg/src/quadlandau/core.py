"""Shared parameter, quantum-number and scenario types.

Everything is in natural units (hbar = c = 1). The radial index ``n_radial``
covers both conventions: it starts at 0 for the Landau and hard-wall problems
and at 1 for the two scalar-potential problems.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


class ConfigError(ValueError):
    """Raised when a configuration is not admissible for the requested scenario."""


class ScenarioKind(str, enum.Enum):
    LANDAU = "landau"
    HARDWALL = "hardwall"
    INVERSE_RADIAL = "inverse_radial"
    LINEAR = "linear"

    @property
    def is_potential(self) -> bool:
        return self in (ScenarioKind.INVERSE_RADIAL, ScenarioKind.LINEAR)


_KIND_ALIASES = {
    "landau": ScenarioKind.LANDAU,
    "hardwall": ScenarioKind.HARDWALL,
    "hard-wall": ScenarioKind.HARDWALL,
    "hard_wall": ScenarioKind.HARDWALL,
    "inverse_radial": ScenarioKind.INVERSE_RADIAL,
    "inverse-radial": ScenarioKind.INVERSE_RADIAL,
    "coulomb": ScenarioKind.INVERSE_RADIAL,
    "linear": ScenarioKind.LINEAR,
}


def parse_kind(name: str) -> ScenarioKind:
    try:
        return _KIND_ALIASES[name.strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}") from None


@dataclass(frozen=True)
class PhysicalParams:
    """Coupling constants of the radial problem.

    ``Mq`` is the quadrupole magnitude M and ``b`` the field-gradient constant;
    only their product ``Mb`` enters the radial equation. ``alpha`` (1/rho
    potential) and ``eta`` (linear potential) are optional.
    """

    m: float = 1.0
    Mq: float = 1.0
    b: float = 1.0
    alpha: Optional[float] = None
    eta: Optional[float] = None

    @property
    def Mb(self) -> float:
        return self.Mq * self.b

    @property
    def omega(self) -> float:
        """Cyclotron-analogue frequency 2Mb/m."""
        return 2.0 * self.Mq * self.b / self.m

    def tuned(self, varpi: float) -> "PhysicalParams":
        """Copy with ``b`` adjusted so that Mb/m equals ``varpi``.

        The scalar-potential problems fix the oscillator frequency through the
        truncation condition; the field gradient is the knob that realises it.
        """
        return replace(self, b=self.m * varpi / self.Mq)


@dataclass(frozen=True)
class QuantumNumbers:
    n_radial: int
    l: int
    k: float = 0.0


@dataclass(frozen=True)
class Scenario:
    kind: ScenarioKind
    rho0: Optional[float] = None

    @classmethod
    def landau(cls) -> "Scenario":
        return cls(ScenarioKind.LANDAU)

    @classmethod
    def hardwall(cls, rho0: float) -> "Scenario":
        return cls(ScenarioKind.HARDWALL, rho0)

    @classmethod
    def inverse_radial(cls) -> "Scenario":
        return cls(ScenarioKind.INVERSE_RADIAL)

    @classmethod
    def linear(cls) -> "Scenario":
        return cls(ScenarioKind.LINEAR)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def raise_if_invalid(self) -> None:
        if self.violations:
            raise ConfigError("; ".join(self.violations))


def _finite_positive(value, name, out):
    if value is None or not math.isfinite(value) or value <= 0:
        out.append(f"{name} must be > 0")


def validate(params: PhysicalParams, qn: QuantumNumbers, scenario: Scenario) -> ValidationReport:
    """List every invariant the configuration violates (empty means admissible)."""
    out: list[str] = []
    _finite_positive(params.m, "m", out)
    _finite_positive(params.Mq, "Mq", out)
    _finite_positive(params.b, "b", out)
    for name in ("alpha", "eta"):
        value = getattr(params, name)
        if value is not None and not math.isfinite(value):
            out.append(f"{name} must be finite")
    alpha_on = params.alpha is not None and params.alpha != 0
    eta_on = params.eta is not None and params.eta != 0
    if alpha_on and eta_on:
        out.append("alpha and eta cannot both be active")

    if qn.k != 0:
        out.append("k must be 0")
    if int(qn.n_radial) != qn.n_radial or int(qn.l) != qn.l:
        out.append("n_radial and l must be integers")

    kind = scenario.kind
    if kind.is_potential:
        if qn.n_radial < 1:
            out.append("n_radial >= 1 for potential scenarios")
        if kind is ScenarioKind.INVERSE_RADIAL and not alpha_on:
            out.append("inverse_radial scenario needs a nonzero alpha")
        if kind is ScenarioKind.LINEAR and not eta_on:
            out.append("linear scenario needs a nonzero eta")
    elif qn.n_radial < 0:
        out.append("n_radial must be >= 0")
    if kind is ScenarioKind.HARDWALL:
        rho0 = scenario.rho0
        if rho0 is None or not math.isfinite(rho0) or rho0 <= 0:
            out.append("rho0 must satisfy 0 < rho0 < inf")
    return ValidationReport(tuple(out))


def trapezoid_weights(rho: np.ndarray) -> np.ndarray:
    """Quadrature weights w with sum(w * f) = trapezoid integral of f(rho) * rho."""
    rho = np.asarray(rho, dtype=float)
    w = np.zeros_like(rho)
    d = np.diff(rho)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w * rho


@dataclass
class RadialSolution:
    """Radial wavefunction R(rho) sampled on a grid, normalized under rho d rho.

    ``weights`` are the rho-weighted quadrature weights that define the inner
    product on this grid.
    """

    rho: np.ndarray
    values: np.ndarray
    energy: float
    weights: np.ndarray
    qn: Optional[QuantumNumbers] = None
    scenario: Optional[Scenario] = None
    norm_constant: float = 1.0
    meta: dict = field(default_factory=dict)

    def norm(self) -> float:
        return float(np.sum(self.weights * np.abs(self.values) ** 2))

    def sign_changes(self, rel_floor: float = 1e-10) -> int:
        """Count interior sign changes, ignoring samples in the decayed tail."""
        v = np.real(self.values)
        keep = np.abs(v) > rel_floor * np.max(np.abs(v))
        s = np.sign(v[keep])
        return int(np.count_nonzero(s[1:] != s[:-1]))

"""Energy levels, allowed frequencies and analytic radial wavefunctions."""

from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .core import (
    ConfigError,
    PhysicalParams,
    QuantumNumbers,
    RadialSolution,
    Scenario,
    ScenarioKind,
    trapezoid_weights,
)
from .specfun import (
    HeunVariant,
    heun_polynomial,
    hyp1f1,
    truncated_coefficients,
    truncation_residual,
)

# Fraction of the expected level spacing used as the hard-wall scan step.
_HARDWALL_SCAN_FRACTION = 1.0 / 8.0
HARDWALL_E_CEILING = 1e7
SCAN_DECADES = 4.0
SCAN_PANELS = 401  # odd, so the anchor itself is never a grid node
TRUNCATION_TOL = 1e-8


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    EXACT_ROOT = "exact_root"
    APPROXIMATION = "approximation"


class RootSearchError(RuntimeError):
    pass


class PreconditionError(ValueError):
    pass


class NoRootsWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EnergyLevel:
    energy: float
    qn: QuantumNumbers
    frequency: float
    scenario: Scenario
    method: Method


def variant_for(kind: ScenarioKind) -> HeunVariant:
    if kind is ScenarioKind.INVERSE_RADIAL:
        return HeunVariant.COULOMB
    if kind is ScenarioKind.LINEAR:
        return HeunVariant.LINEAR
    raise ConfigError(f"{kind.value} has no Heun variant")


def scenario_for(variant: HeunVariant) -> Scenario:
    if HeunVariant(variant) is HeunVariant.COULOMB:
        return Scenario.inverse_radial()
    return Scenario.linear()


# ---------------------------------------------------------------- Landau


def landau_energy(params: PhysicalParams, qn: QuantumNumbers) -> EnergyLevel:
    """E = omega (n + |l|/2 - l/2 + 1/2) with omega = 2Mb/m."""
    l = qn.l
    omega = params.omega
    energy = omega * (qn.n_radial + abs(l) / 2 - l / 2 + 0.5)
    return EnergyLevel(energy, qn, omega, Scenario.landau(), Method.CLOSED_FORM)


# -------------------------------------------------------------- hard wall


def hardwall_energy_approx(params: PhysicalParams, rho0: float, qn: QuantumNumbers) -> EnergyLevel:
    l = qn.l
    phase = qn.n_radial * math.pi + abs(l) * math.pi / 2 + 3 * math.pi / 4
    energy = phase**2 / (2 * params.m * rho0**2) - 0.5 * params.omega * l
    return EnergyLevel(energy, qn, params.omega, Scenario.hardwall(rho0), Method.APPROXIMATION)


def _kummer_a(params: PhysicalParams, l: int, energy: float) -> float:
    mu = params.m * energy / (2 * params.Mb) + l / 2
    return abs(l) / 2 + 0.5 - mu


def hardwall_boundary_value(params: PhysicalParams, rho0: float, l: int, energy: float) -> float:
    """1F1(|l|/2 + 1/2 - mu(E), |l| + 1, Mb rho0^2); zero at a hard-wall level."""
    xi0 = params.Mb * rho0**2
    return hyp1f1(_kummer_a(params, l, energy), abs(l) + 1.0, xi0)


@functools.lru_cache(maxsize=256)
def hardwall_levels(
    params: PhysicalParams, rho0: float, l: int, count: int, tol: float = 1e-12
) -> tuple[float, ...]:
    """The ``count`` lowest energies with R(rho0) = 0, ascending.

    The scan starts at the unconfined ground level for this l (where the
    Kummer parameter is 0 and the boundary value is 1) and steps by a fraction
    of the larger of the Landau spacing and the wall spacing.
    """
    if not rho0 > 0:
        raise ConfigError("rho0 must be > 0")
    m = params.m
    omega = params.omega
    e_lo = 0.5 * omega * (abs(l) - l + 1)
    shift = params.Mb * rho0**2 * l  # enters the wall phase
    f_lo = hardwall_boundary_value(params, rho0, l, e_lo)
    roots: list[float] = []
    while len(roots) < count:
        phase = math.sqrt(max(2 * m * rho0**2 * e_lo + 2 * shift, (math.pi * (0.75 + abs(l) / 2)) ** 2))
        wall_spacing = math.pi * phase / (m * rho0**2)
        step = _HARDWALL_SCAN_FRACTION * max(omega, wall_spacing)
        e_hi = e_lo + step
        if e_hi > HARDWALL_E_CEILING:
            raise RootSearchError(
                f"hard-wall scan passed E={HARDWALL_E_CEILING:g} with {len(roots)} of {count} levels"
            )
        f_hi = hardwall_boundary_value(params, rho0, l, e_hi)
        if f_hi == 0.0:
            roots.append(e_hi)
        elif f_lo != 0.0 and math.copysign(1.0, f_lo) != math.copysign(1.0, f_hi):
            root = brentq(
                lambda e: hardwall_boundary_value(params, rho0, l, e),
                e_lo,
                e_hi,
                xtol=tol * max(1.0, abs(e_hi)),
                rtol=4 * np.finfo(float).eps,
                maxiter=400,
            )
            roots.append(float(root))
        e_lo, f_lo = e_hi, f_hi
    return tuple(roots)


def hardwall_energy_exact(
    params: PhysicalParams, rho0: float, qn: QuantumNumbers, tol: float = 1e-12
) -> EnergyLevel:
    """n-th (from 0) root in E of the boundary condition R(rho0) = 0."""
    levels = hardwall_levels(params, float(rho0), int(qn.l), int(qn.n_radial) + 1, tol)
    return EnergyLevel(levels[-1], qn, params.omega, Scenario.hardwall(rho0), Method.EXACT_ROOT)


# ------------------------------------------------------- scalar potentials


def closed_form_frequency(variant: HeunVariant, l: int, params: PhysicalParams) -> float:
    """Allowed frequency for n = 1."""
    L = abs(l)
    if HeunVariant(variant) is HeunVariant.COULOMB:
        return 2 * params.m * params.alpha**2 / (1 + 2 * L)
    return (params.eta**2 * (2 * L + 3) / (2 * params.m)) ** (1.0 / 3.0)


def _strength_present(variant: HeunVariant, params: PhysicalParams) -> bool:
    value = params.alpha if HeunVariant(variant) is HeunVariant.COULOMB else params.eta
    return value is not None and value != 0 and math.isfinite(value)


def allowed_frequency(
    variant: HeunVariant,
    n: int,
    l: int,
    params: PhysicalParams,
    tol: float = 1e-13,
    decades: float = SCAN_DECADES,
    panels: int = SCAN_PANELS,
) -> list[float]:
    """All positive frequencies in the scan window where a_{n+1} changes sign.

    The window spans ``decades`` on either side of the n = 1 closed form and
    is split into ``panels`` logarithmic panels; each sign change is refined
    by Brent's method. Roots are returned ascending.
    """
    variant = HeunVariant(variant)
    if n < 1:
        raise ConfigError("n must be >= 1")
    if not _strength_present(variant, params):
        raise ConfigError(f"{variant.value} variant needs a nonzero potential strength")
    anchor = closed_form_frequency(variant, l, params)
    grid = anchor * np.logspace(-decades, decades, panels + 1)

    def f(w):
        return truncation_residual(variant, n, l, w, params)

    values = [f(w) for w in grid]
    roots: list[float] = []
    for w0, w1, f0, f1 in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if f0 == 0.0:
            roots.append(float(w0))
        elif f0 * f1 < 0.0:
            root = brentq(f, w0, w1, xtol=tol * w0, rtol=4 * np.finfo(float).eps, maxiter=500)
            roots.append(float(root))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    if not roots:
        warnings.warn(
            f"no allowed frequency for {variant.value} n={n} l={l} in the scan window",
            NoRootsWarning,
            stacklevel=2,
        )
    return roots


def potential_energy_level(
    variant: HeunVariant, n: int, l: int, varpi: float, params: PhysicalParams
) -> EnergyLevel:
    """E = varpi (n + |l| - l + 1), minus eta^2/(2 m varpi^2) for the linear case."""
    if not varpi > 0:
        raise PreconditionError("varpi must be > 0")
    variant = HeunVariant(variant)
    energy = varpi * (n + abs(l) - l + 1)
    if variant is HeunVariant.LINEAR:
        energy -= params.eta**2 / (2 * params.m * varpi**2)
    qn = QuantumNumbers(n, l)
    return EnergyLevel(energy, qn, varpi, scenario_for(variant), Method.CLOSED_FORM)


# -------------------------------------------------------- wavefunctions


def _grid_arrays(grid):
    rho = getattr(grid, "rho", None)
    if rho is not None:
        return np.asarray(rho, dtype=float), np.asarray(grid.weights, dtype=float)
    rho = np.asarray(grid, dtype=float)
    return rho, trapezoid_weights(rho)


def analytic_wavefunction(
    scenario: Scenario,
    params: PhysicalParams,
    qn: QuantumNumbers,
    varpi: Optional[float] = None,
    grid=None,
    strict: bool = True,
) -> RadialSolution:
    """Sample and normalize the closed-form R(rho) on ``grid``.

    ``grid`` is either an array of radii (trapezoid quadrature) or an object
    with ``rho`` and ``weights`` attributes. For the scalar-potential cases
    ``varpi`` must be an allowed frequency; with ``strict=False`` the Heun
    series is cut at degree n regardless, which is useful only for showing
    that a wrong frequency fails the overlap test.
    """
    if grid is None:
        grid = np.linspace(0.0, 12.0 / math.sqrt(params.Mb), 2001)
    rho, weights = _grid_arrays(grid)
    L = abs(qn.l)
    kind = scenario.kind
    meta: dict = {}

    if kind in (ScenarioKind.LANDAU, ScenarioKind.HARDWALL):
        if kind is ScenarioKind.LANDAU:
            level = landau_energy(params, qn)
            inside = np.ones_like(rho, dtype=bool)
        else:
            level = hardwall_energy_exact(params, scenario.rho0, qn)
            inside = rho <= scenario.rho0
        a = _kummer_a(params, qn.l, level.energy)
        xi = params.Mb * rho**2
        values = np.zeros_like(rho)
        xin = xi[inside]
        values[inside] = xin ** (L / 2) * np.exp(-xin / 2) * hyp1f1(a, L + 1.0, xin)
        energy = level.energy
    else:
        variant = variant_for(kind)
        if varpi is None:
            raise PreconditionError("scalar-potential wavefunctions need varpi")
        n = qn.n_radial
        residual = truncation_residual(variant, n, qn.l, varpi, params)
        meta["truncation_residual"] = residual
        if strict and abs(residual) > TRUNCATION_TOL:
            raise PreconditionError(
                f"varpi={varpi!r} is not an allowed frequency (a_(n+1) residual {residual:.3e})"
            )
        coeffs = truncated_coefficients(variant, n, qn.l, varpi, params)
        poly = type(coeffs)(coeffs.values[: n + 1], coeffs.variant, coeffs.strength, coeffs.beta, coeffs.l)
        r = math.sqrt(params.m * varpi) * rho
        envelope = np.exp(-(r**2) / 2) * r**L
        if variant is HeunVariant.LINEAR:
            envelope = envelope * np.exp(-coeffs.strength * r / 2)
        values = envelope * heun_polynomial(poly, r)
        energy = potential_energy_level(variant, n, qn.l, varpi, params).energy
        meta["coefficients"] = poly.values.tolist()

    norm2 = float(np.sum(weights * values**2))
    if not norm2 > 0:
        raise PreconditionError("wavefunction vanishes on the grid")
    c = 1.0 / math.sqrt(norm2)
    return RadialSolution(rho, values * c, energy, weights, qn, scenario, c, meta)


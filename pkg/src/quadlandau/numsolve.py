"""Finite-difference radial eigensolver used as an independent oracle.

The radial operator -(1/rho)(rho R')' + l^2/rho^2 R + V(rho) R = 2mE R is
discretized by finite volumes on the cell-centred grid rho_i = (i - 1/2) h,
h = rho_max / N. The flux through the face at rho = 0 vanishes, and R = 0 is
imposed at the outer face rho_max through a mirrored ghost cell. Scaling the
unknowns by sqrt(h rho_i) (the u = sqrt(rho) R substitution) makes the matrix
symmetric tridiagonal; eigenvalues converge as O(h^2) for every l, including
l = 0 where the plain three-point stencil on u converges only logarithmically.

No function here calls into ``spectra`` or ``specfun``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal, solve_banded

from .core import (
    ConfigError,
    PhysicalParams,
    QuantumNumbers,
    RadialSolution,
    Scenario,
    ScenarioKind,
)

DEFAULT_POINTS = 4000
MIN_POINTS = 16
ORDER_WINDOW = (1.7, 2.3)


class SolverError(RuntimeError):
    pass


class GridMismatchError(ValueError):
    pass


class PropagationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    rho_max: float
    n_points: int = DEFAULT_POINTS

    def __post_init__(self):
        if self.n_points < MIN_POINTS:
            raise ConfigError(f"grid needs at least {MIN_POINTS} points")
        if not (math.isfinite(self.rho_max) and self.rho_max > 0):
            raise ConfigError("rho_max must be a positive finite number")

    @property
    def h(self) -> float:
        return self.rho_max / self.n_points

    @property
    def rho_min(self) -> float:
        return 0.5 * self.h

    @property
    def rho(self) -> np.ndarray:
        return (np.arange(self.n_points) + 0.5) * self.h

    @property
    def weights(self) -> np.ndarray:
        """Midpoint weights h * rho_i of the rho-weighted inner product."""
        return self.h * self.rho

    def refined(self, factor: int = 2) -> "RadialGrid":
        return RadialGrid(self.rho_max, self.n_points * factor)


def default_rho_max(params: PhysicalParams, tail: float = 1e-16, safety: float = 1.25) -> float:
    """Radius where exp(-Mb rho^2 / 2) drops below ``tail``, times ``safety``."""
    Mb = params.Mb
    if not Mb > 0:
        raise ConfigError("default rho_max needs Mb > 0; pass rho_max explicitly")
    return safety * math.sqrt(-2.0 * math.log(tail) / Mb)


@dataclass(frozen=True)
class HardWallBC:
    rho0: float


@dataclass
class TridiagonalOperator:
    """Symmetric tridiagonal matrix acting on u_i = sqrt(h rho_i) R_i.

    Eigenvalues are in units of 2mE; divide by ``two_m`` for energies.
    """

    diag: np.ndarray
    off: np.ndarray
    grid: RadialGrid
    two_m: float
    l: int
    scheme: str = "fv"

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


def effective_potential(
    scenario: Scenario, params: PhysicalParams, l: int, rho: np.ndarray, plain: bool = False
) -> np.ndarray:
    """Everything except the kinetic stencil, in 2mE units.

    With ``plain=True`` the centrifugal term is (l^2 - 1/4)/rho^2, the form that
    appears after u = sqrt(rho) R for the plain three-point stencil.
    """
    Mb = params.Mb
    centrifugal = (l * l - (0.25 if plain else 0.0)) / rho**2
    v = centrifugal + Mb * Mb * rho**2 - 2.0 * Mb * l
    if scenario.kind is ScenarioKind.INVERSE_RADIAL:
        v = v + 2.0 * params.m * params.alpha / rho
    elif scenario.kind is ScenarioKind.LINEAR:
        v = v + 2.0 * params.m * params.eta * rho
    return v


def build_hamiltonian(
    scenario: Scenario,
    params: PhysicalParams,
    l: int,
    grid: RadialGrid,
    bc: Optional[HardWallBC] = None,
    scheme: str = "fv",
) -> TridiagonalOperator:
    """Assemble the reduced radial operator with R = 0 at ``grid.rho_max``.

    ``scheme="fv"`` is the finite-volume discretization described in the
    module docstring. ``scheme="plain"`` is the textbook stencil
    2/h^2 + (l^2 - 1/4)/rho^2 + V on the diagonal and -1/h^2 off it; it is kept
    for comparison only.
    """
    if bc is None and scenario.kind is ScenarioKind.HARDWALL:
        bc = HardWallBC(scenario.rho0)
    if bc is not None and not math.isclose(grid.rho_max, bc.rho0, rel_tol=1e-14):
        raise ConfigError(f"hard-wall grid must end at rho0={bc.rho0}, got {grid.rho_max}")
    if scheme not in ("fv", "plain"):
        raise ConfigError(f"unknown scheme {scheme!r}")

    h = grid.h
    rho = grid.rho
    pot = effective_potential(scenario, params, l, rho, plain=(scheme == "plain"))
    if scheme == "plain":
        diag = 2.0 / h**2 + pot
        off = np.full(grid.n_points - 1, -1.0 / h**2)
    else:
        face_hi = rho + 0.5 * h
        face_lo = rho - 0.5 * h
        diag = (face_hi + face_lo) / (rho * h * h) + pot
        # ghost cell R_{N+1} = -R_N puts the zero on the outer face
        diag[-1] += face_hi[-1] / (rho[-1] * h * h)
        off = -face_hi[:-1] / np.sqrt(rho[:-1] * rho[1:]) / (h * h)
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
        raise ConfigError("operator has non-finite entries on this grid")
    return TridiagonalOperator(diag, off, grid, 2.0 * params.m, int(l), scheme)


@dataclass
class EigenResult:
    eigenvalues: np.ndarray  # 2mE units, ascending
    energies: np.ndarray
    vectors: np.ndarray  # R samples, shape (count, N)
    grid: RadialGrid
    meta: dict = field(default_factory=dict)

    def solution(self, index: int, qn: Optional[QuantumNumbers] = None, scenario: Optional[Scenario] = None) -> RadialSolution:
        return RadialSolution(
            self.grid.rho,
            self.vectors[index].copy(),
            float(self.energies[index]),
            self.grid.weights,
            qn,
            scenario,
            1.0,
            {"numeric_index": index},
        )


def sturm_count(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues below ``x`` from the LDL^T pivot signs."""
    count = 0
    q = 1.0
    tiny = np.finfo(float).tiny
    for i in range(len(diag)):
        q = diag[i] - x - (off[i - 1] ** 2 / q if i > 0 else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def solve_lowest(H: TridiagonalOperator, count: int) -> EigenResult:
    """The ``count`` smallest eigenpairs (Sturm bisection + inverse iteration).

    Eigenvectors are returned as R = u / sqrt(h rho), normalized under the
    grid's rho-weighted measure and signed positive at the first significant
    sample.
    """
    n = len(H.diag)
    if count < 1 or count > n // 4:
        raise ConfigError(f"count must be in [1, {n // 4}] for {n} points")
    try:
        vals, vecs = eigh_tridiagonal(
            H.diag, H.off, select="i", select_range=(0, count - 1), lapack_driver="stebz"
        )
    except (LinAlgError, ValueError) as exc:
        raise SolverError(f"tridiagonal eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise SolverError("eigensolver returned non-finite eigenvalues")
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order].T.copy()
    for v in vecs:
        big = np.flatnonzero(np.abs(v) > 1e-8 * np.max(np.abs(v)))
        if v[big[0]] < 0:
            v *= -1.0
    scale = np.sqrt(H.grid.weights)
    R = vecs / scale
    return EigenResult(vals, vals / H.two_m, R, H.grid, {"driver": "stebz", "scheme": H.scheme})


def overlap(f: RadialSolution, g: RadialSolution) -> float:
    """Integral of f g rho d rho with the grid's quadrature weights."""
    if f.rho.shape != g.rho.shape or not np.array_equal(f.rho, g.rho):
        raise GridMismatchError("solutions live on different grids")
    return float(np.real(np.sum(f.weights * np.conj(f.values) * g.values)))


def evolve(H: TridiagonalOperator, psi0: RadialSolution, t_final: float, steps: int) -> np.ndarray:
    """Crank-Nicolson propagation of psi0 under H/(2m); returns R samples at t_final."""
    if steps < 10:
        raise ConfigError("steps must be >= 10")
    if not np.array_equal(psi0.rho, H.grid.rho):
        raise GridMismatchError("initial state is not on the operator's grid")
    scale = np.sqrt(H.grid.weights)
    v = (np.asarray(psi0.values) * scale).astype(complex)
    dt = t_final / steps
    if dt == 0.0:
        return np.asarray(psi0.values, dtype=complex).copy()
    k = 0.5j * dt / H.two_m
    n = len(H.diag)
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = k * H.off
    ab[1, :] = 1.0 + k * H.diag
    ab[2, :-1] = k * H.off
    for _ in range(steps):
        rhs = v - k * H.matvec(v)
        v = solve_banded((1, 1), ab, rhs, check_finite=False)
        if not np.all(np.isfinite(v)):
            raise PropagationError("non-finite state during propagation")
    return v / scale


def evolve_phase_check(
    H: TridiagonalOperator,
    psi0: RadialSolution,
    E_expected: float,
    t_final: float,
    steps: int = 1000,
) -> tuple[float, float]:
    """Survival |<psi0|psi(t)>| and the phase error of arg<psi0|psi(t)> vs -E t."""
    psi_t = evolve(H, psi0, t_final, steps)
    amp = complex(np.sum(psi0.weights * np.conj(psi0.values) * psi_t))
    survival = abs(amp)
    err = math.remainder(math.atan2(amp.imag, amp.real) + E_expected * t_final, 2.0 * math.pi)
    return survival, abs(err)


@dataclass
class ConvergenceReport:
    points: list[int]
    hs: list[float]
    energies: list[float]
    extrapolated: float
    error_estimate: float
    observed_order: float
    flagged: bool
    reason: str = ""


def converge(
    scenario: Scenario,
    params: PhysicalParams,
    qn: QuantumNumbers,
    levels: Sequence[int],
    rho_max: Optional[float] = None,
    index: Optional[int] = None,
    energy_hint: Optional[float] = None,
) -> ConvergenceReport:
    """Richardson extrapolation of one eigenvalue over grids with halved h.

    ``levels`` are point counts. The tracked level is ``index`` if given, the
    radial index for Landau and hard-wall scenarios, and otherwise the
    eigenvalue nearest ``energy_hint`` on the finest grid. The observed order
    comes from the last three grids and is flagged outside [1.7, 2.3].
    """
    if len(levels) < 3:
        raise ConfigError("converge needs at least three refinement levels")
    if scenario.kind is ScenarioKind.HARDWALL:
        rho_max = scenario.rho0
    elif rho_max is None:
        rho_max = default_rho_max(params)
    grids = [RadialGrid(rho_max, int(n)) for n in levels]

    if index is None and not scenario.kind.is_potential:
        index = qn.n_radial
    if index is None and energy_hint is None:
        raise ConfigError("potential scenarios need index or energy_hint")
    if index is None:
        finest = grids[-1]
        H = build_hamiltonian(scenario, params, qn.l, finest)
        count = min(finest.n_points // 4, max(8, qn.n_radial + 2 * abs(qn.l) + 8))
        res = solve_lowest(H, count)
        index = int(np.argmin(np.abs(res.energies - energy_hint)))

    energies = []
    for g in grids:
        H = build_hamiltonian(scenario, params, qn.l, g)
        energies.append(float(solve_lowest(H, index + 1).energies[index]))
    hs = [g.h for g in grids]

    reason = []
    ratios = [hs[i] / hs[i + 1] for i in range(len(hs) - 1)]
    if any(not math.isclose(r, 2.0, rel_tol=1e-12) for r in ratios):
        reason.append("refinement is not h-halving")
    e0, e1, e2 = energies[-3:]
    d1, d2 = e1 - e0, e2 - e1
    if d1 == 0.0 or d2 == 0.0 or d1 / d2 <= 0:
        order = float("nan")
    else:
        order = math.log2(d1 / d2)
    if not (ORDER_WINDOW[0] <= order <= ORDER_WINDOW[1]):
        reason.append(f"observed order {order:.3g} outside {ORDER_WINDOW}")
    extrapolated = e2 + d2 / 3.0
    return ConvergenceReport(
        [g.n_points for g in grids],
        hs,
        energies,
        extrapolated,
        abs(d2) / 3.0,
        order,
        bool(reason),
        "; ".join(reason),
    )

"""Field configuration and finite-difference checks of its identities.

The induced electric field E = (b rho^2 / 2) z_hat is paired with the
time-dependent magnetic field B = b rho t phi_hat. Everything is evaluated in
Cartesian components so the axis needs no special treatment. Vectors are plain
length-3 numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

Vec3 = np.ndarray

DEFAULT_STEP = 1e-4

_LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI_CIVITA[_i, _j, _k] = 1.0
    _LEVI_CIVITA[_i, _k, _j] = -1.0


class FieldEvaluationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CartPoint:
    x: float
    y: float
    z: float = 0.0
    t: float = 0.0

    @property
    def rho(self) -> float:
        return float(np.hypot(self.x, self.y))

    def shifted(self, axis: int, step: float) -> "CartPoint":
        x, y, z = self.x, self.y, self.z
        if axis == 0:
            x += step
        elif axis == 1:
            y += step
        else:
            z += step
        return CartPoint(x, y, z, self.t)

    def at_time(self, t: float) -> "CartPoint":
        return CartPoint(self.x, self.y, self.z, t)


@dataclass(frozen=True)
class QuadrupoleTensor:
    components: np.ndarray

    def __post_init__(self):
        comp = np.array(self.components, dtype=float)
        if comp.shape != (3, 3):
            raise ValueError("quadrupole tensor must be 3x3")
        comp.setflags(write=False)
        object.__setattr__(self, "components", comp)

    @classmethod
    def planar(cls, M: float) -> "QuadrupoleTensor":
        """diag(M, M, -2M): the in-plane isotropic tensor of the model."""
        return cls(np.diag([M, M, -2.0 * M]))

    def trace(self) -> float:
        return float(np.trace(self.components))

    def is_symmetric(self, atol: float = 0.0) -> bool:
        return bool(np.allclose(self.components, self.components.T, rtol=0.0, atol=atol))

    def is_traceless(self, atol: float = 1e-14) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.components))))
        return abs(self.trace()) <= atol * scale


def electric_field(p: CartPoint, b: float) -> Vec3:
    return np.array([0.0, 0.0, 0.5 * b * (p.x * p.x + p.y * p.y)])


def induced_magnetic_field(p: CartPoint, b: float) -> Vec3:
    return b * p.t * np.array([-p.y, p.x, 0.0])


def _sample(field: Callable[[CartPoint], Vec3], p: CartPoint) -> Vec3:
    v = np.asarray(field(p), dtype=float)
    if not np.all(np.isfinite(v)):
        raise FieldEvaluationError(f"non-finite field sample at {p}")
    return v


def jacobian(field: Callable[[CartPoint], Vec3], p: CartPoint, h: float) -> np.ndarray:
    """J[k, l] = d field_k / d x_l by central differences."""
    if not h > 0:
        raise ValueError("step h must be > 0")
    J = np.empty((3, 3))
    for axis in range(3):
        fp = _sample(field, p.shifted(axis, h))
        fm = _sample(field, p.shifted(axis, -h))
        J[:, axis] = (fp - fm) / (2.0 * h)
    return J


def time_derivative(field: Callable[[CartPoint], Vec3], p: CartPoint, h: float) -> Vec3:
    fp = _sample(field, p.at_time(p.t + h))
    fm = _sample(field, p.at_time(p.t - h))
    return (fp - fm) / (2.0 * h)


def curl(field: Callable[[CartPoint], Vec3], p: CartPoint, h: float) -> Vec3:
    J = jacobian(field, p, h)
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


def moment_cross_field(
    p: CartPoint,
    T: QuadrupoleTensor,
    field: Callable[[CartPoint], Vec3],
    h: float = DEFAULT_STEP,
) -> Vec3:
    """(M x E)_i = eps_ijk T_jl d_l E_k, the effective vector potential.

    For the model field this is M b (y, -x, 0).
    """
    J = jacobian(field, p, h)
    # G[j, k] = sum_l T_jl d_l E_k
    G = T.components @ J.T
    return np.einsum("ijk,jk->i", _LEVI_CIVITA, G)


def effective_magnetic_field(
    p: CartPoint, T: QuadrupoleTensor, b: float, h: float = DEFAULT_STEP
) -> Vec3:
    """curl(M x E), evaluated with nested central differences.

    The result is (0, 0, -2Mb); the spectrum code uses the magnitude 2Mb/m
    as the cyclotron-analogue frequency.
    """

    def potential(q: CartPoint) -> Vec3:
        return moment_cross_field(q, T, lambda r: electric_field(r, b), h)

    return curl(potential, p, h)


def faraday_residual(p: CartPoint, b: float, h: float = DEFAULT_STEP) -> Vec3:
    """curl E + dB/dt, which vanishes for the model field pair."""
    return curl(lambda q: electric_field(q, b), p, h) + time_derivative(
        lambda q: induced_magnetic_field(q, b), p, h
    )


def moment_dot_field(
    p: CartPoint, t: float, T: QuadrupoleTensor, b: float, h: float = DEFAULT_STEP
) -> float:
    """sum_ij T_ij d_j B_i at time ``t``; zero for the planar tensor."""
    q = p.at_time(t)
    J = jacobian(lambda r: induced_magnetic_field(r, b), q, h)
    return float(np.sum(T.components * J))


def sample_grid(extent: float = 2.0, count: int = 10, z_values=(-1.0, 0.0, 1.0), t: float = 1.0):
    """count x count x len(z_values) Cartesian sample points."""
    xs = np.linspace(-extent, extent, count)
    return [CartPoint(float(x), float(y), float(z), t) for z in z_values for y in xs for x in xs]


@dataclass
class FieldCheck:
    h: float
    faraday_max: float
    moment_dot_max: float
    effective_spread: float
    effective_mean: Vec3


def check_identities(
    points, M: float, b: float, h: float, t: float = 1.0
) -> FieldCheck:
    T = QuadrupoleTensor.planar(M)
    far = max(float(np.linalg.norm(faraday_residual(p, b, h))) for p in points)
    dot = max(abs(moment_dot_field(p, t, T, b, h)) for p in points)
    beff = np.array([effective_magnetic_field(p, T, b, h) for p in points])
    spread = float(np.max(np.ptp(beff, axis=0)))
    return FieldCheck(h, far, dot, spread, beff.mean(axis=0))


def observed_order(coarse: float, fine: float, ratio: float = 2.0) -> float:
    """log_ratio(coarse / fine); NaN when either residual is exactly zero."""
    if coarse <= 0.0 or fine <= 0.0:
        return float("nan")
    return float(np.log(coarse / fine) / np.log(ratio))

"""Confluent hypergeometric and biconfluent Heun series.

``kummer_1f1`` is the plain power series with its convergence bookkeeping. Its
terms grow like exp(2 sqrt(|a| x)) for large negative ``a`` while the sum stays
O(1), so it is only trustworthy there as a diagnostic; ``hyp1f1`` is the
evaluator used for root finding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import PhysicalParams

MAX_TERMS = 10_000
_STOP_RUN = 3
# largest tolerated ratio of peak series term to result
_CANCELLATION_LIMIT = 1e6


class SpecialFunctionError(ArithmeticError):
    pass


class DomainError(SpecialFunctionError, ValueError):
    pass


class PoleError(DomainError):
    pass


@dataclass(frozen=True)
class SeriesEval:
    value: float
    terms_used: int
    converged: bool
    tail_estimate: float
    max_term: float = 0.0


class HeunVariant(str, enum.Enum):
    COULOMB = "coulomb"
    LINEAR = "linear"


@dataclass(frozen=True)
class HeunCoefficients:
    values: np.ndarray
    variant: HeunVariant
    strength: float  # nu (Coulomb) or theta (Linear)
    beta: float
    l: int

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def degree_bound(self) -> int:
        return len(self.values) - 1


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def kummer_1f1(a: float, c: float, x: float, tol: float = 1e-16) -> SeriesEval:
    """Power series for 1F1(a; c; x) with term-ratio recurrence.

    Stops after three consecutive terms below ``tol * |sum|`` or exactly when
    ``a`` is a non-positive integer and the series has become a polynomial.
    """
    if _is_nonpositive_integer(c):
        raise DomainError(f"c={c} is a non-positive integer")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    poly_degree = int(-a) if _is_nonpositive_integer(a) else None

    total = 1.0
    term = 1.0
    max_term = 1.0
    small_run = 0
    k = 0
    while k < MAX_TERMS:
        if poly_degree is not None and k >= poly_degree:
            return SeriesEval(total, k + 1, True, 0.0, max_term)
        term *= (a + k) / (c + k) * x / (k + 1)
        k += 1
        total += term
        if not math.isfinite(total):
            raise OverflowError(f"1F1({a}, {c}, {x}) series overflowed")
        max_term = max(max_term, abs(term))
        if abs(term) < tol * abs(total):
            small_run += 1
            if small_run >= _STOP_RUN:
                return SeriesEval(total, k + 1, True, abs(term), max_term)
        else:
            small_run = 0
    return SeriesEval(total, k + 1, False, abs(term), max_term)


def _series_fallback(a: float, c: float, x: float) -> float:
    ev = kummer_1f1(a, c, x)
    if not ev.converged or ev.max_term > _CANCELLATION_LIMIT * max(1.0, abs(ev.value)):
        raise SpecialFunctionError(f"1F1({a}, {c}, {x}) cannot be evaluated reliably")
    return ev.value


def hyp1f1(a: float, c: float, x):
    """Accurate real 1F1 for any real ``a``, scalar or array in ``x``.

    Delegates to ``scipy.special.hyp1f1``, which stays accurate where the
    plain series cancels (large negative ``a`` with ``x`` of order one or
    more). Where scipy gives up, typically |a| ~ 1e6 with a tiny ``x``, the
    series is well conditioned and is used instead.
    """
    if _is_nonpositive_integer(c):
        raise DomainError(f"c={c} is a non-positive integer")
    out = special.hyp1f1(a, c, x)
    if np.ndim(out) == 0:
        out = float(out)
        return out if math.isfinite(out) else _series_fallback(a, c, float(x))
    bad = ~np.isfinite(out)
    if np.any(bad):
        xs = np.broadcast_to(np.asarray(x, dtype=float), out.shape)
        out[bad] = [_series_fallback(a, c, float(v)) for v in xs[bad]]
    return out


def kummer_asymptotic(a: float, c: float, x: float) -> float:
    """Leading large-x term Gamma(c)/Gamma(a) e^x x^(a-c); relative error O(1/x)."""
    if _is_nonpositive_integer(a):
        raise PoleError(f"Gamma({a}) has a pole: the series is a polynomial there")
    if _is_nonpositive_integer(c):
        raise DomainError(f"c={c} is a non-positive integer")
    sign = math.copysign(1.0, math.gamma(a)) * math.copysign(1.0, math.gamma(c))
    log_mag = math.lgamma(c) - math.lgamma(a) + x + (a - c) * math.log(x)
    return sign * math.exp(log_mag)


def kummer_large_a(A: float, B: float, x0: float, corrected: bool = False) -> float:
    """Large-|A| cosine approximation of 1F1(A; B; x0) for fixed x0 and B.

    With ``corrected=False`` the prefactor exponent is (1 - B)/2 as in the
    hard-wall derivation. ``corrected=True`` uses the standard exponent
    1/4 - B/2; the cosine phase, and hence the zeros, are identical.
    """
    if not x0 > 0:
        raise DomainError("x0 must be > 0")
    radicand = 2.0 * B * x0 - 4.0 * A * x0
    if radicand <= 0:
        raise DomainError("2 B x0 - 4 A x0 must be positive")
    base = B * x0 / 2.0 - A * x0
    exponent = 0.25 - B / 2.0 if corrected else (1.0 - B) / 2.0
    phase = math.sqrt(radicand) - B * math.pi / 2.0 + math.pi / 4.0
    return math.gamma(B) / math.sqrt(math.pi) * math.exp(x0 / 2.0) * base**exponent * math.cos(phase)


def heun_coefficients(
    variant: HeunVariant, strength: float, beta: float, l: int, N: int
) -> HeunCoefficients:
    """a_0..a_N of the biconfluent Heun series around the origin, a_0 = 1.

    ``strength`` is nu for the 1/rho potential and theta for the linear one.
    """
    variant = HeunVariant(variant)
    if N < 1:
        raise ValueError("N must be >= 1")
    L = abs(int(l))
    a = np.zeros(N + 1)
    a[0] = 1.0
    if variant is HeunVariant.COULOMB:
        nu = strength
        a[1] = nu / (1 + 2 * L)
        for k in range(N - 1):
            den = (k + 2) * (k + 2 + 2 * L)
            a[k + 2] = nu / den * a[k + 1] - (beta - 2 - 2 * L - 2 * k) / den * a[k]
    else:
        theta = strength
        a[1] = theta / 2.0
        for k in range(N - 1):
            den = (k + 2) * (k + 2 + 2 * L)
            a[k + 2] = (
                theta * (2 * k + 3 + 2 * L) / (2 * den) * a[k + 1]
                - (4 * beta + theta**2 - 8 - 8 * L - 8 * k) / (4 * den) * a[k]
            )
    return HeunCoefficients(a, variant, strength, beta, int(l))


def heun_eval(coeffs: HeunCoefficients, r: float, tol: float = 1e-15) -> SeriesEval:
    """Partial sum of sum_k a_k r^k with a last-term tail estimate."""
    if r < 0:
        raise DomainError("r must be >= 0")
    vals = coeffs.values
    nz = np.flatnonzero(vals)
    last = int(nz[-1]) if nz.size else 0
    total = 0.0
    power = 1.0
    max_term = 0.0
    term = 0.0
    for k in range(last + 1):
        term = vals[k] * power
        total += term
        max_term = max(max_term, abs(term))
        power *= r
    if last < len(vals) - 1:
        # trailing coefficients are exactly zero: the sum is a polynomial
        return SeriesEval(total, last + 1, True, 0.0, max_term)
    tail = abs(term)
    converged = tail <= tol * max(abs(total), 1.0)
    return SeriesEval(total, last + 1, converged, tail, max_term)


def heun_polynomial(coeffs: HeunCoefficients, r):
    """Evaluate sum_k a_k r^k (Horner), vectorised in ``r``."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    for a in coeffs.values[::-1]:
        out = out * r + a
    return out


def heun_strength(variant: HeunVariant, varpi: float, params: PhysicalParams) -> float:
    """Map a trial frequency varpi (Mb = m varpi) to nu or theta."""
    if not varpi > 0:
        raise DomainError("varpi must be > 0")
    Mb = params.m * varpi
    if HeunVariant(variant) is HeunVariant.COULOMB:
        return 2.0 * params.m * params.alpha / math.sqrt(Mb)
    return 2.0 * params.m * params.eta / Mb**1.5


def truncation_beta(variant: HeunVariant, n: int, l: int, strength: float) -> float:
    """beta fixed by the first truncation condition for a degree-n polynomial."""
    beta = 2.0 * n + 2.0 + 2.0 * abs(l)
    if HeunVariant(variant) is HeunVariant.LINEAR:
        beta -= strength**2 / 4.0
    return beta


def truncated_coefficients(
    variant: HeunVariant, n: int, l: int, varpi: float, params: PhysicalParams
) -> HeunCoefficients:
    strength = heun_strength(variant, varpi, params)
    beta = truncation_beta(variant, n, l, strength)
    return heun_coefficients(variant, strength, beta, l, n + 1)


def truncation_residual(
    variant: HeunVariant, n: int, l: int, varpi: float, params: PhysicalParams
) -> float:
    """a_{n+1} / max_{k<=n} |a_k| once beta is fixed by the first condition.

    A zero in ``varpi`` is an allowed frequency.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a = truncated_coefficients(variant, n, l, varpi, params).values
    return float(a[n + 1] / np.max(np.abs(a[: n + 1])))


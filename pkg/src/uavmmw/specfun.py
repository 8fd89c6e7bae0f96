"""Special functions used by the channel statistics.

Everything here is pure and deterministic.  The Bessel, Marcum and
incomplete-gamma routines are implemented from their series /
continued-fraction definitions; ``integrate`` is the quadrature oracle the
test-suite checks them against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _scipy_integrate
from scipy import special as _special

from .errors import AccuracyError, DomainError

I0_CROSSOVER = 15.0
_EPS = 1e-17
_MAX_TERMS = 100_000


@dataclass(frozen=True)
class QuadratureSpec:
    """Budget and tolerances for the adaptive quadrature oracles."""

    max_intervals: int = 200
    abs_tol: float = 0.0
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.max_intervals < 16:
            raise DomainError("max_intervals must be >= 16")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise DomainError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise DomainError("abs_tol and rel_tol cannot both be zero")


def _check_finite(*values: float) -> None:
    for v in values:
        if math.isnan(v) or math.isinf(v):
            raise DomainError(f"expected a finite argument, got {v!r}")


# --------------------------------------------------------------------------
# Modified Bessel function I0
# --------------------------------------------------------------------------

def _i0_series(x: float) -> float:
    """Power series sum_k (x/2)^(2k) / (k!)^2.  All terms positive."""
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if term < _EPS * total:
            return total


def _i0e_asymptotic(x: float) -> float:
    """exp(-x) * I0(x) from the large-argument expansion, truncated at its
    smallest term."""
    total = 1.0
    term = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        if nxt >= term or nxt < _EPS * total:
            break
        term = nxt
        total += term
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_i0e(x: float) -> float:
    """Exponentially scaled I0: ``exp(-|x|) * I0(x)``."""
    _check_finite(x)
    x = abs(x)
    if x <= I0_CROSSOVER:
        return _i0_series(x) * math.exp(-x)
    return _i0e_asymptotic(x)


def bessel_i0(x: float) -> float:
    """Modified Bessel function of the first kind, order zero.

    Even in ``x``.  Raises ``OverflowError`` once the result leaves the
    double range; use :func:`bessel_i0e` there.
    """
    _check_finite(x)
    x = abs(x)
    if x <= I0_CROSSOVER:
        return _i0_series(x)
    if x > 700.0:
        raise OverflowError(f"I0({x}) overflows; use bessel_i0e")
    return _i0e_asymptotic(x) * math.exp(x)


# --------------------------------------------------------------------------
# Gamma family
# --------------------------------------------------------------------------

def ln_gamma(m: float) -> float:
    """Natural log of the Gamma function for ``m > 0``."""
    _check_finite(m)
    if m <= 0:
        raise DomainError(f"ln_gamma needs m > 0, got {m}")
    return math.lgamma(m)


def gammainc_lower(a: float, x) -> np.ndarray:
    """Vectorised regularized lower incomplete gamma ``P(a, x)``.

    ``a`` is a positive scalar, ``x`` an array of non-negative values.
    Series below ``x = a + 1``, Lentz continued fraction for the
    complement above it.
    """
    if not a > 0 or math.isinf(a):
        raise DomainError(f"shape must be finite and > 0, got {a}")
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("x must be >= 0")
    out = np.zeros_like(x)
    flat_x = x.ravel()
    flat_out = out.ravel()
    lga = math.lgamma(a)

    pos = flat_x > 0
    lo = pos & (flat_x < a + 1.0)
    hi = pos & ~lo & np.isfinite(flat_x)
    flat_out[np.isinf(flat_x)] = 1.0

    if lo.any():
        xs = flat_x[lo]
        ap = a
        term = np.full_like(xs, 1.0 / a)
        total = term.copy()
        for _ in range(_MAX_TERMS):
            ap += 1.0
            term *= xs / ap
            total += term
            if np.all(term < total * 1e-16):
                break
        else:
            raise AccuracyError("incomplete gamma series did not converge")
        flat_out[lo] = total * np.exp(a * np.log(xs) - xs - lga)

    if hi.any():
        xs = flat_x[hi]
        tiny = 1e-300
        b = xs + 1.0 - a
        c = np.full_like(xs, 1.0 / tiny)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, _MAX_TERMS):
            an = -i * (i - a)
            b = b + 2.0
            d = an * d + b
            d = np.where(np.abs(d) < tiny, tiny, d)
            c = b + an / c
            c = np.where(np.abs(c) < tiny, tiny, c)
            d = 1.0 / d
            delta = d * c
            h = h * delta
            if np.all(np.abs(delta - 1.0) < 1e-15):
                break
        else:
            raise AccuracyError("incomplete gamma continued fraction did not converge")
        q = np.exp(a * np.log(xs) - xs - lga) * h
        flat_out[hi] = 1.0 - q

    return np.clip(out, 0.0, 1.0)


def regularized_lower_gamma(m: float, x: float) -> float:
    """``P(m, x) = gamma_lower(m, x) / Gamma(m)``, the Gamma(m, 1) CDF."""
    _check_finite(m)
    if math.isnan(x) or x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if m <= 0:
        raise DomainError(f"m must be > 0, got {m}")
    return float(gammainc_lower(m, np.array([x]))[0])


# --------------------------------------------------------------------------
# Marcum Q, first order
# --------------------------------------------------------------------------

def marcum_q1(a: float, b: float) -> float:
    """First-order Marcum Q function, the Rician survival function.

    Uses the Poisson-mixture series
    ``Q1(a, b) = sum_k Pois(k; a^2/2) * P[Pois(b^2/2) <= k]``; for
    ``b < a`` the complement is summed instead so that values near one keep
    full absolute precision.
    """
    if math.isnan(a) or math.isnan(b):
        raise DomainError("marcum_q1 got NaN")
    _check_finite(a, b)
    if a < 0 or b < 0:
        raise DomainError(f"marcum_q1 needs a, b >= 0, got ({a}, {b})")
    if b == 0.0:
        return 1.0
    la = 0.5 * a * a
    lb = 0.5 * b * b
    if lb == 0.0:  # b so small that b^2/2 underflows: 1 - Q1 = O(b^2)
        return 1.0
    if la == 0.0:
        return math.exp(-lb)

    log_la = math.log(la)
    log_lb = math.log(lb)

    if b >= a:
        k_peak = max(la, 0.5 * a * b)
        total = 0.0
        cdf_b = 0.0
        for k in range(_MAX_TERMS):
            lgk = math.lgamma(k + 1.0)
            cdf_b = min(cdf_b + math.exp(k * log_lb - lb - lgk), 1.0)
            term = math.exp(k * log_la - la - lgk) * cdf_b
            total += term
            if k > k_peak and term <= _EPS * total:
                return min(total, 1.0)
        raise AccuracyError(f"marcum_q1({a}, {b}) did not converge")

    # b < a: 1 - Q1 = sum_k Pois(k; la) * P[Pois(lb) > k].  The tail
    # probabilities are accumulated from the far end so that they keep
    # relative precision however small they get.
    big = max(la, lb)
    k = np.arange(int(big + 12.0 * math.sqrt(big) + 60.0) + 1, dtype=float)
    lg = _special.gammaln(k + 1.0)
    pmf_a = np.exp(k * log_la - la - lg)
    pmf_b = np.exp(k * log_lb - lb - lg)
    tail_b = np.concatenate([np.cumsum(pmf_b[::-1])[::-1][1:], [0.0]])
    return min(max(1.0 - float(pmf_a @ tail_b), 0.0), 1.0)


# --------------------------------------------------------------------------
# Quadrature oracle
# --------------------------------------------------------------------------

def integrate(f, lo: float, hi: float, quad: QuadratureSpec | None = None,
              points=None) -> float:
    """Adaptive Gauss-Kronrod quadrature of a scalar function.

    Raises :class:`AccuracyError` when the error estimate exceeds the
    requested tolerance.
    """
    quad = quad or QuadratureSpec()
    kwargs = dict(epsabs=quad.abs_tol, epsrel=quad.rel_tol, limit=quad.max_intervals,
                  full_output=1)
    if points is not None and np.isfinite(lo) and np.isfinite(hi):
        kwargs["points"] = points
    res = _scipy_integrate.quad(f, lo, hi, **kwargs)
    value, err = res[0], res[1]
    allowed = max(quad.abs_tol, quad.rel_tol * abs(value))
    if len(res) > 3 and err > allowed:
        raise AccuracyError(f"quadrature on [{lo}, {hi}] reached error {err:.3g} > {allowed:.3g}")
    return value

"""Quasi-arithmetic and power-mean mixing laws.

All power-mean evaluations factor out a reference phase value ``m`` before
raising to the power ``p``, so that every ratio ``r = x/m`` satisfies
``r**p <= 1``. That keeps the sum finite for any scale of input (the
``t = 1e150`` case) and for large ``|p|``. ``m`` is the largest contributing
value for ``p > 0`` and the smallest for ``p < 0``.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .base import (
    Flag,
    MixResult,
    as_complex_values,
    as_composition,
    as_real_values,
    contributing,
)
from .errors import (
    BranchDomainError,
    DomainError,
    NonInvertible,
    NonPositiveValue,
    ZeroWithNonpositiveP,
)
from .generators import Generator

COMPLEX_MAX_ABS_P = 4.0

# |p ln x| beyond which x**p leaves the normal double range
_LOG_NORMAL_RANGE = 708.0


def _rescale_flags(p, moduli):
    """Flag results whose unscaled powers would have overflowed or underflowed."""
    for x in moduli:
        if x > 0 and abs(p * math.log(x)) >= _LOG_NORMAL_RANGE:
            return frozenset({Flag.RescaledForStability})
    return frozenset()


def quasi_arithmetic_mean(g: Generator, comp, vals, reduce=True) -> MixResult:
    """Return ``f^-1(sum_k a_k f(x_k))`` for generator ``g``.

    Generators affine in ``x**p`` or ``ln x`` define the power mean of that
    order whatever their ``a, b``; with ``reduce`` (the default) they are
    evaluated as such. The literal formula cancels the offset ``b`` and loses
    about ``|b| / |a x**p|`` ulps. ``reduce=False`` forces it anyway.
    """
    comp = as_composition(comp)
    xs = as_real_values(vals, len(comp))
    g.check_domain(xs)
    if reduce and g.power_exponent is not None:
        return power_mean(g.power_exponent, comp, xs)
    w, xs = contributing(comp, xs)
    with np.errstate(all="ignore"):
        y = math.fsum(wk * float(g.f(x)) for wk, x in zip(w, xs))
        value = float(g.f_inv(y))
    lo, hi = g.domain
    if not math.isfinite(value) or not (lo <= value <= hi):
        raise NonInvertible(f"{y!r} is outside the range of {g!r}")
    return MixResult(value)


def _log1p_mean_expm1(w, logs, p):
    """``log(sum_k w_k exp(p * logs_k))`` given ``sum w = 1`` and ``p*logs <= 0``.

    Near ``S = 1`` (small ``p``) the sum is accumulated as ``S - 1`` through
    ``expm1`` so that ``log1p`` recovers ``log S`` to full relative precision;
    otherwise the terms are summed directly.
    """
    s_minus_1 = math.fsum(wk * math.expm1(p * lk) for wk, lk in zip(w, logs))
    if s_minus_1 > -0.5:
        return math.log1p(s_minus_1)
    return math.log(math.fsum(wk * math.exp(p * lk) for wk, lk in zip(w, logs)))


_SERIES_MAX = 1e-4


def _log_mean_series(w, logs, p):
    """``log(sum w exp(p l)) / p`` by its cumulant expansion in ``p``.

    Used when ``|p| * spread(l)`` is tiny (down to subnormal ``p``), where the
    direct formula divides rounding noise by ``p``. Truncation after the
    fourth cumulant leaves an error far below rounding.
    """
    mu = math.fsum(wk * lk for wk, lk in zip(w, logs))
    d = [lk - mu for lk in logs]
    m2 = math.fsum(wk * x * x for wk, x in zip(w, d))
    m3 = math.fsum(wk * x**3 for wk, x in zip(w, d))
    m4 = math.fsum(wk * x**4 for wk, x in zip(w, d))
    return mu + p * (m2 / 2 + p * (m3 / 6 + p * (m4 - 3 * m2 * m2) / 24))


def power_mean(p: float, comp, vals) -> MixResult:
    """Weighted power mean ``(sum_k a_k x_k**p)**(1/p)`` of nonnegative values.

    ``p = 0`` selects the geometric mean; ``p = inf`` / ``-inf`` select the
    max / min over phases with a nonzero fraction. Any other float, however
    small, is evaluated with the power formula.
    """
    p = float(p)
    if math.isnan(p):
        raise DomainError("exponent is NaN")
    comp = as_composition(comp)
    xs = as_real_values(vals, len(comp))
    if p == 0:
        return geometric_mean(comp, xs)
    w, xs = contributing(comp, xs)
    if p == math.inf:
        return MixResult(max(xs))
    if p == -math.inf:
        return MixResult(min(xs))
    if min(xs) == 0.0 and p < 0:
        return MixResult(0.0, frozenset({Flag.ZeroPhaseShortCircuit}))
    m = max(xs) if p > 0 else min(xs)
    if m == 0.0:
        return MixResult(0.0)
    # a zero phase (p > 0 only) has log-ratio -inf, i.e. a term of exactly 0
    logs = [math.log(x / m) if x > 0 else -math.inf for x in xs]
    if abs(p) * (max(logs) - min(logs)) < _SERIES_MAX:
        return MixResult(m * math.exp(_log_mean_series(w, logs, p)), frozenset())
    log_s = _log1p_mean_expm1(w, logs, p)
    return MixResult(m * math.exp(log_s / p), _rescale_flags(p, xs))


def geometric_mean(comp, vals) -> MixResult:
    """Weighted geometric mean, computed in the log domain."""
    comp = as_composition(comp)
    xs = as_real_values(vals, len(comp))
    w, xs = contributing(comp, xs)
    if min(xs) == 0.0:
        return MixResult(0.0, frozenset({Flag.GeometricLimitUsed, Flag.ZeroPhaseShortCircuit}))
    m = max(xs)
    mean_log = math.fsum(wk * math.log(x / m) for wk, x in zip(w, xs))
    return MixResult(m * math.exp(mean_log), frozenset({Flag.GeometricLimitUsed}))


def power_mean_complex(p: float, comp, vals) -> MixResult:
    """Power mean of complex values on the principal branch.

    Nonzero values must lie in the open right half-plane and ``0 < |p| <= 4``.
    """
    p = float(p)
    if p == 0 or not math.isfinite(p):
        raise DomainError("complex power mean needs a finite nonzero exponent")
    if abs(p) > COMPLEX_MAX_ABS_P:
        raise DomainError(f"|p| = {abs(p)} exceeds {COMPLEX_MAX_ABS_P} on the complex path")
    comp = as_composition(comp)
    zs = as_complex_values(vals, len(comp))
    for z in zs:
        if not (cmath.isfinite(z)):
            raise BranchDomainError(f"value {z!r} is not finite")
        if z != 0 and z.real <= 0:
            raise BranchDomainError(f"value {z!r} is outside the open right half-plane")
    w, zs = contributing(comp, zs)
    if any(z == 0 for z in zs):
        if p <= 0:
            raise ZeroWithNonpositiveP("zero phase value with p <= 0")
    m = max(abs(z) for z in zs)
    if m == 0:
        return MixResult(0j)
    s = sum(wk * cmath.exp(p * cmath.log(z / m)) for wk, z in zip(w, zs) if z != 0)
    value = m * cmath.exp(cmath.log(s) / p)
    return MixResult(value, _rescale_flags(p, [abs(z) for z in zs]))


def _phi_exp(y):
    """``y e^y - e^y + 1`` (nonnegative), accurate for small ``|y|``."""
    if abs(y) < 0.1:
        # sum_{k>=2} (k-1) y^k / k!
        term, total = y, 0.0
        for k in range(2, 16):
            term *= y / k
            total += (k - 1) * term
        return total
    return y * math.exp(y) - math.expm1(y)


def power_mean_dp(p: float, comp, vals) -> float:
    """Derivative of the power mean with respect to the exponent.

    Uses ``d ln M / dp = KL(q_p || a) / p**2`` where ``q_p`` are the weights
    tilted by ``x**p``; the divergence is summed from nonnegative terms, so
    there is no cancellation near ``p = 0``. At ``p = 0`` the limit
    ``G * Var_a(ln x) / 2`` is used.
    """
    p = float(p)
    if not math.isfinite(p):
        raise DomainError("derivative needs a finite exponent")
    comp = as_composition(comp)
    xs = as_real_values(vals, len(comp))
    if min(xs) <= 0:
        raise NonPositiveValue("derivative needs strictly positive values")
    w, xs = contributing(comp, xs)
    logs = [math.log(x) for x in xs]
    mu = math.fsum(wk * lk for wk, lk in zip(w, logs))
    centered = [lk - mu for lk in logs]
    if p == 0:
        var = math.fsum(wk * c * c for wk, c in zip(w, centered))
        return geometric_mean(comp, vals).value * 0.5 * var
    spread = max(centered) - min(centered)
    if abs(p) * spread < 1.0:
        k = math.log1p(math.fsum(wk * math.expm1(p * c) for wk, c in zip(w, centered)))
    else:
        shift = max(centered) if p > 0 else min(centered)
        k = p * shift + math.log(
            math.fsum(wk * math.exp(p * (c - shift)) for wk, c in zip(w, centered))
        )
    kl = math.fsum(wk * _phi_exp(p * c - k) for wk, c in zip(w, centered))
    return power_mean(p, comp, vals).value * kl / (p * p)

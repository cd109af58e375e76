"""Closed-form inverse problems on the power-mean mixing law.

Each solver inverts one unknown of the forward law: a missing phase value, the
fraction of one phase in a two-phase mix, or the water saturation in Archie's
equation (the ``n = m`` member of the power-mean family, see
:func:`archie_conductivity`). Inconsistent measurements raise a typed error;
nothing is clamped beyond rounding noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .base import as_composition
from .errors import (
    DegenerateEqualPhases,
    DomainError,
    Infeasible,
    LengthMismatch,
    NegativeValue,
    OutOfRange,
    SaturationOutOfRange,
    ZeroFraction,
)

SATURATION_OVERSHOOT = 1e-9


def _split_known(comp, known):
    """Return (weight of the hole, hole index, [(weight, value)] of the other phases)."""
    comp = as_composition(comp)
    known = list(known)
    if len(known) != len(comp):
        raise LengthMismatch(f"{len(known)} values for {len(comp)} fractions")
    holes = [i for i, v in enumerate(known) if v is None or (isinstance(v, float) and math.isnan(v))]
    if len(holes) != 1:
        raise DomainError(f"expected exactly one unknown phase value, got {len(holes)}")
    j = holes[0]
    w = comp.weights()
    if w[j] == 0:
        raise ZeroFraction(f"phase {j} has zero fraction; its value is unidentifiable")
    others = []
    for k, v in enumerate(known):
        if k == j or comp[k] == 0:
            continue
        v = float(v)
        if not math.isfinite(v) or v < 0:
            raise NegativeValue(f"known value {v!r} must be finite and nonnegative")
        others.append((w[k], v))
    return w[j], j, others


def solve_phase_value(p: float, comp, known, target: float) -> float:
    """Recover the one unknown phase value (``None`` in ``known``).

    ``x_j = ((target**p - sum_{k != j} a_k x_k**p) / a_j)**(1/p)``, evaluated
    relative to ``target`` for scale stability.
    """
    p = float(p)
    if p == 0 or not math.isfinite(p):
        raise DomainError("use solve_phase_value_geometric for p = 0; p must be finite")
    target = float(target)
    if not target > 0 or not math.isfinite(target):
        raise DomainError("target must be finite and positive")
    wj, _, others = _split_known(comp, known)
    if p < 0 and any(v == 0 for _, v in others):
        raise Infeasible("a zero-valued phase forces the mixture to 0 when p < 0")
    # (target**p - sum w x**p) / target**p = w_j - sum_k w_k expm1(p ln(x_k/target))
    excess = math.fsum(
        wk * math.expm1(p * math.log(v / target)) if v > 0 else -wk for wk, v in others
    )
    ratio = 1.0 - excess / wj  # (x_j / target)**p
    if math.isnan(ratio) or ratio < 0 or (p < 0 and ratio == 0):
        raise Infeasible(
            f"target {target!r} is inconsistent with the known phases at p={p!r}"
        )
    if ratio == 0:
        return 0.0
    log_ratio = math.log1p(-excess / wj) if ratio > 0.5 else math.log(ratio)
    return target * math.exp(log_ratio / p)


def solve_phase_value_geometric(comp, known, target: float) -> float:
    """Recover the unknown phase value under the geometric-mean law."""
    target = float(target)
    if not target > 0 or not math.isfinite(target):
        raise DomainError("target must be finite and positive")
    wj, _, others = _split_known(comp, known)
    if any(v == 0 for _, v in others):
        raise Infeasible("a zero-valued phase forces the geometric mean to 0")
    s = math.fsum(wk * math.log(v / target) for wk, v in others)
    return target * math.exp(-s / wj)


def solve_fraction_two_phase(p: float, sigma1: float, sigma2: float, target: float) -> float:
    """Fraction ``a1`` of phase 1 such that the two-phase mix equals ``target``.

    For ``p = +-inf`` the law only sees the max/min, so the answer is 1 or 0
    (the pure phase that attains ``target``).
    """
    p, s1, s2, t = float(p), float(sigma1), float(sigma2), float(target)
    if math.isnan(p):
        raise DomainError("exponent is NaN")
    for v in (s1, s2, t):
        if not math.isfinite(v) or v < 0:
            raise NegativeValue(f"value {v!r} must be finite and nonnegative")
    if s1 == s2:
        raise DegenerateEqualPhases("sigma1 == sigma2: every fraction gives the same mixture")
    lo, hi = min(s1, s2), max(s1, s2)
    if not lo <= t <= hi:
        raise OutOfRange(f"target {t!r} outside [{lo!r}, {hi!r}]; no fraction attains it")
    if t == s1:
        return 1.0
    if t == s2:
        return 0.0
    if math.isinf(p) or (p <= 0 and lo == 0):
        # interior targets are unattainable: the law returns an endpoint for any fraction
        raise OutOfRange(f"target {t!r} is not attainable at p={p!r}")
    if p == 0:
        a1 = math.log(t / s2) / math.log(s1 / s2)
    else:
        e1 = math.expm1(p * math.log(s1 / t)) if s1 > 0 else -1.0
        e2 = math.expm1(p * math.log(s2 / t)) if s2 > 0 else -1.0
        a1 = -e2 / (e1 - e2)
    return min(1.0, max(0.0, a1))


@dataclass(frozen=True)
class ArchieParams:
    """Inputs of Archie's equation with equal saturation and cementation exponents."""

    sigma_w: float
    phi: float
    s_w: float
    m: float

    def __post_init__(self):
        if not (self.sigma_w > 0 and math.isfinite(self.sigma_w)):
            raise DomainError("sigma_w must be positive")
        if not 0 <= self.phi <= 1:
            raise DomainError("phi must be in [0, 1]")
        if not 0 <= self.s_w <= 1:
            raise DomainError("s_w must be in [0, 1]")
        if not (self.m > 0 and math.isfinite(self.m)):
            raise DomainError("m must be positive")


def archie_conductivity(params: ArchieParams) -> float:
    """``sigma_w * (phi * s_w)**m``.

    Equal to ``power_mean(1/m, (phi*s_w, 1 - phi*s_w), (sigma_w, 0))``: brine
    mixed with a nonconducting remainder at exponent ``1/m``.
    """
    return params.sigma_w * (params.phi * params.s_w) ** params.m


def archie_saturation(sigma: float, sigma_w: float, phi: float, m: float) -> float:
    """Invert Archie's equation for the water saturation."""
    sigma, sigma_w, phi, m = float(sigma), float(sigma_w), float(phi), float(m)
    if not (sigma >= 0 and math.isfinite(sigma)):
        raise DomainError("sigma must be finite and nonnegative")
    if not sigma_w > 0:
        raise DomainError("sigma_w must be positive")
    if not 0 < phi <= 1:
        raise DomainError("phi must be in (0, 1]")
    if not m > 0:
        raise DomainError("m must be positive")
    s_w = (sigma / sigma_w) ** (1.0 / m) / phi
    if s_w > 1.0 + SATURATION_OVERSHOOT:
        raise SaturationOutOfRange(
            f"sigma={sigma!r} exceeds the fully saturated value {sigma_w * phi**m!r}"
        )
    return min(s_w, 1.0)

"""Numerical witnesses for the functional equations behind the power mean.

* scale independence: ``t M_f(x) == M_f(t x)`` for all ``t > 0``;
* translation independence: ``t + M_F(X) == M_F(X + t)``, its log-domain image
  under ``F = f o exp``;
* affine equivalence of generators: ``g = c f + d`` gives the same mean;
* Vincze's relation ``f(x + t) = c(t) f(x) + d(t)``.

A finite grid can refute these identities but never prove them, hence the
three-way verdict of :func:`check_scale_independence`.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .base import Composition, as_composition, as_real_values
from .errors import DegenerateGrid, DomainError
from .generators import Generator
from .mean_core import quasi_arithmetic_mean

CONFORMS_MAX = 1e-10
VIOLATES_MIN = 1e-6
EDGE_MARGIN = 0.1
EQUIVALENCE_RTOL = 1e-9

DEFAULT_COMPOSITIONS = ((0.5, 0.5), (0.3, 0.7), (0.9, 0.1))
_N_T = 5
_N_PAIRS = 5
_MAX_T = 10.0


class Verdict(enum.Enum):
    CONFORMS = "CONFORMS"
    VIOLATES = "VIOLATES"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self):
        return self.value


def classify(residual: float) -> Verdict:
    if residual <= CONFORMS_MAX:
        return Verdict.CONFORMS
    if residual >= VIOLATES_MIN:
        return Verdict.VIOLATES
    return Verdict.INCONCLUSIVE


@dataclass
class ResidualReport:
    max_abs_residual: float
    argmax_point: tuple
    grid_size: int

    @property
    def verdict(self) -> Verdict:
        return classify(self.max_abs_residual)


@dataclass
class VinczeFit:
    t: float
    c_of_t: float
    d_of_t: float
    residual: float


@dataclass
class Equivalence:
    equivalent: bool
    c: float
    d: float
    residual: float
    mean_discrepancy: float | None = None


def scale_independence_residual(g: Generator, t: float, comp, vals) -> float:
    """``|t M(x) - M(t x)| / |t M(x)|`` for the quasi-arithmetic mean ``M`` of ``g``.

    ``M`` is always evaluated literally through ``g.f`` and ``g.f_inv``.
    """
    t = float(t)
    if not t > 0:
        raise DomainError("scale factor must be positive")
    xs = as_real_values(vals)
    lhs = t * quasi_arithmetic_mean(g, comp, xs, reduce=False).value
    rhs = quasi_arithmetic_mean(g, comp, [t * x for x in xs], reduce=False).value
    return abs(lhs - rhs) / abs(lhs)


def default_grid(g: Generator) -> dict:
    """Scale factors and value pairs that keep ``x`` and ``t x`` inside ``g``'s domain.

    The usable window is the generator's sample window minus a 10% margin at
    each end, measured in log coordinates when the window is positive (scale
    grids are multiplicative) and linearly when it touches zero. Scale factors
    are log-spaced in ``[1/T, T]`` with ``T = min(10, (hi/lo)**(1/3))``,
    leaving a ``[lo T, hi / T]`` band for the values themselves.
    """
    lo, hi = g.sample_window()
    if lo > 0:
        width = math.log(hi / lo)
        lo, hi = lo * math.exp(EDGE_MARGIN * width), hi * math.exp(-EDGE_MARGIN * width)
    else:
        width = hi - lo
        lo, hi = lo + EDGE_MARGIN * width, hi - EDGE_MARGIN * width
    if lo <= 0:
        raise DomainError(f"{g!r}: scale grids need a positive domain")
    span = min(_MAX_T, (hi / lo) ** (1.0 / 3.0))
    ts = np.geomspace(1.0 / span, span, _N_T)
    v_lo, v_hi = lo * span, hi / span
    anchors = np.geomspace(v_lo, v_hi, _N_PAIRS + 1)
    # pair each anchor with a partner two steps away (wrapping) to vary the ratio
    pairs = [(anchors[i], anchors[(i + 2) % (_N_PAIRS + 1)]) for i in range(_N_PAIRS)]
    return {
        "t": [float(t) for t in ts],
        "comps": [Composition(c) for c in DEFAULT_COMPOSITIONS],
        "vals": [tuple(float(v) for v in pair) for pair in pairs],
    }


def check_scale_independence(g: Generator, grid_spec: dict | None = None) -> ResidualReport:
    grid = default_grid(g) if grid_spec is None else grid_spec
    worst, where, count = -1.0, None, 0
    for t, comp, vals in itertools.product(grid["t"], grid["comps"], grid["vals"]):
        r = scale_independence_residual(g, t, comp, vals)
        count += 1
        if r > worst or math.isnan(r):
            worst, where = r, (t, tuple(as_composition(comp)), tuple(vals))
            if math.isnan(r):
                break
    return ResidualReport(max_abs_residual=worst, argmax_point=where, grid_size=count)


def translation_independence_residual(F: Generator, t: float, comp, X) -> float:
    """``|t + M_F(X) - M_F(X + t)|`` for the quasi-arithmetic mean of ``F``.

    ``X`` may be negative, so the inputs bypass the nonnegativity check used
    for physical phase values.
    """
    comp = as_composition(comp)
    X = [float(x) for x in X]
    if len(X) != len(comp):
        raise DomainError(f"{len(X)} points for {len(comp)} fractions")
    return abs(t + _qam(F, comp, X) - _qam(F, comp, [x + t for x in X]))


def _qam(F, comp, X):
    F.check_domain(X)
    w = comp.weights()
    with np.errstate(all="ignore"):
        y = math.fsum(wk * float(F.f(x)) for wk, x in zip(w, X) if wk > 0)
        out = float(F.f_inv(y))
    if not math.isfinite(out):
        raise DomainError(f"{y!r} is outside the range of {F!r}")
    return out


def _distinct_grid(grid):
    xs = np.asarray(grid, dtype=float)
    if np.unique(xs).size < 3:
        raise DegenerateGrid("need at least 3 distinct grid points")
    return xs


def _evaluate(f, xs):
    with np.errstate(all="ignore"):
        return np.array([float(f(float(x))) for x in xs])


def generators_equivalent(g1: Generator, g2: Generator, grid, n_check=10, seed=0) -> Equivalence:
    """Least-squares fit ``g2 ~ c g1 + d`` on ``grid``.

    Equivalent when the worst residual is within ``1e-9`` of ``g2``'s range on
    the grid and ``c != 0``. For equivalent pairs the two mixing laws are
    compared on ``n_check`` random instances drawn from the grid's span.
    """
    xs = _distinct_grid(grid)
    y1, y2 = _evaluate(g1, xs), _evaluate(g2, xs)
    design = np.column_stack([y1, np.ones_like(y1)])
    (c, d), *_ = np.linalg.lstsq(design, y2, rcond=None)
    residual = float(np.max(np.abs(y2 - (c * y1 + d))))
    spread = float(np.ptp(y2))
    equivalent = bool(c != 0 and residual <= EQUIVALENCE_RTOL * spread)
    report = Equivalence(equivalent, float(c), float(d), residual)
    if equivalent:
        rng = np.random.default_rng(seed)
        lo, hi = float(xs.min()), float(xs.max())
        worst = 0.0
        for _ in range(n_check):
            n = int(rng.integers(2, 5))
            comp = Composition.normalized(rng.dirichlet(np.ones(n)))
            vals = rng.uniform(lo, hi, n)
            m1 = quasi_arithmetic_mean(g1, comp, vals, reduce=False).value
            m2 = quasi_arithmetic_mean(g2, comp, vals, reduce=False).value
            worst = max(worst, abs(m1 - m2) / max(abs(m1), 1e-300))
        report.mean_discrepancy = worst
    return report


def vincze_decomposition(f, t: float, grid) -> VinczeFit:
    """Fit ``f(x + t) ~ c f(x) + d`` on ``grid`` by least squares.

    ``f`` is any callable (a :class:`Generator` works). ``residual`` is the
    largest absolute misfit over the grid; Vincze solutions (affine or
    affine-exponential ``f``) leave only rounding noise.
    """
    xs = _distinct_grid(grid)
    y0, y1 = _evaluate(f, xs), _evaluate(f, xs + t)
    design = np.column_stack([y0, np.ones_like(y0)])
    (c, d), *_ = np.linalg.lstsq(design, y1, rcond=None)
    residual = float(np.max(np.abs(y1 - (c * y0 + d))))
    return VinczeFit(t=float(t), c_of_t=float(c), d_of_t=float(d), residual=residual)

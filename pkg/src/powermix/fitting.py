"""Estimating the power-mean exponent from measured mixtures.

Per-sample estimation is a root-finding problem on ``p -> M_p``, which is
strictly increasing whenever the contributing phase values are not all equal.
Global estimation minimizes the squared error in measured units across all
samples.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable

from scipy.optimize import brentq

from .base import Composition, Flag, as_composition, as_real_values, contributing
from .errors import (
    AllDegenerate,
    DataFormatError,
    Degenerate,
    DomainError,
    EmptyDataset,
    MixingError,
    Unsolvable,
)
from .mean_core import geometric_mean, power_mean, power_mean_dp

MAX_EXPONENT = 64.0
DEFAULT_BRACKET = (-MAX_EXPONENT, MAX_EXPONENT)
GRID_POINTS = 81
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Sample:
    comp: Composition
    vals: tuple
    measured: float

    def __init__(self, comp, vals, measured):
        comp = as_composition(comp)
        vals = tuple(as_real_values(vals, len(comp)))
        measured = float(measured)
        if not (measured > 0 and math.isfinite(measured)):
            raise DomainError(f"measured value {measured!r} must be finite and positive")
        object.__setattr__(self, "comp", comp)
        object.__setattr__(self, "vals", vals)
        object.__setattr__(self, "measured", measured)

    def model(self, p):
        return power_mean(p, self.comp, self.vals).value

    def is_degenerate(self):
        _, xs = contributing(self.comp, self.vals)
        return min(xs) == max(xs)


@dataclass
class Dataset:
    samples: list = field(default_factory=list)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        """Read ``a1,..,an,s1,..,sn,measured`` rows; ``#`` starts a comment line."""
        with open(path, newline="", encoding="utf-8") as fh:
            return cls.from_lines(fh)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "Dataset":
        header, n, samples = None, None, []
        for lineno, row in enumerate(csv.reader(lines), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            row = [c.strip() for c in row]
            if header is None:
                n = _parse_header(row, lineno)
                header = row
                continue
            if len(row) != 2 * n + 1:
                raise DataFormatError(f"expected {2 * n + 1} fields, got {len(row)}", lineno)
            try:
                nums = [float(c) for c in row]
            except ValueError as exc:
                raise DataFormatError(str(exc), lineno) from None
            try:
                samples.append(Sample(nums[:n], nums[n : 2 * n], nums[2 * n]))
            except MixingError as exc:
                raise DataFormatError(f"{type(exc).__name__}: {exc}", lineno) from None
        return cls(samples)

    def to_csv(self, path):
        if not self.samples:
            raise EmptyDataset("nothing to write")
        n = len(self.samples[0].comp)
        header = [f"a{i + 1}" for i in range(n)] + [f"s{i + 1}" for i in range(n)] + ["measured"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for s in self.samples:
                w.writerow([repr(x) for x in (*s.comp, *s.vals, s.measured)])


def _parse_header(row, lineno):
    if len(row) < 3 or len(row) % 2 == 0 or row[-1] != "measured":
        raise DataFormatError("header must be a1,...,an,s1,...,sn,measured", lineno)
    n = (len(row) - 1) // 2
    expected = [f"a{i + 1}" for i in range(n)] + [f"s{i + 1}" for i in range(n)]
    if row[:-1] != expected:
        raise DataFormatError(f"header must be {','.join(expected)},measured", lineno)
    return n


@dataclass
class FitReport:
    p_hat: float
    rss: float
    iterations: int
    per_sample_p: list | None = None


def solve_p_single(sample: Sample, bracket=DEFAULT_BRACKET, full_output=False):
    """Exponent ``p`` at which the sample's power mean equals its measurement.

    Returns ``p`` (capped to ``|p| <= 64``), or ``(p, flags)`` with
    ``full_output=True``; the flags contain ``Flag.MaxExponent`` when the cap
    was hit.
    """
    w, xs = contributing(sample.comp, sample.vals)
    lo_val, hi_val = min(xs), max(xs)
    y = sample.measured
    if lo_val == hi_val:
        raise Degenerate("all contributing phase values are equal; every p fits")
    if y >= hi_val:
        raise Unsolvable(f"measured {y!r} >= max phase value; only p -> +inf attains it", math.inf)
    if y <= lo_val:
        raise Unsolvable(f"measured {y!r} <= min phase value; only p -> -inf attains it", -math.inf)

    flags = set()
    p_lo, p_hi = (max(float(b), -MAX_EXPONENT) for b in bracket)
    p_hi = min(p_hi, MAX_EXPONENT)
    if not p_lo < p_hi:
        raise DomainError(f"invalid bracket {bracket!r}")
    log_y = math.log(y)

    def h(p):
        return math.log(power_mean(p, sample.comp, sample.vals).value) - log_y

    g = geometric_mean(sample.comp, sample.vals).value
    if abs(g - y) <= 4 * math.ulp(y) and p_lo <= 0 <= p_hi:
        p = 0.0
    else:
        h_lo, h_hi = h(p_lo), h(p_hi)
        while h_hi < 0 and p_hi < MAX_EXPONENT:
            p_lo, h_lo = p_hi, h_hi
            p_hi = min(MAX_EXPONENT, 2 * p_hi if p_hi > 0 else 1.0)
            h_hi = h(p_hi)
        while h_lo > 0 and p_lo > -MAX_EXPONENT:
            p_hi, h_hi = p_lo, h_lo
            p_lo = max(-MAX_EXPONENT, 2 * p_lo if p_lo < 0 else -1.0)
            h_lo = h(p_lo)
        if h_hi < 0:
            p = p_hi
            flags.add(Flag.MaxExponent)
        elif h_lo > 0:
            p = p_lo
            flags.add(Flag.MaxExponent)
        elif h_lo == 0:
            p = p_lo
        elif h_hi == 0:
            p = p_hi
        else:
            p = brentq(h, p_lo, p_hi, xtol=1e-15, rtol=4 * 2.220446049250313e-16, maxiter=500)
    if full_output:
        return p, frozenset(flags)
    return p


def per_sample_p(data) -> list:
    """Solve every sample independently.

    Returns ``[(index, outcome)]`` where ``outcome`` is the solved exponent or
    the :class:`Degenerate` / :class:`Unsolvable` instance for that sample.
    """
    samples = list(data)
    if not samples:
        raise EmptyDataset("dataset has no samples")
    out = []
    for i, s in enumerate(samples):
        try:
            out.append((i, solve_p_single(s)))
        except (Degenerate, Unsolvable) as exc:
            out.append((i, exc))
    return out


def rss(p, samples) -> float:
    return math.fsum((s.model(p) - s.measured) ** 2 for s in samples)


def _rss_and_slope(p, samples):
    """RSS, its derivative in ``p`` and the rounding-noise floor of that derivative."""
    r_terms, d_terms, noise = [], [], []
    for s in samples:
        m = s.model(p)
        dm = power_mean_dp(p, s.comp, s.vals) if not s.is_degenerate() else 0.0
        r = m - s.measured
        r_terms.append(r * r)
        d_terms.append(2.0 * r * dm)
        noise.append(2.0 * 8 * math.ulp(max(m, s.measured)) * abs(dm))
    return math.fsum(r_terms), math.fsum(d_terms), math.fsum(noise)


def fit_p_global(data, bracket=DEFAULT_BRACKET) -> FitReport:
    """Least-squares exponent over a dataset.

    An 81-point scan of the bracket locates the basin of the global minimum;
    inside it the sign of ``dRSS/dp`` is bisected. When that derivative drops
    into its rounding-noise floor, golden-section search on RSS takes over.
    """
    samples = list(data)
    if not samples:
        raise EmptyDataset("dataset has no samples")
    if all(s.is_degenerate() for s in samples):
        raise AllDegenerate("every sample has equal phase values; p is unidentifiable")
    p_lo, p_hi = (float(b) for b in bracket)
    if not p_lo < p_hi or math.isinf(p_lo) or math.isinf(p_hi):
        raise DomainError(f"invalid bracket {bracket!r}")

    step = (p_hi - p_lo) / (GRID_POINTS - 1)
    grid = [p_lo + step * i for i in range(GRID_POINTS)]
    grid[-1] = p_hi
    values = [rss(p, samples) for p in grid]
    i = min(range(GRID_POINTS), key=values.__getitem__)
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, GRID_POINTS - 1)]

    iterations = 0
    _, da, _ = _rss_and_slope(a, samples)
    _, db, _ = _rss_and_slope(b, samples)
    best_p, best_rss = grid[i], values[i]
    use_golden = not (da < 0 < db)
    while b - a >= 1e-10 and not use_golden:
        iterations += 1
        mid = 0.5 * (a + b)
        r_mid, d_mid, noise = _rss_and_slope(mid, samples)
        if r_mid <= best_rss:
            best_p, best_rss = mid, r_mid
        if abs(d_mid) < 1e-14 * r_mid:
            break
        if abs(d_mid) <= noise:
            use_golden = True
            break
        if d_mid > 0:
            b = mid
        else:
            a = mid
    if use_golden:
        c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
        rc, rd = rss(c, samples), rss(d, samples)
        while b - a >= 1e-10:
            iterations += 1
            if rc <= rd:
                b, d, rd = d, c, rc
                c = b - _GOLDEN * (b - a)
                rc = rss(c, samples)
            else:
                a, c, rc = c, d, rd
                d = a + _GOLDEN * (b - a)
                rd = rss(d, samples)
        for p, r in ((c, rc), (d, rd)):
            if r <= best_rss:
                best_p, best_rss = p, r
    else:
        mid = 0.5 * (a + b)
        r_mid = rss(mid, samples)
        if r_mid <= best_rss:
            best_p, best_rss = mid, r_mid
    return FitReport(p_hat=best_p, rss=best_rss, iterations=iterations)

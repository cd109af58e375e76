"""Generators of quasi-arithmetic means.

A generator is a continuous, strictly monotone function ``f`` with a known
inverse. The mixing law it defines is ``f^-1(sum_k a_k f(x_k))``. Generators
are callable (``g(x) == g.f(x)``) so they can be passed wherever a plain
function is expected.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, InvalidGenerator

N_VALIDATION_POINTS = 32
ROUND_TRIP_RTOL = 1e-9

# Finite window used to sample generators whose domain is unbounded.
_UNBOUNDED_SPAN = 20.0


class Generator:
    """Base class. Subclasses provide ``f``, ``f_inv`` and ``domain``.

    ``domain`` is a closed interval ``(lo, hi)``; infinite ends are allowed.
    ``open_lo`` marks a lower end that is excluded (e.g. ``0`` for ``ln``).
    ``power_exponent`` is set by generators affine in ``x**p`` (``ln x`` for
    ``0``), whose mean is the power mean of that order.
    """

    domain = (-math.inf, math.inf)
    open_lo = False
    power_exponent = None

    def f(self, x):
        raise NotImplementedError

    def f_inv(self, y):
        raise NotImplementedError

    def __call__(self, x):
        return self.f(x)

    def contains(self, x) -> bool:
        lo, hi = self.domain
        if isinstance(x, complex) or not math.isfinite(x):
            return False
        if self.open_lo:
            return lo < x <= hi
        return lo <= x <= hi

    def check_domain(self, xs):
        for x in xs:
            if not self.contains(x):
                raise DomainError(f"value {x!r} outside generator domain {self.describe_domain()}")

    def describe_domain(self) -> str:
        lo, hi = self.domain
        return f"{'(' if self.open_lo else '['}{lo}, {hi}]"

    def sample_window(self) -> tuple:
        """Finite interval used for validation and default grids."""
        lo, hi = self.domain
        if math.isinf(lo) and math.isinf(hi):
            return (-_UNBOUNDED_SPAN / 2, _UNBOUNDED_SPAN / 2)
        if math.isinf(hi):
            if self.open_lo and lo == 0:
                return (1e-2, 1e2)
            return (lo, lo + _UNBOUNDED_SPAN)
        if math.isinf(lo):
            return (hi - _UNBOUNDED_SPAN, hi)
        return (lo, hi)


class AffineLog(Generator):
    """``f(x) = a ln x + b`` on ``(0, inf)``."""

    domain = (0.0, math.inf)
    open_lo = True
    power_exponent = 0.0

    def __init__(self, a=1.0, b=0.0):
        a, b = float(a), float(b)
        if a == 0 or not math.isfinite(a) or not math.isfinite(b):
            raise InvalidGenerator("AffineLog needs finite a != 0 and finite b")
        self.a, self.b = a, b

    def f(self, x):
        return self.a * np.log(x) + self.b

    def f_inv(self, y):
        return np.exp((y - self.b) / self.a)

    def __repr__(self):
        return f"AffineLog(a={self.a!r}, b={self.b!r})"


class AffinePower(Generator):
    """``f(x) = a x**p + b``; zero is in the domain only for ``p > 0``."""

    def __init__(self, a=1.0, b=0.0, p=1.0):
        a, b, p = float(a), float(b), float(p)
        if a == 0 or p == 0 or not all(map(math.isfinite, (a, b, p))):
            raise InvalidGenerator("AffinePower needs finite a != 0, p != 0 and finite b")
        self.a, self.b, self.p = a, b, p
        self.power_exponent = p
        self.domain = (0.0, math.inf)
        self.open_lo = p < 0

    def f(self, x):
        return self.a * np.power(x, self.p) + self.b

    def f_inv(self, y):
        return np.power((y - self.b) / self.a, 1.0 / self.p)

    def sample_window(self):
        return (1e-2, 1e2)

    def __repr__(self):
        return f"AffinePower(a={self.a!r}, b={self.b!r}, p={self.p!r})"


class Custom(Generator):
    """User-supplied generator.

    The constructor samples 32 points of the domain and rejects ``f`` if it
    is not strictly monotone there or if ``f_inv(f(x))`` misses ``x`` by more
    than ``1e-9`` relative. The callables must be re-entrant.
    """

    def __init__(self, f, f_inv, domain, name=None):
        lo, hi = (float(d) for d in domain)
        if not lo < hi:
            raise InvalidGenerator(f"empty domain {domain!r}")
        self._f, self._f_inv = f, f_inv
        self.domain = (lo, hi)
        self.name = name or getattr(f, "__name__", "custom")
        self._validate()

    def f(self, x):
        return self._f(x)

    def f_inv(self, y):
        return self._f_inv(y)

    def _validate(self):
        lo, hi = self.sample_window()
        xs = np.linspace(lo, hi, N_VALIDATION_POINTS)
        with np.errstate(all="ignore"):
            ys = np.array([float(self._f(float(x))) for x in xs])
            back = np.array([float(self._f_inv(float(y))) for y in ys])
        if not np.all(np.isfinite(ys)):
            raise InvalidGenerator(f"{self.name}: f is not finite on {lo, hi}")
        dy = np.diff(ys)
        if not (np.all(dy > 0) or np.all(dy < 0)):
            raise InvalidGenerator(f"{self.name}: f is not strictly monotone on {lo, hi}")
        scale = np.maximum(np.abs(xs), 1e-300)
        bad = ~(np.abs(back - xs) <= ROUND_TRIP_RTOL * scale)
        # Points where x == 0 exactly have no relative scale; allow an absolute slack.
        bad &= ~((xs == 0) & (np.abs(back) <= ROUND_TRIP_RTOL))
        if np.any(bad):
            x0 = xs[np.argmax(bad)]
            raise InvalidGenerator(f"{self.name}: f_inv(f(x)) != x at x={x0!r}")

    def __repr__(self):
        return f"Custom({self.name}, domain={self.domain})"


def affine(a=1.0, b=0.0, domain=(-math.inf, math.inf)) -> Custom:
    """``F(X) = a X + b`` on the real line."""
    if a == 0:
        raise InvalidGenerator("affine generator needs a != 0")
    return Custom(lambda x: a * x + b, lambda y: (y - b) / a, domain, name=f"{a}*X+{b}")


def exponential(a=1.0, s=math.e, b=0.0, domain=(-math.inf, math.inf)) -> Custom:
    """``F(X) = a s**X + b`` with ``s > 0, s != 1``."""
    if a == 0 or s <= 0 or s == 1:
        raise InvalidGenerator("exponential generator needs a != 0, s > 0, s != 1")
    ln_s = math.log(s)
    return Custom(
        lambda x: a * np.exp(ln_s * x) + b,
        lambda y: np.log((y - b) / a) / ln_s,
        domain,
        name=f"{a}*{s}**X+{b}",
    )


def log_domain(g: Generator) -> Custom:
    """``F = g o exp`` with inverse ``ln o g^-1``.

    Turns a multiplicative (scale) generator on ``(0, inf)`` into an additive
    (translation) generator on the real line.
    """
    lo, hi = g.domain
    new_lo = -math.inf if lo <= 0 else math.log(lo)
    new_hi = math.inf if math.isinf(hi) else math.log(hi)
    wlo, whi = g.sample_window()
    return _LogDomain(g, (new_lo, new_hi), (math.log(wlo), math.log(whi)))


class _LogDomain(Custom):
    def __init__(self, g, domain, window):
        self._inner = g
        self._window = window
        super().__init__(
            lambda x: g.f(np.exp(x)),
            lambda y: np.log(g.f_inv(y)),
            domain,
            name=f"({g!r})∘exp",
        )

    def sample_window(self):
        return self._window


def cubic_plus_linear(domain=(0.0, 8.0)) -> Custom:
    """``f(x) = x + x**3``: monotone, but not scale-independent."""

    def inv(y):
        # Cardano for x**3 + x - y = 0 (single real root).
        disc = np.sqrt(y * y / 4.0 + 1.0 / 27.0)
        x = np.cbrt(y / 2.0 + disc) + np.cbrt(y / 2.0 - disc)
        # One Newton step repairs the cancellation in the second cube root.
        return x - (x + x**3 - y) / (1.0 + 3.0 * x * x)

    return Custom(lambda x: x + x**3, inv, domain, name="x+x**3")


def exp_witness(domain=(0.5, 4.0)) -> Custom:
    """``f(x) = exp(x)``: a translation-independent but not scale-independent generator."""
    return Custom(np.exp, np.log, domain, name="exp")


def cube(domain=(-10.0, 10.0)) -> Custom:
    return Custom(lambda x: x**3, np.cbrt, domain, name="X**3")

"""Domain types shared by every module, plus input validation helpers."""

from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidComposition, LengthMismatch, NegativeValue

SUM_TOLERANCE = 1e-9


class Flag(enum.Enum):
    GeometricLimitUsed = "GeometricLimitUsed"
    ZeroPhaseShortCircuit = "ZeroPhaseShortCircuit"
    RescaledForStability = "RescaledForStability"
    MaxExponent = "MaxExponent"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Composition:
    """Volume fractions of the phases of a mixture.

    Fractions must be nonnegative and sum to one within ``1e-9``. Use
    :meth:`normalized` to rescale raw proportions instead.
    """

    fractions: tuple

    def __init__(self, fractions: Iterable[float]):
        fr = tuple(float(a) for a in fractions)
        if not fr:
            raise InvalidComposition("composition needs at least one phase")
        for a in fr:
            if not math.isfinite(a) or a < 0:
                raise InvalidComposition(f"fraction {a!r} is not a finite nonnegative number")
        total = math.fsum(fr)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise InvalidComposition(f"fractions sum to {total!r}, expected 1")
        object.__setattr__(self, "fractions", fr)

    @classmethod
    def normalized(cls, proportions: Iterable[float]) -> "Composition":
        raw = [float(a) for a in proportions]
        if any(not math.isfinite(a) or a < 0 for a in raw):
            raise InvalidComposition("proportions must be finite and nonnegative")
        total = math.fsum(raw)
        if total <= 0:
            raise InvalidComposition("proportions sum to zero")
        return cls(a / total for a in raw)

    def __len__(self):
        return len(self.fractions)

    def __iter__(self):
        return iter(self.fractions)

    def __getitem__(self, i):
        return self.fractions[i]

    def weights(self) -> list:
        """Fractions divided by their exact sum.

        The mixing law assumes the fractions add to exactly one; dividing out
        the (tolerated) rounding residue keeps the means idempotent.
        """
        total = math.fsum(self.fractions)
        return [a / total for a in self.fractions]


@dataclass(frozen=True)
class MixResult:
    value: float | complex
    flags: frozenset = field(default_factory=frozenset)

    def __float__(self):
        return float(self.value)

    def __complex__(self):
        return complex(self.value)


def as_composition(comp) -> Composition:
    if isinstance(comp, Composition):
        return comp
    if isinstance(comp, numbers.Real):
        comp = (comp,)
    return Composition(comp)


def as_real_values(vals, n: int | None = None) -> list:
    """Validate real phase values: finite, nonnegative, matching length."""
    if isinstance(vals, numbers.Real):
        vals = (vals,)
    out = [float(v) for v in vals]
    if n is not None and len(out) != n:
        raise LengthMismatch(f"{len(out)} phase values for {n} fractions")
    for v in out:
        if math.isnan(v) or math.isinf(v):
            raise NegativeValue(f"phase value {v!r} is not finite")
        if v < 0:
            raise NegativeValue(f"phase value {v!r} is negative")
    return out


def as_complex_values(vals, n: int | None = None) -> list:
    if isinstance(vals, numbers.Number):
        vals = (vals,)
    out = [complex(v) for v in vals]
    if n is not None and len(out) != n:
        raise LengthMismatch(f"{len(out)} phase values for {n} fractions")
    return out


def contributing(comp: Composition, vals: Sequence) -> tuple[list, list]:
    """Weights and values of phases with a nonzero fraction."""
    w = comp.weights()
    keep = [i for i, a in enumerate(comp.fractions) if a > 0]
    return [w[i] for i in keep], [vals[i] for i in keep]

"""Exact scalars: rationals with a p-adic valuation, dual numbers E[Z]/(Z^2),
and the coefficient ring K0 (x) E, modelled as E^f with a cyclic Frobenius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .errors import NotAUnit, ValidationError
from .linalg import frac

INFINITY = math.inf


@dataclass(frozen=True)
class FieldContext:
    """Invariants (p, e, f) of K/Q_p plus the ef formal embedding labels.

    Label ``tau_i`` restricts to the K0-embedding with index ``i mod f``.
    """

    p: int
    e: int = 1
    f: int = 1

    def __post_init__(self):
        if not sympy.isprime(self.p):
            raise ValidationError(f"p={self.p} is not prime", "prime")
        if self.e < 1 or self.f < 1:
            raise ValidationError("e and f must be positive", "degrees")

    @property
    def degree(self) -> int:
        return self.e * self.f

    @property
    def embeddings(self) -> tuple[str, ...]:
        return tuple(f"tau_{i}" for i in range(self.degree))

    def restriction(self, tau: int) -> int:
        return tau % self.f

    def embeddings_over(self, j: int) -> list[int]:
        return [t for t in range(self.degree) if t % self.f == j]

    @property
    def uniformizer_valuation(self) -> Fraction:
        return Fraction(1, self.e)

    def as_dict(self) -> dict:
        return {"p": self.p, "e": self.e, "f": self.f}


def p_valuation(x, ctx_or_p) -> float | int:
    """v_p(x) for a rational x; +inf at zero."""
    p = ctx_or_p.p if isinstance(ctx_or_p, FieldContext) else int(ctx_or_p)
    x = frac(x)
    if x == 0:
        return INFINITY
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def to_str(x) -> str:
    x = frac(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class DualScalar:
    """a + bZ with Z^2 = 0."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", frac(self.a))
        object.__setattr__(self, "b", frac(self.b))

    @staticmethod
    def lift(x) -> "DualScalar":
        return x if isinstance(x, DualScalar) else DualScalar(frac(x), Fraction(0))

    def __add__(self, other):
        o = DualScalar.lift(other)
        return DualScalar(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return DualScalar(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-DualScalar.lift(other))

    def __rsub__(self, other):
        return DualScalar.lift(other) - self

    def __mul__(self, other):
        o = DualScalar.lift(other)
        return DualScalar(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * dual_invert(DualScalar.lift(other))

    def to_json(self) -> dict:
        return {"a": to_str(self.a), "b": to_str(self.b)}

    @staticmethod
    def from_json(d: dict) -> "DualScalar":
        return DualScalar(frac(d["a"]), frac(d["b"]))

    def __str__(self):
        return f"{self.a} + {self.b}Z"


Z = DualScalar(0, 1)


def dual_invert(x: DualScalar) -> DualScalar:
    if x.a == 0:
        raise NotAUnit(f"{x} is not a unit of E[Z]/(Z^2)")
    inv = 1 / x.a
    return DualScalar(inv, -x.b * inv * inv)


@dataclass(frozen=True)
class SemilinearScalar:
    """Element of K0 (x) E ~ E^f, components indexed by the K0-embedding."""

    components: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(frac(c) for c in self.components))

    @staticmethod
    def constant(x, f: int) -> "SemilinearScalar":
        return SemilinearScalar((frac(x),) * f)

    @property
    def f(self) -> int:
        return len(self.components)

    def __add__(self, other: "SemilinearScalar"):
        return SemilinearScalar(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "SemilinearScalar"):
        return SemilinearScalar(tuple(a - b for a, b in zip(self.components, other.components)))

    def __mul__(self, other: "SemilinearScalar"):
        return SemilinearScalar(tuple(a * b for a, b in zip(self.components, other.components)))

    def __neg__(self):
        return SemilinearScalar(tuple(-a for a in self.components))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.components)

    def is_unit(self) -> bool:
        return all(c != 0 for c in self.components)

    def inverse(self) -> "SemilinearScalar":
        if not self.is_unit():
            raise NotAUnit(f"{self} is not a unit of K0 (x) E")
        return SemilinearScalar(tuple(1 / c for c in self.components))

    def __getitem__(self, j: int) -> Fraction:
        return self.components[j]

    def to_json(self) -> list[str]:
        return [to_str(c) for c in self.components]


def frobenius_shift(x: SemilinearScalar) -> SemilinearScalar:
    """sigma on K0 (x) E: the component at index j moves to index j-1 (mod f)."""
    c = x.components
    return SemilinearScalar(c[1:] + c[:1])

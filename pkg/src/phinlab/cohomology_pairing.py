"""The explicit cup-product pairing between unramified-side and Kummer-side
classes, the de Rham test, and the auxiliary gamma relation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la

PAIRING_CONVENTION = (
    "values are multiples of psi_0 cup [(p)]; psi_tau is normalised by log(p) = 0; "
    "the trace on K (x) E is the sum over embedding components"
)


@dataclass(frozen=True)
class UnramifiedSideClass:
    """a0 psi_0 + sum_tau a_tau psi_tau."""

    a0: Fraction
    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "a0", la.frac(self.a0))
        object.__setattr__(self, "a", la.vec(self.a))


@dataclass(frozen=True)
class KummerSideClass:
    """exp(b) + b0 [(p)], with b in K (x) E given by its embedding components."""

    b0: Fraction
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "b0", la.frac(self.b0))
        object.__setattr__(self, "b", la.vec(self.b))


@dataclass(frozen=True)
class GammaCoefficients:
    gamma0: Fraction
    gamma_tau: tuple

    def __post_init__(self):
        object.__setattr__(self, "gamma0", la.frac(self.gamma0))
        object.__setattr__(self, "gamma_tau", la.vec(self.gamma_tau))


def cup_product(x: UnramifiedSideClass, y: KummerSideClass) -> Fraction:
    if len(x.a) != len(y.b):
        raise ValueError("classes are indexed by different embedding sets")
    return x.a0 * y.b0 - la.dot(x.a, y.b)


def is_de_rham_cocycle(x: UnramifiedSideClass) -> bool:
    return all(v == 0 for v in x.a)


def aux_relation_check(g2: GammaCoefficients, g3: GammaCoefficients, L) -> bool:
    """gamma_{2,0} - gamma_{3,0} == sum_tau L_tau (gamma_{2,tau} - gamma_{3,tau})."""
    L = la.vec(L)
    rhs = sum((l * (a - b) for l, a, b in zip(L, g2.gamma_tau, g3.gamma_tau)), Fraction(0))
    return g2.gamma0 - g3.gamma0 == rhs


def unramified_basis(degree: int) -> list[UnramifiedSideClass]:
    """psi_0 followed by psi_tau for each embedding."""
    zero = [0] * degree
    out = [UnramifiedSideClass(1, zero)]
    for i in range(degree):
        out.append(UnramifiedSideClass(0, la.unit_vector(degree, i)))
    return out


def kummer_basis(degree: int) -> list[KummerSideClass]:
    """[(p)] followed by exp(e_tau) for each embedding."""
    zero = [0] * degree
    out = [KummerSideClass(1, zero)]
    for i in range(degree):
        out.append(KummerSideClass(0, la.unit_vector(degree, i)))
    return out


def pairing_matrix(degree: int) -> tuple:
    return tuple(
        tuple(cup_product(x, y) for y in kummer_basis(degree)) for x in unramified_basis(degree)
    )


def pairing_kernel(degree: int) -> list:
    """Unramified-side classes pairing to zero with every Kummer class."""
    m = pairing_matrix(degree)
    return la.nullspace(la.transpose(m), degree + 1)

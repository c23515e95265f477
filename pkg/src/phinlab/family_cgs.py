"""Characters of K^x over the dual numbers E[Z]/(Z^2), the epsilon-to-gamma
dictionary, and the residual of the L-invariant relation between the
epsilon data of two parameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .cohomology_pairing import GammaCoefficients, aux_relation_check
from .errors import IndexOutOfRange, SingularConstantTerm, ValidationError
from .exact_core import DualScalar, FieldContext, Z


@dataclass(frozen=True)
class InfinitesimalCharacter:
    """delta = delta_z * (1 + Z eps), stored through its values at the
    uniformizer and at p together with its weight vectors."""

    base_at_pi: Fraction
    base_at_p: Fraction
    base_weights: tuple
    eps_at_pi: Fraction
    eps_at_p: Fraction
    eps_weights: tuple
    smooth_tag: str = ""

    def __post_init__(self):
        for name in ("base_at_pi", "base_at_p", "eps_at_pi", "eps_at_p"):
            object.__setattr__(self, name, la.frac(getattr(self, name)))
        object.__setattr__(self, "base_weights", la.vec(self.base_weights))
        object.__setattr__(self, "eps_weights", la.vec(self.eps_weights))
        if self.base_at_pi == 0 or self.base_at_p == 0:
            raise ValidationError("character values must be units", "unit values")

    def check_uniformizer_powers(self, ctx: FieldContext) -> None:
        """Optional mode: the uniformizer raised to e is p times a unit."""
        if self.eps_at_p != ctx.e * self.eps_at_pi:
            raise ValidationError("eps(p) differs from e * eps(pi)", "uniformizer consistency")
        if self.base_at_p != self.base_at_pi**ctx.e:
            raise ValidationError("delta(p) differs from delta(pi)^e", "uniformizer consistency")


def character_as_dual(delta: InfinitesimalCharacter, point: str = "p") -> DualScalar:
    if point == "pi":
        base, eps = delta.base_at_pi, delta.eps_at_pi
    elif point == "p":
        base, eps = delta.base_at_p, delta.eps_at_p
    else:
        raise ValueError(f"unknown evaluation point {point!r}")
    return DualScalar(base) * (1 + Z * eps)


def dlog_at_p(delta: InfinitesimalCharacter) -> Fraction:
    return delta.eps_at_p


def weight_differential(delta: InfinitesimalCharacter) -> tuple:
    return delta.eps_weights


def _embedding_vector(values, ctx: FieldContext) -> tuple:
    v = la.vec(values)
    if len(v) != ctx.degree:
        raise ValidationError(f"expected {ctx.degree} embedding values, got {len(v)}", "embeddings")
    return v


def cgs_residual(family: Sequence[InfinitesimalCharacter], s: int, t: int, L, ctx: FieldContext) -> Fraction:
    """(eps_t(p) - eps_s(p)) / [K:Q_p] + sum_tau L_tau (eps_{t,tau} - eps_{s,tau}),
    with 1-based s and t."""
    n = len(family)
    for idx in (s, t):
        if not 1 <= idx <= n:
            raise IndexOutOfRange(f"index {idx} outside 1..{n}")
    ds, dt = family[s - 1], family[t - 1]
    L = _embedding_vector(L, ctx)
    ws, wt = _embedding_vector(ds.eps_weights, ctx), _embedding_vector(dt.eps_weights, ctx)
    value = (dt.eps_at_p - ds.eps_at_p) / ctx.degree
    for l, a, b in zip(L, wt, ws):
        value += l * (a - b)
    return value


def gamma_from_epsilon(delta: InfinitesimalCharacter, ctx: FieldContext) -> GammaCoefficients:
    """f * gamma_0 = -v_p(pi) eps(p), gamma_tau = eps_tau."""
    return GammaCoefficients(-delta.eps_at_p / ctx.degree, _embedding_vector(delta.eps_weights, ctx))


@dataclass
class DerivationReport:
    residual: Fraction
    residual_zero: bool
    aux_holds: bool
    gamma_s: GammaCoefficients
    gamma_t: GammaCoefficients

    @property
    def consistent(self) -> bool:
        return self.residual_zero == self.aux_holds


def derive_theorem_from_aux(
    delta_s: InfinitesimalCharacter, delta_t: InfinitesimalCharacter, L, ctx: FieldContext
) -> DerivationReport:
    """Evaluate both the CGS residual and the auxiliary gamma relation
    (with gamma_2 from delta_t and gamma_3 from delta_s)."""
    residual = cgs_residual([delta_s, delta_t], 1, 2, L, ctx)
    g_t = gamma_from_epsilon(delta_t, ctx)
    g_s = gamma_from_epsilon(delta_s, ctx)
    aux = aux_relation_check(g_t, g_s, L)
    return DerivationReport(residual, residual == 0, aux, g_s, g_t)


# --- first-order deformation matrices --------------------------------------------


def _split(m: Sequence[Sequence[DualScalar]]) -> tuple[tuple, tuple]:
    const = tuple(tuple(DualScalar.lift(x).a for x in row) for row in m)
    slope = tuple(tuple(DualScalar.lift(x).b for x in row) for row in m)
    return const, slope


def deformation_matrix(A_tilde: Sequence[Sequence[DualScalar]]) -> tuple[tuple, tuple]:
    """Write A~ = (I + Z U) A and return (U, A)."""
    A, B = _split(A_tilde)
    if not la.is_invertible(A):
        raise SingularConstantTerm("constant term of the deformed matrix is singular")
    # (I + ZU) A = A + Z U A, so B = U A.
    return la.matmul(B, la.inverse(A)), A


def reassemble(U, A) -> tuple:
    ZU = la.matmul(U, A)
    return tuple(tuple(DualScalar(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A, ZU))


def deformation_matrix_cocycle(A_tilde_phi, A_tilde_gamma) -> tuple[tuple, tuple]:
    U_phi, _ = deformation_matrix(A_tilde_phi)
    U_gamma, _ = deformation_matrix(A_tilde_gamma)
    return U_phi, U_gamma


@dataclass(frozen=True)
class TriangulationFamily:
    characters: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.characters:
            raise ValidationError("a family needs at least one character", "length")

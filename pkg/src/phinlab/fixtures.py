"""The tensor fixture built from a module with a perfect 1-decomposition, its
closed form, and a zero-residual infinitesimal family."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .errors import NoPerfectDecomposition, NotStronglyMarked, ValidationError
from .exact_core import FieldContext
from .family_cgs import InfinitesimalCharacter
from .linvariant import l_invariant
from .phin_module import FilteredPhiNModule, _per_tau, dual, quotient, sub, tensor
from .refinement import Refinement, validate_refinement


def build_chain_module(
    n: int,
    L,
    ctx: FieldContext,
    k_low=-1,
    k_high=0,
    middle_weights=None,
    middle_eigenvalues=None,
) -> tuple[FilteredPhiNModule, Refinement]:
    """Rank-n module with phi = diag(1/p, ..., 1) in every component,
    N e_n = e_1, and Fil the direct sum of the pair <e_1, e_n> (jumps k_low <
    k_high, top line e_n + L e_1) with the middle basis vectors."""
    if n < 2:
        raise ValidationError("the chain module needs rank at least 2", "rank")
    Ls = [la.frac(x) for x in _per_tau(L, ctx)]
    lows = _per_tau(k_low, ctx)
    highs = _per_tau(k_high, ctx)
    if any(a >= b for a, b in zip(lows, highs)):
        raise ValidationError("need k_low < k_high at every embedding", "weights")
    middle_weights = middle_weights or [[0] * (n - 2)] * ctx.degree
    if middle_eigenvalues is None:
        middle_eigenvalues = [Fraction(2 + i) for i in range(n - 2)]
    p = Fraction(ctx.p)
    phi = [la.diag([1 / p, *middle_eigenvalues, 1])] * ctx.f
    nmat = [[Fraction(0)] * n for _ in range(n)]
    nmat[0][n - 1] = Fraction(1)
    N = [nmat] * ctx.f
    fil = []
    for tau in range(ctx.degree):
        lo, hi, mid = lows[tau], highs[tau], middle_weights[tau]
        line = tuple(Ls[tau] if i == 0 else (1 if i == n - 1 else 0) for i in range(n))
        steps = []
        for k in sorted({lo, hi, *mid}):
            vecs = [la.unit_vector(n, i + 1) for i, w in enumerate(mid) if w >= k]
            if k <= lo:
                vecs += [la.unit_vector(n, 0), la.unit_vector(n, n - 1)]
            elif k <= hi:
                vecs.append(line)
            steps.append((k, vecs))
        fil.append(steps)
    D = FilteredPhiNModule.build(ctx, phi, N, fil)
    flag = [[la.unit_vector(n, k) for k in range(i)] for i in range(1, n + 1)]
    return D, validate_refinement(D, flag)


@dataclass(frozen=True)
class TensorFixtures:
    base: FilteredPhiNModule
    refinement: Refinement
    L: tuple
    quotient_one: FilteredPhiNModule  # D / L-block
    dual_quotient: FilteredPhiNModule  # D* / middle dual vectors
    big: FilteredPhiNModule  # rank 4
    small: FilteredPhiNModule  # rank 3 submodule


def build_section7_fixtures(D: FilteredPhiNModule, R: Refinement) -> TensorFixtures:
    """Run the dual / quotient / tensor / sub pipeline on a module whose
    standard flag has 1 marked with t = n and a perfect decomposition with
    middle block spanned by e_2..e_{n-1}."""
    n, f = D.n, D.ctx.f
    try:
        Lvec = l_invariant(D, R, 1, n)
    except NotStronglyMarked as exc:
        raise NoPerfectDecomposition(str(exc)) from None
    middle = [la.unit_vector(n, i) for i in range(1, n - 1)]
    ends = [la.unit_vector(n, 0), la.unit_vector(n, n - 1)]
    D1 = quotient(D, [middle] * f, [ends] * f)
    D2 = quotient(dual(D), [middle] * f, [ends] * f)
    big = tensor(D2, D1)
    # Kronecker order: e*1 e1, e*1 en, e*n e1, e*n en
    small = sub(big, [[la.unit_vector(4, 0), la.unit_vector(4, 2), la.unit_vector(4, 3)]] * f)
    return TensorFixtures(D, R, Lvec, D1, D2, big, small)


def closed_form_small(L, ctx: FieldContext) -> dict:
    """phi, N and Fil^0 of the rank-3 submodule in the basis
    (e*1 e1, e*n e1, e*n en)."""
    Ls = [la.frac(x) for x in _per_tau(L, ctx)]
    p = Fraction(ctx.p)
    phi = la.diag([1, 1 / p, 1])
    N = la.mat([[0, 0, 0], [-1, 0, 1], [0, 0, 0]])
    fil0 = [la.row_basis([(0, l, 1), (1, -l, 0)], 3) for l in Ls]
    return {"phi": phi, "N": N, "fil0": fil0}


def matches_closed_form(small: FilteredPhiNModule, L) -> bool:
    expected = closed_form_small(L, small.ctx)
    f = small.ctx.f
    if any(small.phi[c] != expected["phi"] or small.N[c] != expected["N"] for c in range(f)):
        return False
    return all(
        la.row_basis(small.fil(tau, 0), 3) == expected["fil0"][tau] for tau in range(small.ctx.degree)
    )


def zero_residual_family(ctx: FieldContext, L, n: int = 2, s: int = 1, t: int = 2, seed: int = 0) -> list:
    """Characters with random epsilon data, adjusted so that the residual of
    (s, t) vanishes."""
    rng = random.Random(seed)
    Ls = [la.frac(x) for x in _per_tau(L, ctx)]

    def rnd():
        return Fraction(rng.randint(-9, 9), rng.randint(1, 5))

    chars = []
    for i in range(n):
        chars.append(
            dict(
                base_at_pi=Fraction(rng.randint(1, 9)),
                base_at_p=Fraction(rng.randint(1, 9)),
                base_weights=[rng.randint(-3, 3) for _ in range(ctx.degree)],
                eps_at_pi=rnd(),
                eps_at_p=rnd(),
                eps_weights=[rnd() for _ in range(ctx.degree)],
                smooth_tag=f"smooth_{i + 1}",
            )
        )
    ds, dt = chars[s - 1], chars[t - 1]
    pairing = sum((l * (a - b) for l, a, b in zip(Ls, dt["eps_weights"], ds["eps_weights"])), Fraction(0))
    dt["eps_at_p"] = ds["eps_at_p"] - ctx.degree * pairing
    return [InfinitesimalCharacter(**c) for c in chars]

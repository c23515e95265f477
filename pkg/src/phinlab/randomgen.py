"""Seeded generators of random refined modules for the property suites.

Modules are first built in a hidden basis where the standard flag is a
refinement (upper triangular phi, strictly upper triangular N), then
conjugated by random invertible matrices in every component.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import linalg as la
from .exact_core import FieldContext
from .phin_module import FilteredPhiNModule, change_basis
from .refinement import Refinement, validate_refinement

PRIMES = (2, 3, 5, 7)
SMALL = (Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(-2), Fraction(3))


def random_context(rng: random.Random, max_degree: int = 4) -> FieldContext:
    pairs = [(e, f) for e in range(1, max_degree + 1) for f in range(1, max_degree + 1) if e * f <= max_degree]
    e, f = rng.choice(pairs)
    return FieldContext(rng.choice(PRIMES), e, f)


def random_rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        x = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        if x or not nonzero:
            return x


def random_invertible(rng: random.Random, n: int, density: float = 0.5) -> tuple:
    while True:
        m = tuple(
            tuple(rng.choice(SMALL) if (i == j or rng.random() < density) else Fraction(0) for j in range(n))
            for i in range(n)
        )
        if la.is_invertible(m):
            return m


def _monodromy_space(phi: list, p: int, n: int) -> list[list]:
    """Basis of strictly upper triangular N with N_c phi_c = p phi_c N_{c+1}."""
    f = len(phi)
    slots = [(c, i, j) for c in range(f) for i in range(n) for j in range(i + 1, n)]
    index = {s: k for k, s in enumerate(slots)}
    rows = []
    for c in range(f):
        nxt = (c + 1) % f
        for i in range(n):
            for j in range(n):
                row = [Fraction(0)] * len(slots)
                for k in range(n):
                    if (c, i, k) in index:
                        row[index[(c, i, k)]] += phi[c][k][j]
                    if (nxt, k, j) in index:
                        row[index[(nxt, k, j)]] -= p * phi[c][i][k]
                rows.append(row)
    basis = la.nullspace(rows, len(slots)) if slots else []
    out = []
    for vec in basis:
        N = [[[Fraction(0)] * n for _ in range(n)] for _ in range(f)]
        for (c, i, j), k in index.items():
            N[c][i][j] = vec[k]
        out.append(N)
    return out


def _hidden_frobenius(rng, ctx: FieldContext, units, slopes, shear: bool) -> list:
    n = len(units)
    p = Fraction(ctx.p)
    phi = []
    for c in range(ctx.f):
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = (units[i] if c == 0 else 1) * p ** (-slopes[i])
        if shear and c == 0:
            for i in range(n):
                for j in range(i + 1, n):
                    if (units[i], slopes[i]) == (units[j], slopes[j]) and rng.random() < 0.5:
                        rows[i][j] = random_rational(rng)
        phi.append(rows)
    return phi


def _random_filtration(rng, ctx: FieldContext, n: int, aligned: float = 0.3) -> list:
    fil = []
    for _ in range(ctx.degree):
        weights = [rng.randint(-2, 2) for _ in range(n)]
        basis = la.identity(n) if rng.random() < aligned else random_invertible(rng, n)
        cols = la.transpose(basis)
        steps = []
        for k in sorted(set(weights)):
            steps.append((k, [cols[i] for i in range(n) if weights[i] >= k]))
        fil.append(steps)
    return fil


def _conjugate(rng, D: FilteredPhiNModule) -> tuple[FilteredPhiNModule, list]:
    n, f = D.n, D.ctx.f
    P = [random_invertible(rng, n) for _ in range(f)]
    D2 = change_basis(D, P)
    inv = [la.inverse(m) for m in P]
    flag = []
    for i in range(1, n + 1):
        step = []
        for c in range(f):
            vecs = [la.matvec(inv[c], la.unit_vector(n, k)) for k in range(i)]
            # mix the last vector with earlier ones so bases are not canonical
            if i > 1 and rng.random() < 0.5:
                vecs[-1] = la.vadd(vecs[-1], la.vscale(random_rational(rng), vecs[0]))
            step.append(vecs)
        flag.append(step)
    return D2, flag


def random_refined_module(
    rng: random.Random,
    ctx: FieldContext | None = None,
    n: int | None = None,
    shear: bool = True,
) -> tuple[FilteredPhiNModule, Refinement]:
    """A random valid module together with a refinement of it."""
    ctx = ctx or random_context(rng)
    n = n or rng.randint(1, 4)
    unit_pool = [Fraction(1), Fraction(2)]
    units = [rng.choice(unit_pool) for _ in range(n)]
    slopes = [rng.randint(0, 2) for _ in range(n)]
    phi = _hidden_frobenius(rng, ctx, units, slopes, shear)
    space = _monodromy_space(phi, ctx.p, n)
    N = [[[Fraction(0)] * n for _ in range(n)] for _ in range(ctx.f)]
    for direction in space:
        if rng.random() < 0.7:
            coeff = random_rational(rng, nonzero=True)
            N = [[[a + coeff * b for a, b in zip(ra, rb)] for ra, rb in zip(Na, Nb)] for Na, Nb in zip(N, direction)]
    D = FilteredPhiNModule.build(ctx, phi, N, _random_filtration(rng, ctx, n))
    D2, flag = _conjugate(rng, D)
    return D2, validate_refinement(D2, flag)


def random_perfect_module(
    rng: random.Random,
    ctx: FieldContext | None = None,
    n: int | None = None,
) -> tuple[FilteredPhiNModule, Refinement, tuple]:
    """A module where 1 is strongly marked with t = n by construction.

    Returns (module, refinement, expected L-vector).  Middle eigenvalues are
    sometimes repeated so that the decomposition families are not singletons.
    """
    ctx = ctx or random_context(rng)
    n = n or rng.randint(2, 4)
    p = Fraction(ctx.p)
    alpha_top = random_rational(rng, nonzero=True)
    alphas = [alpha_top / p**ctx.f]
    for _ in range(n - 2):
        alphas.append(rng.choice([alpha_top, alphas[0], random_rational(rng, nonzero=True)]))
    alphas.append(alpha_top)
    phi = [la.diag(alphas)] + [la.identity(n)] * (ctx.f - 1)
    # N e_n = e_1 in every component, adjusted by the Frobenius twist.
    N = []
    for c in range(ctx.f):
        m = [[Fraction(0)] * n for _ in range(n)]
        m[0][n - 1] = p ** (ctx.f - c) if c else Fraction(1)
        N.append(m)
    # N_c phi_c = p phi_c N_{c+1} requires N_c = p N_{c+1} for c >= 1 and
    # N_0 * alpha_top = p * alpha_1 * N_1 at c = 0, which the powers above satisfy.
    Ls = tuple(random_rational(rng) for _ in range(ctx.degree))
    fil = []
    for tau in range(ctx.degree):
        k_s = rng.randint(-2, 1)
        k_t = rng.randint(k_s + 1, 2)
        middle = [rng.randint(-2, 2) for _ in range(n - 2)]
        # N e_n = p^(f-c) e_1 on component c, so the normalised top vector is
        # p^(c-f) e_n there; scale the line so that its ratio is exactly L.
        c = tau % ctx.f
        twist = p ** (ctx.f - c) if c else Fraction(1)
        line = tuple(Ls[tau] * twist if i == 0 else (1 if i == n - 1 else 0) for i in range(n))
        steps = []
        for k in sorted({k_s, k_t, *middle}):
            vecs = [la.unit_vector(n, i + 1) for i, w in enumerate(middle) if w >= k]
            if k <= k_s:
                vecs += [la.unit_vector(n, 0), la.unit_vector(n, n - 1)]
            elif k <= k_t:
                vecs.append(line)
            steps.append((k, vecs))
        fil.append(steps)
    D = FilteredPhiNModule.build(ctx, phi, N, fil)
    D2, flag = _conjugate(rng, D)
    return D2, validate_refinement(D2, flag), Ls

"""Filtered (phi, N)-modules over K0 (x) E.

A module of rank n is stored componentwise: for each K0-embedding index c in
0..f-1 there is an n x n matrix ``phi[c]`` and ``N[c]`` over E, in column
convention.  Frobenius is semilinear, ``phi(v)_c = phi[c] . v_{c+1}``, so
phi^f on component c is the cyclic product phi[c] phi[c+1] ... phi[c-1].

The filtration is given per embedding tau (ef of them) as a list of
``(jump, basis)`` pairs with jumps ascending: Fil^k is the subspace attached to
the smallest jump >= k, the full space below the first jump, and 0 above the
last.  Embedding tau sees the component with index tau mod f.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import sympy

from . import linalg as la
from .errors import (
    ContextMismatch,
    EigenvalueDegeneracy,
    NotFree,
    NotStable,
    ValidationError,
    ZeroFrobenius,
)
from .exact_core import FieldContext, p_valuation

FilStep = tuple  # (jump: int, basis: tuple of vectors)


@dataclass(frozen=True)
class FilteredPhiNModule:
    ctx: FieldContext
    n: int
    phi: tuple
    N: tuple
    filtration: tuple

    @staticmethod
    def build(ctx: FieldContext, phi, N, filtration) -> "FilteredPhiNModule":
        phi = tuple(la.mat(m) for m in phi)
        N = tuple(la.mat(m) for m in N)
        n = len(phi[0]) if phi else 0
        fil = tuple(
            tuple((int(k), la.row_basis([la.vec(v) for v in basis], n)) for k, basis in steps)
            for steps in filtration
        )
        return FilteredPhiNModule(ctx, n, phi, N, fil)

    # --- filtration access -------------------------------------------------

    def component_of(self, tau: int) -> int:
        return tau % self.ctx.f

    def fil(self, tau: int, k: int) -> tuple:
        """Basis of Fil^k on the tau-piece."""
        steps = self.filtration[tau]
        for jump, basis in sorted(steps, key=lambda s: s[0]):
            if jump >= k:
                return basis
        return ()

    def jump_points(self, tau: int) -> list[int]:
        return sorted({k for k, _ in self.filtration[tau]})

    def weights(self, tau: int) -> list[int]:
        """Filtration jumps of the tau-piece with multiplicity, ascending."""
        out = []
        for k in self.jump_points(tau):
            out += [k] * (la.dim(self.fil(tau, k)) - la.dim(self.fil(tau, k + 1)))
        return out

    def canonical_filtration(self, tau: int) -> tuple:
        return canonical_steps([(k, self.fil(tau, k)) for k in self.jump_points(tau)], self.n)

    # --- Frobenius ---------------------------------------------------------

    def phi_f(self, c: int = 0) -> tuple:
        f = self.ctx.f
        out = la.identity(self.n)
        for i in range(f):
            out = la.matmul(out, self.phi[(c + i) % f])
        return out

    def apply_phi(self, v_parts: Sequence) -> tuple:
        f = self.ctx.f
        return tuple(la.matvec(self.phi[c], v_parts[(c + 1) % f]) for c in range(f))

    def apply_N(self, v_parts: Sequence) -> tuple:
        return tuple(la.matvec(self.N[c], v_parts[c]) for c in range(self.ctx.f))


def canonical_steps(steps, n: int) -> tuple:
    """Sort by jump, drop repeated subspaces (keeping the larger jump) and zeros."""
    steps = sorted(((int(k), la.row_basis(b, n)) for k, b in steps), key=lambda s: s[0])
    out = []
    for i, (k, b) in enumerate(steps):
        if not b:
            continue
        if i + 1 < len(steps) and steps[i + 1][1] == b:
            continue
        out.append((k, b))
    return tuple(out)


def _as_parts(basis, f: int) -> list[list]:
    """Accept a single basis (used in every component) or one basis per component."""
    basis = list(basis)
    nested = len(basis) == f and all(
        isinstance(b, (list, tuple)) and (len(b) == 0 or isinstance(b[0], (list, tuple))) for b in basis
    )
    if nested:
        return [[la.vec(v) for v in part] for part in basis]
    return [[la.vec(v) for v in basis] for _ in range(f)]


# --- validation ------------------------------------------------------------


def validate(D: FilteredPhiNModule) -> list[str]:
    """Names of violated invariants; empty when D is a valid module."""
    ctx, n = D.ctx, D.n
    problems = []
    if len(D.phi) != ctx.f or len(D.N) != ctx.f or len(D.filtration) != ctx.degree:
        return ["shape"]
    for m in D.phi + D.N:
        if len(m) != n or any(len(r) != n for r in m):
            return ["shape"]
    if not all(la.is_invertible(m) for m in D.phi):
        problems.append("phi invertible")
    p = ctx.p
    for c in range(ctx.f):
        lhs = la.matmul(D.N[c], D.phi[c])
        rhs = la.scale(p, la.matmul(D.phi[c], D.N[(c + 1) % ctx.f]))
        if lhs != rhs:
            problems.append("phi-N relation")
            break
    if any(not la.is_zero(la.matpow(m, n)) for m in D.N):
        problems.append("nilpotent")
    for steps in D.filtration:
        if not _is_flag(steps, n):
            problems.append("filtration flag")
            break
    return problems


def _is_flag(steps, n: int) -> bool:
    if not steps:
        return n == 0
    jumps = [k for k, _ in steps]
    if jumps != sorted(set(jumps)):
        return False
    bases = [b for _, b in steps]
    if la.dim(bases[0]) != n or not bases[-1]:
        return False
    for hi, lo in zip(bases, bases[1:]):
        if not la.is_subspace(lo, hi) or la.dim(lo) >= la.dim(hi):
            return False
    return True


def check(D: FilteredPhiNModule) -> FilteredPhiNModule:
    """Raise on the first violated invariant, otherwise return D."""
    problems = validate(D)
    if not problems:
        return D
    name = problems[0]
    if name == "phi invertible":
        raise ZeroFrobenius("Frobenius matrix is singular", name)
    if name == "shape":
        raise ContextMismatch("matrix or filtration shape does not match the field context", name)
    raise ValidationError(f"invariant violated: {name}", name)


def _same_ctx(*mods):
    if len({m.ctx for m in mods}) != 1:
        raise ContextMismatch("modules live over different field contexts", "context")


# --- constructors ----------------------------------------------------------


def _per_tau(values, ctx: FieldContext) -> list:
    if isinstance(values, (list, tuple)):
        if len(values) != ctx.degree:
            raise ContextMismatch(f"expected {ctx.degree} embedding values", "embeddings")
        return list(values)
    return [values] * ctx.degree


def construct_rank1(a, jumps, ctx: FieldContext) -> FilteredPhiNModule:
    a = la.frac(a)
    if a == 0:
        raise ZeroFrobenius("rank-1 Frobenius eigenvalue must be nonzero", "phi invertible")
    phi = [((a,),)] + [((Fraction(1),),)] * (ctx.f - 1)
    N = [((Fraction(0),),)] * ctx.f
    fil = [[(k, [(1,)])] for k in _per_tau(jumps, ctx)]
    return FilteredPhiNModule.build(ctx, phi, N, fil)


def unit_object(ctx: FieldContext) -> FilteredPhiNModule:
    return construct_rank1(1, 0, ctx)


def change_basis(D: FilteredPhiNModule, P: Sequence) -> FilteredPhiNModule:
    """Rewrite D in the basis whose component-c vectors are the columns of P[c]."""
    f = D.ctx.f
    Pinv = [la.inverse(P[c]) for c in range(f)]
    phi = [la.matmul(la.matmul(Pinv[c], D.phi[c]), P[(c + 1) % f]) for c in range(f)]
    N = [la.matmul(la.matmul(Pinv[c], D.N[c]), P[c]) for c in range(f)]
    fil = []
    for tau, steps in enumerate(D.filtration):
        j = D.component_of(tau)
        fil.append([(k, [la.matvec(Pinv[j], v) for v in b]) for k, b in steps])
    return FilteredPhiNModule.build(D.ctx, phi, N, fil)


def tensor(D1: FilteredPhiNModule, D2: FilteredPhiNModule) -> FilteredPhiNModule:
    _same_ctx(D1, D2)
    n1, n2, f = D1.n, D2.n, D1.ctx.f
    phi = [la.kron(D1.phi[c], D2.phi[c]) for c in range(f)]
    N = [
        la.matadd(la.kron(D1.N[c], la.identity(n2)), la.kron(la.identity(n1), D2.N[c]))
        for c in range(f)
    ]
    fil = []
    for tau in range(D1.ctx.degree):
        j1, j2 = D1.jump_points(tau), D2.jump_points(tau)
        steps = []
        for i in sorted({a + b for a in j1 for b in j2}):
            vecs = []
            for a in j1:
                left = D1.fil(tau, a)
                right = D2.fil(tau, i - a)
                vecs += [la.kron_vec(u, v) for u in left for v in right]
            steps.append((i, vecs))
        fil.append(canonical_steps(steps, n1 * n2))
    return FilteredPhiNModule.build(D1.ctx, phi, N, fil)


def dual(D: FilteredPhiNModule) -> FilteredPhiNModule:
    """phi* = inverse-transpose, N* = -N^T, Fil^i(D*) = (Fil^{1-i} D)^perp."""
    f, n = D.ctx.f, D.n
    phi = [la.transpose(la.inverse(D.phi[c])) for c in range(f)]
    N = [la.scale(-1, la.transpose(D.N[c])) for c in range(f)]
    fil = []
    for tau in range(D.ctx.degree):
        steps = list(D.canonical_filtration(tau))
        dual_steps = []
        # Fil^{1-i} D = V_l exactly for 1-k_l <= i < 1-k_{l-1}, so the dual
        # filtration jumps at -k_{l-1} with value ann(V_l).
        for l in range(1, len(steps) + 1):
            nxt = steps[l][1] if l < len(steps) else ()
            dual_steps.append((-steps[l - 1][0], la.annihilator(nxt, n)))
        fil.append(canonical_steps(dual_steps, n))
    return FilteredPhiNModule.build(D.ctx, phi, N, fil)


# --- submodules --------------------------------------------------------------


def _check_submodule(D: FilteredPhiNModule, parts) -> int:
    f = D.ctx.f
    dims = {la.dim(part) for part in parts}
    if len(dims) != 1 or any(la.dim(part) != len(part) for part in parts):
        raise NotFree("submodule basis must have the same independent size in every component", "free")
    for c in range(f):
        nxt = parts[(c + 1) % f]
        if not la.is_subspace([la.matvec(D.phi[c], v) for v in nxt], parts[c]):
            raise NotStable("submodule is not phi-stable", "phi-stable")
        if not la.is_subspace([la.matvec(D.N[c], v) for v in parts[c]], parts[c]):
            raise NotStable("submodule is not N-stable", "N-stable")
    return dims.pop()


def is_stable(D: FilteredPhiNModule, basis) -> bool:
    try:
        _check_submodule(D, _as_parts(basis, D.ctx.f))
    except (NotStable, NotFree):
        return False
    return True


def sub(D: FilteredPhiNModule, basis, checked: bool = True) -> FilteredPhiNModule:
    """Induced structure on a phi,N-stable submodule, in the given basis.

    ``checked=False`` skips the stability test for callers that already know it.
    """
    f = D.ctx.f
    parts = _as_parts(basis, f)
    r = _check_submodule(D, parts) if checked else len(parts[0])
    phi, N = [], []
    for c in range(f):
        cols = [la.coordinates(parts[c], la.matvec(D.phi[c], v)) for v in parts[(c + 1) % f]]
        phi.append(la.transpose(cols) if r else ())
        cols = [la.coordinates(parts[c], la.matvec(D.N[c], v)) for v in parts[c]]
        N.append(la.transpose(cols) if r else ())
    fil = []
    for tau in range(D.ctx.degree):
        part = parts[D.component_of(tau)]
        steps = []
        for k in D.jump_points(tau):
            meet = la.intersection(D.fil(tau, k), part, D.n)
            steps.append((k, [la.coordinates(part, v) for v in meet]))
        fil.append(canonical_steps(steps, r))
    return FilteredPhiNModule(D.ctx, r, tuple(phi), tuple(N), tuple(fil))


def quotient(D: FilteredPhiNModule, basis, complement=None, checked: bool = True) -> FilteredPhiNModule:
    """Induced structure on D / (stable submodule), in the basis given by the
    images of ``complement`` (default: standard basis vectors)."""
    f, n = D.ctx.f, D.n
    parts = _as_parts(basis, f)
    if not any(parts):
        r = 0
    else:
        r = _check_submodule(D, parts) if checked else len(parts[0])
    if complement is None:
        comps = [la.complement(part, n) for part in parts]
    else:
        comps = _as_parts(complement, f)
    P = []
    for c in range(f):
        cols = list(parts[c]) + list(comps[c])
        if len(cols) != n or la.dim(cols) != n:
            raise NotFree("complement does not complete the submodule basis", "complement")
        P.append(la.transpose(cols))
    full = change_basis(D, P)
    m = n - r
    cut = lambda a: tuple(tuple(row[r:]) for row in a[r:])  # noqa: E731
    phi = [cut(a) for a in full.phi]
    N = [cut(a) for a in full.N]
    fil = []
    for tau in range(D.ctx.degree):
        steps = [(k, [v[r:] for v in full.fil(tau, k)]) for k in full.jump_points(tau)]
        fil.append(canonical_steps(steps, m))
    return FilteredPhiNModule(D.ctx, m, tuple(phi), tuple(N), tuple(fil))


# --- Newton and Hodge numbers -------------------------------------------------


def newton_number(D: FilteredPhiNModule):
    """v_p of det(phi^f) on the identity component."""
    if D.n == 0:
        return 0
    return p_valuation(la.det(D.phi_f(0)), D.ctx)


def hodge_number(D: FilteredPhiNModule) -> Fraction:
    """(1/e) * sum over embeddings of the jumps with multiplicity.

    Scaled so that it is comparable with ``newton_number`` for every (e, f):
    the cyclotomic object has both equal to -f.
    """
    total = sum(sum(D.weights(tau)) for tau in range(D.ctx.degree))
    return Fraction(total, D.ctx.e)


# --- stable submodules and weak admissibility ---------------------------------


def phi_f_factors(D: FilteredPhiNModule) -> list[list[Fraction]]:
    """Irreducible factors (monic coefficient lists, low degree first) of the
    characteristic polynomial of phi^f on the identity component."""
    x = sympy.Symbol("x")
    coeffs = la.charpoly(D.phi_f(0))
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x)
    _, factors = poly.factor_list()
    out = []
    for fac, mult in factors:
        lead = fac.LC()
        cs = [la.frac(str(c / lead)) for c in reversed(fac.all_coeffs())]
        out += [cs] * mult
    return out


def rational_eigenvalues(D: FilteredPhiNModule) -> list[Fraction]:
    return sorted(-fac[0] for fac in phi_f_factors(D) if len(fac) == 2)


def _require_squarefree(D: FilteredPhiNModule) -> list[list[Fraction]]:
    factors = phi_f_factors(D)
    if len({tuple(fac) for fac in factors}) != len(factors):
        raise EigenvalueDegeneracy("phi^f has a repeated eigenvalue on the identity component")
    return factors


def _poly_at(coeffs: Sequence[Fraction], a) -> tuple:
    n = len(a)
    out = la.zeros(n, n)
    power = la.identity(n)
    for c in coeffs:
        out = la.matadd(out, la.scale(c, power))
        power = la.matmul(power, a)
    return out


def propagate(D: FilteredPhiNModule, w: Sequence) -> list[tuple]:
    """Per-component bases of the phi-stable submodule generated by a
    phi^f-stable subspace ``w`` of the identity component."""
    f = D.ctx.f
    parts: list = [None] * f
    parts[0] = la.row_basis(w, D.n)
    cur = parts[0]
    for c in range(f - 1, 0, -1):
        cur = la.image(D.phi[c], cur, D.n)
        parts[c] = cur
    return [list(p) for p in parts]


def stable_submodules(D: FilteredPhiNModule) -> list[list]:
    """All phi,N-stable submodules (as per-component bases); needs a
    squarefree characteristic polynomial of phi^f."""
    factors = _require_squarefree(D)
    a = D.phi_f(0)
    kernels = [la.nullspace(_poly_at(fac, a), D.n) for fac in factors]
    out = []
    for size in range(len(factors) + 1):
        for idx in combinations(range(len(factors)), size):
            w = [v for i in idx for v in kernels[i]]
            if not la.is_subspace([la.matvec(D.N[0], v) for v in w], w):
                continue
            out.append(propagate(D, w))
    return out


@dataclass(frozen=True)
class AdmissibilityResult:
    admissible: bool
    t_H: Fraction
    t_N: int
    witness: list | None = None


def is_weakly_admissible(D: FilteredPhiNModule) -> AdmissibilityResult:
    tH, tN = hodge_number(D), newton_number(D)
    if tH != tN:
        return AdmissibilityResult(False, tH, tN, [list(la.identity(D.n))] * D.ctx.f)
    for parts in stable_submodules(D):
        if not parts[0] or len(parts[0]) == D.n:
            continue
        S = sub(D, parts)
        if hodge_number(S) > newton_number(S):
            return AdmissibilityResult(False, tH, tN, parts)
    return AdmissibilityResult(True, tH, tN, None)


# --- explicit rank-3 fixture --------------------------------------------------


def build_section5_module(L, ctx: FieldContext) -> FilteredPhiNModule:
    """Rank-3 module with phi^f f1 = p^{-f} f1, f2 and f3 fixed, N f2 = -f1,
    N f3 = f1, and Fil^0 = <f2 - L f1, f3 + L f1> on each embedding.

    Fil^i is everything for i < 0 and zero for i > 0, which is the same
    filtration as declaring Fil^{-1} = D explicitly.
    """
    Ls = [la.frac(x) for x in _per_tau(L, ctx)]
    p = Fraction(ctx.p)
    phi = [la.diag([1 / p, 1, 1])] * ctx.f
    N = [la.mat([[0, -1, 1], [0, 0, 0], [0, 0, 0]])] * ctx.f
    full = la.identity(3)
    fil = [[(-1, full), (0, [(-l, 1, 0), (l, 0, 1)])] for l in Ls]
    return FilteredPhiNModule.build(ctx, phi, N, fil)


SECTION5_FLAGS = {
    "f1,f2,f3": [[(1, 0, 0)], [(1, 0, 0), (0, 1, 0)], [(1, 0, 0), (0, 1, 0), (0, 0, 1)]],
    "f1,f3,f2": [[(1, 0, 0)], [(1, 0, 0), (0, 0, 1)], [(1, 0, 0), (0, 0, 1), (0, 1, 0)]],
}

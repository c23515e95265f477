"""Refinements: complete phi,N-stable flags with rank-one graded pieces, the
graded monodromy operator N_F, marked indices and dual refinements."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import permutations

from . import linalg as la
from .errors import NotAFlag, NotStable, WrongGradedRank
from .exact_core import SemilinearScalar
from .phin_module import (
    FilteredPhiNModule,
    _as_parts,
    _check_submodule,
    dual,
    propagate,
    _require_squarefree,
)


@dataclass(frozen=True)
class Refinement:
    """``flag[i-1][c]`` is a basis of component c of F_i, for i = 1..n."""

    module: FilteredPhiNModule
    flag: tuple

    @property
    def n(self) -> int:
        return self.module.n

    @property
    def f(self) -> int:
        return self.module.ctx.f

    def step(self, i: int, c: int) -> tuple:
        return () if i == 0 else self.flag[i - 1][c]

    @cached_property
    def generators(self) -> tuple:
        """Per component, vectors g_1..g_n with F_i = F_{i-1} + <g_i>."""
        out = []
        for c in range(self.f):
            gens = []
            for i in range(1, self.n + 1):
                prev = self.step(i - 1, c)
                g = next(v for v in self.step(i, c) if not la.contains(prev, v))
                gens.append(g)
            out.append(tuple(gens))
        return tuple(out)

    @cached_property
    def data(self) -> "GradedData":
        return graded_data(self)

    @cached_property
    def nf(self) -> "NFOperator":
        return compute_NF(self)

    def adapted_coordinates(self, c: int, v) -> tuple:
        return la.coordinates(self.generators[c], v)

    def as_json_flag(self) -> list:
        return [[list(part) for part in step] for step in self.flag]


def validate_refinement(D: FilteredPhiNModule, flag) -> Refinement:
    n, f = D.n, D.ctx.f
    if len(flag) != n:
        raise NotAFlag(f"a complete flag needs {n} steps, got {len(flag)}", "flag length")
    steps = [tuple(tuple(la.vec(v) for v in part) for part in _as_parts(s, f)) for s in flag]
    for i, step in enumerate(steps, start=1):
        for c in range(f):
            if la.dim(step[c]) != len(step[c]):
                raise NotAFlag("flag step basis is not independent", "independent basis")
            if la.dim(step[c]) != i:
                raise WrongGradedRank(f"step {i} has dimension {la.dim(step[c])} in component {c}", "graded rank")
            if i > 1 and not la.is_subspace(steps[i - 2][c], step[c]):
                raise NotAFlag(f"step {i - 1} is not contained in step {i}", "nested")
        try:
            _check_submodule(D, [list(p) for p in step])
        except NotStable as exc:
            raise NotStable(f"step {i}: {exc}", exc.invariant) from None
    return Refinement(D, tuple(steps))


def enumerate_refinements(D: FilteredPhiNModule) -> list[Refinement]:
    """All refinements, ordered lexicographically by their eigenvalue sequence."""
    factors = _require_squarefree(D)
    if any(len(fac) != 2 for fac in factors):
        return []
    a = D.phi_f(0)
    eig = sorted(-fac[0] for fac in factors)
    vecs = {lam: la.nullspace(la.matsub(a, la.scale(lam, la.identity(D.n))), D.n)[0] for lam in eig}
    out = []
    for order in permutations(eig):
        span = []
        flag = []
        ok = True
        for lam in order:
            span = span + [vecs[lam]]
            if not la.is_subspace([la.matvec(D.N[0], v) for v in span], span):
                ok = False
                break
            flag.append(propagate(D, span))
        if ok:
            out.append(validate_refinement(D, flag))
    return out


# --- graded data ---------------------------------------------------------------


@dataclass(frozen=True)
class GradedData:
    alphas: tuple
    weights: tuple  # weights[i][tau]
    frobenius_factors: tuple  # frobenius_factors[i][c]


def graded_data(R: Refinement) -> GradedData:
    D, f, n = R.module, R.f, R.n
    mus = []
    for i in range(n):
        row = []
        for c in range(f):
            image = la.matvec(D.phi[c], R.generators[(c + 1) % f][i])
            row.append(R.adapted_coordinates(c, image)[i])
        mus.append(tuple(row))
    alphas = []
    for row in mus:
        prod = Fraction(1)
        for m in row:
            prod *= m
        alphas.append(prod)
    weights = tuple(
        tuple(graded_weight(R, i, tau) for tau in range(D.ctx.degree)) for i in range(1, n + 1)
    )
    return GradedData(tuple(alphas), weights, tuple(mus))


def graded_weight(R: Refinement, i: int, tau: int) -> int:
    """Largest k with Fil^k meeting F_i outside F_{i-1}: the jump of gr_i."""
    D = R.module
    c = D.component_of(tau)
    best = None
    for k in D.jump_points(tau):
        meet = la.intersection(D.fil(tau, k), R.step(i, c), D.n)
        if not la.is_subspace(meet, R.step(i - 1, c)):
            best = k
    return best


# --- N_F and marked indices ----------------------------------------------------


@dataclass(frozen=True)
class NFOperator:
    """``targets[i-1]`` is None when N_F kills gr_i, else the index j with
    N_F(gr_i) = gr_j; ``scalars[i-1]`` then gives the map in the adapted
    generators, one E-value per component."""

    targets: tuple
    scalars: tuple


def _image_of_step(R: Refinement, i: int, c: int) -> tuple:
    D = R.module
    return la.image(D.N[c], R.step(i, c), D.n)


def compute_NF(R: Refinement) -> NFOperator:
    D, n, f = R.module, R.n, R.f
    targets, scalars = [], []
    for i in range(1, n + 1):
        now = _image_of_step(R, i, 0)
        before = _image_of_step(R, i - 1, 0)
        if la.dim(now) == la.dim(before):
            targets.append(None)
            scalars.append(None)
            continue
        j = next(
            j for j in range(1, n + 1) if la.is_subspace(now, la.span_sum(before, R.step(j, 0), D.n))
        )
        lam = []
        for c in range(f):
            ambient = la.span_sum(_image_of_step(R, i - 1, c), R.step(j - 1, c), D.n)
            g_j = R.generators[c][j - 1]
            target = la.matvec(D.N[c], R.generators[c][i - 1])
            basis = [g_j] + list(ambient)
            lam.append(la.coordinates(basis, target)[0])
        targets.append(j)
        scalars.append(SemilinearScalar(tuple(lam)))
    return NFOperator(tuple(targets), tuple(scalars))


@dataclass(frozen=True)
class MarkedIndexMap:
    marked: tuple
    t: dict  # s -> t_F(s)
    s: dict  # t -> s_F(t)


def marked_indices(R: Refinement, nf: NFOperator | None = None) -> MarkedIndexMap:
    nf = nf or R.nf
    t_of, s_of = {}, {}
    for i, j in enumerate(nf.targets, start=1):
        if j is not None and j not in t_of:
            t_of[j] = i
            s_of[i] = j
    return MarkedIndexMap(tuple(sorted(t_of)), t_of, s_of)


def check_marked_criterion(R: Refinement, s: int, t: int) -> bool:
    """Direct intersection test: N F_{t-1} meets F_s exactly as it meets
    F_{s-1}, while N F_t meets F_s in something strictly larger."""
    D = R.module
    n = D.n

    def meet_dim(i, j):
        return la.dim(la.intersection(_image_of_step(R, i, 0), R.step(j, 0), n))

    return meet_dim(t - 1, s) == meet_dim(t - 1, s - 1) and meet_dim(t, s) > meet_dim(t, s - 1)


# --- dual refinement -----------------------------------------------------------


def dual_refinement(R: Refinement, dual_module: FilteredPhiNModule | None = None) -> Refinement:
    Dd = dual_module or dual(R.module)
    n, f = R.n, R.f
    flag = [[la.annihilator(R.step(n - i, c), n) for c in range(f)] for i in range(1, n + 1)]
    return validate_refinement(Dd, flag)


def graded_pairing(R: Refinement, Rd: Refinement, a: int, c: int) -> Fraction:
    """<g^vee_a, g_{n+1-a}> on component c; nonzero for a valid dual pair."""
    return la.dot(Rd.generators[c][a - 1], R.generators[c][R.n - a])


def duality_defects(R: Refinement, Rd: Refinement) -> list[tuple]:
    """All (a, b, c, value) with <N x, y> + <x, N y> != 0 on graded generators
    x in gr^vee_a and y in gr_b, component c."""
    n, f = R.n, R.f
    nf, nfd = R.nf, Rd.nf
    bad = []
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            for c in range(f):
                value = Fraction(0)
                ad = nfd.targets[a - 1]
                if ad is not None and n + 1 - ad == b:
                    value += nfd.scalars[a - 1][c] * graded_pairing(R, Rd, ad, c)
                bt = nf.targets[b - 1]
                if bt is not None and bt == n + 1 - a:
                    value += nf.scalars[b - 1][c] * graded_pairing(R, Rd, a, c)
                if value != 0:
                    bad.append((a, b, c, value))
    return bad


# --- parameters ----------------------------------------------------------------

PARAMETER_CONVENTION = (
    "value at the uniformizer is recorded as the graded phi^f eigenvalue alpha_i; "
    "the smooth twist is left as an opaque tag"
)


def refinement_to_parameters(R: Refinement) -> list[dict]:
    data = R.data
    out = []
    for i, (alpha, w) in enumerate(zip(data.alphas, data.weights), start=1):
        out.append(
            {
                "index": i,
                "alpha": alpha,
                "weights": list(w),
                "character": {
                    "value_at_pi": alpha,
                    "weights": list(w),
                    "smooth_tag": f"smooth_{i}",
                },
            }
        )
    return out


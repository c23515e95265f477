"""Randomized property suites, runnable from the CLI with an explicit seed."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import cohomology_pairing as cp
from . import linalg as la
from . import randomgen as rg
from .exact_core import p_valuation
from .family_cgs import InfinitesimalCharacter, cgs_residual, derive_theorem_from_aux
from .fixtures import build_chain_module, build_section7_fixtures, matches_closed_form
from .linvariant import check_well_defined, duality_transport, l_invariant
from .phin_module import (
    SECTION5_FLAGS,
    build_section5_module,
    construct_rank1,
    hodge_number,
    is_weakly_admissible,
    newton_number,
    tensor,
    validate,
)
from .refinement import (
    check_marked_criterion,
    dual_refinement,
    duality_defects,
    marked_indices,
    validate_refinement,
)


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "ok": self.ok,
            "failures": [str(x) for x in self.failures[:5]],
            "notes": self.notes,
        }


def _timed(fn):
    def run(*args, **kwargs):
        start = time.perf_counter()
        res = fn(*args, **kwargs)
        res.elapsed = time.perf_counter() - start
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def rank3_fixture_suite(trials: int, seed: int) -> SuiteResult:
    """The rank-3 fixture: marked index 1 with t = 2 for both flags, and the
    L-invariant equal to the Fil^0 parameter."""
    rng = random.Random(seed)
    res = SuiteResult("rank3-fixture", trials)
    for i in range(trials):
        ctx = rg.random_context(rng)
        L = tuple(rg.random_rational(rng) for _ in range(ctx.degree))
        D = build_section5_module(L, ctx)
        for name, flag in SECTION5_FLAGS.items():
            R = validate_refinement(D, flag)
            marks = marked_indices(R)
            if marks.marked != (1,) or marks.t.get(1) != 2:
                res.failures.append((i, name, "marked", marks))
                continue
            got = l_invariant(D, R, 1, 2)
            if got != L:
                res.failures.append((i, name, got, L))
    return res


@_timed
def marked_oracle_suite(trials: int, seed: int) -> SuiteResult:
    """N_F-based markedness against the direct intersection criterion."""
    rng = random.Random(seed)
    res = SuiteResult("marked-oracle", trials)
    pairs = marked = 0
    for i in range(trials):
        D, R = rg.random_refined_module(rng)
        marks = marked_indices(R)
        for s in range(1, D.n + 1):
            for t in range(s + 1, D.n + 1):
                pairs += 1
                via_nf = marks.t.get(s) == t
                marked += via_nf
                if via_nf != check_marked_criterion(R, s, t):
                    res.failures.append((i, s, t))
    res.notes = {"pairs": pairs, "marked_pairs": marked}
    return res


@_timed
def duality_suite(trials: int, seed: int) -> SuiteResult:
    """Graded pairing identity, marked-index bijection and strong-markedness
    biconditional for the dual refinement."""
    rng = random.Random(seed)
    res = SuiteResult("duality", trials)
    strong = 0
    for i in range(trials):
        if i % 3 == 2:
            D, R, _ = rg.random_perfect_module(rng)
        else:
            D, R = rg.random_refined_module(rng)
        Rd = dual_refinement(R)
        bad = duality_defects(R, Rd)
        if bad:
            res.failures.append((i, "pairing", bad[:2]))
        marks, dmarks = marked_indices(R), marked_indices(Rd)
        n = D.n
        image = {n + 1 - marks.t[s]: n + 1 - s for s in marks.marked}
        if dict(dmarks.t) != image:
            res.failures.append((i, "bijection", marks.t, dmarks.t))
        for s in marks.marked:
            rep = duality_transport(D, R, s)
            strong += rep.strongly_marked
            if not rep.holds:
                res.failures.append((i, "strong", rep))
    res.notes = {"strongly_marked": strong}
    return res


@_timed
def well_defined_suite(trials: int, seed: int) -> SuiteResult:
    """All perfect decompositions give the same L-invariant."""
    rng = random.Random(seed)
    res = SuiteResult("well-defined", trials)
    instances = several = 0
    for i in range(trials):
        if i % 2 == 0:
            D, R, expected = rg.random_perfect_module(rng)
        else:
            D, R = rg.random_refined_module(rng)
            expected = None
        for s in marked_indices(R).marked:
            try:
                rep = check_well_defined(D, R, s)
            except Exception:  # not strongly marked
                continue
            instances += 1
            several += rep.perfect > 1
            if not rep.consistent:
                res.failures.append((i, s, rep.values))
            if s == 1 and expected is not None and rep.value != expected:
                res.failures.append((i, "expected", rep.value, expected))
    res.notes = {"strongly_marked_instances": instances, "with_several_perfect": several}
    return res


def random_character(rng, degree: int) -> InfinitesimalCharacter:
    return InfinitesimalCharacter(
        base_at_pi=rg.random_rational(rng, nonzero=True),
        base_at_p=rg.random_rational(rng, nonzero=True),
        base_weights=[rng.randint(-3, 3) for _ in range(degree)],
        eps_at_pi=rg.random_rational(rng),
        eps_at_p=rg.random_rational(rng),
        eps_weights=[rg.random_rational(rng) for _ in range(degree)],
    )


@_timed
def cgs_suite(trials: int, seed: int) -> SuiteResult:
    """residual == 0 iff the auxiliary gamma relation holds."""
    rng = random.Random(seed)
    res = SuiteResult("cgs", trials)
    zero = 0
    for i in range(trials):
        ctx = rg.random_context(rng)
        ds, dt = random_character(rng, ctx.degree), random_character(rng, ctx.degree)
        L = [rg.random_rational(rng) for _ in range(ctx.degree)]
        if rng.random() < 0.5:
            # force a vanishing residual half of the time
            r = cgs_residual([ds, dt], 1, 2, L, ctx)
            dt = InfinitesimalCharacter(
                dt.base_at_pi, dt.base_at_p, dt.base_weights, dt.eps_at_pi,
                dt.eps_at_p - ctx.degree * r, dt.eps_weights,
            )
        rep = derive_theorem_from_aux(ds, dt, L, ctx)
        zero += rep.residual_zero
        if not rep.consistent:
            res.failures.append((i, rep.residual, rep.aux_holds))
    res.notes = {"zero_residuals": zero}
    return res


@_timed
def pairing_suite(trials: int, seed: int) -> SuiteResult:
    """Basis values, bilinearity and trivial kernel of the cup product."""
    rng = random.Random(seed)
    res = SuiteResult("pairing", trials)
    for degree in range(1, 5):
        m = cp.pairing_matrix(degree)
        want = la.diag([1] + [-1] * degree)
        if m != want:
            res.failures.append(("basis", degree, m))
        if cp.pairing_kernel(degree):
            res.failures.append(("kernel", degree))
    for i in range(trials):
        d = rng.randint(1, 4)

        def ur():
            return cp.UnramifiedSideClass(rg.random_rational(rng), [rg.random_rational(rng) for _ in range(d)])

        def km():
            return cp.KummerSideClass(rg.random_rational(rng), [rg.random_rational(rng) for _ in range(d)])

        x1, x2, y1, y2 = ur(), ur(), km(), km()
        c = rg.random_rational(rng)
        xs = cp.UnramifiedSideClass(x1.a0 + c * x2.a0, la.vadd(x1.a, la.vscale(c, x2.a)))
        ys = cp.KummerSideClass(y1.b0 + c * y2.b0, la.vadd(y1.b, la.vscale(c, y2.b)))
        if cp.cup_product(xs, y1) != cp.cup_product(x1, y1) + c * cp.cup_product(x2, y1):
            res.failures.append((i, "left"))
        if cp.cup_product(x1, ys) != cp.cup_product(x1, y1) + c * cp.cup_product(x1, y2):
            res.failures.append((i, "right"))
    return res


@_timed
def tensor_fixture_suite(trials: int, seed: int) -> SuiteResult:
    """Pipeline-built rank-3 submodule against its closed form."""
    rng = random.Random(seed)
    res = SuiteResult("tensor-fixture", trials)
    for i in range(trials):
        ctx = rg.random_context(rng)
        n = rng.randint(2, 4)
        L = [rg.random_rational(rng) for _ in range(ctx.degree)]
        lows = [rng.randint(-2, 0) for _ in range(ctx.degree)]
        highs = [lo + rng.randint(1, 2) for lo in lows]
        mids = [[rng.randint(-2, 2) for _ in range(n - 2)] for _ in range(ctx.degree)]
        D, R = build_chain_module(n, L, ctx, lows, highs, mids)
        fx = build_section7_fixtures(D, R)
        if fx.L != tuple(L) or not matches_closed_form(fx.small, L) or validate(fx.small):
            res.failures.append((i, fx.L, L))
    return res


@_timed
def admissibility_suite(trials: int, seed: int) -> SuiteResult:
    """Rank one: admissible iff t_H = v_p(a); tensor additivity of t_N."""
    rng = random.Random(seed)
    res = SuiteResult("admissibility", trials)
    admissible = 0
    for i in range(trials):
        ctx = rg.random_context(rng)
        a = rg.random_rational(rng, nonzero=True) * Fraction(ctx.p) ** rng.randint(-2, 2)
        if rng.random() < 0.5:
            # aim for the admissible locus: spread v_p(a) over the embeddings
            jumps = [0] * ctx.degree
            target = p_valuation(a, ctx) * ctx.e
            for k in range(abs(target)):
                jumps[k % ctx.degree] += 1 if target > 0 else -1
        else:
            jumps = [rng.randint(-2, 2) for _ in range(ctx.degree)]
        D = construct_rank1(a, jumps, ctx)
        verdict = is_weakly_admissible(D).admissible
        admissible += verdict
        if verdict != (hodge_number(D) == p_valuation(a, ctx)):
            res.failures.append((i, "rank1", a, jumps))
    for i in range(trials):
        ctx = rg.random_context(rng)
        D1, _ = rg.random_refined_module(rng, ctx, rng.randint(1, 3))
        D2, _ = rg.random_refined_module(rng, ctx, rng.randint(1, 3))
        T = tensor(D1, D2)
        if newton_number(T) != D2.n * newton_number(D1) + D1.n * newton_number(D2):
            res.failures.append((i, "tensor"))
    res.notes = {"admissible_rank1": admissible}
    return res


SUITES = {
    "rank3-fixture": (rank3_fixture_suite, 100),
    "marked-oracle": (marked_oracle_suite, 500),
    "duality": (duality_suite, 300),
    "well-defined": (well_defined_suite, 100),
    "cgs": (cgs_suite, 1000),
    "pairing": (pairing_suite, 200),
    "tensor-fixture": (tensor_fixture_suite, 50),
    "admissibility": (admissibility_suite, 100),
}


def run_suites(names=None, trials: int | None = None, seed: int = 0) -> list[SuiteResult]:
    out = []
    for name in names or SUITES:
        fn, default = SUITES[name]
        out.append(fn(trials or default, seed))
    return out

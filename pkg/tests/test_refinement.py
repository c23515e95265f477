import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings

from phinlab import linalg as la
from phinlab import randomgen as rg
from phinlab.errors import EigenvalueDegeneracy, NotAFlag, NotStable, WrongGradedRank
from phinlab.exact_core import FieldContext
from phinlab.phin_module import SECTION5_FLAGS, FilteredPhiNModule, build_section5_module, construct_rank1, dual
from phinlab.refinement import (
    check_marked_criterion,
    dual_refinement,
    duality_defects,
    enumerate_refinements,
    marked_indices,
    refinement_to_parameters,
    validate_refinement,
)
from strategies import seeds

P = 3
CTX = FieldContext(P)


def section5(L=Fraction(1, 2), ctx=CTX, flag="f1,f2,f3"):
    D = build_section5_module([L] * ctx.degree, ctx)
    return D, validate_refinement(D, SECTION5_FLAGS[flag])


def diagonal_module(alphas, ctx=CTX):
    n = len(alphas)
    return FilteredPhiNModule.build(ctx, [la.diag(alphas)], [la.zeros(n, n)], [[(0, la.identity(n))]])


# --- validation and enumeration ----------------------------------------------------


def test_rank3_fixture_standard_flag_is_valid():
    section5()


def test_flag_starting_at_f2_is_not_stable():
    D = build_section5_module([1], CTX)
    with pytest.raises(NotStable):
        validate_refinement(D, [[(0, 1, 0)], [(0, 1, 0), (0, 0, 1)], la.identity(3)])


def test_malformed_flags_are_rejected():
    D = build_section5_module([1], CTX)
    with pytest.raises(NotAFlag):
        validate_refinement(D, [[(1, 0, 0)], la.identity(3)])
    with pytest.raises(WrongGradedRank):
        validate_refinement(D, [[(1, 0, 0)], [(1, 0, 0)], la.identity(3)])


def test_rank_one_has_a_single_refinement():
    D = construct_rank1(5, 2, FieldContext(2, 1, 2))
    R = validate_refinement(D, [[(1,)]])
    assert len(enumerate_refinements(D)) == 1
    assert R.data.alphas == (Fraction(5),)
    params = refinement_to_parameters(R)
    assert len(params) == 1 and params[0]["alpha"] == 5 and params[0]["weights"] == [2, 2]


def test_rank3_fixture_enumeration_hits_a_repeated_eigenvalue():
    D = build_section5_module([1], CTX)
    with pytest.raises(EigenvalueDegeneracy):
        enumerate_refinements(D)


def test_distinct_diagonal_rank2_has_two_refinements():
    Rs = enumerate_refinements(diagonal_module([2, 5]))
    assert len(Rs) == 2
    assert sorted(R.data.alphas for R in Rs) == [(2, 5), (5, 2)]


def test_enumeration_matches_brute_force_over_eigenvector_orders():
    # N e3 = e1 with phi = diag(1/p, 2, 1): only orders placing e1 before e3 survive
    ctx = CTX
    n = 3
    N = tuple(tuple(Fraction(1) if (i, j) == (0, 2) else Fraction(0) for j in range(n)) for i in range(n))
    D = FilteredPhiNModule.build(ctx, [la.diag([Fraction(1, P), 2, 1])], [N], [[(0, la.identity(3))]])
    got = {R.data.alphas for R in enumerate_refinements(D)}
    eig = [Fraction(1, P), Fraction(2), Fraction(1)]
    from itertools import permutations

    want = set()
    for order in permutations(range(3)):
        if order.index(0) < order.index(2):
            want.add(tuple(eig[i] for i in order))
    assert got == want


def test_enumeration_is_empty_for_irrational_eigenvalues():
    D = FilteredPhiNModule.build(CTX, [la.mat([[0, 2], [1, 0]])], [la.zeros(2, 2)], [[(0, la.identity(2))]])
    assert enumerate_refinements(D) == []


# --- graded data and N_F ---------------------------------------------------------------


@pytest.mark.parametrize("f", [1, 2, 3])
def test_rank3_fixture_graded_eigenvalues(f):
    D, R = section5(ctx=FieldContext(P, 1, f))
    assert R.data.alphas == (Fraction(1, P**f), 1, 1)
    assert [p["alpha"] for p in refinement_to_parameters(R)] == list(R.data.alphas)


def test_rank3_fixture_monodromy_operator():
    _, R = section5()
    assert R.nf.targets == (None, 1, None)
    assert R.nf.scalars[1].components == (-1,)
    _, R2 = section5(flag="f1,f3,f2")
    assert R2.nf.targets == (None, 1, None)
    assert R2.nf.scalars[1].components == (1,)


@pytest.mark.parametrize("flag", sorted(SECTION5_FLAGS))
def test_rank3_fixture_marked_indices(flag):
    _, R = section5(flag=flag)
    marks = marked_indices(R)
    assert marks.marked == (1,)
    assert marks.t == {1: 2}


def test_rank3_fixture_direct_criterion():
    _, R = section5()
    assert check_marked_criterion(R, 1, 2)
    assert not check_marked_criterion(R, 1, 3)
    assert not check_marked_criterion(R, 2, 3)


def test_zero_monodromy_has_nothing_marked():
    D = diagonal_module([2, 5, 7])
    R = enumerate_refinements(D)[0]
    assert all(t is None for t in R.nf.targets)
    assert marked_indices(R).marked == ()
    assert not any(check_marked_criterion(R, s, t) for s in range(1, 4) for t in range(s + 1, 4))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_graded_weights_permute_the_jumps(seed):
    D, R = rg.random_refined_module(random.Random(seed))
    for tau in range(D.ctx.degree):
        assert Counter(w[tau] for w in R.data.weights) == Counter(D.weights(tau))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_monodromy_operator_commutes_with_frobenius(seed):
    D, R = rg.random_refined_module(random.Random(seed))
    f, p = D.ctx.f, D.ctx.p
    mu = R.data.frobenius_factors
    for i, j in enumerate(R.nf.targets, start=1):
        if j is None:
            continue
        lam = R.nf.scalars[i - 1]
        for c in range(f):
            assert lam[c] * mu[i - 1][c] == p * mu[j - 1][c] * lam[(c + 1) % f]
        assert R.data.alphas[i - 1] == p**f * R.data.alphas[j - 1]


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_marked_indices_agree_with_direct_criterion(seed):
    D, R = rg.random_refined_module(random.Random(seed))
    marks = marked_indices(R)
    for s in range(1, D.n + 1):
        for t in range(s + 1, D.n + 1):
            assert (marks.t.get(s) == t) == check_marked_criterion(R, s, t)


# --- duality --------------------------------------------------------------------------


def test_dual_of_diagonal_rank2_flag_is_the_annihilator():
    D = diagonal_module([2, 5])
    R = enumerate_refinements(D)[0]
    Rd = dual_refinement(R)
    first = Rd.step(1, 0)
    # brute force: the line killing F_1 among small integer vectors
    F1 = R.step(1, 0)[0]
    cands = [(a, b) for a in range(-3, 4) for b in range(-3, 4) if (a, b) != (0, 0) and a * F1[0] + b * F1[1] == 0]
    assert la.same_span(first, [cands[0]], 2)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_dual_refinement_properties(seed):
    D, R = rg.random_refined_module(random.Random(seed))
    n = D.n
    Rd = dual_refinement(R)
    assert duality_defects(R, Rd) == []
    assert all(Rd.data.alphas[i] == 1 / R.data.alphas[n - 1 - i] for i in range(n))
    Rdd = dual_refinement(Rd)
    assert Rdd.module.phi == D.phi and Rdd.module.N == D.N
    for i in range(n + 1):
        for c in range(D.ctx.f):
            assert la.same_span(Rdd.step(i, c), R.step(i, c), n)
    marks, dmarks = marked_indices(R), marked_indices(Rd)
    assert dmarks.t == {n + 1 - marks.t[s]: n + 1 - s for s in marks.marked}


def test_rank3_fixture_dual_marks_two_to_three():
    D, R = section5()
    Rd = dual_refinement(R, dual(D))
    assert marked_indices(Rd).t == {2: 3}

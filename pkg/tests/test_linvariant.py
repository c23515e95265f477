import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phinlab import linalg as la
from phinlab import randomgen as rg
from phinlab.errors import NotMarked, NotStronglyMarked
from phinlab.exact_core import FieldContext
from phinlab.fixtures import build_chain_module
from phinlab.linvariant import (
    check_well_defined,
    duality_transport,
    find_s_decompositions,
    is_perfect,
    is_strongly_marked,
    l_invariant,
    perfect_decompositions,
)
from phinlab.phin_module import SECTION5_FLAGS, FilteredPhiNModule, build_section5_module
from phinlab.refinement import enumerate_refinements, marked_indices, validate_refinement
from oracles import decomposition_box, decomposition_invariants_hold, perfect_by_definition
from strategies import contexts, rationals, seeds


def section5(L, ctx, flag):
    D = build_section5_module(L, ctx)
    return D, validate_refinement(D, SECTION5_FLAGS[flag])


def rank2(p, line, lo, hi, ctx=None):
    """phi = diag(1/p, 1), N e2 = e1, Fil^lo = D, Fil^hi = <line>."""
    ctx = ctx or FieldContext(p)
    N = ((Fraction(0), Fraction(1)), (Fraction(0), Fraction(0)))
    fil = [[(lo, la.identity(2)), (hi, [line])] if hi > lo else [(lo, la.identity(2))]] * ctx.degree
    D = FilteredPhiNModule.build(ctx, [la.diag([Fraction(1, p), 1])], [N], fil)
    return D, validate_refinement(D, [[(1, 0)], la.identity(2)])


# --- the explicit rank-3 module ------------------------------------------------------


def test_rank3_fixture_decomposition_shape():
    ctx = FieldContext(3)
    D, R = section5([Fraction(2, 5)], ctx, "f1,f2,f3")
    decs = find_s_decompositions(D, R, 1)
    assert len(decs) == 1
    dec = decs[0]
    assert dec.t == 2 and dec.L_block == ((),)
    assert dec.e_s[0] == (1, 0)
    # N(f2) = -f1 forces e_t = -f2 modulo f1
    assert dec.e_t[0][1] == -1
    assert la.matvec(dec.ambient.N[0], dec.e_t[0]) == dec.e_s[0]
    assert decomposition_invariants_hold(dec)


@pytest.mark.parametrize("flag", sorted(SECTION5_FLAGS))
@settings(max_examples=15, deadline=None)
@given(ctx=contexts(), data=st.data())
def test_rank3_fixture_l_invariant_equals_the_fil0_parameter(flag, ctx, data):
    L = tuple(data.draw(rationals) for _ in range(ctx.degree))
    D, R = section5(L, ctx, flag)
    found = perfect_decompositions(D, R, 1)
    assert found
    for dec, w in found:
        assert w.L == L
        assert perfect_by_definition(dec) == L
    assert l_invariant(D, R, 1, 2) == L
    rep = check_well_defined(D, R, 1, 2)
    assert rep.consistent and rep.value == L


def test_rank3_fixture_duality_transport():
    ctx = FieldContext(5, 1, 2)
    D, R = section5([1, 2], ctx, "f1,f2,f3")
    rep = duality_transport(D, R, 1)
    assert (rep.dual_s, rep.dual_t) == (2, 3)
    assert rep.holds and rep.strongly_marked and rep.strongly_marked_in_dual


def test_unmarked_indices_are_rejected():
    ctx = FieldContext(3)
    D, R = section5([1], ctx, "f1,f2,f3")
    assert not is_strongly_marked(D, R, 2)
    with pytest.raises(NotMarked):
        find_s_decompositions(D, R, 2)
    with pytest.raises(NotMarked):
        l_invariant(D, R, 1, 3)
    with pytest.raises(NotMarked):
        duality_transport(D, R, 3)


def test_zero_monodromy_has_no_transport():
    D = FilteredPhiNModule.build(FieldContext(3), [la.diag([2, 5])], [la.zeros(2, 2)], [[(0, la.identity(2))]])
    R = enumerate_refinements(D)[0]
    assert marked_indices(R).marked == ()
    for s in (1, 2):
        with pytest.raises(NotMarked):
            duality_transport(D, R, s)


# --- rank two and the tensor-style block ---------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5]), rationals, st.integers(-3, 3), st.integers(0, 3))
def test_adjacent_case_strongly_marked_iff_weights_increase(p, a, lo, gap):
    D, R = rank2(p, (a, 1), lo, lo + gap)
    decs = find_s_decompositions(D, R, 1)
    assert all(dec.L_block == ((),) for dec in decs)
    ks, kt = R.data.weights[0][0], R.data.weights[1][0]
    assert is_strongly_marked(D, R, 1) == (ks < kt)
    if ks < kt:
        assert l_invariant(D, R, 1, 2) == (a,)


def test_weights_in_the_wrong_order_are_not_perfect():
    D, R = rank2(3, (1, 0), 0, 2)  # Fil^2 = <e1> puts the larger weight on gr_1
    assert R.data.weights[0][0] > R.data.weights[1][0]
    assert all(is_perfect(dec) is None for dec in find_s_decompositions(D, R, 1))
    with pytest.raises(NotStronglyMarked):
        l_invariant(D, R, 1, 2)


@pytest.mark.parametrize("e,f", [(1, 1), (2, 1), (1, 2)])
def test_tensor_style_block_gives_plus_L(e, f):
    ctx = FieldContext(7, e, f)
    L = [Fraction(i + 1, 3) for i in range(ctx.degree)]
    D, R = build_chain_module(2, L, ctx)
    assert l_invariant(D, R, 1, 2) == tuple(L)


# --- randomized -----------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_perfect_generator_recovers_its_L(seed):
    D, R, Ls = rg.random_perfect_module(random.Random(seed))
    rep = check_well_defined(D, R, 1)
    assert rep.t == D.n
    assert rep.consistent
    assert rep.value == Ls


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_semisimple_frobenius_admits_decompositions(seed):
    D, R = rg.random_refined_module(random.Random(seed), shear=False)
    for s in marked_indices(R).marked:
        decs = find_s_decompositions(D, R, s)
        assert decs
        assert all(decomposition_invariants_hold(d) for d in decs)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_duality_transport_biconditional(seed):
    rng = random.Random(seed)
    D, R = rg.random_perfect_module(rng)[:2] if seed % 2 else rg.random_refined_module(rng)
    for s in marked_indices(R).marked:
        assert duality_transport(D, R, s).holds


def test_perfection_agrees_with_box_search_oracle():
    rng = random.Random(20240611)
    checked = perfect = 0
    for i in range(24):
        if i % 2:
            D, R, _ = rg.random_perfect_module(rng, n=rng.randint(2, 4))
        else:
            D, R = rg.random_refined_module(rng, n=rng.randint(2, 4))
        for s in marked_indices(R).marked:
            found = {w.L for _, w in perfect_decompositions(D, R, s)}
            _, candidates = decomposition_box(D, R, s, limit=120)
            for dec in candidates:
                assert decomposition_invariants_hold(dec)
                mine = is_perfect(dec)
                ref = perfect_by_definition(dec)
                assert (mine.L if mine else None) == ref
                if ref is not None:
                    perfect += 1
                    # every perfect candidate in the box is matched by the search
                    assert ref in found
                checked += 1
    assert checked > 30 and perfect > 5

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phinlab.errors import NotAUnit, ValidationError
from phinlab.exact_core import (
    DualScalar,
    FieldContext,
    SemilinearScalar,
    Z,
    dual_invert,
    frobenius_shift,
    p_valuation,
    to_str,
)
from strategies import contexts, duals, nonzero_rationals, rationals


def test_context_degrees_and_labels():
    ctx = FieldContext(3, 2, 3)
    assert ctx.degree == 6
    assert len(ctx.embeddings) == 6
    assert ctx.uniformizer_valuation == Fraction(1, 2)
    for j in range(3):
        assert len(ctx.embeddings_over(j)) == 2
        assert all(ctx.restriction(t) == j for t in ctx.embeddings_over(j))


@pytest.mark.parametrize("args", [(4, 1, 1), (1, 1, 1), (3, 0, 1), (3, 1, 0)])
def test_context_rejects_bad_data(args):
    with pytest.raises(ValidationError):
        FieldContext(*args)


@pytest.mark.parametrize("x,p,v", [(1, 3, 0), (18, 3, 2), (Fraction(5, 12), 2, -2), (Fraction(-1, 27), 3, -3)])
def test_p_valuation_examples(x, p, v):
    assert p_valuation(x, p) == v


def test_p_valuation_of_zero_is_infinite():
    assert p_valuation(0, 5) == math.inf


@given(nonzero_rationals, nonzero_rationals, st.sampled_from([2, 3, 5, 7]))
def test_p_valuation_is_additive(x, y, p):
    assert p_valuation(x * y, p) == p_valuation(x, p) + p_valuation(y, p)


def test_rationals_print_as_num_over_den():
    assert to_str(Fraction(1, 3)) == "1/3"
    assert to_str(4) == "4/1"


@pytest.mark.parametrize(
    "x,inv",
    [
        (DualScalar(1, 1), DualScalar(1, -1)),
        (DualScalar(2, 0), DualScalar(Fraction(1, 2), 0)),
        (DualScalar(3, 6), DualScalar(Fraction(1, 3), Fraction(-2, 3))),
    ],
)
def test_dual_invert_examples(x, inv):
    assert dual_invert(x) == inv
    assert x * inv == DualScalar(1, 0)


def test_dual_invert_rejects_nilpotents():
    with pytest.raises(NotAUnit):
        dual_invert(Z)


def test_z_squares_to_zero():
    assert Z * Z == DualScalar(0, 0)


@given(duals, duals, duals)
def test_dual_numbers_form_a_commutative_ring(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == DualScalar(0, 0)


@given(duals)
def test_dual_inverse_is_two_sided(x):
    if x.a == 0:
        with pytest.raises(NotAUnit):
            dual_invert(x)
    else:
        assert dual_invert(x) * x == DualScalar(1)
        assert x / x == DualScalar(1)


@given(duals)
def test_dual_json_round_trip(x):
    assert DualScalar.from_json(x.to_json()) == x


def test_frobenius_shift_examples():
    x = SemilinearScalar((7,))
    assert frobenius_shift(x) == x
    assert frobenius_shift(SemilinearScalar((1, 2, 3))) == SemilinearScalar((2, 3, 1))
    y = SemilinearScalar((5, 7))
    assert frobenius_shift(frobenius_shift(y)) == y


@given(st.integers(1, 5).flatmap(lambda f: st.tuples(st.lists(rationals, min_size=f, max_size=f), st.lists(rationals, min_size=f, max_size=f))))
def test_frobenius_shift_is_a_ring_automorphism_of_order_f(pair):
    x, y = SemilinearScalar(tuple(pair[0])), SemilinearScalar(tuple(pair[1]))
    f = x.f
    assert frobenius_shift(x + y) == frobenius_shift(x) + frobenius_shift(y)
    assert frobenius_shift(x * y) == frobenius_shift(x) * frobenius_shift(y)
    z = x
    for _ in range(f):
        z = frobenius_shift(z)
    assert z == x
    if f > 1 and len(set(x.components)) == f:
        assert frobenius_shift(x) != x


def test_semilinear_inverse_needs_every_component_nonzero():
    assert SemilinearScalar((2, 4)).inverse() == SemilinearScalar((Fraction(1, 2), Fraction(1, 4)))
    with pytest.raises(NotAUnit):
        SemilinearScalar((1, 0)).inverse()


@given(contexts())
def test_random_contexts_are_consistent(ctx):
    assert sorted(t for j in range(ctx.f) for t in ctx.embeddings_over(j)) == list(range(ctx.degree))

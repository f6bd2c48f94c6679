import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qre.errors import DomainError, NotPolynomial, UnboundSymbol
from qre.symbolics import (Const, Mode, SymExpr, bitsize, ceil, evaluate, evaluate_int, factor_terms, floor,
                           leading_term, ln, log2, simplify, smax, smin, subs, symbols, to_latex, to_text)

n, x, y = symbols("n x y")


def test_direct_synthesis_formula_at_1e_minus_10():
    eps = symbols("eps")[0]
    e = ceil(1.149 * log2(1 / eps) + 9.2)
    assert evaluate(e, {"eps": 1e-10}) == 48
    assert 48 == math.ceil(1.149 * math.log2(1e10) + 9.2)


def test_annihilator():
    assert evaluate(n * x, {"n": 0, "x": 7}) == 0


def test_log_of_zero_is_domain_error():
    with pytest.raises(DomainError):
        evaluate(log2(x), {"x": 0})
    with pytest.raises(DomainError):
        evaluate(ln(x), {"x": -1})


def test_unbound_symbol():
    with pytest.raises(UnboundSymbol):
        evaluate(n + 1)


def test_exact_rational_evaluation():
    v = evaluate(Fraction(1, 3) * n + Fraction(1, 6), {"n": 1})
    assert v == Fraction(1, 2)
    assert isinstance(v, Fraction)


def test_leading_term_examples():
    assert leading_term(24 * n**2 + 17 * n + 3, n) == (Const(24), 2)
    coeff, deg = leading_term(ceil(n / 2) * 6 + n * n, n, Mode.BOUNDS)
    assert (evaluate(coeff), deg) == (1, 2)


def test_leading_term_not_polynomial():
    with pytest.raises(NotPolynomial):
        leading_term(2**n + n, n)


def test_bitsize_is_ceil_log2():
    for k in range(1, 70):
        assert evaluate_int(bitsize(k)) == math.ceil(math.log2(k))


def test_max_min_and_rounding():
    assert evaluate(smax(x, y, 3), {"x": 1, "y": 2}) == 3
    assert evaluate(smin(x, y), {"x": 1, "y": 2}) == 1
    assert evaluate(floor(x / 2), {"x": 7}) == 3
    assert evaluate(ceil(x / 2), {"x": 7}) == 4


def test_powers_merge():
    assert simplify(n**2 * n**3) == simplify(n**5)
    assert to_text(simplify(2 * n * n + n * 3)) == "2*n^2 + 3*n"


def test_factor_terms_pulls_common_factor():
    e = factor_terms(simplify(6 * n * x + 3 * n * y))
    assert evaluate(e, {"n": 3, "x": 5, "y": 7}) == 6 * 3 * 5 + 3 * 3 * 7
    assert to_text(e) == "3*n*(y + 2*x)"
    # no integer ratio between 4 and 6: only the shared symbol comes out
    assert to_text(factor_terms(simplify(6 * n * x + 4 * n * y))) == "n*(4*y + 6*x)"


def test_rendering():
    assert to_text(n + 1) in ("n + 1", "1 + n")
    assert "\\lceil" in to_latex(ceil(n / 2))


# ---------------------------------------------------------------------------
# properties over random trees

LEAVES = st.one_of(
    st.integers(-5, 9).map(Const),
    st.fractions(min_value=-3, max_value=3, max_denominator=5).map(Const),
    st.sampled_from(["x", "y", "n"]).map(lambda s: symbols(s)[0]),
)


def _combine(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: t[0] + t[1]),
        st.tuples(children, children).map(lambda t: t[0] * t[1]),
        st.tuples(children, st.integers(0, 3)).map(lambda t: t[0] ** t[1]),
        children.map(ceil),
        children.map(floor),
        st.tuples(children, children).map(lambda t: smax(t[0], t[1])),
        st.tuples(children, children).map(lambda t: smin(t[0], t[1])),
    )


TREES = st.recursive(LEAVES, _combine, max_leaves=12)
BINDINGS = st.fixed_dictionaries({
    "x": st.fractions(min_value=-4, max_value=4, max_denominator=7),
    "y": st.integers(-6, 6),
    "n": st.integers(1, 9),
})


@settings(max_examples=1000, deadline=None)
@given(TREES, BINDINGS)
def test_simplify_preserves_value(e, b):
    assert evaluate(simplify(e), b) == evaluate(e, b)


@settings(max_examples=300, deadline=None)
@given(TREES)
def test_simplify_idempotent(e):
    once = simplify(e)
    assert simplify(once) == once


@settings(max_examples=300, deadline=None)
@given(TREES, BINDINGS)
def test_substitution_then_evaluation(e, b):
    partial = subs(e, {"x": Const(b["x"])})
    assert evaluate(partial, {"y": b["y"], "n": b["n"]}) == evaluate(e, b)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.1, 50), st.floats(0.1, 50))
def test_float_trees_within_tolerance(a, c):
    e = log2(x) * c + a * x
    val = evaluate(simplify(e), {"x": 3.0})
    assert val == pytest.approx(math.log2(3.0) * c + a * 3.0, rel=1e-12)


def test_exprs_are_hashable():
    assert isinstance(n + 1, SymExpr)
    assert hash(simplify(n + 1)) == hash(simplify(1 + n))

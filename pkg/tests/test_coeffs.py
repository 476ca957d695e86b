from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import ratfuncs
from wpva.coeffs import K, ONE, ZERO, RatFunc, as_coeff, parse_ratfunc

k = sympy.Symbol("k")


def to_sympy(r: RatFunc):
    num = sum(sympy.Rational(int(c.p), int(c.q)) * k**i for i, c in enumerate(r.num.coeffs()))
    den = sum(sympy.Rational(int(c.p), int(c.q)) * k**i for i, c in enumerate(r.den.coeffs()))
    return num / den


def same(a: RatFunc, expr) -> bool:
    return sympy.simplify(to_sympy(a) - expr) == 0


@given(ratfuncs(), ratfuncs())
def test_arithmetic_matches_sympy(a, b):
    sa, sb = to_sympy(a), to_sympy(b)
    assert same(a + b, sa + sb)
    assert same(a - b, sa - sb)
    assert same(a * b, sa * sb)
    if not b.is_zero():
        assert same(a / b, sa / sb)


@given(ratfuncs(), ratfuncs(), ratfuncs())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == ZERO
    if not a.is_zero():
        assert a * a.inverse() == ONE


@given(ratfuncs())
def test_canonical_form_makes_hash_structural(a):
    b = RatFunc(a.num * 3, a.den * 3)
    assert a == b and hash(a) == hash(b)
    assert a.den.leading_coefficient() == 1


@given(ratfuncs())
def test_render_parse_round_trip(a):
    assert parse_ratfunc(a.render()) == a


@given(ratfuncs(), st.integers(-5, 5))
def test_evaluate_matches_sympy(a, v):
    expr = to_sympy(a)
    try:
        val = a.evaluate(v)
    except ZeroDivisionError:
        assert sympy.denom(sympy.together(expr)).subs(k, v) == 0
        return
    assert sympy.Rational(val.numerator, val.denominator) == sympy.nsimplify(expr.subs(k, v))


def test_constants_hash_like_fractions():
    assert hash(as_coeff(Fraction(3, 4))) == hash(Fraction(3, 4))
    assert as_coeff(2) == 2 and as_coeff(0) is ZERO


def test_bad_points_are_factors():
    r = (K**2 - 1) / (K * (K - 2))
    facs = sorted(str(f) for f in r.bad_points())
    assert len(facs) == 4


def test_errors():
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()
    with pytest.raises(ZeroDivisionError):
        RatFunc(1, 0)
    with pytest.raises(ValueError):
        parse_ratfunc("k^^2")
    with pytest.raises(ValueError):
        K.to_fraction()
    with pytest.raises(TypeError):
        as_coeff(1.5)

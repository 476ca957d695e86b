import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.calculus.euler import euler_equations

from conftest import MIXED_VARS
from wpva.coeffs import K
from wpva.diffpoly import (Atom, DiffPoly, Variable, antiderivative, count_monomials, d,
                           is_total_derivative, monomials_of_weight, parse, partial,
                           random_diffpoly, variational)

seeds = st.integers(0, 10**6)
EVEN = (Variable("u", 0, Fraction(1)), Variable("w", 0, Fraction(2)))

x, ks = sympy.symbols("x k")
FUNCS = {v.name: sympy.Function(v.name)(x) for v in EVEN}


def to_sympy(p: DiffPoly):
    """Even polynomials as sympy expressions in u(x), w(x) and k."""
    out = 0
    for m, c in p.terms.items():
        num = sum(sympy.Rational(int(a.p), int(a.q)) * ks**i for i, a in enumerate(c.num.coeffs()))
        den = sum(sympy.Rational(int(a.p), int(a.q)) * ks**i for i, a in enumerate(c.den.coeffs()))
        term = num / den
        for atom, e in m:
            term *= sympy.diff(FUNCS[atom.var.name], x, atom.n) ** e
        out += term
    return out


def rand(seed, variables=MIXED_VARS, w=3, terms=4):
    return random_diffpoly(variables, w, random.Random(seed), terms=terms)


def homogeneous_parity(p):
    parts = p.parity_parts()
    return next(iter(parts.items())) if parts else (0, p)


@given(seeds)
def test_total_derivative_matches_sympy(seed):
    p = rand(seed, EVEN)
    assert sympy.simplify(to_sympy(d(p)) - sympy.diff(to_sympy(p), x)) == 0


def euler_lagrange(expr, f, order=8):
    """sum_n (-D)^n dL/d f^(n), computed by sympy on jet symbols."""
    jets = [sympy.Symbol(f"j{n}") for n in range(order)]
    subs = {sympy.diff(f, x, n): jets[n] for n in reversed(range(order))}
    back = {jets[n]: sympy.diff(f, x, n) for n in range(order)}
    flat = sympy.sympify(expr).subs(subs)
    return sum((-1) ** n * sympy.diff(sympy.diff(flat, jets[n]).subs(back), x, n) for n in range(order))


def test_euler_lagrange_oracle_agrees_with_sympy():
    u = FUNCS["u"]
    L = u * sympy.diff(u, x) ** 2 + u ** 3
    assert sympy.simplify(euler_lagrange(L, u) - euler_equations(L, [u], x)[0].lhs) == 0


@given(seeds)
def test_variational_matches_euler_lagrange(seed):
    p = rand(seed, EVEN)
    for v in EVEN:
        expected = euler_lagrange(to_sympy(p), FUNCS[v.name])
        assert sympy.simplify(to_sympy(variational(p, v)) - expected) == 0


@given(seeds, seeds)
def test_leibniz_and_supercommutativity(s1, s2):
    a = rand(s1)
    b = rand(s2)
    assert d(a * b) == d(a) * b + a * d(b)
    pa, a1 = homogeneous_parity(a)
    pb, b1 = homogeneous_parity(b)
    sign = -1 if pa and pb else 1
    assert a1 * b1 == (b1 * a1).scale(sign)


@given(seeds, seeds, seeds)
def test_ring_axioms(s1, s2, s3):
    a, b, c = rand(s1, terms=2), rand(s2, terms=2), rand(s3, terms=2)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(seeds, seeds)
def test_partial_graded_leibniz(s1, s2):
    a = rand(s1)
    b = rand(s2)
    pa, a1 = homogeneous_parity(a)
    for v in MIXED_VARS:
        at = Atom.get(v, 1)
        sign = -1 if (at.odd and pa) else 1
        assert partial(a1 * b, at) == partial(a1, at) * b + (a1 * partial(b, at)).scale(sign)


@given(seeds)
def test_total_derivatives_are_recognized(seed):
    p = rand(seed)
    dp = d(p)
    for v in MIXED_VARS:
        assert variational(dp, v).is_zero()
    ok, q = is_total_derivative(dp)
    assert ok and d(q) == dp
    assert d(antiderivative(dp)) == dp


def test_not_total_derivative():
    u = EVEN[0]
    assert not is_total_derivative(u() * u())[0]
    assert antiderivative(u() * u()) is None
    assert not variational(u() * u(), u).is_zero()


@given(seeds)
def test_render_parse_round_trip(seed):
    p = rand(seed, terms=6)
    assert parse(p.render(), MIXED_VARS) == p


def test_parse_infix():
    u = EVEN[0]
    p = parse("(u + 2)^2 - k*u[2]/3", EVEN)
    assert p == u() * u() + u().scale(4) + DiffPoly.constant(4) - u(2).scale(K / 3)


@pytest.mark.parametrize("bad", ["u[", "v", "u +", "u / u", "u ] 2", "k k"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse(bad, EVEN)


def test_odd_square_vanishes():
    psi = MIXED_VARS[2]
    assert (psi() * psi()).is_zero()
    assert not (psi() * psi(1)).is_zero()


def test_count_matches_enumeration():
    for twice in range(1, 11):
        w = Fraction(twice, 2)
        assert count_monomials(MIXED_VARS, w) == len(monomials_of_weight(MIXED_VARS, w))


def test_weight_grading_of_derivative():
    p = parse("u*w[1] + u[3]", EVEN)
    assert p.weights() == {Fraction(4)}
    assert d(p).weights() == {Fraction(5)}


def test_variable_validation():
    with pytest.raises(ValueError):
        Variable("k")

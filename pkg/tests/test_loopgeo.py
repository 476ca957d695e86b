import itertools
from fractions import Fraction

import pytest
import sympy

from wpva.coeffs import K
from wpva.diffpoly import DiffPoly
from wpva.liealg import build_simple, default_y, grade, parse_element, partition_triple, principal_triple
from wpva.loopgeo import (LoopContext, LoopElt, bernoulli_series, left_right_commutator_suite, verify_left_right_commutator,
                          verify_dual_frame_derivative, verify_screening_realization)

t, q, eps, ks = sympy.symbols("t q epsilon k")


def context(label, N, parts=None, y=None):
    alg = build_simple(label)
    tr = partition_triple(alg, parts) if parts else principal_triple(alg)
    g = grade(alg, tr)
    y = parse_element(alg, y) if y else default_y(alg, g)
    return LoopContext(alg, tr, g, y, N)


def test_bernoulli_series_matches_sympy():
    x = sympy.Symbol("x")
    ser = sympy.series(x / (sympy.exp(x) - 1), x, 0, 9).removeO()
    expected = [ser.coeff(x, j) for j in range(9)]
    assert [sympy.Rational(b.numerator, b.denominator) for b in bernoulli_series(8)] == expected


# sympy matrix oracle --------------------------------------------------------------

def sym_coeff(c):
    num = sum(sympy.Rational(int(a.p), int(a.q)) * ks**i for i, a in enumerate(c.num.coeffs()))
    den = sum(sympy.Rational(int(a.p), int(a.q)) * ks**i for i, a in enumerate(c.den.coeffs()))
    return num / den


def sym_poly(p: DiffPoly):
    out = 0
    for m, c in p.terms.items():
        term = sym_coeff(c)
        for a, e in m:
            assert a.n == 0
            term *= sympy.Symbol(a.var.name) ** e
        out += term
    return sympy.expand(out)


def trunc(m, qmax, eps_max=None):
    def entry(e):
        e = sympy.expand(e)
        out = 0
        for term in sympy.Add.make_args(e):
            dq = sympy.degree(term, q)
            de = sympy.degree(term, eps) if eps_max is not None else 0
            if dq <= qmax and (eps_max is None or de <= eps_max):
                out += term
        return out
    return m.applyfunc(entry)


def mexp(a, qmax, eps_max=None):
    n = a.shape[0]
    out = sympy.eye(n)
    term = sympy.eye(n)
    for j in range(1, qmax + 3):
        term = trunc(term * a / j, qmax, eps_max)
        if term == sympy.zeros(n):
            break
        out += term
    return out


def mlog(m, qmax, eps_max=None):
    n = m.shape[0]
    x = trunc(m - sympy.eye(n), qmax, eps_max)
    out = sympy.zeros(n)
    term = sympy.eye(n)
    for j in range(1, qmax + 3):
        term = trunc(term * x, qmax, eps_max)
        if term == sympy.zeros(n):
            break
        out += sympy.Rational((-1) ** (j + 1), j) * term
    return out


def to_matrix(ctx, X: LoopElt, with_q=False):
    alg = ctx.alg
    size = len(alg.matrices[0])
    out = sympy.zeros(size)
    for (i, n), c in X.terms.items():
        w = q ** ctx.deg((i, n)) if with_q else 1
        out += sym_poly(c) * w * t**n * sympy.Matrix(alg.matrices[i]).applyfunc(
            lambda v: sympy.Rational(v.numerator, v.denominator))
    return out


def Z_matrix(ctx):
    return to_matrix(ctx, ctx.Z, with_q=True)


def test_adjoint_matches_matrix_conjugation():
    for label, N in (("A1", 3), ("A2", 2)):
        ctx = context(label, N)
        Z = Z_matrix(ctx)
        s = to_matrix(ctx, ctx.s)
        # each power of q adds one unit of degree on top of deg(s) = -1
        conj = trunc(mexp(Z, N + 1) * s * mexp(-Z, N + 1), N + 1)
        expected = conj.applyfunc(lambda e: sympy.expand(e.subs(q, 1)))
        got = to_matrix(ctx, ctx.adjoint(ctx.s, N)).applyfunc(sympy.expand)
        assert sympy.simplify(got - expected) == sympy.zeros(got.shape[0])


def test_left_field_matches_first_order_bch():
    ctx = context("A1", 3)
    N = ctx.N
    Z = Z_matrix(ctx)
    for b in ctx.pos_basis:
        u = LoopElt.basis(b)
        U = to_matrix(ctx, u, with_q=True)
        prod = trunc(mexp(-eps * U, N, 1) * mexp(Z, N, 1), N, 1)
        logm = mlog(prod, N, 1)
        dZ = logm.applyfunc(lambda e: sympy.expand(e).coeff(eps, 1))
        field = ctx.left_field(u)
        got = sympy.zeros(2)
        for bb, v in ctx.z.items():
            got += sym_poly(field.on(v)) * q ** ctx.deg(bb) * t ** bb[1] * sympy.Matrix(
                ctx.alg.matrices[bb[0]]).applyfunc(lambda x: sympy.Rational(x.numerator, x.denominator))
        diff = (got - dZ).applyfunc(sympy.expand)
        assert diff == sympy.zeros(2), (b, diff)


def test_sl2_E_value():
    ctx = context("A1", 4)
    (h,) = ctx.grading.piece(0)
    assert sym_poly(ctx.E(h)) == sympy.expand(2 * ks * sympy.Symbol("z_e1_t0") - 2 * ks * sympy.Symbol("z_f1_t1"))


@pytest.mark.parametrize("label,N,parts,y", [
    ("A1", 4, None, None), ("A2", 3, None, None), ("A3", 2, None, None), ("C2", 2, None, None),
    ("C2", 3, [2, 2], "e2_1 + 2*e0_1"),
])
def test_geometric_identities(label, N, parts, y):
    ctx = context(label, N, parts, y)
    results = [left_right_commutator_suite(ctx)] + verify_screening_realization(ctx) + [verify_dual_frame_derivative(ctx)]
    for r in results:
        assert r.passed, r.to_json()
        assert r.checked > 0
    windows = {r.name: r.window for r in results}
    assert windows["commutator_with_s"] == N - 1
    assert windows["dual_frame_derivative"] == N - 1


def test_perturbed_E_is_detected():
    ctx = context("A1", 4)
    original = ctx.E
    ctx.E = lambda a: original(a).scale(2)
    names = {r.name: r.passed for r in verify_screening_realization(ctx)}
    assert not names["left_action_on_E"]


def test_wrong_sign_right_action_is_detected():
    ctx = context("A2", 3)
    original = ctx.right_field

    def flipped(v):
        f = original(v)
        f.images = {k: -p for k, p in f.images.items()}
        return f

    ctx.right_field = flipped
    r = verify_left_right_commutator(ctx, LoopElt.basis(ctx.pos_basis[0]), ctx.s)
    assert not r.passed and r.counterexample is not None


def test_left_action_is_antihomomorphism_of_brackets():
    # [u^L, w^L] = ([u, w])^L for the left action K -> exp(-eps u) K
    ctx = context("A1", 4)
    basis = [b for b in ctx.pos_basis if ctx.deg(b) <= 2]
    for b1, b2 in itertools.combinations(basis, 2):
        u, w = LoopElt.basis(b1), LoopElt.basis(b2)
        uL, wL = ctx.left_field(u), ctx.left_field(w)
        br = ctx.bracket(u, w)
        if br.is_zero():
            continue
        bL = ctx.left_field(br)
        for bb in ctx.coords_up_to(ctx.N):
            z = ctx.z[bb]
            lhs = uL(wL.on(z)) - wL(uL.on(z))
            assert lhs == bL.on(z)


def test_context_guards():
    alg = build_simple("A2")
    tr = partition_triple(alg, [2, 1])
    g = grade(alg, tr)
    with pytest.raises(ValueError):
        LoopContext(alg, tr, g, {}, 2)
    with pytest.raises(ValueError):
        context("A1", 0)
    ctx = context("A1", 2)
    with pytest.raises(ValueError):
        ctx.left_field(LoopElt.basis((ctx.grading.piece(0)[0], 0)))

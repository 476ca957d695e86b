import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wpva.coeffs import K
from wpva.diffpoly import DiffPoly, Variable, d, random_diffpoly
from wpva.lambdas import (BracketTable, LambdaPoly, check_jacobi, check_skew, jacobi_residual,
                          master_bracket, skew_residual, subst_arrow)
from wpva.liealg import build_algebra
from wpva.pva import affine_pva

seeds = st.integers(0, 10**6)

L = Variable("L", 0, Fraction(2))
PSI = Variable("psi", 1, Fraction(1, 2))
U = Variable("u", 0, Fraction(1))


def virasoro(c=K, conformal=2):
    """{L_l L} = (d + conformal*l) L + c/12 l^3."""
    entry = LambdaPoly({0: d(L()), 1: L().scale(conformal), 3: DiffPoly.constant(c / 12)})
    return BracketTable([L], {("L", "L"): entry})


def super_table():
    """Free fermion plus Heisenberg: {psi_l psi} = 1, {u_l u} = k l."""
    return BracketTable([U, PSI], {("psi", "psi"): LambdaPoly.const(DiffPoly.constant(1)),
                                   ("u", "u"): LambdaPoly({1: DiffPoly.constant(K)})})


def neveu_schwarz():
    """N=1 super-Virasoro: L of weight 2, odd G of weight 3/2."""
    G = Variable("G", 1, Fraction(3, 2))
    c = K
    e = {
        ("L", "L"): LambdaPoly({0: d(L()), 1: L().scale(2), 3: DiffPoly.constant(c / 12)}),
        ("L", "G"): LambdaPoly({0: d(G()), 1: G().scale(Fraction(3, 2))}),
        ("G", "L"): LambdaPoly({0: d(G()).scale(Fraction(1, 2)), 1: G().scale(Fraction(3, 2))}),
        ("G", "G"): LambdaPoly({0: L().scale(2), 2: DiffPoly.constant(c / 3)}),
    }
    return BracketTable([L, G], e)


def test_virasoro_is_a_pva():
    assert check_skew(virasoro())[0]
    assert check_jacobi(virasoro())[0]


def test_neveu_schwarz_is_a_super_pva():
    t = neveu_schwarz()
    t.validate()
    assert check_skew(t)[0]
    assert check_jacobi(t)[0]


def test_wrong_conformal_weight_breaks_skew():
    ok, witness = check_skew(virasoro(conformal=3))
    assert not ok and witness == ("L", "L")


def test_non_invariant_form_breaks_jacobi():
    alg = build_algebra("sl2")
    table = affine_pva(alg).table
    e, f, h = (table.variable(n) for n in ("e1", "f1", "h1"))
    entries = dict(table.entries)
    entries[("e1", "f1")] = LambdaPoly({0: h().scale(2), 1: DiffPoly.constant(K)})
    entries[("f1", "e1")] = LambdaPoly({0: h().scale(-2), 1: DiffPoly.constant(K)})
    broken = BracketTable(table.variables, entries)
    assert check_skew(broken)[0]
    assert not check_jacobi(broken)[0]


def _tables():
    return [affine_pva(build_algebra("sl2")).table, super_table(), neveu_schwarz()]


@given(seeds, seeds, st.integers(0, 2))
def test_sesquilinearity(s1, s2, which):
    t = _tables()[which]
    rng = random.Random(s1 * 7 + s2)
    a = random_diffpoly(t.variables, 3, rng, terms=2)
    b = random_diffpoly(t.variables, 3, rng, terms=2)
    ab = master_bracket(a, b, t)
    # {da_l b} = -l {a_l b};  {a_l db} = (l + d){a_l b}
    assert master_bracket(d(a), b, t) == LambdaPoly({n + 1: c for n, c in ab.items()}).scale(-1)
    assert master_bracket(a, d(b), t) == ab.shift(1)


@given(seeds, st.integers(0, 2))
def test_left_leibniz(seed, which):
    t = _tables()[which]
    rng = random.Random(seed)
    a, b, c = (random_diffpoly(t.variables, 2, rng, terms=2) for _ in range(3))
    for pa, ap in a.parity_parts().items():
        for pb, bp in b.parity_parts().items():
            sign = -1 if (pa and pb) else 1
            lhs = master_bracket(ap, bp * c, t)
            rhs = master_bracket(ap, bp, t).rmul(c) + master_bracket(ap, c, t).lmul(bp).scale(sign)
            assert lhs == rhs


@given(seeds, st.integers(0, 2))
def test_skew_on_random_elements(seed, which):
    t = _tables()[which]
    rng = random.Random(seed)
    a, b = (random_diffpoly(t.variables, 3, rng, terms=2) for _ in range(2))
    for ap in a.parity_parts().values():
        for bp in b.parity_parts().values():
            assert skew_residual(ap, bp, t).is_zero()


@given(seeds)
def test_jacobi_on_random_elements(seed):
    t = affine_pva(build_algebra("sl2")).table
    rng = random.Random(seed)
    a, b, c = (random_diffpoly(t.variables, 2, rng, terms=2) for _ in range(3))
    assert jacobi_residual(a, b, c, t) == {}


def test_subst_arrow_directions():
    p = LambdaPoly({1: U()})
    right = subst_arrow(p, U(), "right")
    assert right == LambdaPoly({1: U() * U(), 0: U() * d(U())})
    left = subst_arrow(p, U(), "left")
    assert left == LambdaPoly({1: (U() * U()).scale(-1), 0: d(U() * U()).scale(-1)})
    with pytest.raises(ValueError):
        subst_arrow(p, U(), "up")


def test_json_round_trip():
    for t in _tables():
        again = BracketTable.from_json(t.to_json())
        assert again.entries == t.entries
        assert [v.name for v in again.variables] == [v.name for v in t.variables]


def test_unknown_generator():
    with pytest.raises(KeyError):
        master_bracket(L(), L(), super_table())

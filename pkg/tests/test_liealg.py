import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from wpva.coeffs import as_coeff
from wpva.liealg import (LieAlgebra, build_algebra, build_gl, build_simple, check_condition_F,
                         default_y, grade, loop_matrix, parse_element, partition_triple,
                         principal_triple, render_element, scan_y)

SIMPLE = ["A1", "A2", "A3", "C2", "C3"]


def mat(alg, x):
    m = sympy.zeros(len(alg.matrices[0]))
    for i, c in x.items():
        m += sympy.Rational(c.numerator, c.denominator) * sympy.Matrix(alg.matrices[i])
    return m


def dims(label):
    n = int(label[1:])
    return n * (n + 2) if label[0] == "A" else n * (2 * n + 1)


def cartan_matrix(alg):
    simple = alg.simple_roots
    coroots = []
    for i in simple:
        t = alg.bracket({i: 1}, {alg.neg(i): 1})
        scale = 2 / alg.bracket(t, {i: 1})[i]
        coroots.append({c: v * scale for c, v in t.items()})
    return [[alg.bracket(coroots[i], {simple[j]: 1}).get(simple[j], 0) for j in range(len(simple))]
            for i in range(len(simple))]


@pytest.mark.parametrize("label", SIMPLE)
def test_dimensions_and_cartan_matrix(label):
    alg = build_simple(label)
    assert alg.dim == dims(label)
    n = alg.rank
    cm = cartan_matrix(alg)
    for i in range(n):
        assert cm[i][i] == 2
        for j in range(n):
            if abs(i - j) > 1:
                assert cm[i][j] == 0
    if label[0] == "A":
        assert all(cm[i][i + 1] == cm[i + 1][i] == -1 for i in range(n - 1))
    else:  # one double bond at the end
        off = sorted((cm[n - 2][n - 1], cm[n - 1][n - 2]))
        assert off == [-2, -1]


@pytest.mark.parametrize("label", SIMPLE + ["gl1", "gl2", "gl3"])
def test_structure_constants_match_matrix_commutators(label):
    alg = build_algebra(label)
    alg.validate()
    assert alg.jacobi_violations() == []
    if alg.matrices is None:
        assert alg.dim == 1 and not alg.struct
        return
    for i, j in itertools.product(range(alg.dim), repeat=2):
        a, b = sympy.Matrix(alg.matrices[i]), sympy.Matrix(alg.matrices[j])
        assert a * b - b * a == mat(alg, alg.bracket_basis(i, j))


@pytest.mark.parametrize("label", SIMPLE)
def test_form_is_proportional_to_trace_and_normalized(label):
    alg = build_simple(label)
    ratios = set()
    for i, j in itertools.product(range(alg.dim), repeat=2):
        tr = (sympy.Matrix(alg.matrices[i]) * sympy.Matrix(alg.matrices[j])).trace()
        if alg.form[i][j] or tr:
            ratios.add(sympy.Rational(tr) / sympy.Rational(alg.form[i][j].numerator, alg.form[i][j].denominator))
    assert len(ratios) == 1
    th = alg.highest_root
    h_theta = alg.bracket({th: 1}, {alg.neg(th): 1})
    assert alg.kappa(h_theta, h_theta) == 2
    assert alg.form[th][alg.neg(th)] == 1


def test_sl2_form_gives_level_two_k():
    alg = build_simple("A1")
    assert alg.kappa({0: 1}, {0: 1}) == 2


@pytest.mark.parametrize("label", ["gl1", "gl2", "gl3", "A2", "C2"])
def test_center(label):
    alg = build_algebra(label)
    expected = 1 if label.startswith("gl") else 0
    assert len(alg.center()) == expected


@pytest.mark.parametrize("label", SIMPLE + ["gl2"])
def test_json_round_trip(label):
    alg = build_algebra(label)
    again = LieAlgebra.from_json(alg.to_json())
    assert again.labels == alg.labels and again.struct == alg.struct and again.form == alg.form


def test_invalid_json_is_rejected():
    data = build_algebra("sl2").to_json()
    data["form"] = [["h1", "h1", "2"], ["e1", "f1", "2"]]
    with pytest.raises(ValueError):
        LieAlgebra.from_json(data)


@given(st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_element_text_round_trip(coeffs):
    alg = build_simple("A2")
    x = {i: Fraction(c, 2) for i, c in enumerate(coeffs) if c}
    assert parse_element(alg, render_element(alg, x)) == x


def test_parse_element_errors():
    alg = build_simple("A1")
    with pytest.raises(ValueError):
        parse_element(alg, "2*zz")
    assert parse_element(alg, "0") == {}


@pytest.mark.parametrize("label,depth", [("A1", 1), ("A2", 2), ("A3", 3), ("C2", 3), ("C3", 5)])
def test_principal_grading(label, depth):
    alg = build_simple(label)
    tr = principal_triple(alg)
    assert tr.check(alg)
    g = grade(alg, tr)
    assert g.depth == depth and g.integral
    assert sorted(g.Pi) == sorted(alg.simple_roots)
    assert g.piece(0) == alg.cartan
    assert sum(len(v) for v in g.pieces.values()) == alg.dim


def jordan_type(m):
    """Nilpotent Jordan type from ranks of powers (sympy)."""
    n = m.shape[0]
    ranks = [n]
    p = m
    while ranks[-1]:
        ranks.append(p.rank())
        p = p * m
    ge = [ranks[j] - ranks[j + 1] for j in range(len(ranks) - 1)]
    parts = []
    for j, c in enumerate(ge):
        parts += [j + 1] * (c - (ge[j + 1] if j + 1 < len(ge) else 0))
    return sorted(parts, reverse=True)


@pytest.mark.parametrize("label,parts", [
    ("A2", [2, 1]), ("A3", [2, 2]), ("A3", [3, 1]), ("A3", [2, 1, 1]),
    ("C2", [2, 2]), ("C2", [2, 1, 1]), ("C2", [4]), ("C3", [2, 2, 2]), ("C3", [4, 2]),
])
def test_partition_triples(label, parts):
    alg = build_simple(label)
    tr = partition_triple(alg, parts)
    assert tr.check(alg)
    assert jordan_type(mat(alg, tr.f)) == parts
    g = grade(alg, tr)
    # dimension of g_0 + g_1/2 equals the centralizer dimension of f
    ad_f = sympy.Matrix([[c for c in row] for row in alg.ad_matrix(tr.f)])
    cent = alg.dim - ad_f.rank()
    assert len(g.piece(0)) + len(g.piece(Fraction(1, 2))) == cent


@pytest.mark.parametrize("label,parts", [("C2", [3, 1]), ("A2", [2, 2]), ("C2", [0, 4])])
def test_invalid_partitions(label, parts):
    with pytest.raises(ValueError):
        partition_triple(build_simple(label), parts)


def numeric_semisimple(alg, f, y, tau):
    lm = loop_matrix(alg, f, y)
    m = sympy.Matrix([[sympy.Rational(str(c.evaluate(tau))) for c in row] for row in lm.rows])
    return m.is_diagonalizable()


@pytest.mark.parametrize("label", ["A1", "A2", "C2"])
def test_F_principal_and_sympy_oracle(label):
    alg = build_simple(label)
    tr = principal_triple(alg)
    g = grade(alg, tr)
    y = default_y(alg, g)
    rep = check_condition_F(alg, tr, g, y)
    assert rep.passed
    assert numeric_semisimple(alg, tr.f, y, 3)
    zero = check_condition_F(alg, tr, g, {})
    assert not zero.F2 and not zero.passed
    assert not numeric_semisimple(alg, tr.f, {}, 3)


def test_F_sp4_two_two():
    alg = build_simple("C2")
    tr = partition_triple(alg, [2, 2])
    g = grade(alg, tr)
    good = parse_element(alg, "e2_1 + 2*e0_1")
    assert check_condition_F(alg, tr, g, good).passed
    assert numeric_semisimple(alg, tr.f, good, 2)
    lone = check_condition_F(alg, tr, g, parse_element(alg, "e2_1"))
    assert not lone.F2 and "F2" in lone.witnesses
    assert not numeric_semisimple(alg, tr.f, parse_element(alg, "e2_1"), 2)
    found = scan_y(alg, tr, g)
    assert found is not None and check_condition_F(alg, tr, g, found).passed


def test_F_half_integral_grading_fails_F1():
    alg = build_simple("A2")
    tr = partition_triple(alg, [2, 1])
    g = grade(alg, tr)
    assert not g.integral
    y = {g.piece(g.depth)[0]: Fraction(1)}
    assert not check_condition_F(alg, tr, g, y).F1


def test_F_rejects_y_outside_top_degree():
    alg = build_simple("A1")
    tr = principal_triple(alg)
    g = grade(alg, tr)
    with pytest.raises(ValueError):
        check_condition_F(alg, tr, g, parse_element(alg, "f1"))


def test_gl_has_no_principal_triple():
    with pytest.raises(ValueError):
        principal_triple(build_gl(2))

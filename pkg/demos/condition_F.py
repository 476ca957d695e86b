"""Checking condition (F) for cyclic elements s = f + y t^-1.

ad_s is a matrix over Q(tau) with tau = t^-1; semisimplicity is decided by a
squarefree minimal polynomial.  For sp4 with the (2,2) nilpotent the choice of
y matters: e2_1 alone fails, e2_1 + 2*e0_1 passes.
"""
from wpva import (build_simple, check_condition_F, default_y, grade, parse_element, partition_triple,
                  principal_triple)

for label in ("A1", "A2", "C2"):
    alg = build_simple(label)
    tr = principal_triple(alg)
    g = grade(alg, tr)
    rep = check_condition_F(alg, tr, g, default_y(alg, g))
    print(f"{label} principal, y = e_theta: pass={rep.passed}  {rep.witnesses['minimal_polynomial']}")
    rep0 = check_condition_F(alg, tr, g, {})
    print(f"{label} principal, y = 0:       pass={rep0.passed}  F2={rep0.F2}")

alg = build_simple("C2")
tr = partition_triple(alg, [2, 2])
g = grade(alg, tr)
for text in ("e2_1", "e2_1 + 2*e0_1"):
    rep = check_condition_F(alg, tr, g, parse_element(alg, text))
    print(f"C2 (2,2), y = {text}: F1={rep.F1} F2={rep.F2} F3={rep.F3}")

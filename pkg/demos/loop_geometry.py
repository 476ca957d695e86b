"""The W-algebra generators as functions on a prounipotent loop group.

K = exp(Z) with Z in the positive part of the loop algebra; E_a = k (e_a | K s K^-1)
for a in g_0.  The script prints E for sl2 and runs the exact identity checks
at truncation N = 4, reporting the degree window in which each is exact.
"""
from wpva import build_simple, default_y, grade, principal_triple
from wpva.loopgeo import LoopContext, left_right_commutator_suite, verify_dual_frame_derivative, verify_screening_realization

alg = build_simple("A1")
tr = principal_triple(alg)
g = grade(alg, tr)
ctx = LoopContext(alg, tr, g, default_y(alg, g), N=4)

print("coordinates:", [ctx.z[b].name for b in ctx.pos_basis])
for a in g.piece(0):
    print(f"E_{alg.labels[a]} =", ctx.E(a).render())

for r in [left_right_commutator_suite(ctx)] + verify_screening_realization(ctx) + [verify_dual_frame_derivative(ctx)]:
    print(f"{r.name:34s} pass={r.passed} window<= {r.window} checked={r.checked}")

"""From sl2 to the KdV hierarchy.

The classical W-algebra of sl2 is the joint kernel of one screening
derivation on the Heisenberg PVA generated by h.  Its weight-2 generator is a
Virasoro density, and integrals of kernel elements of weight 2 and 4 commute.
"""
from fractions import Fraction

from wpva import build_simple, build_system, generators, grade, hamiltonians, joint_kernel, principal_triple
from wpva.pva import local_bracket

alg = build_simple("A1")
triple = principal_triple(alg)
system = build_system(alg, triple, grade(alg, triple))

kb = joint_kernel(system, 4)
print("kernel dimensions by weight:", {str(w): n for w, n in kb.dims().items()})
print("levels to avoid:", kb.bad_k)

(W,) = generators(kb)[Fraction(2)]
print("generator W =", W.render())
print("{W_lambda W} =", system.pva.bracket(W, W).render())

hr = hamiltonians(kb, [2, 4])
for w, i, F in hr.all_functionals():
    print(f"H[{w}#{i}] =", F.render())
H2, H4 = hr.functionals[Fraction(2)][0], hr.functionals[Fraction(4)][0]
print("[H2, H4] =", local_bracket(H2, H4, system.pva).render())

"""Screening derivations on V^k(g_0) (x) F(g_1/2) and their joint kernel.

For alpha in Pi the derivation Q_alpha is fixed on generators by

    alpha in Pi_1:    Q e_b = (f | [e_b, e_a]),            Q phi_b = 0
    alpha in Pi_1/2:  Q e_b = sum_{g in [a]} c^g_{b,a} phi_g, Q phi_b = (f | [e_a, e_b])

and extended to derivatives through the commutator rule

    Q_a(x') = d(Q_a x) + (1/k) sum_{b in g_0, g in [a]} c^g_{a,b} e_bbar Q_g(x).

The joint kernel is solved weight by weight over Q(k).
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .coeffs import K, ONE, ZERO, as_coeff
from .diffpoly import (Atom, DiffPoly, Variable, count_monomials, d, mono_key, monomials_of_weight,
                       partial)
from .lambdas import LambdaPoly
from .linalg import Echelon, inverse_dense, nullspace
from .pva import LocalFunctional, PvaSpec, affine_pva, bg_system, local_bracket, tensor

__all__ = [
    "ScreeningFamily", "ScreeningSystem", "KernelBasis", "ResourceLimitError",
    "build_system", "build_family", "apply", "commutator_rhs", "joint_kernel",
    "generators", "check_subalgebra", "hamiltonians", "HamiltonianReport",
]

MONOMIAL_BUDGET = 800  # total monomials over all weights; about a minute of exact elimination


class ResourceLimitError(RuntimeError):
    """The requested weight range exceeds the configured monomial budget."""


@dataclass
class ScreeningFamily:
    """The derivations Q_g for g in one class [alpha] = Delta_{>0} cap (alpha + Q_0)."""

    system: "ScreeningSystem"
    base: int
    members: list
    degree: Fraction
    shift: Fraction = Fraction(0)

    def label(self, alg=None) -> str:
        alg = alg or self.system.alg
        return alg.labels[self.base]

    def apply(self, alpha: int, p: DiffPoly) -> DiffPoly:
        return self.system.apply(alpha, p)


class ScreeningSystem:
    """Everything shared by the screening families of one (g, f) pair."""

    def __init__(self, alg, triple, grading, level=K):
        self.alg = alg
        self.triple = triple
        self.grading = grading
        self.level = as_coeff(level)
        self.g0 = grading.piece(0)
        self.half = grading.piece(Fraction(1, 2))
        self.pos = [i for i, j in grading.degree_of.items() if j > 0]
        # generators and the ambient PVA
        affine = affine_pva(alg, self.level, self.g0, tag="affine(g_0)")
        self.pva: PvaSpec = tensor(affine, bg_system(alg, triple, grading)) if self.half else affine
        self.evar = {i: affine.variable(alg.labels[i]) for i in self.g0}
        self.phivar = {i: self.pva.variable(f"phi_{alg.labels[i]}") for i in self.half}
        self.variables = self.pva.variables
        self._varset = set(self.variables)
        # dual basis of g_0 for the restricted form
        gram = [[alg.form[i][j] for j in self.g0] for i in self.g0]
        ginv = inverse_dense(gram)
        self.ebar = {}
        for a, i in enumerate(self.g0):
            p = DiffPoly()
            for b, j in enumerate(self.g0):
                if ginv[b][a]:
                    p = p + DiffPoly.atom(Atom.get(self.evar[j])).scale(ginv[b][a])
            self.ebar[i] = p
        self.classes = self._classes()
        self.cls_of = {m: c for c in self.classes for m in c}
        self._gen: dict = {}
        self._cache: dict = {}
        self._comm = {a: self._comm_terms(a) for c in self.classes for a in c}
        self.families = [ScreeningFamily(self, a, self.cls_of[a], grading.degree_of[a])
                         for a in grading.Pi]
        for fam in self.families:
            fam.shift = self._shift(fam)

    # classes [alpha] ---------------------------------------------------------
    def _in_q0(self, vec) -> bool:
        alg = self.alg
        rows = [dict(enumerate(alg.roots[i])) for i in self.g0 if alg.roots[i] is not None]
        e = Echelon()
        for r in rows:
            e.add({k: Fraction(v) for k, v in r.items() if v})
        return not e.reduce({k: Fraction(v) for k, v in enumerate(vec) if v})

    def _classes(self) -> list[list[int]]:
        alg, deg = self.alg, self.grading.degree_of
        out = []
        seen = set()
        for a in self.grading.Pi:
            if a in seen:
                continue
            cls = [b for b in self.pos if deg[b] == deg[a] and
                   self._in_q0(tuple(x - y for x, y in zip(alg.roots[b], alg.roots[a])))]
            cls.sort(key=lambda b: alg.roots[b][::-1])
            seen.update(cls)
            out.append(cls)
        return out

    # generator tables -------------------------------------------------------------
    def _c(self, i, j, k) -> Fraction:
        return self.alg.bracket_basis(i, j).get(k, Fraction(0))

    def on_generator(self, alpha: int, v: Variable) -> DiffPoly:
        key = (alpha, v)
        hit = self._gen.get(key)
        if hit is not None:
            return hit
        alg, f = self.alg, self.triple.f
        deg = self.grading.degree_of[alpha]
        out = DiffPoly()
        if v.weight == 1:  # e_b in g_0
            b = alg.index[v.name]
            if deg == 1:
                out = DiffPoly.constant(alg.kappa(f, alg.bracket_basis(b, alpha)))
            else:
                for g in self.cls_of[alpha]:
                    c = self._c(b, alpha, g)
                    if c:
                        out = out + DiffPoly.atom(Atom.get(self.phivar[g])).scale(c)
        else:  # phi_b
            b = alg.index[v.name[4:]]
            if deg != 1:
                out = DiffPoly.constant(alg.kappa(f, alg.bracket_basis(alpha, b)))
        self._gen[key] = out
        return out

    def _comm_terms(self, alpha: int):
        """[(coefficient, e_bbar, gamma)] for (1/k) sum c^g_{alpha,b} e_bbar Q_g."""
        terms = []
        kinv = self.level.inverse()
        for b in self.g0:
            for g in self.cls_of[alpha]:
                c = self._c(alpha, b, g)
                if c:
                    terms.append((kinv * c, self.ebar[b], g))
        return terms

    # action -------------------------------------------------------------------------
    def on_atom(self, alpha: int, a: Atom) -> DiffPoly:
        key = (alpha, a)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if a.n == 0:
            out = self.on_generator(alpha, a.var)
        else:
            prev = Atom.get(a.var, a.n - 1)
            out = d(self.on_atom(alpha, prev))
            for c, eb, g in self._comm[alpha]:
                q = self.on_atom(g, prev)
                if q:
                    out = out + (eb * q).scale(c)
        self._cache[key] = out
        return out

    def apply(self, alpha: int, p: DiffPoly) -> DiffPoly:
        if alpha not in self._comm:
            raise KeyError(f"{self.alg.labels[alpha]} is not a screening index")
        foreign = p.variables() - self._varset
        if foreign:
            raise ValueError(f"foreign generators {sorted(v.name for v in foreign)}")
        out = DiffPoly()
        for a in sorted(p.atoms(), key=lambda a: a.key):
            q = self.on_atom(alpha, a)
            if q:
                out = out + q * partial(p, a)
        return out

    def commutator_rhs(self, alpha: int, p: DiffPoly) -> DiffPoly:
        out = DiffPoly()
        for c, eb, g in self._comm[alpha]:
            q = self.apply(g, p)
            if q:
                out = out + (eb * q).scale(c)
        return out

    def _shift(self, fam: ScreeningFamily) -> Fraction:
        shifts = set()
        for a in fam.members:
            for v in self.variables:
                for n in range(2):
                    img = self.on_atom(a, Atom.get(v, n))
                    for w in img.weights():
                        shifts.add(w - v.weight - n)
        if len(shifts) > 1:
            raise ArithmeticError(f"screening family {fam.label()} is not weight-homogeneous: {shifts}")
        return shifts.pop() if shifts else Fraction(0)

    @property
    def screening_indices(self) -> list[int]:
        return list(self.grading.Pi)

    def weight_step(self) -> Fraction:
        return Fraction(1, 2) if self.half else Fraction(1)


def build_system(alg, triple, grading, level=K) -> ScreeningSystem:
    return ScreeningSystem(alg, triple, grading, level)


def build_family(alg, triple, grading, i: int, level=K, system: ScreeningSystem | None = None) -> ScreeningFamily:
    """The family containing the indecomposable root ``i``."""
    if i not in grading.Pi:
        raise ValueError(f"{alg.labels[i]} is not indecomposable in Delta_>0")
    system = system or ScreeningSystem(alg, triple, grading, level)
    return next(f for f in system.families if f.base == i)


def apply(family: ScreeningFamily, alpha: int, p: DiffPoly) -> DiffPoly:
    return family.system.apply(alpha, p)


def commutator_rhs(family: ScreeningFamily, alpha: int, p: DiffPoly) -> DiffPoly:
    return family.system.commutator_rhs(alpha, p)


# kernel -----------------------------------------------------------------------------

@dataclass
class KernelBasis:
    system: ScreeningSystem
    weight_max: Fraction
    by_weight: dict
    bad_k: list = field(default_factory=list)

    def dims(self) -> dict:
        return {w: len(v) for w, v in self.by_weight.items()}

    def all(self) -> list[tuple[Fraction, DiffPoly]]:
        return [(w, p) for w, ps in self.by_weight.items() for p in ps]


def _echelon_basis(vectors: list[dict]) -> tuple[list[dict], list]:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.basis(), e.pivot_values


def _solve_weight(system: ScreeningSystem, w: Fraction):
    monos = monomials_of_weight(system.variables, w) if w > 0 else [()]
    rows: dict = {}
    for c, m in enumerate(monos):
        p = DiffPoly.monomial(m)
        for a in system.screening_indices:
            for mm, val in system.apply(a, p).terms.items():
                rows.setdefault((a, mm), {})[c] = val
    kern, ech = nullspace(list(rows.values()), len(monos), ONE)
    basis, piv2 = _echelon_basis(kern)
    polys = [DiffPoly({monos[c]: v for c, v in vec.items()}) for vec in basis]
    return polys, list(ech.pivot_values) + list(piv2)


def joint_kernel(system: ScreeningSystem, weight_max, threads: int | None = None,
                 budget: int = MONOMIAL_BUDGET) -> KernelBasis:
    """Per-weight null space of all Q_alpha (alpha in Pi), echelonized so that each
    basis element has leading monomial coefficient 1."""
    weight_max = Fraction(weight_max)
    if weight_max < 0:
        raise ValueError("weight_max must be >= 0")
    step = system.weight_step()
    weights = []
    w = Fraction(0)
    while w <= weight_max:
        weights.append(w)
        w += step
    total = sum(count_monomials(system.variables, w) for w in weights)
    if total > budget:
        raise ResourceLimitError(f"{total} monomials up to weight {weight_max} exceed the budget of {budget}")
    if threads is None:
        threads = int(os.environ.get("WPVA_THREADS", "1") or 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda w: _solve_weight(system, w), weights))
    else:
        results = [_solve_weight(system, w) for w in weights]
    by_weight = {}
    bad = {}
    for w, (polys, pivots) in zip(weights, results):
        by_weight[w] = polys
        for pv in pivots:
            for fac in pv.bad_points():
                bad[str(fac)] = fac
    for w, polys in by_weight.items():
        for p in polys:
            for a in system.screening_indices:
                if not system.apply(a, p).is_zero():
                    raise ArithmeticError("kernel element not annihilated; solver inconsistency")
    bad_k = sorted({_render_k(f) for f in bad.values()})
    return KernelBasis(system, weight_max, by_weight, bad_k)


def _render_k(poly) -> str:
    from .coeffs import RatFunc

    return RatFunc(poly).render("k")


def _vec_of(p: DiffPoly) -> dict:
    return dict(p.terms)


def generators(kb: KernelBasis) -> dict:
    """Per weight, kernel elements independent modulo products and derivatives of
    lower-weight kernel elements (reduced against that span, leading coefficient 1)."""
    out = {}
    weights = sorted(kb.by_weight)
    for w in weights:
        if w == 0:
            continue
        lower = []
        for w2 in weights:
            if w2 > 0 and w - w2 in kb.by_weight and w - w2 > 0 and w2 <= w - w2:
                for a in kb.by_weight[w2]:
                    for b in kb.by_weight[w - w2]:
                        lower.append(a * b)
        if w - 1 in kb.by_weight and w - 1 > 0:
            lower.extend(d(p) for p in kb.by_weight[w - 1])
        monos = sorted({m for p in lower + kb.by_weight[w] for m in p.terms}, key=mono_key)
        col = {m: i for i, m in enumerate(monos)}
        e = Echelon()
        for p in lower:
            e.add({col[m]: c for m, c in p.terms.items()})
        gens = []
        for p in kb.by_weight[w]:
            r = e.reduce({col[m]: c for m, c in p.terms.items()})
            if not r:
                continue
            lead = min(r)
            inv = r[lead].inverse()
            r = {c: v * inv for c, v in r.items()}
            e.add(r)
            gens.append(DiffPoly({monos[c]: v for c, v in r.items()}))
        if gens:
            out[w] = gens
    return out


def check_subalgebra(kb: KernelBasis, pairs_weight: Fraction | None = None):
    """Every lambda-coefficient of {a_l b} for kernel basis elements a, b (weights
    summing to at most ``pairs_weight``) is annihilated by all screenings.
    Returns (ok, witness)."""
    system = kb.system
    if pairs_weight is None:
        pairs_weight = kb.weight_max
    pairs_weight = Fraction(pairs_weight)
    elems = [(w, p) for w, p in kb.all() if w > 0]
    if not elems:
        return True, None
    for (wa, a), (wb, b) in itertools.product(elems, repeat=2):
        if wa + wb > pairs_weight:
            continue
        br = system.pva.bracket(a, b)
        for n, c in br.items():
            for al in system.screening_indices:
                if not system.apply(al, c).is_zero():
                    return False, {"a": a.render(), "b": b.render(), "lambda_power": n,
                                   "screening": system.alg.labels[al]}
    return True, None


@dataclass
class HamiltonianReport:
    functionals: dict  # weight -> list of LocalFunctional
    brackets: list     # (weight_a, i, weight_b, j, LocalFunctional)

    @property
    def commuting(self) -> bool:
        return all(b.is_zero() for *_, b in self.brackets)

    def all_functionals(self) -> list:
        return [(w, i, F) for w, Fs in sorted(self.functionals.items()) for i, F in enumerate(Fs)]


def hamiltonians(kb: KernelBasis, weights) -> HamiltonianReport:
    """Lie(W) classes of kernel elements at the requested weights and all their
    pairwise local brackets (computed in the ambient PVA)."""
    system = kb.system
    funcs = {}
    for w in sorted(Fraction(x) for x in weights):
        if w not in kb.by_weight:
            raise ValueError(f"weight {w} exceeds the computed kernel (weight_max {kb.weight_max})")
        reps = [LocalFunctional(p) for p in kb.by_weight[w]]
        monos = sorted({m for F in reps for m in F.rep.terms}, key=mono_key)
        col = {m: i for i, m in enumerate(monos)}
        e = Echelon()
        chosen = []
        for F in reps:
            if F.is_zero():
                continue
            if e.add({col[m]: c for m, c in F.rep.terms.items()}) is not None:
                chosen.append(F)
        funcs[w] = chosen
    flat = [(w, i, F) for w, Fs in funcs.items() for i, F in enumerate(Fs)]
    brackets = []
    for (wa, i, F), (wb, j, G) in itertools.combinations_with_replacement(flat, 2):
        brackets.append((wa, i, wb, j, local_bracket(F, G, system.pva)))
    return HamiltonianReport(funcs, brackets)

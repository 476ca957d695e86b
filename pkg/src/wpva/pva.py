"""Concrete Poisson vertex algebras, local functionals and the map eta.

Affine PVAs use the basis labels of the Lie algebra as generator names;
the beta-gamma system on g_{1/2} uses ``phi_<label>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .coeffs import K, ONE, ZERO, as_coeff
from .diffpoly import (Atom, DiffPoly, Variable, d, mono_content, mono_key, mono_weight,
                       monomials_of_weight, monomials_with_content, partial)
from .lambdas import BracketTable, LambdaPoly, check_jacobi, check_skew, master_bracket
from .linalg import Echelon, nullspace

__all__ = [
    "PvaSpec", "LocalFunctional", "Derivation", "affine_pva", "bg_system", "tensor",
    "unit_pva", "functional", "local_bracket", "local_bracket_variational", "eta",
    "eta_kernel", "center_functionals",
]


@dataclass
class PvaSpec:
    """Generators, bracket table and a tag saying where the table came from."""

    table: BracketTable
    tag: str

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self.table.variables

    def variable(self, name: str) -> Variable:
        return self.table.variable(name)

    def gen(self, name: str, n: int = 0) -> DiffPoly:
        return DiffPoly.atom(Atom.get(self.variable(name), n))

    def bracket(self, f: DiffPoly, g: DiffPoly) -> LambdaPoly:
        return master_bracket(f, g, self.table)

    def check(self) -> tuple[bool, bool]:
        return check_skew(self.table)[0], check_jacobi(self.table)[0]

    def to_json(self) -> dict:
        return {"tag": self.tag, **self.table.to_json()}


def unit_pva() -> PvaSpec:
    return PvaSpec(BracketTable((), {}), "unit")


def affine_pva(alg, level=K, indices=None, tag: str | None = None) -> PvaSpec:
    """V^k(L) with {u_l v} = [u, v] + k (u|v) l on the basis ``indices`` of L.

    ``indices`` must span a subalgebra on which the form is nondegenerate
    (for instance g_0); by default the whole algebra.
    """
    idx = list(range(alg.dim)) if indices is None else list(indices)
    pos = set(idx)
    vs = [Variable(alg.labels[i], 0, Fraction(1)) for i in idx]
    level = as_coeff(level)
    entries = {}
    for a, i in enumerate(idx):
        for b, j in enumerate(idx):
            br = alg.bracket_basis(i, j)
            if any(k not in pos for k in br):
                raise ValueError("basis does not span a subalgebra")
            p0 = DiffPoly()
            for kk, c in br.items():
                p0 = p0 + DiffPoly.atom(Atom.get(vs[idx.index(kk)])).scale(c)
            coeffs = {0: p0}
            if alg.form[i][j]:
                coeffs[1] = DiffPoly.constant(level * alg.form[i][j])
            entries[(vs[a].name, vs[b].name)] = LambdaPoly(coeffs)
    # invariance on the chosen basis
    for i in idx:
        for j in idx:
            for kk in idx:
                if alg.kappa(alg.bracket_basis(i, j), {kk: 1}) != alg.kappa({i: 1}, alg.bracket_basis(j, kk)):
                    raise ValueError("form is not invariant on the chosen subalgebra")
                if alg.form[i][j] != alg.form[j][i]:
                    raise ValueError("form is not symmetric")
    return PvaSpec(BracketTable(vs, entries), tag or f"affine({alg.type_label})")


def bg_system(alg, triple, grading) -> PvaSpec:
    """Even generators phi_a (a in Delta_{1/2}) of weight 1/2 with constant
    brackets {phi_a l phi_b} = (f | [e_a, e_b])."""
    half = grading.piece(Fraction(1, 2))
    if not half:
        return unit_pva()
    vs = [Variable(f"phi_{alg.labels[i]}", 0, Fraction(1, 2)) for i in half]
    entries = {}
    gram = []
    for a, i in enumerate(half):
        row = []
        for b, j in enumerate(half):
            c = alg.kappa(triple.f, alg.bracket_basis(i, j))
            row.append(c)
            if c:
                entries[(vs[a].name, vs[b].name)] = LambdaPoly.const(DiffPoly.constant(c))
        gram.append(row)
    ech = Echelon()
    for row in gram:
        ech.add({j: v for j, v in enumerate(row) if v})
    if ech.rank != len(half):
        raise ValueError("degenerate pairing on g_1/2")
    return PvaSpec(BracketTable(vs, entries), "bg")


def tensor(a: PvaSpec, b: PvaSpec) -> PvaSpec:
    names = {v.name for v in a.variables}
    if names & {v.name for v in b.variables}:
        raise ValueError("tensor factors share generator names")
    entries = dict(a.table.entries)
    entries.update(b.table.entries)
    return PvaSpec(BracketTable(a.variables + b.variables, entries), f"tensor({a.tag},{b.tag})")


# local functionals ------------------------------------------------------------------

@lru_cache(maxsize=None)
def _d_echelon(content: tuple, w: Fraction):
    """Echelon form of d(monomials of weight w-1) over the monomials of weight w
    with the given content; columns ordered so that high derivative orders
    are eliminated first."""
    target = monomials_with_content(dict(content), w)
    order = list(reversed(target))  # mono_key ascending -> reversed
    col = {m: i for i, m in enumerate(order)}
    ech = Echelon()
    for m in monomials_with_content(dict(content), w - 1):
        img = d(DiffPoly.monomial(m))
        ech.add({col[mm]: c for mm, c in img.terms.items()})
    return order, col, ech


def _reduce_mod_d(p: DiffPoly) -> DiffPoly:
    groups: dict = {}
    for m, c in p.terms.items():
        if not m:
            groups.setdefault(((), Fraction(0)), {})[m] = c
            continue
        groups.setdefault((mono_content(m), mono_weight(m)), {})[m] = c
    out = {}
    for (content, w), terms in groups.items():
        if not content:
            out.update(terms)
            continue
        order, col, ech = _d_echelon(content, w)
        row = ech.reduce({col[m]: c for m, c in terms.items()})
        for i, c in row.items():
            out[order[i]] = c
    return DiffPoly(out)


class LocalFunctional:
    """A class in V / dV, stored by its canonical representative."""

    __slots__ = ("rep",)

    def __init__(self, rep: DiffPoly, _canonical=False):
        self.rep = rep if _canonical else _reduce_mod_d(rep)

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def __eq__(self, other):
        if not isinstance(other, LocalFunctional):
            return NotImplemented
        return self.rep == other.rep

    def __hash__(self):
        return hash(self.rep)

    def __add__(self, other: "LocalFunctional") -> "LocalFunctional":
        return LocalFunctional(self.rep + other.rep, True)

    def __sub__(self, other):
        return LocalFunctional(self.rep - other.rep, True)

    def __neg__(self):
        return LocalFunctional(-self.rep, True)

    def scale(self, c) -> "LocalFunctional":
        return LocalFunctional(self.rep.scale(c), True)

    def weights(self):
        return self.rep.weights()

    def render(self) -> str:
        return f"∫ {self.rep.render()}"

    __str__ = render

    def __repr__(self):
        return f"LocalFunctional({self.rep.render()})"

    def to_json(self) -> dict:
        ws = sorted(self.rep.weights())
        return {"representative": self.rep.render(),
                "weight": str(ws[0]) if len(ws) == 1 else [str(w) for w in ws]}


def functional(f: DiffPoly) -> LocalFunctional:
    return LocalFunctional(f)


def local_bracket(F: LocalFunctional, G: LocalFunctional, pva: PvaSpec) -> LocalFunctional:
    """[∫f, ∫g] = ∫ {f_l g}|_{l=0}."""
    return LocalFunctional(pva.bracket(F.rep, G.rep).at(0))


def local_bracket_variational(F: LocalFunctional, G: LocalFunctional, pva: PvaSpec) -> LocalFunctional:
    """Same bracket through variational derivatives:
    sum (-1)^{|f||g|+|i||j|} ∫ (delta_R g / delta_R u_j) H_ji(d)_-> (delta f / delta u_i)."""
    from .diffpoly import variational

    f, g = F.rep, G.rep
    out = DiffPoly()
    for fp, fpart in f.parity_parts().items():
        for gp, gpart in g.parity_parts().items():
            sign_fg = -1 if (fp and gp) else 1
            for vi in pva.variables:
                df = variational(fpart, vi, "left")
                if df.is_zero():
                    continue
                for vj in pva.variables:
                    h = pva.table.get(vi, vj)
                    if h.is_zero():
                        continue
                    dg = variational(gpart, vj, "right")
                    if dg.is_zero():
                        continue
                    acc = DiffPoly()
                    for n, c in h.coeffs.items():
                        acc = acc + c * d(df, n)
                    term = dg * acc
                    if (vi.parity and vj.parity) != (sign_fg < 0):
                        term = -term
                    out = out + term
    return LocalFunctional(out)


class Derivation:
    """Even evolutionary derivation determined by its values on generators."""

    def __init__(self, images: dict):
        self.images = {v: p for v, p in images.items() if not p.is_zero()}

    def is_zero(self) -> bool:
        return not self.images

    def on_generator(self, v: Variable, n: int = 0) -> DiffPoly:
        p = self.images.get(v)
        return d(p, n) if p is not None else DiffPoly()

    def __call__(self, g: DiffPoly) -> DiffPoly:
        out = DiffPoly()
        for a in sorted(g.atoms(), key=lambda a: a.key):
            img = self.on_generator(a.var, a.n)
            if img.is_zero():
                continue
            out = out + img * partial(g, a, side="left")
        return out

    def commutator(self, other: "Derivation") -> "Derivation":
        vs = set(self.images) | set(other.images)
        return Derivation({v: self(other.on_generator(v)) - other(self.on_generator(v)) for v in vs})

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.images == other.images


def eta(F: LocalFunctional, pva: PvaSpec) -> Derivation:
    """eta(∫f) = {f_l -}|_{l=0}, restricted to even functionals."""
    if F.rep.parity_parts().get(1):
        raise ValueError("eta is implemented for even functionals")
    return Derivation({v: pva.bracket(F.rep, DiffPoly.atom(Atom.get(v))).at(0) for v in pva.variables})


def _normal_monomials(variables, w) -> list:
    """Monomials of weight w that survive reduction modulo dV."""
    if w == 0:
        return [()]
    out = []
    seen = set()
    for m in monomials_of_weight(variables, w):
        c = mono_content(m)
        if c in seen:
            continue
        seen.add(c)
        order, col, ech = _d_echelon(c, Fraction(w))
        out.extend(order[i] for i in range(len(order)) if i not in ech.rows)
    return sorted(out, key=mono_key)


def eta_kernel(pva: PvaSpec, weight_bound) -> list[LocalFunctional]:
    """Basis of Ker(eta) among functionals of weight <= weight_bound."""
    basis = []
    w = Fraction(0)
    step = Fraction(1, 2) if any(v.weight.denominator == 2 for v in pva.variables) else Fraction(1)
    while w <= weight_bound:
        monos = _normal_monomials(pva.variables, w)
        rows: dict = {}
        for c, m in enumerate(monos):
            D = eta(LocalFunctional(DiffPoly.monomial(m), True), pva)
            for v, img in D.images.items():
                for mm, val in img.terms.items():
                    rows.setdefault((v.name, mm), {})[c] = val
        kern, _ = nullspace(list(rows.values()), len(monos), ONE)
        for vec in kern:
            basis.append(LocalFunctional(DiffPoly({monos[c]: val for c, val in vec.items()}), True))
        w += step
    return basis


def center_functionals(alg, pva: PvaSpec) -> list[LocalFunctional]:
    """{∫1} plus ∫u for u spanning the center of the Lie algebra."""
    out = [LocalFunctional(DiffPoly.constant(ONE), True)]
    for z in alg.center():
        p = DiffPoly()
        for i, c in z.items():
            p = p + pva.gen(alg.labels[i]).scale(c)
        out.append(LocalFunctional(p))
    return out

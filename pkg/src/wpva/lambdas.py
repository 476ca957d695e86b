"""Lambda-polynomials, the master formula, and the PVA axiom checkers."""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

from .coeffs import as_coeff
from .diffpoly import Atom, DiffPoly, Variable, d, parse, partial

__all__ = [
    "LambdaPoly", "BracketTable", "subst_arrow", "master_bracket",
    "check_skew", "check_jacobi", "jacobi_residual", "skew_residual",
]


class LambdaPoly:
    """Polynomial ``sum_n lambda^n c_n`` with DiffPoly coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, DiffPoly] | None = None):
        self.coeffs = {n: c for n, c in (coeffs or {}).items() if not c.is_zero()}

    @classmethod
    def const(cls, p: DiffPoly) -> "LambdaPoly":
        return cls({0: p})

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, n: int) -> DiffPoly:
        return self.coeffs.get(n, DiffPoly())

    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def items(self):
        return sorted(self.coeffs.items())

    def __eq__(self, other):
        if not isinstance(other, LambdaPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out[n] + c if n in out else c
        return LambdaPoly(out)

    def __neg__(self):
        return LambdaPoly({n: -c for n, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LambdaPoly":
        return LambdaPoly({n: p.scale(c) for n, p in self.coeffs.items()})

    def lmul(self, p: DiffPoly) -> "LambdaPoly":
        """``p * self`` coefficientwise, ``p`` on the left."""
        return LambdaPoly({n: p * c for n, c in self.coeffs.items()})

    def rmul(self, p: DiffPoly) -> "LambdaPoly":
        return LambdaPoly({n: c * p for n, c in self.coeffs.items()})

    def shift(self, n: int, sign: int = 1) -> "LambdaPoly":
        """Apply ``(sign*(lambda + d))^n`` with ``d`` acting on the coefficients."""
        if n == 0:
            return self
        out: dict[int, DiffPoly] = {}
        for q, c in self.coeffs.items():
            dc = c
            for r in range(n + 1):
                if r:
                    dc = d(dc)
                    if dc.is_zero():
                        break
                term = dc.scale(comb(n, r))
                key = q + n - r
                out[key] = out[key] + term if key in out else term
        res = LambdaPoly(out)
        return res.scale(-1) if (sign < 0 and n % 2) else res

    def at(self, value=0) -> DiffPoly:
        """Evaluate lambda at a scalar."""
        if value == 0:
            return self[0]
        out = DiffPoly()
        v = as_coeff(value)
        for n, c in self.coeffs.items():
            out = out + c.scale(v ** n)
        return out

    def map(self, fn) -> "LambdaPoly":
        return LambdaPoly({n: fn(c) for n, c in self.coeffs.items()})

    def weights_ok(self, target) -> bool:
        return all(all(w + n == target for w in c.weights()) for n, c in self.coeffs.items())

    def render(self, symbol: str = "lambda") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for n, c in self.items():
            s = c.render()
            parts.append(s if n == 0 else f"{symbol}^{n} * ({s})")
        return " + ".join(parts)

    def __repr__(self):
        return f"LambdaPoly({self.render()})"


def subst_arrow(p: LambdaPoly, target: DiffPoly, direction: str = "right", at=None):
    """Arrow substitution of a lambda-polynomial.

    ``right``: ``sum_n p_n (lambda + d)^n target`` with ``d`` acting on ``target``.
    ``left``:  ``sum_n (-lambda - d)^n (p_n target)`` with ``d`` acting on the
    whole coefficient.  With ``at`` set, lambda is then specialized.
    """
    out = LambdaPoly()
    if direction == "right":
        base = LambdaPoly.const(target)
        for n, c in p.coeffs.items():
            out = out + base.shift(n).lmul(c)
    elif direction == "left":
        for n, c in p.coeffs.items():
            out = out + LambdaPoly.const(c * target).shift(n, -1)
    else:
        raise ValueError("direction must be 'right' or 'left'")
    return out if at is None else out.at(at)


@dataclass
class BracketTable:
    """Generator brackets: ``entries[(i, j)] = {u_i lambda u_j}`` (= H_ji(lambda)).

    Missing pairs are zero.
    """

    variables: tuple[Variable, ...]
    entries: dict

    def __post_init__(self):
        self.variables = tuple(self.variables)
        self._by_name = {v.name: v for v in self.variables}
        if len(self._by_name) != len(self.variables):
            raise ValueError("duplicate generator names")
        clean = {}
        for (i, j), lp in self.entries.items():
            vi = self._resolve(i)
            vj = self._resolve(j)
            if not lp.is_zero():
                clean[(vi.name, vj.name)] = lp
        self.entries = clean

    def _resolve(self, v) -> Variable:
        name = v.name if isinstance(v, Variable) else v
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"generator {name!r} not in table") from None

    def __contains__(self, v) -> bool:
        name = v.name if isinstance(v, Variable) else v
        return name in self._by_name

    def get(self, i, j) -> LambdaPoly:
        a = i.name if isinstance(i, Variable) else i
        b = j.name if isinstance(j, Variable) else j
        return self.entries.get((a, b), LambdaPoly())

    def variable(self, name: str) -> Variable:
        return self._by_name[name]

    def validate(self) -> None:
        """Parity and weight-homogeneity of every entry."""
        for (a, b), lp in self.entries.items():
            vi, vj = self._by_name[a], self._by_name[b]
            par = (vi.parity + vj.parity) & 1
            for c in lp.coeffs.values():
                if c.parity() != par:
                    raise ValueError(f"entry ({a},{b}) has wrong parity")
            if not lp.weights_ok(vi.weight + vj.weight - 1):
                raise ValueError(f"entry ({a},{b}) is not weight-homogeneous")

    # JSON ------------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "generators": [
                {"name": v.name, "parity": v.parity, "weight": str(v.weight)}
                for v in self.variables
            ],
            "entries": [
                {"i": a, "j": b, "terms": [[n, c.render()] for n, c in lp.items()]}
                for (a, b), lp in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json(cls, data) -> "BracketTable":
        from fractions import Fraction

        if isinstance(data, str):
            data = json.loads(data)
        vs = [Variable(g["name"], int(g["parity"]), Fraction(g["weight"])) for g in data["generators"]]
        entries = {}
        for e in data["entries"]:
            entries[(e["i"], e["j"])] = LambdaPoly({int(n): parse(t, vs) for n, t in e["terms"]})
        return cls(vs, entries)


def _generator_partials(f: DiffPoly, side: str) -> dict[Variable, list[tuple[int, DiffPoly]]]:
    out: dict[Variable, list] = {}
    for a in sorted(f.atoms(), key=lambda a: a.key):
        p = partial(f, a, side=side)
        if not p.is_zero():
            out.setdefault(a.var, []).append((a.n, p))
    return out


def master_bracket(f: DiffPoly, g: DiffPoly, table: BracketTable) -> LambdaPoly:
    """The lambda-bracket determined by the generator table.

    {f_l g} = sum (-1)^{|f||g| + |i||j|} (d_R g / d_R u_j^(n)) (l+d)^n
              H_ji(l+d)_-> (-l-d)^m (d f / d u_i^(m))
    """
    for v in f.variables() | g.variables():
        if v not in table:
            raise KeyError(f"generator {v.name!r} not in bracket table")
    out = LambdaPoly()
    fparts = f.parity_parts()
    gparts = g.parity_parts()
    for fp, fpart in fparts.items():
        lam_var = {}
        for vi, lst in _generator_partials(fpart, "left").items():
            acc = LambdaPoly()
            for m, p in lst:
                acc = acc + LambdaPoly.const(p).shift(m, -1)
            lam_var[vi] = acc
        for gp, gpart in gparts.items():
            sign_fg = -1 if (fp and gp) else 1
            for vj, lst in _generator_partials(gpart, "right").items():
                b = LambdaPoly()
                for vi, acc in lam_var.items():
                    h = table.get(vi, vj)
                    if h.is_zero():
                        continue
                    part = LambdaPoly()
                    for pw, hp in h.coeffs.items():
                        part = part + acc.shift(pw).lmul(hp)
                    if vi.parity and vj.parity:
                        part = -part
                    b = b + part
                if b.is_zero():
                    continue
                for n, dg in lst:
                    term = b.shift(n).lmul(dg)
                    out = out + (term if sign_fg > 0 else -term)
    return out


def skew_residual(f: DiffPoly, g: DiffPoly, table: BracketTable) -> LambdaPoly:
    """{g_l f} + (-1)^{|f||g|} _<-{f_{-l-d} g}; zero iff skew-symmetry holds."""
    lhs = master_bracket(g, f, table)
    fg = master_bracket(f, g, table)
    rhs = LambdaPoly()
    for n, c in fg.coeffs.items():
        rhs = rhs + LambdaPoly.const(c).shift(n, -1)
    sign = -1 if (f.parity() and g.parity()) else 1
    return lhs + rhs.scale(sign)


def check_skew(table: BracketTable, pairs: Iterable[tuple] | None = None):
    """Skew-symmetry on all generator pairs; returns (ok, first violating pair)."""
    vs = table.variables
    if pairs is None:
        pairs = [(a, b) for a in vs for b in vs]
    for a, b in pairs:
        ua, ub = DiffPoly.atom(Atom.get(a)), DiffPoly.atom(Atom.get(b))
        if not skew_residual(ua, ub, table).is_zero():
            return False, (a.name, b.name)
    return True, None


def _two_var_add(acc: dict, key, p: DiffPoly):
    if p.is_zero():
        return
    acc[key] = acc[key] + p if key in acc else p


def jacobi_residual(f: DiffPoly, g: DiffPoly, h: DiffPoly, table: BracketTable) -> dict:
    """{f_l{g_m h}} - (-1)^{|f||g|}{g_m{f_l h}} - {{f_l g}_{l+m} h} as a dict
    (lambda power, mu power) -> DiffPoly; empty iff Jacobi holds."""
    acc: dict = {}
    for n, c in master_bracket(g, h, table).coeffs.items():
        for m, cc in master_bracket(f, c, table).coeffs.items():
            _two_var_add(acc, (m, n), cc)
    sign = -1 if (f.parity() and g.parity()) else 1
    for m, c in master_bracket(f, h, table).coeffs.items():
        for n, cc in master_bracket(g, c, table).coeffs.items():
            _two_var_add(acc, (m, n), cc.scale(-sign))
    for m, c in master_bracket(f, g, table).coeffs.items():
        for p, cc in master_bracket(c, h, table).coeffs.items():
            for r in range(p + 1):
                _two_var_add(acc, (m + r, p - r), cc.scale(-comb(p, r)))
    return {k: v for k, v in acc.items() if not v.is_zero()}


def check_jacobi(table: BracketTable, triples: Iterable[tuple] | None = None):
    """Jacobi identity on all generator triples; returns (ok, first violating triple)."""
    vs = table.variables
    if triples is None:
        triples = [(a, b, c) for a in vs for b in vs for c in vs]
    for a, b, c in triples:
        ua, ub, uc = (DiffPoly.atom(Atom.get(x)) for x in (a, b, c))
        if jacobi_residual(ua, ub, uc, table):
            return False, (a.name, b.name, c.name)
    return True, None

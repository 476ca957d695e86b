"""Differential polynomial superalgebras with coefficients in Q(k).

A :class:`DiffPoly` is a sparse map from normalized monomials to
:class:`~wpva.coeffs.RatFunc`.  Monomials are products of atoms
``u^{(n)}``; atoms are ordered by ``(weight(u), name(u), -n)`` and odd
atoms are kept in that order with the Koszul sign absorbed into the
coefficient.  The even derivation ``d`` sends ``u^{(n)}`` to ``u^{(n+1)}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

from .coeffs import K, ONE, ZERO, RatFunc, as_coeff, parse_ratfunc

__all__ = [
    "Variable", "Atom", "DiffPoly", "const", "var", "d",
    "partial", "variational", "is_total_derivative", "antiderivative",
    "monomials_of_weight", "monomials_with_content", "parse", "render",
    "mono_key", "random_diffpoly", "count_monomials",
]


@dataclass(frozen=True)
class Variable:
    """A generator ``u`` with fixed parity (0 even, 1 odd) and conformal weight."""

    name: str
    parity: int = 0
    weight: Fraction = Fraction(1)
    sort_key: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.name == "k":
            raise ValueError("'k' is reserved for the level")
        object.__setattr__(self, "weight", Fraction(self.weight))
        object.__setattr__(self, "sort_key", (self.weight, self.name))

    def __call__(self, n: int = 0) -> "DiffPoly":
        return DiffPoly.atom(Atom.get(self, n))


class Atom:
    """The derivative ``var^{(n)}``; interned so identity comparison suffices."""

    __slots__ = ("var", "n", "key", "odd", "weight", "__weakref__")
    _cache: dict = {}

    def __init__(self, var: Variable, n: int):
        self.var = var
        self.n = n
        # float weight keeps comparisons in C; exact for small-denominator weights
        self.key = (float(var.weight), var.name, -n)
        self.odd = bool(var.parity)
        self.weight = var.weight + n

    @classmethod
    def get(cls, var: Variable, n: int = 0) -> "Atom":
        a = cls._cache.get((var, n))
        if a is None:
            a = cls._cache.setdefault((var, n), cls(var, n))
        return a

    def derivative(self) -> "Atom":
        return Atom.get(self.var, self.n + 1)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"{self.var.name}[{self.n}]"

    def __reduce__(self):
        return (Atom.get, (self.var, self.n))


# A monomial is a tuple of (Atom, exponent) sorted by atom key.
Monomial = tuple


def _normalize(seq) -> tuple[int, Monomial] | None:
    """Sort an ordered product of atoms; returns (sign, monomial) or None if zero."""
    odd = []
    even: dict[Atom, int] = {}
    for a, e in seq:
        if a.odd:
            if e != 1:
                return None
            odd.append(a)
        else:
            even[a] = even.get(a, 0) + e
    sign = 1
    if len(odd) > 1:
        if len(set(odd)) != len(odd):
            return None
        inv = 0
        for i in range(len(odd)):
            ki = odd[i].key
            for j in range(i + 1, len(odd)):
                if odd[j].key < ki:
                    inv += 1
        sign = -1 if inv & 1 else 1
    items = [(a, e) for a, e in even.items()] + [(a, 1) for a in odd]
    items.sort(key=lambda t: t[0].key)
    return sign, tuple(items)


def _mono_mul(m1: Monomial, m2: Monomial) -> tuple[int, Monomial] | None:
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    odd_left = 0
    for a, _ in m1:
        if a.odd:
            odd_left += 1
    inv = 0
    while i < n1 and j < n2:
        a, ea = m1[i]
        b, eb = m2[j]
        if a is b:
            if a.odd:
                return None
            out.append((a, ea + eb))
            i += 1
            j += 1
        elif a.key < b.key:
            out.append((a, ea))
            if a.odd:
                odd_left -= 1
            i += 1
        else:
            if b.odd:
                inv += odd_left
            out.append((b, eb))
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return (-1 if inv & 1 else 1), tuple(out)


def mono_weight(m: Monomial) -> Fraction:
    return sum((a.weight * e for a, e in m), Fraction(0))


def mono_parity(m: Monomial) -> int:
    return sum(e for a, e in m if a.odd) & 1


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_key(m: Monomial):
    """Total order used for echelon forms: high polynomial degree and low
    derivative orders come first."""
    orders = sorted((a.n for a, e in m for _ in range(e)), reverse=True)
    return (-mono_degree(m), orders[0] if orders else -1, orders,
            [(a.var.weight, a.var.name, a.n, e) for a, e in m])


def mono_content(m: Monomial) -> tuple:
    c: dict[Variable, int] = {}
    for a, e in m:
        c[a.var] = c.get(a.var, 0) + e
    return tuple(sorted(c.items(), key=lambda t: t[0].sort_key))


class DiffPoly:
    """Element of a differential polynomial superalgebra over Q(k)."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, RatFunc] | None = None, _clean=False):
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            self.terms = {m: c for m, c in terms.items() if not c.is_zero()}
        self._hash = None

    # constructors -----------------------------------------------------------
    @classmethod
    def atom(cls, a: Atom) -> "DiffPoly":
        return cls({((a, 1),): ONE}, _clean=True)

    @classmethod
    def constant(cls, c) -> "DiffPoly":
        c = as_coeff(c)
        return cls({(): c}, _clean=True) if not c.is_zero() else cls()

    @classmethod
    def monomial(cls, m: Monomial, c=ONE) -> "DiffPoly":
        c = as_coeff(c)
        return cls({m: c}, _clean=True) if not c.is_zero() else cls()

    # basic protocol -----------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, DiffPoly):
            try:
                other = DiffPoly.constant(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def coeff(self, m: Monomial) -> RatFunc:
        return self.terms.get(m, ZERO)

    def constant_term(self) -> RatFunc:
        return self.terms.get((), ZERO)

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=mono_key)

    def variables(self) -> set[Variable]:
        return {a.var for m in self.terms for a, _ in m}

    def atoms(self) -> set[Atom]:
        return {a for m in self.terms for a, _ in m}

    def weights(self) -> set[Fraction]:
        return {mono_weight(m) for m in self.terms}

    def weight(self) -> Fraction:
        """Weight of a homogeneous element (zero has weight 0)."""
        ws = self.weights()
        if len(ws) > 1:
            raise ValueError("element is not weight-homogeneous")
        return ws.pop() if ws else Fraction(0)

    def parity(self) -> int:
        ps = {mono_parity(m) for m in self.terms}
        if len(ps) > 1:
            raise ValueError("element has mixed parity")
        return ps.pop() if ps else 0

    def homogeneous_parts(self) -> dict[Fraction, "DiffPoly"]:
        parts: dict[Fraction, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(mono_weight(m), {})[m] = c
        return {w: DiffPoly(t, _clean=True) for w, t in sorted(parts.items())}

    def parity_parts(self) -> dict[int, "DiffPoly"]:
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(mono_parity(m), {})[m] = c
        return {p: DiffPoly(t, _clean=True) for p, t in sorted(parts.items())}

    def truncate(self, max_weight) -> "DiffPoly":
        return DiffPoly({m: c for m, c in self.terms.items() if mono_weight(m) <= max_weight}, _clean=True)

    def max_order(self) -> int:
        return max((a.n for m in self.terms for a, _ in m), default=-1)

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, DiffPoly):
            try:
                other = DiffPoly.constant(other)
            except TypeError:
                return NotImplemented
        if len(other.terms) > len(self.terms):
            self, other = other, self
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = t.get(m)
            if v is None:
                t[m] = c
            else:
                v = v + c
                if v.is_zero():
                    del t[m]
                else:
                    t[m] = v
        return DiffPoly(t, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly({m: -c for m, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        if not isinstance(other, DiffPoly):
            other = DiffPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return DiffPoly.constant(other) - self

    def scale(self, c) -> "DiffPoly":
        c = as_coeff(c)
        if c.is_zero():
            return DiffPoly()
        if c.is_one():
            return self
        return DiffPoly({m: v * c for m, v in self.terms.items()}, _clean=True)

    def __mul__(self, other):
        if not isinstance(other, DiffPoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                r = _mono_mul(m1, m2)
                if r is None:
                    continue
                s, m = r
                c = c1 * c2
                if s < 0:
                    c = -c
                v = t.get(m)
                t[m] = c if v is None else v + c
        return DiffPoly(t)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(as_coeff(other).inverse())

    def __pow__(self, n: int):
        out = DiffPoly.constant(1)
        for _ in range(n):
            out = out * self
        return out

    def map_coeffs(self, fn: Callable[[RatFunc], RatFunc]) -> "DiffPoly":
        return DiffPoly({m: as_coeff(fn(c)) for m, c in self.terms.items()})

    def specialize(self, level) -> "DiffPoly":
        """Evaluate the level symbol at a rational value."""
        return self.map_coeffs(lambda c: c.evaluate(level))

    def substitute(self, image: Callable[[Atom], "DiffPoly"]) -> "DiffPoly":
        """Apply the algebra homomorphism determined by ``atom -> image(atom)``."""
        out = DiffPoly()
        cache: dict[Atom, DiffPoly] = {}
        for m, c in self.terms.items():
            term = DiffPoly.constant(c)
            for a, e in m:
                img = cache.get(a)
                if img is None:
                    img = cache[a] = image(a)
                for _ in range(e):
                    term = term * img
            out = out + term
        return out

    # rendering ----------------------------------------------------------------
    def render(self) -> str:
        return render(self)

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"DiffPoly({render(self)!r})"


def const(c) -> DiffPoly:
    return DiffPoly.constant(c)


def var(name: str, parity: int = 0, weight=1) -> Variable:
    return Variable(name, parity, Fraction(weight))


# derivation --------------------------------------------------------------------

_D_CACHE: dict = {}


def _d_mono(m: Monomial) -> list[tuple[int, int, Monomial]]:
    """Terms (multiplicity, sign, monomial) of the derivative of a monomial."""
    hit = _D_CACHE.get(m)
    if hit is not None:
        return hit
    out = []
    for i, (a, e) in enumerate(m):
        seq = list(m)
        if e == 1:
            seq[i] = (a.derivative(), 1)
        else:
            seq[i] = (a, e - 1)
            seq.insert(i + 1, (a.derivative(), 1))
        r = _normalize(seq)
        if r is not None:
            out.append((e, r[0], r[1]))
    _D_CACHE[m] = out
    return out


def d(p: DiffPoly, times: int = 1) -> DiffPoly:
    """The even derivation: ``u^{(n)} -> u^{(n+1)}`` extended by Leibniz."""
    for _ in range(times):
        t: dict = {}
        for m, c in p.terms.items():
            for e, s, mm in _d_mono(m):
                v = c * e if e != 1 else c
                if s < 0:
                    v = -v
                old = t.get(mm)
                t[mm] = v if old is None else old + v
        p = DiffPoly(t)
    return p


def partial(p: DiffPoly, var_: Variable | Atom, n: int = 0, side: str = "left") -> DiffPoly:
    """Left or right partial derivative with respect to ``var^{(n)}``."""
    a = var_ if isinstance(var_, Atom) else Atom.get(var_, n)
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    t: dict = {}
    for m, c in p.terms.items():
        for i, (b, e) in enumerate(m):
            if b is not a:
                continue
            if a.odd:
                if side == "left":
                    nodd = sum(1 for bb, _ in m[:i] if bb.odd)
                else:
                    nodd = sum(1 for bb, _ in m[i + 1:] if bb.odd)
                rest = m[:i] + m[i + 1:]
                v = -c if nodd & 1 else c
            else:
                rest = m[:i] + ((a, e - 1),) + m[i + 1:] if e > 1 else m[:i] + m[i + 1:]
                v = c * e if e != 1 else c
            old = t.get(rest)
            t[rest] = v if old is None else old + v
            break
    return DiffPoly(t)


def variational(p: DiffPoly, var_: Variable, side: str = "left") -> DiffPoly:
    """``sum_n (-d)^n dp/du^{(n)}`` (left or right version)."""
    top = max((a.n for a in p.atoms() if a.var == var_), default=-1)
    out = DiffPoly()
    for n in range(top + 1):
        term = partial(p, Atom.get(var_, n), side=side)
        if term:
            term = d(term, n)
            out = out + (term if n % 2 == 0 else -term)
    return out


# monomial enumeration -------------------------------------------------------------

def _atoms_up_to(variables: Iterable[Variable], w: Fraction) -> list[Atom]:
    atoms = []
    for v in variables:
        n = 0
        while v.weight + n <= w:
            atoms.append(Atom.get(v, n))
            n += 1
    atoms.sort(key=lambda a: a.key)
    return atoms


def monomials_of_weight(variables: Iterable[Variable], w) -> list[Monomial]:
    """All monomials of total weight exactly ``w`` (variable weights must be > 0)."""
    w = Fraction(w)
    variables = list(variables)
    if any(v.weight <= 0 for v in variables):
        raise ValueError("monomial enumeration needs positive variable weights")
    atoms = _atoms_up_to(variables, w)
    out: list[Monomial] = []

    def rec(i: int, remaining: Fraction, acc: list):
        if remaining == 0:
            out.append(tuple(acc))
            return
        if i == len(atoms):
            return
        a = atoms[i]
        maxe = 1 if a.odd else int(remaining // a.weight)
        for e in range(min(maxe, int(remaining // a.weight)), 0, -1):
            acc.append((a, e))
            rec(i + 1, remaining - a.weight * e, acc)
            acc.pop()
        rec(i + 1, remaining, acc)

    rec(0, w, [])
    out.sort(key=mono_key)
    return out


def count_monomials(variables: Iterable[Variable], w) -> int:
    """Number of monomials of weight exactly ``w``, without enumerating them."""
    w = Fraction(w)
    variables = list(variables)
    if w == 0:
        return 1
    if any(v.weight <= 0 for v in variables):
        raise ValueError("monomial counting needs positive variable weights")
    if (2 * w).denominator != 1 or any((2 * v.weight).denominator != 1 for v in variables):
        raise ValueError("weights must be multiples of 1/2")
    top = int(2 * w)
    ways = [1] + [0] * top
    for a in _atoms_up_to(variables, w):
        step = int(2 * a.weight)
        if a.odd:
            for i in range(top, step - 1, -1):
                ways[i] += ways[i - step]
        else:
            for i in range(step, top + 1):
                ways[i] += ways[i - step]
    return ways[top]


def monomials_with_content(content: Mapping[Variable, int], w) -> list[Monomial]:
    """Monomials of weight ``w`` using each variable exactly ``content[v]`` times."""
    w = Fraction(w)
    base = sum((v.weight * c for v, c in content.items()), Fraction(0))
    extra = w - base
    if extra < 0 or extra.denominator != 1:
        return []
    extra = int(extra)
    vars_ = sorted(content, key=lambda v: v.sort_key)
    out = []

    def orders_for(v: Variable, count: int, budget: int):
        # multisets of derivative orders (distinct for odd variables)
        if v.parity:
            for combo in itertools.combinations(range(budget + 1), count):
                if sum(combo) <= budget:
                    yield combo
        else:
            for combo in itertools.combinations_with_replacement(range(budget + 1), count):
                if sum(combo) <= budget:
                    yield combo

    def rec(i: int, budget: int, acc: list):
        if i == len(vars_):
            if budget == 0:
                r = _normalize(acc)
                if r is not None:
                    out.append(r[1])
            return
        v = vars_[i]
        for combo in orders_for(v, content[v], budget):
            seq = [(Atom.get(v, n), 1) for n in combo]
            rec(i + 1, budget - sum(combo), acc + seq)

    rec(0, extra, [])
    out = sorted(set(out), key=mono_key)
    return out


def _random_coeff(rng) -> RatFunc:
    num = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(rng.randint(1, 3))]
    if rng.random() < 0.3:
        den = [Fraction(rng.randint(-3, 3)), Fraction(1)]
        return RatFunc.from_coeffs(num, den)
    return RatFunc.from_coeffs(num)


def random_diffpoly(variables, max_weight, rng, terms: int = 4) -> DiffPoly:
    """A seeded random element with up to ``terms`` monomials of weight <= max_weight
    and random coefficients in Q(k); ``rng`` is a ``random.Random``."""
    variables = list(variables)
    pool: list = []
    w = Fraction(0)
    step = min((v.weight for v in variables), default=Fraction(1))
    step = Fraction(1, 2) if step.denominator == 2 else Fraction(1)
    while w <= max_weight:
        pool.extend(monomials_of_weight(variables, w) if w > 0 else [()])
        w += step
    out = DiffPoly()
    for _ in range(rng.randint(1, terms)):
        out = out + DiffPoly.monomial(rng.choice(pool), _random_coeff(rng))
    return out


# total derivatives ---------------------------------------------------------------

def _d_image_rows(monos: list[Monomial]) -> list[dict]:
    return [d(DiffPoly.monomial(m)).terms for m in monos]


def antiderivative(p: DiffPoly) -> DiffPoly | None:
    """Some ``q`` with ``d(q) == p`` (no constant term), or None."""
    from .linalg import solve

    if p.is_zero():
        return DiffPoly()
    if not p.constant_term().is_zero():
        return None
    by_content: dict[tuple, dict] = {}
    for m, c in p.terms.items():
        by_content.setdefault((mono_content(m), mono_weight(m)), {})[m] = c
    result = DiffPoly()
    for (content, w), terms in by_content.items():
        cands = monomials_with_content(dict(content), w - 1)
        if not cands:
            return None
        images = _d_image_rows(cands)
        targets = sorted({m for img in images for m in img} | set(terms), key=mono_key)
        idx = {m: i for i, m in enumerate(targets)}
        # rows: one equation per target monomial, columns: candidates
        rows = [dict() for _ in targets]
        for j, img in enumerate(images):
            for m, c in img.items():
                rows[idx[m]][j] = c
        rhs = [terms.get(m, ZERO) for m in targets]
        x = solve(rows, rhs, len(cands))
        if x is None:
            return None
        result = result + DiffPoly({cands[j]: c for j, c in x.items()})
    return result


def is_total_derivative(p: DiffPoly) -> tuple[bool, DiffPoly | None]:
    """Decide ``p in d(V)``; on success also return an antiderivative.

    The decision uses the variational criterion (zero constant term and all
    variational derivatives vanish); the witness comes from a weight-graded
    linear solve, and the two are cross-checked.
    """
    if not p.constant_term().is_zero():
        return False, None
    for v in p.variables():
        if not variational(p, v).is_zero():
            return False, None
    q = antiderivative(p)
    if q is None or d(q) != p:
        raise ArithmeticError("variational test and antiderivative solve disagree")
    return True, q


# text format -------------------------------------------------------------------

def _render_coeff(c: RatFunc) -> str:
    if c.den.is_one():
        return f"({c.render()})"
    return c.render()


def render(p: DiffPoly) -> str:
    """Render as ``(coeff) * name[n]^p * ... + ...`` in canonical order."""
    if p.is_zero():
        return "0"
    parts = []
    for m in p.monomials():
        factors = [_render_coeff(p.terms[m])]
        for a, e in m:
            factors.append(f"{a.var.name}[{a.n}]" + (f"^{e}" if e != 1 else ""))
        parts.append(" * ".join(factors))
    return " + ".join(parts)


class _Parser:
    def __init__(self, text: str, variables: Mapping[str, Variable]):
        import re

        self.tokens = re.findall(r"\d+|[A-Za-z_][A-Za-z0-9_']*|[()\[\]^*/+\-]|\S", text)
        self.pos = 0
        self.vars = variables

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"expected {expected!r}, got {tok!r}")
        self.pos += 1
        return tok

    def expr(self) -> DiffPoly:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        out = self.term().scale(sign)
        while self.peek() in ("+", "-"):
            s = -1 if self.take() == "-" else 1
            out = out + self.term().scale(s)
        return out

    def term(self) -> DiffPoly:
        out = self.power()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.power()
            if op == "*":
                out = out * rhs
            else:
                if rhs.variables():
                    raise ValueError("division by a non-constant polynomial")
                out = out / rhs.constant_term()
        return out

    def power(self) -> DiffPoly:
        base = self.primary()
        if self.peek() == "^":
            self.take()
            base = base ** int(self.take())
        return base

    def primary(self) -> DiffPoly:
        tok = self.take()
        if tok == "(":
            inner = self.expr()
            self.take(")")
            return inner
        if tok == "-":
            return -self.power()
        if tok.isdigit():
            return DiffPoly.constant(int(tok))
        if tok == "k":
            return DiffPoly.constant(K)
        if tok in self.vars:
            n = 0
            if self.peek() == "[":
                self.take()
                n = int(self.take())
                self.take("]")
            return DiffPoly.atom(Atom.get(self.vars[tok], n))
        raise ValueError(f"unknown symbol {tok!r}")


def parse(text: str, variables) -> DiffPoly:
    """Parse the rendered grammar (and ordinary infix expressions).

    ``variables`` is a mapping name -> Variable or an iterable of Variables.
    """
    if not isinstance(variables, Mapping):
        variables = {v.name: v for v in variables}
    text = text.strip()
    if text == "0":
        return DiffPoly()
    p = _Parser(text, variables)
    out = p.expr()
    if p.peek() is not None:
        raise ValueError(f"trailing input at token {p.peek()!r}")
    return out

"""Exact coefficients: the field Q(k) of rational functions in one symbol.

Elements are kept as reduced ``num/den`` pairs of ``flint.fmpq_poly`` with a
monic denominator, so equality is structural and hashing is cheap.  The same
class doubles as Q(t) for loop-algebra computations; only the printed symbol
differs.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from flint import fmpq, fmpq_poly

__all__ = ["RatFunc", "K", "ONE", "ZERO", "as_coeff", "parse_ratfunc"]

_POLY_ONE = fmpq_poly([1])


def _to_fmpq(x) -> fmpq:
    if isinstance(x, fmpq):
        return x
    if isinstance(x, int):
        return fmpq(x)
    if isinstance(x, Rational):
        return fmpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot coerce {type(x).__name__} to a rational")


class RatFunc:
    """A reduced rational function ``num(k)/den(k)`` over Q."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _reduced=False):
        if not isinstance(num, fmpq_poly):
            num = fmpq_poly([_to_fmpq(num)])
        if den is None:
            self.num, self.den = num, _POLY_ONE
        elif _reduced:
            self.num, self.den = num, den
        else:
            if not isinstance(den, fmpq_poly):
                den = fmpq_poly([_to_fmpq(den)])
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            if num.is_zero():
                self.num, self.den = num, _POLY_ONE
            else:
                g = num.gcd(den)
                if not g.is_one():
                    num, rem = divmod(num, g)
                    den, rem = divmod(den, g)
                lc = den.leading_coefficient()
                if lc != 1:
                    num = num / lc
                    den = den / lc
                self.num, self.den = num, den
        self._hash = None

    # constructors ---------------------------------------------------------
    @classmethod
    def symbol(cls) -> "RatFunc":
        return cls(fmpq_poly([0, 1]))

    @classmethod
    def from_coeffs(cls, num, den=(1,)) -> "RatFunc":
        return cls(fmpq_poly([_to_fmpq(c) for c in num]), fmpq_poly([_to_fmpq(c) for c in den]))

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_constant(self) -> bool:
        return self.den.is_one() and self.num.degree() <= 0

    def __bool__(self):
        return not self.num.is_zero()

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = as_coeff(other)
            except TypeError:
                return NotImplemented
        if self.den.is_one() and other.den.is_one():
            return RatFunc(self.num + other.num, _POLY_ONE, True)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, True)

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = as_coeff(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return as_coeff(other) - self

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = as_coeff(other)
            except TypeError:
                return NotImplemented
        if self.den.is_one() and other.den.is_one():
            return RatFunc(self.num * other.num, _POLY_ONE, True)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(k)")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = as_coeff(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_coeff(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num ** n, self.den ** n, True)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        try:
            other = as_coeff(other)
        except TypeError:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            if self.den.is_one() and self.num.degree() <= 0:
                c = self.num.coeffs()
                self._hash = hash(Fraction(int(c[0].p), int(c[0].q))) if c else 0
            else:
                self._hash = hash((tuple(str(c) for c in self.num.coeffs()),
                                   tuple(str(c) for c in self.den.coeffs())))
        return self._hash

    # evaluation -----------------------------------------------------------
    def evaluate(self, value) -> Fraction:
        """Specialize the symbol to a rational value."""
        v = _to_fmpq(value)
        d = self.den(v)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at {value}")
        r = self.num(v) / d
        return Fraction(int(r.p), int(r.q))

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        c = self.num.coeffs()
        if not c:
            return Fraction(0)
        return Fraction(int(c[0].p), int(c[0].q))

    def bad_points(self) -> list[fmpq_poly]:
        """Monic irreducible factors whose roots make this value undefined or zero."""
        out = []
        for poly in (self.num, self.den):
            if poly.degree() > 0:
                _, facs = poly.factor()
                out.extend(f for f, _ in facs)
        return out

    # printing ---------------------------------------------------------------
    def render(self, var: str = "k") -> str:
        if self.den.is_one():
            return _render_poly(self.num, var)
        return f"({_render_poly(self.num, var)})/({_render_poly(self.den, var)})"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"RatFunc({self.render()!s})"


def _render_rational(c: fmpq) -> str:
    return str(c.p) if c.q == 1 else f"{c.p}/{c.q}"


def _render_poly(p: fmpq_poly, var: str) -> str:
    coeffs = p.coeffs()
    if not coeffs:
        return "0"
    parts = []
    for n in range(len(coeffs) - 1, -1, -1):
        c = coeffs[n]
        if c == 0:
            continue
        neg = c < 0
        a = -c if neg else c
        if n == 0:
            body = _render_rational(a)
        else:
            mon = var if n == 1 else f"{var}^{n}"
            body = mon if a == 1 else f"{_render_rational(a)}*{mon}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def as_coeff(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if type(x) is int:
        c = _SMALL.get(x)
        if c is not None:
            return c
        return RatFunc(fmpq_poly([x]), _POLY_ONE, True) if x else ZERO
    if isinstance(x, (int, Rational, fmpq)):
        return RatFunc(fmpq_poly([_to_fmpq(x)]), _POLY_ONE, True) if x != 0 else ZERO
    raise TypeError(f"cannot coerce {type(x).__name__} into Q(k)")


ZERO = RatFunc(fmpq_poly([]), _POLY_ONE, True)
ONE = RatFunc(fmpq_poly([1]), _POLY_ONE, True)
K = RatFunc.symbol()
_SMALL = {i: RatFunc(fmpq_poly([i]), _POLY_ONE, True) for i in range(-64, 65) if i}
_SMALL[0] = ZERO


# parsing ----------------------------------------------------------------------

def _parse_poly_text(text: str, var: str) -> fmpq_poly:
    import re

    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    terms = re.findall(r"[+-][^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"malformed polynomial {text!r}")
    coeffs: dict[int, Fraction] = {}
    pat = re.compile(rf"^([+-])(?:(\d+(?:/\d+)?)(?:\*({var})(?:\^(\d+))?)?|({var})(?:\^(\d+))?)$")
    for t in terms:
        m = pat.match(t)
        if not m:
            raise ValueError(f"malformed term {t!r} in {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        if m.group(2) is not None:
            c = Fraction(m.group(2))
            if m.group(3):
                n = int(m.group(4)) if m.group(4) else 1
            else:
                n = 0
        else:
            c = Fraction(1)
            n = int(m.group(6)) if m.group(6) else 1
        coeffs[n] = coeffs.get(n, Fraction(0)) + sign * c
    top = max(coeffs)
    return fmpq_poly([_to_fmpq(coeffs.get(i, 0)) for i in range(top + 1)])


def parse_ratfunc(text: str, var: str = "k") -> RatFunc:
    """Inverse of :meth:`RatFunc.render`."""
    s = text.strip()
    if s.startswith("("):
        depth = 0
        for i, ch in enumerate(s):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0:
                break
        num = _parse_poly_text(s[1:i], var)
        rest = s[i + 1:].strip()
        if not rest:
            return RatFunc(num)
        if not (rest.startswith("/(") and rest.endswith(")")):
            raise ValueError(f"malformed rational function {text!r}")
        return RatFunc(num, _parse_poly_text(rest[2:-1], var))
    return RatFunc(_parse_poly_text(s, var))

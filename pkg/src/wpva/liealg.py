"""Exact finite-dimensional Lie algebra data.

Built-in algebras are constructed from matrix realizations (sl_{n+1} for A_n,
sp_{2n} for C_n, plus gl_n for reductive examples).  Elements are sparse dicts
``basis index -> Fraction``.  Roots are stored as tuples of coordinates in the
simple roots, so grading and indecomposability questions are pure bookkeeping.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .coeffs import ONE, ZERO, RatFunc, as_coeff
from .linalg import Echelon, inverse_dense, nullspace

__all__ = [
    "LieAlgebra", "SimpleLieAlgebra", "Sl2Triple", "AdxGrading", "FReport",
    "LoopMatrix", "build_simple", "build_gl", "build_algebra", "principal_triple",
    "partition_triple", "grade", "check_condition_F", "loop_matrix",
    "default_y", "scan_y", "parse_element", "render_element",
]

Vec = dict


def _vadd(a: Vec, b: Vec, c=1) -> Vec:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + c * v
        if nv == 0:
            out.pop(k, None)
        else:
            out[k] = nv
    return out


def _vscale(a: Vec, c) -> Vec:
    if c == 0:
        return {}
    return {k: v * c for k, v in a.items()}


# matrix helpers (lists of lists of Fraction) ---------------------------------

def _mzero(n):
    return [[Fraction(0)] * n for _ in range(n)]


def _unit(n, i, j, c=1):
    m = _mzero(n)
    m[i][j] = Fraction(c)
    return m


def _madd(a, b, c=1):
    return [[x + c * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _mmul(a, b):
    n = len(a)
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(a[i], bt[j]) if x and y), Fraction(0))
             for j in range(n)] for i in range(n)]


def _mcomm(a, b):
    return _madd(_mmul(a, b), _mmul(b, a), -1)


def _trace_prod(a, b):
    n = len(a)
    return sum((a[i][j] * b[j][i] for i in range(n) for j in range(n) if a[i][j] and b[j][i]),
               Fraction(0))


def _mrank(m):
    e = Echelon()
    for row in m:
        e.add({j: v for j, v in enumerate(row) if v != 0})
    return e.rank


class LieAlgebra:
    """A finite-dimensional Lie algebra with an invariant symmetric form.

    ``struct[(i, j)]`` is the sparse vector ``[e_i, e_j]`` (stored for all
    ordered pairs with nonzero bracket); ``form[i][j] = (e_i | e_j)``.
    """

    def __init__(self, type_label: str, labels, struct, form, roots=None, matrices=None,
                 rank: int | None = None):
        self.type_label = type_label
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise ValueError("duplicate basis labels")
        self.struct = {}
        for (i, j), vec in struct.items():
            vec = {k: Fraction(v) for k, v in vec.items() if v != 0}
            if vec:
                self.struct[(i, j)] = vec
        self.form = [[Fraction(v) for v in row] for row in form]
        self.roots = list(roots) if roots is not None else [None] * self.dim
        self.matrices = matrices
        self.rank = rank
        self.root_index = {r: i for i, r in enumerate(self.roots) if r is not None}
        self._gram_inv = None

    # basic data ---------------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def cartan(self) -> list[int]:
        return [i for i, r in enumerate(self.roots) if r is None]

    def is_positive_root(self, r) -> bool:
        return r is not None and any(r) and all(c >= 0 for c in r)

    @property
    def positive_roots(self) -> list[int]:
        return [i for i, r in enumerate(self.roots) if self.is_positive_root(r)]

    @property
    def simple_roots(self) -> list[int]:
        out = []
        for i, r in enumerate(self.roots):
            if r is not None and sum(r) == 1 and all(c >= 0 for c in r):
                out.append(i)
        return sorted(out, key=lambda i: self.roots[i][::-1])

    @property
    def highest_root(self) -> int:
        pos = self.positive_roots
        return max(pos, key=lambda i: (sum(self.roots[i]), self.roots[i]))

    def neg(self, i: int) -> int:
        """Index of the root vector for the negative root."""
        return self.root_index[tuple(-c for c in self.roots[i])]

    def basis(self, i: int) -> Vec:
        return {i: Fraction(1)}

    # operations -----------------------------------------------------------------
    def bracket_basis(self, i: int, j: int) -> Vec:
        return self.struct.get((i, j), {})

    def bracket(self, x: Vec, y: Vec) -> Vec:
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.struct.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: v for k, v in out.items() if v != 0}

    def kappa(self, x: Vec, y: Vec):
        s = 0
        for i, a in x.items():
            row = self.form[i]
            for j, b in y.items():
                if row[j]:
                    s += a * b * row[j]
        return s

    def ad_matrix(self, x: Vec) -> list[list]:
        """``M[k][j]`` = coefficient of e_k in [x, e_j]."""
        n = self.dim
        m = [[Fraction(0)] * n for _ in range(n)]
        for j in range(n):
            for k, v in self.bracket(x, {j: Fraction(1)}).items():
                m[k][j] = v
        return m

    @property
    def gram_inverse(self) -> list[list]:
        if self._gram_inv is None:
            self._gram_inv = inverse_dense(self.form)
        return self._gram_inv

    def dual(self, i: int) -> Vec:
        """The vector e_ibar with (e_j | e_ibar) = delta_ij."""
        g = self.gram_inverse
        return {j: g[j][i] for j in range(self.dim) if g[j][i] != 0}

    def dual_index(self, i: int) -> int | None:
        """Basis index proportional to the dual vector, if there is one."""
        dv = self.dual(i)
        return next(iter(dv)) if len(dv) == 1 else None

    def center(self) -> list[Vec]:
        rows = []
        for j in range(self.dim):
            for k in range(self.dim):
                row = {i: self.struct.get((i, j), {}).get(k, 0) for i in range(self.dim)}
                row = {i: v for i, v in row.items() if v != 0}
                if row:
                    rows.append(row)
        basis, _ = nullspace(rows, self.dim, Fraction(1))
        return basis

    # validation -----------------------------------------------------------------
    def jacobi_violations(self, triples=None) -> list[tuple]:
        n = self.dim
        if triples is None:
            triples = itertools.product(range(n), repeat=3)
        bad = []
        for i, j, k in triples:
            a, b, c = ({i: 1}, {j: 1}, {k: 1})
            t1 = self.bracket(a, self.bracket(b, c))
            t2 = self.bracket(b, self.bracket(c, a))
            t3 = self.bracket(c, self.bracket(a, b))
            if _vadd(_vadd(t1, t2), t3):
                bad.append((i, j, k))
        return bad

    def validate(self) -> None:
        n = self.dim
        for i in range(n):
            for j in range(n):
                if _vadd(self.bracket_basis(i, j), self.bracket_basis(j, i)):
                    raise ValueError(f"bracket not antisymmetric on ({self.labels[i]}, {self.labels[j]})")
                if self.form[i][j] != self.form[j][i]:
                    raise ValueError("form not symmetric")
        bad = self.jacobi_violations()
        if bad:
            i, j, k = bad[0]
            raise ValueError(f"Jacobi fails on ({self.labels[i]}, {self.labels[j]}, {self.labels[k]})")
        for i, j, k in itertools.product(range(n), repeat=3):
            lhs = self.kappa(self.bracket_basis(i, j), {k: 1})
            rhs = self.kappa({i: 1}, self.bracket_basis(j, k))
            if lhs != rhs:
                raise ValueError("form not invariant")
        inverse_dense(self.form)  # raises if degenerate

    # JSON ---------------------------------------------------------------------------
    def to_json(self) -> dict:
        n = self.dim
        struct = []
        for i in range(n):
            for j in range(i + 1, n):
                for k, v in sorted(self.bracket_basis(i, j).items()):
                    struct.append([self.labels[i], self.labels[j], self.labels[k], str(v)])
        form = [[self.labels[i], self.labels[j], str(self.form[i][j])]
                for i in range(n) for j in range(i, n) if self.form[i][j] != 0]
        out = {"type_label": self.type_label, "labels": self.labels,
               "struct": struct, "form": form}
        if any(r is not None for r in self.roots):
            out["roots"] = [list(r) if r is not None else None for r in self.roots]
        if self.rank is not None:
            out["rank"] = self.rank
        return out

    @classmethod
    def from_json(cls, data, validate: bool = True) -> "LieAlgebra":
        if isinstance(data, str):
            data = json.loads(data)
        labels = data["labels"]
        idx = {lab: i for i, lab in enumerate(labels)}
        struct: dict = {}
        for a, b, c, v in data["struct"]:
            i, j, k = idx[a], idx[b], idx[c]
            v = Fraction(v)
            struct.setdefault((i, j), {})[k] = struct.get((i, j), {}).get(k, 0) + v
            struct.setdefault((j, i), {})[k] = struct.get((j, i), {}).get(k, 0) - v
        n = len(labels)
        form = [[Fraction(0)] * n for _ in range(n)]
        for a, b, v in data["form"]:
            form[idx[a]][idx[b]] = form[idx[b]][idx[a]] = Fraction(v)
        roots = data.get("roots")
        if roots is not None:
            roots = [tuple(r) if r is not None else None for r in roots]
        alg = cls(data["type_label"], labels, struct, form, roots=roots, rank=data.get("rank"))
        if validate:
            alg.validate()
        return alg

    def __repr__(self):
        return f"{type(self).__name__}({self.type_label}, dim={self.dim})"


class SimpleLieAlgebra(LieAlgebra):
    """Simple Lie algebra with Chevalley-type basis: Cartan h_i (simple coroots),
    then positive root vectors e, then negative root vectors f, with
    (e_a | e_{-a}) = 1 and the form normalized so long roots have length^2 2."""


def _from_matrices(cls, type_label, rank, items, normalize=True):
    """``items``: list of (label, root or None, matrix)."""
    labels = [lab for lab, _, _ in items]
    roots = [r for _, r, _ in items]
    mats = [m for _, _, m in items]
    n = len(items)
    gram = [[_trace_prod(mats[i], mats[j]) for j in range(n)] for i in range(n)]
    ginv = inverse_dense(gram)

    def coords(x):
        t = [_trace_prod(x, mats[j]) for j in range(n)]
        out = {}
        for i in range(n):
            v = sum((ginv[i][j] * t[j] for j in range(n) if t[j]), Fraction(0))
            if v != 0:
                out[i] = v
        return out

    struct = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                v = coords(_mcomm(mats[i], mats[j]))
                if v:
                    struct[(i, j)] = v
    form = gram
    alg = cls(type_label, labels, struct, form, roots=roots, matrices=mats, rank=rank)
    if normalize and alg.positive_roots:
        th = alg.highest_root
        hth = alg.bracket({th: 1}, {alg.neg(th): 1})
        # coroot of theta: scale so that theta(h) = 2
        val = alg.bracket(hth, {th: 1})[th]
        hth = _vscale(hth, Fraction(2) / val)
        c = Fraction(2) / alg.kappa(hth, hth)
        alg.form = [[v * c for v in row] for row in alg.form]
    return alg


def _chevalley_items(size, rank, pos):
    """``pos``: list of (root, e-matrix) for positive roots.  Returns basis items
    with f scaled so trace(e f) = 1 and Cartan elements the simple coroots."""
    pos = sorted(pos, key=lambda t: (sum(t[0]), t[0][::-1]))
    negs = []
    for r, m in pos:
        f = [list(row) for row in zip(*m)]
        c = _trace_prod(m, f)
        f = [[v / c for v in row] for row in f]
        negs.append((tuple(-x for x in r), f))
    cartan = []
    for i in range(rank):
        simple = tuple(1 if j == i else 0 for j in range(rank))
        e = next(m for r, m in pos if r == simple)
        f = next(m for r, m in negs if r == tuple(-x for x in simple))
        h = _mcomm(e, f)
        # alpha(h) from [h, e] = alpha(h) e
        he = _mcomm(h, e)
        a, b = next((a, b) for a in range(size) for b in range(size) if e[a][b] != 0)
        val = he[a][b] / e[a][b]
        cartan.append([[v * 2 / val for v in row] for row in h])

    def lab(prefix, r):
        return prefix + "_".join(str(abs(c)) for c in r)

    items = [(f"h{i + 1}", None, h) for i, h in enumerate(cartan)]
    items += [(lab("e", r), r, m) for r, m in pos]
    items += [(lab("f", r), r, m) for r, m in negs]
    return items


def _type_a(n):
    size = n + 1
    pos = []
    for i in range(size):
        for j in range(i + 1, size):
            r = tuple(1 if i <= k < j else 0 for k in range(n))
            pos.append((r, _unit(size, i, j)))
    return _chevalley_items(size, n, pos)


def _type_c(n):
    size = 2 * n

    def coords_eps(i, j, sign):
        # simple roots a_k = eps_k - eps_{k+1} (k < n-1), a_{n-1} = 2 eps_{n-1}
        r = [0] * n
        if sign < 0:  # eps_i - eps_j, i < j
            for k in range(i, j):
                r[k] += 1
            return tuple(r)
        # eps_i + eps_j with i <= j
        for k in range(i, n - 1):
            r[k] += 1
        for k in range(j, n - 1):
            r[k] += 1
        r[n - 1] += 1
        return tuple(r)

    pos = []
    for i in range(n):
        for j in range(i + 1, n):
            m = _madd(_unit(size, i, j), _unit(size, n + j, n + i), -1)
            pos.append((coords_eps(i, j, -1), m))
            m = _madd(_unit(size, i, n + j), _unit(size, j, n + i))
            pos.append((coords_eps(i, j, 1), m))
        pos.append((coords_eps(i, i, 1), _unit(size, i, n + i)))
    return _chevalley_items(size, n, pos)


def build_simple(type_label: str) -> SimpleLieAlgebra:
    """Built-in simple algebras: ``A<n>`` (n >= 1) and ``C<n>`` (n >= 2)."""
    label = type_label.strip().upper().replace("_", "")
    if len(label) < 2 or label[0] not in "AC" or not label[1:].isdigit():
        raise ValueError(f"unsupported built-in type {type_label!r}")
    n = int(label[1:])
    if label[0] == "A" and n >= 1:
        items = _type_a(n)
    elif label[0] == "C" and n >= 2:
        items = _type_c(n)
    else:
        raise ValueError(f"unsupported built-in type {type_label!r}")
    return _from_matrices(SimpleLieAlgebra, f"{label[0]}{n}", n, items)


def build_gl(n: int) -> LieAlgebra:
    """gl_n with the trace form; basis E_ij labelled ``E<i>_<j>`` (``u`` for gl_1)."""
    if n < 1:
        raise ValueError("gl_n needs n >= 1")
    if n == 1:
        return LieAlgebra("gl1", ["u"], {}, [[Fraction(1)]], roots=[None], rank=1)
    items = []
    for i in range(n):
        for j in range(n):
            items.append((f"E{i + 1}_{j + 1}", None, _unit(n, i, j)))
    alg = _from_matrices(LieAlgebra, f"gl{n}", n, items, normalize=False)
    return alg


def build_algebra(type_label: str) -> LieAlgebra:
    """``A<n>``, ``C<n>``, ``sl<n>``, ``sp<2n>`` or ``gl<n>``."""
    lab = type_label.strip().lower()
    if lab.startswith("gl") and lab[2:].isdigit():
        return build_gl(int(lab[2:]))
    if lab.startswith("sl") and lab[2:].isdigit():
        return build_simple(f"A{int(lab[2:]) - 1}")
    if lab.startswith("sp") and lab[2:].isdigit():
        m = int(lab[2:])
        if m % 2:
            raise ValueError("sp needs an even size")
        return build_simple(f"C{m // 2}")
    return build_simple(type_label)


# elements as text ------------------------------------------------------------

def render_element(alg: LieAlgebra, x: Vec) -> str:
    if not x:
        return "0"
    parts = []
    for i in sorted(x):
        c = x[i]
        neg = c < 0
        a = -c if neg else c
        body = alg.labels[i] if a == 1 else f"{a}*{alg.labels[i]}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def parse_element(alg: LieAlgebra, text: str) -> Vec:
    """Parse ``2*e1_1 - f1_0 + 1/2*h1`` (or ``0``) into a sparse vector."""
    import re

    s = text.replace(" ", "")
    if s in ("", "0"):
        return {}
    if s[0] not in "+-":
        s = "+" + s
    terms = re.findall(r"[+-][^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"malformed element {text!r}")
    out: Vec = {}
    for t in terms:
        sign = -1 if t[0] == "-" else 1
        body = t[1:]
        if "*" in body:
            c, lab = body.split("*", 1)
            c = Fraction(c)
        else:
            c, lab = Fraction(1), body
        if lab not in alg.index:
            raise ValueError(f"unknown basis label {lab!r}")
        out = _vadd(out, {alg.index[lab]: sign * c})
    return out


# sl2 triples and gradings ----------------------------------------------------------

@dataclass(frozen=True)
class Sl2Triple:
    e: dict
    h: dict
    f: dict

    @property
    def x(self) -> dict:
        return {k: v / 2 for k, v in self.h.items()}

    def check(self, alg: LieAlgebra) -> bool:
        return (alg.bracket(self.e, self.f) == self.h
                and alg.bracket(self.h, self.e) == _vscale(self.e, 2)
                and alg.bracket(self.h, self.f) == _vscale(self.f, -2))


def _solve_e(alg: LieAlgebra, h: Vec, f: Vec, candidates: list[int]) -> Vec | None:
    """Find e in span(candidates) with [e, f] = h."""
    from .linalg import solve

    cols = {c: alg.bracket({c: 1}, f) for c in candidates}
    rows = []
    rhs = []
    for k in range(alg.dim):
        rows.append({n: cols[c][k] for n, c in enumerate(candidates) if k in cols[c]})
        rhs.append(h.get(k, 0))
    sol = solve(rows, rhs, len(candidates))
    if sol is None:
        return None
    return {candidates[n]: v for n, v in sol.items() if v != 0}


def principal_triple(alg: LieAlgebra) -> Sl2Triple:
    simple = alg.simple_roots
    if not simple:
        raise ValueError("principal triple needs root data")
    f = {alg.neg(i): Fraction(1) for i in simple}
    cart = alg.cartan
    # h in the Cartan with alpha_j(h) = 2 for every simple root
    from .linalg import solve

    rows, rhs = [], []
    for j in simple:
        row = {}
        for n, c in enumerate(cart):
            v = alg.bracket({c: 1}, {j: 1}).get(j, 0)
            if v:
                row[n] = v
        rows.append(row)
        rhs.append(Fraction(2))
    sol = solve(rows, rhs, len(cart))
    h = {cart[n]: v for n, v in sol.items() if v != 0}
    e = _solve_e(alg, h, f, simple)
    t = Sl2Triple(e, h, f)
    if e is None or not t.check(alg):
        raise ValueError("failed to build the principal triple")
    return t


def _valid_partition(kind: str, n: int, parts) -> bool:
    if any(p <= 0 for p in parts):
        return False
    if kind == "A":
        return sum(parts) == n + 1
    if kind == "C":
        if sum(parts) != 2 * n:
            return False
        return all(parts.count(p) % 2 == 0 for p in set(parts) if p % 2)
    return False


def _mat_of(alg: LieAlgebra, x: Vec):
    size = len(alg.matrices[0])
    m = _mzero(size)
    for i, c in x.items():
        m = _madd(m, alg.matrices[i], c)
    return m


def _jordan_type(m) -> list[int]:
    size = len(m)
    ranks = [size]
    p = m
    while ranks[-1] > 0:
        ranks.append(_mrank(p))
        if ranks[-1] == ranks[-2]:
            raise ValueError("not nilpotent")
        p = _mmul(p, m)
    # number of blocks of size >= j is rank(m^{j-1}) - rank(m^j)
    ge = [ranks[j - 1] - ranks[j] for j in range(1, len(ranks))]
    parts = []
    for j in range(len(ge)):
        exact = ge[j] - (ge[j + 1] if j + 1 < len(ge) else 0)
        parts += [j + 1] * exact
    return sorted(parts, reverse=True)


def partition_triple(alg: LieAlgebra, parts) -> Sl2Triple:
    """Triple whose f has Jordan type ``parts`` in the defining representation
    (types A and C).  h is the dominant diagonal element; f is a deterministic
    generic element of the -1 eigenspace of ad(h/2); e is solved linearly."""
    parts = sorted((int(p) for p in parts), reverse=True)
    kind = alg.type_label[0]
    n = alg.rank
    if alg.matrices is None or kind not in "AC" or not _valid_partition(kind, n, parts):
        raise ValueError(f"partition {parts} is not valid for {alg.type_label}")
    eig = sorted((Fraction(p - 1 - 2 * i) for p in parts for i in range(p)), reverse=True)
    size = len(alg.matrices[0])
    if kind == "A":
        diag = eig
    else:
        half = eig[:n]
        diag = half + [-v for v in half]
    hm = _mzero(size)
    for i, v in enumerate(diag):
        hm[i][i] = v
    # coordinates of h through the form
    ginv = alg.gram_inverse
    t = [_trace_prod(hm, m) for m in alg.matrices]
    # trace pairing differs from the normalized form by a constant factor
    scale = _trace_prod(alg.matrices[0], alg.matrices[0]) / alg.form[0][0]
    h = {}
    for i in range(alg.dim):
        v = sum((ginv[i][j] * t[j] for j in range(alg.dim) if t[j]), Fraction(0)) / scale
        if v != 0:
            h[i] = v
    if _mat_of(alg, h) != hm:
        raise ValueError("diagonal element is not in the algebra")
    ad_x = {i: alg.bracket(h, {i: 1}).get(i, 0) / 2 for i in range(alg.dim)}
    gm1 = [i for i in range(alg.dim) if ad_x[i] == -1]
    g1 = [i for i in range(alg.dim) if ad_x[i] == 1]
    for coeffs in _coefficient_choices(len(gm1)):
        f = {i: Fraction(c) for i, c in zip(gm1, coeffs) if c}
        if not f:
            continue
        if _jordan_type(_mat_of(alg, f)) != parts:
            continue
        e = _solve_e(alg, h, f, g1)
        if e is None:
            continue
        trip = Sl2Triple(e, h, f)
        if trip.check(alg):
            return trip
    raise ValueError(f"no triple found for partition {parts}")


def _coefficient_choices(m: int):
    yield (1,) * m
    for vals in itertools.product((1, 0, 2, -1, 3), repeat=m):
        yield vals


@dataclass
class AdxGrading:
    degree_of: dict
    pieces: dict
    depth: Fraction
    Pi: list
    Pi_half: list
    Pi_1: list
    integral: bool

    def piece(self, j) -> list[int]:
        return self.pieces.get(Fraction(j), [])

    @property
    def positive_roots(self) -> list[int]:
        return [i for i, j in self.degree_of.items() if j > 0]

    def delta(self, j) -> list[int]:
        return self.piece(j)


def grade(alg: LieAlgebra, triple: Sl2Triple) -> AdxGrading:
    x = triple.x
    degree_of = {}
    for i in range(alg.dim):
        v = alg.bracket(x, {i: 1})
        if any(k != i for k in v):
            raise ValueError(f"basis vector {alg.labels[i]} is not homogeneous for ad_x")
        degree_of[i] = v.get(i, Fraction(0))
    pieces: dict = {}
    for i, j in degree_of.items():
        pieces.setdefault(j, []).append(i)
    depth = max(pieces)
    pos = [i for i, j in degree_of.items() if j > 0]
    for i in pos:
        if alg.roots[i] is None:
            raise ValueError("positive-degree Cartan element: triple not adapted to the basis")
    posroots = {alg.roots[i] for i in pos}
    pi = []
    for i in pos:
        r = alg.roots[i]
        dec = any(tuple(a - b for a, b in zip(r, s)) in posroots for s in posroots)
        if not dec:
            pi.append(i)
    pi.sort(key=lambda i: (degree_of[i], alg.roots[i][::-1]))
    integral = all(j.denominator == 1 for j in degree_of.values())
    return AdxGrading(
        degree_of=degree_of,
        pieces={j: sorted(v) for j, v in sorted(pieces.items())},
        depth=depth,
        Pi=pi,
        Pi_half=[i for i in pi if degree_of[i] == Fraction(1, 2)],
        Pi_1=[i for i in pi if degree_of[i] == 1],
        integral=integral,
    )


# condition (F) -------------------------------------------------------------------------

TAU = RatFunc.symbol()  # stands for t^{-1}


@dataclass
class LoopMatrix:
    """ad_s for s = f + y t^{-1}, entries in Q(tau) with tau = t^{-1}."""

    rows: list
    f: dict
    y: dict

    def render(self) -> list[list[str]]:
        return [[c.render("tau") for c in row] for row in self.rows]


def loop_matrix(alg: LieAlgebra, f: Vec, y: Vec) -> LoopMatrix:
    af = alg.ad_matrix(f)
    ay = alg.ad_matrix(y)
    rows = [[as_coeff(a) + as_coeff(b) * TAU for a, b in zip(ra, rb)] for ra, rb in zip(af, ay)]
    return LoopMatrix(rows, f, y)


# univariate polynomials over Q(tau) as coefficient lists, low degree first

def _ptrim(p):
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return p


def _pmonic(p):
    p = _ptrim(p)
    if not p:
        return p
    inv = p[-1].inverse()
    return [c * inv for c in p]


def _pdivmod(a, b):
    a, b = _ptrim(a), _ptrim(b)
    if not b:
        raise ZeroDivisionError
    q = [ZERO] * max(len(a) - len(b) + 1, 1)
    inv = b[-1].inverse()
    while len(a) >= len(b) and a:
        c = a[-1] * inv
        s = len(a) - len(b)
        q[s] = c
        for i, bc in enumerate(b):
            a[s + i] = a[s + i] - c * bc
        a = _ptrim(a)
    return _ptrim(q), a


def _pgcd(a, b):
    a, b = _ptrim(a), _ptrim(b)
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    return _pmonic(a)


def _pmul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _ptrim(out)


def _plcm(a, b):
    g = _pgcd(a, b)
    q, _ = _pdivmod(_pmul(a, b), g)
    return _pmonic(q)


def _pderiv(p):
    return _ptrim([c * i for i, c in enumerate(p)][1:])


def _matvec(rows, v):
    return [sum((r[j] * v[j] for j in range(len(v)) if not v[j].is_zero() and not r[j].is_zero()), ZERO)
            for r in rows]


def minimal_polynomial(rows) -> list:
    """Minimal polynomial (monic, low degree first) of a square matrix over Q(tau),
    the lcm of the local minimal polynomials of the standard basis vectors."""
    from .linalg import solve

    n = len(rows)
    mu = [ONE]
    for i in range(n):
        v = [ONE if j == i else ZERO for j in range(n)]
        krylov = [v]
        while True:
            w = _matvec(rows, krylov[-1])
            m = len(krylov)
            eq_rows = [{c: krylov[c][r] for c in range(m) if not krylov[c][r].is_zero()} for r in range(n)]
            sol = solve(eq_rows, w, m)
            if sol is not None:
                local = [-sol.get(c, ZERO) for c in range(m)] + [ONE]
                break
            krylov.append(w)
        mu = _plcm(mu, local)
    return mu


@dataclass
class FReport:
    F1: bool
    F2: bool
    F3: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.F1 and self.F2 and self.F3

    def to_json(self) -> dict:
        return {"F1": self.F1, "F2": self.F2, "F3": self.F3, "pass": self.passed,
                "witnesses": self.witnesses}


def _render_tau_poly(p) -> str:
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c.is_zero():
            continue
        cs = c.render("tau")
        mon = "" if i == 0 else ("mu" if i == 1 else f"mu^{i}")
        if not mon:
            parts.append(f"({cs})")
        elif c.is_one():
            parts.append(mon)
        else:
            parts.append(f"({cs})*{mon}")
    return " + ".join(parts) if parts else "0"


def check_condition_F(alg: LieAlgebra, triple: Sl2Triple, grading: AdxGrading, y: Vec) -> FReport:
    """Decide (F1) integrality, (F2) semisimplicity of s = f + y t^{-1} and
    (F3) abelian Ker(ad_s) plus ad_s(degree 1) = g_0."""
    d = grading.depth
    bad = [i for i in y if grading.degree_of[i] != d]
    if bad:
        raise ValueError(f"y is not in g_{d}: component {alg.labels[bad[0]]}")
    w: dict = {}
    f1 = grading.integral
    if not f1:
        w["F1"] = "half-integral ad_x eigenvalues"
    lm = loop_matrix(alg, triple.f, y)
    mu = minimal_polynomial(lm.rows)
    g = _pgcd(mu, _pderiv(mu))
    f2 = len(g) <= 1
    w["minimal_polynomial"] = _render_tau_poly(mu) + "  (tau = t^-1)"
    if not f2:
        w["F2"] = "repeated factor " + _render_tau_poly(g)
    # kernel over Q(tau) and its brackets
    n = alg.dim
    rows = [{j: c for j, c in enumerate(r) if not c.is_zero()} for r in lm.rows]
    kern, _ = nullspace(rows, n, ONE)
    abelian = True
    for a, b in itertools.combinations(kern, 2):
        acc: dict = {}
        for i, x in a.items():
            for j, z in b.items():
                for k, c in alg.struct.get((i, j), {}).items():
                    acc[k] = acc.get(k, ZERO) + x * z * c
        if any(not v.is_zero() for v in acc.values()):
            abelian = False
            w["F3"] = "kernel not abelian"
            break
    w["kernel_dim"] = len(kern)
    # image of the degree-one piece g_1 + g_{-d} t
    g0 = grading.piece(0)
    img = Echelon()
    for a in grading.piece(1):
        img.add({k: v for k, v in alg.bracket(triple.f, {a: 1}).items()})
    for b in grading.piece(-d):
        img.add({k: v for k, v in alg.bracket(y, {b: 1}).items()})
    image_ok = img.rank == len(g0) and all(p in g0 for p in img.rows)
    if not image_ok:
        w.setdefault("F3", f"image rank {img.rank} != dim g_0 = {len(g0)}")
    w["image_rank"] = img.rank
    return FReport(f1, f2, abelian and image_ok, w)


def default_y(alg: LieAlgebra, grading: AdxGrading) -> Vec:
    """The highest-root vector, which lies in g_d for the principal grading."""
    th = alg.highest_root
    if grading.degree_of[th] != grading.depth:
        raise ValueError("highest root vector not in g_d; supply y explicitly")
    return {th: Fraction(1)}


def scan_y(alg: LieAlgebra, triple: Sl2Triple, grading: AdxGrading, values=(1, 2, 3, -1)):
    """First y in g_d (small integer coefficients, deterministic order) for which
    (F) holds, or None."""
    gd = grading.piece(grading.depth)
    for coeffs in itertools.product((0,) + tuple(values), repeat=len(gd)):
        y = {i: Fraction(c) for i, c in zip(gd, coeffs) if c}
        if not y:
            continue
        if check_condition_F(alg, triple, grading, y).passed:
            return y
    return None

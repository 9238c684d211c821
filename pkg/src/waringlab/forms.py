"""Homogeneous forms with rational coefficients.

A :class:`Form` of degree ``d`` in the variables ``x0..xn`` stores its
nonzero coefficients keyed by exponent tuples.  Monomials of a fixed degree
are always laid out in graded lexicographic order with ``x0 > x1 > ...``.
"""

from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import exact
from .exact import format_rat, parse_rat

Exponent = tuple[int, ...]


class FormError(ValueError):
    pass


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple[Exponent, ...]:
    """Exponent tuples of degree ``d`` in ``n+1`` variables, lex-descending."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n + 1), d):
        exp = [0] * (n + 1)
        for i in combo:
            exp[i] += 1
        out.append(tuple(exp))
    out.sort(reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict[Exponent, int]:
    return {e: i for i, e in enumerate(monomials(n, d))}


@lru_cache(maxsize=None)
def multinomials(n: int, d: int) -> tuple[int, ...]:
    fd = math.factorial(d)
    return tuple(fd // math.prod(math.factorial(a) for a in e) for e in monomials(n, d))


def dim_forms(n: int, d: int) -> int:
    return math.comb(n + d, d)


class Form:
    """Immutable homogeneous polynomial; equality compares coefficient maps."""

    __slots__ = ("n", "d", "_coeffs", "_hash")

    def __init__(self, n: int, d: int, coeffs: Mapping[Exponent, object] = ()):
        if n < 0 or d < 0:
            raise FormError("n and d must be nonnegative")
        clean: dict[Exponent, Fraction] = {}
        for exp, c in dict(coeffs).items():
            exp = tuple(int(a) for a in exp)
            if len(exp) != n + 1 or any(a < 0 for a in exp) or sum(exp) != d:
                raise FormError(f"exponent {exp} is not a degree-{d} monomial in {n + 1} variables")
            c = Fraction(c)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
        self.n = n
        self.d = d
        self._coeffs = {e: c for e, c in clean.items() if c}
        self._hash = None

    @property
    def coeffs(self) -> dict[Exponent, Fraction]:
        return dict(self._coeffs)

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self._coeffs.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._coeffs

    def vector(self) -> list[Fraction]:
        """Coefficients in the fixed monomial order."""
        return [self._coeffs.get(e, Fraction(0)) for e in monomials(self.n, self.d)]

    @classmethod
    def from_vector(cls, n: int, d: int, vec: Sequence) -> "Form":
        mons = monomials(n, d)
        if len(vec) != len(mons):
            raise FormError(f"expected {len(mons)} coefficients, got {len(vec)}")
        return cls(n, d, {e: c for e, c in zip(mons, vec) if c})

    @classmethod
    def zero(cls, n: int, d: int) -> "Form":
        return cls(n, d)

    @classmethod
    def fermat(cls, n: int, d: int = 3) -> "Form":
        return cls(n, d, {tuple(d if j == i else 0 for j in range(n + 1)): 1 for i in range(n + 1)})

    def _check_compatible(self, other: "Form") -> None:
        if (self.n, self.d) != (other.n, other.d):
            raise FormError(f"incompatible forms: (n={self.n}, d={self.d}) vs (n={other.n}, d={other.d})")

    def __add__(self, other: "Form") -> "Form":
        self._check_compatible(other)
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Form(self.n, self.d, out)

    def __neg__(self) -> "Form":
        return Form(self.n, self.d, {e: -c for e, c in self._coeffs.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, lam) -> "Form":
        lam = Fraction(lam)
        return Form(self.n, self.d, {e: lam * c for e, c in self._coeffs.items()})

    def __rmul__(self, lam) -> "Form":
        return self.scale(lam)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return (self.n, self.d, self._coeffs) == (other.n, other.d, other._coeffs)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.d, frozenset(self._coeffs.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Form(n={self.n}, d={self.d}, {self})"

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for e in monomials(self.n, self.d):
            c = self._coeffs.get(e)
            if c is None:
                continue
            mon = "*".join(f"x{i}^{a}" if a > 1 else f"x{i}" for i, a in enumerate(e) if a)
            parts.append(f"{format_rat(c)}*{mon}" if mon else format_rat(c))
        return " + ".join(parts)


def _coords(l: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in l)


def power_vector(l: Sequence, d: int) -> list[Fraction]:
    """Coefficient vector of ``(l . x)^d`` in the fixed monomial order."""
    return list(_power_vector(_coords(l), d))


@lru_cache(maxsize=65536)
def _power_vector(l: tuple[Fraction, ...], d: int) -> tuple[Fraction, ...]:
    n = len(l) - 1
    # integer arithmetic on a common-denominator representative
    den = exact.common_denominator(l)
    ints = exact.integer_row(l)
    table = [[v ** k for k in range(d + 1)] for v in ints]
    scale = den ** d
    out = []
    for e, m in zip(monomials(n, d), multinomials(n, d)):
        c = m
        for i, a in enumerate(e):
            if a:
                c *= table[i][a]
        out.append(Fraction(c) / scale)
    return tuple(out)


def power(l: Sequence, d: int) -> Form:
    """The form ``(l0 x0 + ... + ln xn)^d``."""
    if d < 1:
        raise FormError("degree must be at least 1")
    l = _coords(l)
    if not any(l):
        raise FormError("zero linear form")
    n = len(l) - 1
    return Form.from_vector(n, d, power_vector(l, d))


def combine(points: Sequence[Sequence], coeffs: Sequence, d: int, n: int | None = None) -> Form:
    """``sum coeffs[i] * power(points[i], d)``."""
    if len(points) != len(coeffs):
        raise FormError(f"{len(points)} points but {len(coeffs)} coefficients")
    if not points:
        if n is None:
            raise FormError("empty combination needs n")
        return Form.zero(n, d)
    n = len(points[0]) - 1
    total = [Fraction(0)] * dim_forms(n, d)
    for p, a in zip(points, coeffs):
        a = Fraction(a)
        if not a:
            continue
        if len(p) != n + 1:
            raise FormError("points of different dimensions")
        total = [t + a * c for t, c in zip(total, power_vector(p, d))]
    return Form.from_vector(n, d, total)


def partial_derivative(f: Form, i: int) -> Form:
    if not 0 <= i <= f.n:
        raise FormError(f"variable index {i} out of range 0..{f.n}")
    if f.d < 1:
        raise FormError("cannot differentiate a constant")
    out = {}
    for e, c in f.coeffs.items():
        if e[i]:
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = c * e[i]
    return Form(f.n, f.d - 1, out)


def first_catalecticant(f: Form) -> list[list[Fraction]]:
    """Row ``i`` holds the coefficients of the ``i``-th first partial."""
    if f.d < 2:
        raise FormError("catalecticant needs degree at least 2")
    return [partial_derivative(f, i).vector() for i in range(f.n + 1)]


def catalecticant_rank(f: Form) -> int:
    return exact.rank(first_catalecticant(f))


def is_concise(f: Form) -> bool:
    return catalecticant_rank(f) == f.n + 1


def _derivative_by(f: Form, b: Exponent) -> Form:
    g = f
    for i, k in enumerate(b):
        for _ in range(k):
            g = partial_derivative(g, i)
    return g


def concise_support(f: Form) -> tuple[list[tuple[Fraction, ...]], Form]:
    """Span of the order-``d-1`` partials and ``f`` rewritten in it.

    Returns ``(basis, g)`` where ``basis`` lists linear forms ``v_1..v_k`` (as
    coefficient vectors) spanning the subspace, and ``g`` is a form in ``k``
    variables with ``g(v_1 . x, ..., v_k . x) = f``.
    """
    if f.d < 2:
        raise FormError("concise support needs degree at least 2")
    if f.is_zero():
        raise FormError("zero form")
    rows = [_derivative_by(f, b).vector() for b in monomials(f.n, f.d - 1)]
    red, pivots = exact.rref(rows)
    basis = [tuple(red[i]) for i in range(len(pivots))]
    k = len(basis)
    # Complete the basis with unit vectors off the pivot columns; in the new
    # coordinates y = M x the form only involves y_0..y_{k-1}.
    others = [c for c in range(f.n + 1) if c not in set(pivots)]
    full = [list(v) for v in basis] + [[Fraction(int(j == c)) for j in range(f.n + 1)] for c in others]
    g_sub = exact.transpose(exact.inverse(full))
    h = apply_linear(g_sub, f)
    reduced = {}
    for e, c in h.coeffs.items():
        if any(e[k:]):
            raise AssertionError("form does not live in its derivative span")
        reduced[e[:k]] = c
    return basis, Form(k - 1, f.d, reduced)


def _linear_poly_power(lin: Sequence[Fraction], a: int, cache: dict) -> dict[Exponent, Fraction]:
    key = (tuple(lin), a)
    if key not in cache:
        n = len(lin) - 1
        cache[key] = dict(zip(monomials(n, a), power_vector(lin, a))) if a else {(0,) * (n + 1): Fraction(1)}
    return cache[key]


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        if not c1:
            continue
        for e2, c2 in q.items():
            if not c2:
                continue
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return out


def apply_linear(g: Sequence[Sequence], f: Form) -> Form:
    """Substitute ``x -> g^T x`` so that ``power(g l, d) == apply_linear(g, power(l, d))``."""
    size = f.n + 1
    if len(g) != size or any(len(row) != size for row in g):
        raise FormError(f"expected a {size}x{size} matrix")
    if not exact.is_invertible(g):
        raise FormError("singular linear map")
    # (g^T x)_i = sum_j g[j][i] x_j
    images = [tuple(Fraction(g[j][i]) for j in range(size)) for i in range(size)]
    cache: dict = {}
    out: dict[Exponent, Fraction] = {}
    for e, c in f.coeffs.items():
        term = {(0,) * size: c}
        for i, a in enumerate(e):
            if a:
                term = _poly_mul(term, _linear_poly_power(images[i], a, cache))
        for e2, c2 in term.items():
            out[e2] = out.get(e2, Fraction(0)) + c2
    return Form(f.n, f.d, out)


def to_dict(f: Form) -> dict:
    return {
        "n": f.n,
        "d": f.d,
        "terms": [
            {"exp": list(e), "coef": format_rat(c)}
            for e in monomials(f.n, f.d)
            if (c := f.coefficient(e))
        ],
    }


def from_dict(obj: Mapping) -> Form:
    try:
        n, d = int(obj["n"]), int(obj["d"])
        terms = obj["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormError(f"malformed form object: {exc}") from exc
    coeffs: dict[Exponent, Fraction] = {}
    for t in terms:
        exp = tuple(int(a) for a in t["exp"])
        if exp in coeffs:
            raise FormError(f"duplicate monomial {exp}")
        coeffs[exp] = parse_rat(t["coef"])
    return Form(n, d, coeffs)


def dumps(f: Form) -> str:
    return json.dumps(to_dict(f))


def loads(text: str) -> Form:
    return from_dict(json.loads(text))


def euler_check(f: Form) -> bool:
    """``sum_i x_i * d f/dx_i == d * f`` coefficient-wise."""
    total: dict[Exponent, Fraction] = {}
    for i in range(f.n + 1):
        for e, c in partial_derivative(f, i).coeffs.items():
            e2 = list(e)
            e2[i] += 1
            total[tuple(e2)] = total.get(tuple(e2), Fraction(0)) + c
    return Form(f.n, f.d, total) == f.scale(f.d)


def sum_forms(forms: Iterable[Form], n: int, d: int) -> Form:
    acc = Form.zero(n, d)
    for f in forms:
        acc = acc + f
    return acc

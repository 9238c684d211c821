"""Waring decompositions: certification, comparison and structural reports."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from . import exact, points
from .exact import format_rat, parse_rat
from .forms import Form, combine, concise_support, is_concise, power_vector
from .points import PointSet, kruskal_rank, span_dim


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class Decomposition:
    pts: PointSet
    coeffs: tuple[Fraction, ...]
    d: int

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if len(coeffs) != len(self.pts):
            raise DecompositionError(f"{len(self.pts)} points but {len(coeffs)} coefficients")
        object.__setattr__(self, "coeffs", coeffs)

    def __len__(self):
        return len(self.pts)

    @property
    def n(self) -> int:
        return self.pts.n

    def form(self) -> Form:
        return combine([p.coords for p in self.pts], self.coeffs, self.d, n=self.pts.n)

    def coeff_of(self, p) -> Fraction:
        return self.coeffs[self.pts.pts.index(p)]


def power_matrix(a: PointSet, d: int) -> list[list[Fraction]]:
    """Columns are the ``d``-th power vectors of the points of ``a``."""
    return exact.transpose([power_vector(p.coords, d) for p in a])


def powers_independent(a: PointSet, d: int) -> bool:
    if len(a) == 0:
        return True
    return exact.rank([power_vector(p.coords, d) for p in a]) == len(a)


def coefficients_for(f: Form, a: PointSet) -> Optional[tuple[Fraction, ...]]:
    """Solve ``f = sum alpha_i L_i^d`` over the points of ``a``; None if impossible."""
    if a.n != f.n:
        raise DecompositionError(f"point set lives in P^{a.n}, form has n={f.n}")
    if len(a) == 0:
        return () if f.is_zero() else None
    return exact.solve_linear(power_matrix(a, f.d), f.vector())


def decomposition_of(f: Form, a: PointSet) -> Decomposition:
    coeffs = coefficients_for(f, a)
    if coeffs is None:
        raise DecompositionError("point set does not decompose the form")
    return Decomposition(a, coeffs, f.d)


def is_nonredundant(f: Form, a: PointSet) -> bool:
    coeffs = coefficients_for(f, a)
    if coeffs is None:
        raise DecompositionError("point set does not decompose the form")
    return powers_independent(a, f.d) and all(coeffs)


def certify(f: Form, dec: Decomposition) -> None:
    """Raise unless ``dec`` is an exact, non-redundant decomposition of ``f``."""
    if dec.d != f.d:
        raise DecompositionError("degree mismatch")
    coeffs = coefficients_for(f, dec.pts)
    if coeffs is None:
        raise DecompositionError("point set does not decompose the form")
    if not powers_independent(dec.pts, f.d):
        raise DecompositionError("powers are linearly dependent")
    if coeffs != dec.coeffs:
        raise DecompositionError("stored coefficients do not reproduce the form")
    if not all(coeffs):
        raise DecompositionError("decomposition has a zero coefficient")


def disjointify(f: Form, a: Decomposition, b: Decomposition) -> tuple[Form, Decomposition, Decomposition]:
    """Cancel the shared points of two decompositions.

    Returns ``(f', a', b')`` where ``f'`` is ``f`` minus the shared terms of
    ``a``, ``a'`` is ``a`` without the shared points and ``b'`` keeps the
    shared points whose coefficients differ (with the difference as
    coefficient) followed by the points of ``b`` not in ``a``.
    """
    certify(f, a)
    certify(f, b)
    shared = a.pts.intersection(b.pts)
    f2 = f - combine([p.coords for p in shared], [a.coeff_of(p) for p in shared], f.d, n=f.n)
    a_keep = [i for i, p in enumerate(a.pts) if p not in shared]
    a2 = Decomposition(a.pts.subset(a_keep), [a.coeffs[i] for i in a_keep], f.d)
    b_pts, b_coeffs = [], []
    for p in shared:
        delta = b.coeff_of(p) - a.coeff_of(p)
        if delta:
            b_pts.append(p)
            b_coeffs.append(delta)
    for p, c in zip(b.pts, b.coeffs):
        if p not in shared:
            b_pts.append(p)
            b_coeffs.append(c)
    b2 = Decomposition(PointSet(f.n, b_pts), b_coeffs, f.d)
    return f2, a2, b2


def check_sum_bound(f: Form, a: Decomposition, b: Decomposition) -> tuple[bool, int]:
    """``len(a) + len(b) >= d + 2n`` for a concise ``f``; returns (holds, slack)."""
    if not is_concise(f):
        raise DecompositionError("form is not concise")
    certify(f, a)
    certify(f, b)
    slack = len(a) + len(b) - (f.d + 2 * f.n)
    return slack >= 0, slack


# Pair reports ----------------------------------------------------------------


def _two_part_cover(m: int, fits: Callable[[int], bool]) -> bool:
    """Is there a 2-partition of ``range(m)`` (masks) with both parts fitting?"""
    if m == 0:
        return fits(0)
    full = (1 << m) - 1
    cache: dict[int, bool] = {}

    def ok(mask: int) -> bool:
        if mask not in cache:
            cache[mask] = fits(mask)
        return cache[mask]

    # point 0 always sits in the first part; the second part may be empty
    for rest in range(1 << (m - 1)):
        mask = 1 | (rest << 1)
        if ok(mask) and ok(full ^ mask):
            return True
    return False


def on_two_flats(pts: Sequence[Sequence], max_dim: int, rank_fn=None) -> bool:
    """Can ``pts`` be split into two parts, each spanning at most a ``max_dim``-flat?"""
    rank_fn = rank_fn or exact.rank
    rows = list(pts)

    def fits(mask: int) -> bool:
        sub = [rows[i] for i in range(len(rows)) if mask >> i & 1]
        return not sub or rank_fn(sub) <= max_dim + 1

    return _two_part_cover(len(rows), fits)


@dataclass(frozen=True)
class PairReport:
    len_a: int
    len_b: int
    intersection: int
    diff: PointSet
    diff_collinear: bool
    diff_two_lines: bool
    diff_two_planes: bool
    kruskal_a: int
    kruskal_b: int

    def main_prop_holds(self, n: int) -> bool:
        """At least one of the two structural alternatives for length-(n+2) pairs."""
        return (self.intersection >= n - 2 and self.diff_two_planes) or (
            self.intersection >= n - 3 and self.diff_two_lines
        )

    def to_dict(self) -> dict:
        return {
            "len_a": self.len_a,
            "len_b": self.len_b,
            "intersection": self.intersection,
            "diff": points.to_dict(self.diff),
            "diff_collinear": self.diff_collinear,
            "diff_two_lines": self.diff_two_lines,
            "diff_two_planes": self.diff_two_planes,
            "kruskal_a": self.kruskal_a,
            "kruskal_b": self.kruskal_b,
        }


def pair_report(a: PointSet, b: PointSet) -> PairReport:
    if a.n != b.n:
        raise DecompositionError("point sets live in different spaces")
    diff = a.difference(b).union(b.difference(a))
    rows = diff.int_matrix()
    collinear = len(diff) == 0 or span_dim(diff) <= 1
    two_lines = collinear or on_two_flats(rows, 1)
    two_planes = two_lines or on_two_flats(rows, 2)
    return PairReport(
        len_a=len(a),
        len_b=len(b),
        intersection=len(a.intersection(b)),
        diff=diff,
        diff_collinear=collinear,
        diff_two_lines=two_lines,
        diff_two_planes=two_planes,
        kruskal_a=kruskal_rank(a) if len(a) else 0,
        kruskal_b=kruskal_rank(b) if len(b) else 0,
    )


def predict_cases(a: PointSet) -> frozenset[str]:
    """Trichotomy labels compatible with the Kruskal rank of a length-(n+2) set."""
    if len(a) != a.n + 2 or span_dim(a) != a.n:
        raise DecompositionError("prediction needs n+2 points spanning P^n")
    k = kruskal_rank(a)
    if k >= 4:
        return frozenset({"I"})
    if k == 3:
        return frozenset({"III"})
    return frozenset({"II", "III"})


def verify_fermat_plus_one(f: Form, a: Decomposition, b: Decomposition) -> bool:
    """Structure of a concise form with decompositions of lengths n+1 and n+2."""
    n = f.n
    if not is_concise(f):
        raise DecompositionError("form is not concise")
    if len(a) != n + 1 or len(b) != n + 2:
        raise DecompositionError(f"expected lengths {n + 1} and {n + 2}, got {len(a)} and {len(b)}")
    certify(f, a)
    certify(f, b)
    rep = pair_report(a.pts, b.pts)
    return f.d == 3 and rep.intersection >= n - 1 and rep.diff_collinear


# Serialization ---------------------------------------------------------------


def to_dict(dec: Decomposition) -> dict:
    return {"points": points.to_dict(dec.pts), "coeffs": [format_rat(c) for c in dec.coeffs], "d": dec.d}


def from_dict(obj: Mapping) -> Decomposition:
    try:
        pts = points.from_dict(obj["points"])
        coeffs = [parse_rat(c) for c in obj["coeffs"]]
        d = int(obj["d"])
    except (KeyError, TypeError) as exc:
        raise DecompositionError(f"malformed decomposition object: {exc}") from exc
    return Decomposition(pts, coeffs, d)


def dumps(dec: Decomposition) -> str:
    return json.dumps(to_dict(dec))


def loads(text: str) -> Decomposition:
    return from_dict(json.loads(text))


def shared_support(f: Form) -> int:
    """Dimension of the concise support of ``f`` (0 for the zero form)."""
    if f.is_zero():
        return 0
    basis, _ = concise_support(f)
    return len(basis)

"""Finite sets of points in projective space.

Points are stored by a canonical representative whose first nonzero
coordinate is 1.  Everything here (spans, Kruskal rank, Hilbert functions,
Cayley-Bacharach) is computed with exact ranks.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from . import exact
from .exact import format_rat, parse_rat
from .forms import monomials


class PointError(ValueError):
    pass


@dataclass(frozen=True)
class ProjPoint:
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.coords)
        lead = next((c for c in coords if c), None)
        if lead is None:
            raise PointError("the zero vector is not a projective point")
        if lead != 1:
            coords = tuple(c / lead for c in coords)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    def integer_coords(self) -> tuple[int, ...]:
        """Primitive integer representative (same projective point)."""
        return _primitive(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __repr__(self):
        return "[" + ":".join(format_rat(c) for c in self.coords) + "]"


@lru_cache(maxsize=65536)
def _primitive(coords: tuple[Fraction, ...]) -> tuple[int, ...]:
    row = exact.integer_row(coords)
    g = math.gcd(*row)
    return tuple(x // g for x in row)


def point(*coords) -> ProjPoint:
    if len(coords) == 1 and not isinstance(coords[0], (int, Fraction)):
        coords = tuple(coords[0])
    return ProjPoint(tuple(coords))


class PointSet:
    """Ordered set of pairwise distinct points of P^n."""

    __slots__ = ("n", "pts")

    def __init__(self, n: int, pts: Iterable = ()):
        pts = tuple(p if isinstance(p, ProjPoint) else ProjPoint(tuple(p)) for p in pts)
        for p in pts:
            if p.n != n:
                raise PointError(f"point {p!r} does not live in P^{n}")
        if len(set(pts)) != len(pts):
            raise PointError("duplicate points")
        self.n = n
        self.pts = pts

    def __len__(self) -> int:
        return len(self.pts)

    def __iter__(self) -> Iterator[ProjPoint]:
        return iter(self.pts)

    def __getitem__(self, i):
        return self.pts[i]

    def __contains__(self, p) -> bool:
        if not isinstance(p, ProjPoint):
            p = ProjPoint(tuple(p))
        return p in self.pts

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.n == other.n and self.pts == other.pts

    def __hash__(self):
        return hash((self.n, self.pts))

    def __repr__(self):
        return f"PointSet(n={self.n}, {list(self.pts)!r})"

    def as_set(self) -> frozenset:
        return frozenset(self.pts)

    def subset(self, indices: Iterable[int]) -> "PointSet":
        return PointSet(self.n, (self.pts[i] for i in indices))

    def without(self, i: int) -> "PointSet":
        return PointSet(self.n, self.pts[:i] + self.pts[i + 1:])

    def union(self, other: "PointSet") -> "PointSet":
        seen = set(self.pts)
        return PointSet(self.n, self.pts + tuple(p for p in other.pts if p not in seen))

    def intersection(self, other: "PointSet") -> "PointSet":
        keep = other.as_set()
        return PointSet(self.n, (p for p in self.pts if p in keep))

    def difference(self, other: "PointSet") -> "PointSet":
        drop = other.as_set()
        return PointSet(self.n, (p for p in self.pts if p not in drop))

    def matrix(self) -> list[tuple[Fraction, ...]]:
        return [p.coords for p in self.pts]

    def int_matrix(self) -> list[tuple[int, ...]]:
        """Rows are primitive integer representatives; same row ranks as ``matrix``."""
        return [p.integer_coords() for p in self.pts]

    def transform(self, g: Sequence[Sequence]) -> "PointSet":
        """Image under ``v -> g v``."""
        return PointSet(self.n, (ProjPoint(tuple(exact.matvec(g, p.coords))) for p in self.pts))


def standard_set(n: int, r: int) -> PointSet:
    """``{e_0, ..., e_n, e_0 + ... + e_{r-1}}``."""
    if not 2 <= r <= n + 1:
        raise PointError(f"r must lie in 2..{n + 1}")
    basis = [tuple(int(i == j) for j in range(n + 1)) for i in range(n + 1)]
    extra = tuple(int(j < r) for j in range(n + 1))
    return PointSet(n, basis + [extra])


def span_dim(a: PointSet) -> int:
    """Projective dimension of the linear span."""
    if len(a) == 0:
        raise PointError("span of an empty point set")
    return exact.rank(a.int_matrix()) - 1


def is_independent(a: PointSet) -> bool:
    return exact.rank(a.int_matrix()) == len(a)


def _first_dependent(a: PointSet, max_size: int):
    rows = a.int_matrix()
    for k in range(1, max_size + 1):
        for idx in itertools.combinations(range(len(a)), k):
            if exact.rank([rows[i] for i in idx]) < k:
                return idx
    return None


def kruskal_rank(a: PointSet) -> int:
    """Largest ``k`` such that every ``k`` points of ``a`` are independent."""
    if len(a) == 0:
        raise PointError("Kruskal rank of an empty set")
    cap = min(len(a), a.n + 1)
    dep = _first_dependent(a, cap)
    return cap if dep is None else len(dep) - 1


def is_lgp(a: PointSet) -> bool:
    return kruskal_rank(a) == min(len(a), a.n + 1)


def minimal_dependent_subset(a: PointSet) -> PointSet:
    """Smallest dependent subset, ties broken by lexicographic index order."""
    if is_independent(a):
        raise PointError("point set is linearly independent")
    return a.subset(_first_dependent(a, len(a)))


def normalize_orbit(a: PointSet) -> tuple[list[list[Fraction]], int]:
    """Return ``(g, r)`` with ``g`` invertible and ``g . a == standard_set(n, r)`` as sets."""
    n = a.n
    if len(a) != n + 2 or span_dim(a) != n:
        raise PointError("normalize_orbit needs n+2 points spanning P^n")
    rows = a.matrix()
    for c in range(len(a)):
        base = [i for i in range(len(a)) if i != c]
        cols = exact.transpose([rows[i] for i in base])
        if exact.rank(cols) < n + 1:
            continue
        mu = exact.solve_linear(cols, rows[c])
        support = [base[j] for j, m in enumerate(mu) if m]
        rest = [base[j] for j, m in enumerate(mu) if not m]
        order = support + rest
        weight = {base[j]: m for j, m in enumerate(mu)}
        # columns scaled by mu send the complement point to e_0 + ... + e_{r-1}
        p = exact.transpose([[weight[i] * x for x in rows[i]] if weight[i] else list(rows[i]) for i in order])
        g = exact.inverse(p)
        return g, len(support)
    raise PointError("no n+1 independent points found")


# Hilbert functions ---------------------------------------------------------


def evaluation_matrix(z: PointSet, t: int) -> list[list[int]]:
    mons = monomials(z.n, t)
    out = []
    for p in z:
        v = p.integer_coords()
        out.append([math.prod(x ** e for x, e in zip(v, m) if e) for m in mons])
    return out


def hilbert_function(z: PointSet, t: int) -> int:
    if t < 0:
        raise PointError("degree must be nonnegative")
    if len(z) == 0:
        return 0
    return exact.rank(evaluation_matrix(z, t))


@dataclass(frozen=True)
class HVector:
    values: tuple[int, ...]
    tau: int

    def __getitem__(self, t: int) -> int:
        """Dh_Z(t), zero past tau (and for negative t)."""
        if t < 0 or t >= len(self.values):
            return 0
        return self.values[t]

    def __len__(self):
        return len(self.values)


def h_vector(z: PointSet) -> HVector:
    values = []
    prev = 0
    t = 0
    while prev < len(z):
        h = hilbert_function(z, t)
        values.append(h - prev)
        prev = h
        t += 1
    return HVector(tuple(values), len(values) - 1)


def cb_check(z: PointSet, t: int) -> bool:
    """Cayley-Bacharach in degree ``t``: no point is separated from the rest."""
    if len(z) < 2:
        raise PointError("Cayley-Bacharach needs at least two points")
    full = hilbert_function(z, t)
    return all(hilbert_function(z.without(i), t) == full for i in range(len(z)))


def cb_hf_inequality(z: PointSet, t: int) -> bool:
    dh = h_vector(z)
    for s in range(t + 2):
        head = sum(dh[i] for i in range(s + 1))
        tail = sum(dh[i] for i in range(t + 1 - s, t + 2))
        if head > tail:
            return False
    return True


def macaulay_decay_holds(dh: HVector) -> bool:
    """If Dh(t) <= t then Dh(t+1) <= Dh(t), for every t up to tau."""
    return all(dh[t + 1] <= dh[t] for t in range(dh.tau + 1) if dh[t] <= t)


# Serialization -------------------------------------------------------------


def to_dict(a: PointSet) -> dict:
    return {"n": a.n, "points": [[format_rat(c) for c in p.coords] for p in a]}


def from_dict(obj: Mapping) -> PointSet:
    try:
        n = int(obj["n"])
        raw = obj["points"]
    except (KeyError, TypeError, ValueError) as exc:
        raise PointError(f"malformed point set object: {exc}") from exc
    return PointSet(n, [tuple(parse_rat(c) for c in p) for p in raw])


def dumps(a: PointSet) -> str:
    return json.dumps(to_dict(a))


def loads(text: str) -> PointSet:
    return from_dict(json.loads(text))

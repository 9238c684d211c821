"""Tangent spaces to Veronese varieties and Terracini defects."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import exact
from .forms import dim_forms, monomial_index, monomials, power_vector
from .points import PointSet, ProjPoint, kruskal_rank, span_dim
from .seeding import subseed

SAMPLE_BOUND = 20
MAX_ATTEMPTS = 64


class TerraciniError(ValueError):
    pass


@dataclass(frozen=True)
class TangentBlock:
    point: ProjPoint
    d: int
    matrix: tuple[tuple[Fraction, ...], ...]


def tangent_block(l, d: int) -> TangentBlock:
    """Rows are ``x_i * L^(d-1)`` for ``i = 0..n``: the affine tangent space at ``[L^d]``."""
    if d < 2:
        raise TerraciniError("tangent spaces need d >= 2")
    p = l if isinstance(l, ProjPoint) else ProjPoint(tuple(l))
    n = p.n
    lower = dict(zip(monomials(n, d - 1), power_vector(p.coords, d - 1)))
    index = monomial_index(n, d)
    size = dim_forms(n, d)
    rows = []
    for i in range(n + 1):
        row = [Fraction(0)] * size
        for e, c in lower.items():
            if c:
                e2 = list(e)
                e2[i] += 1
                row[index[tuple(e2)]] = c
        rows.append(tuple(row))
    return TangentBlock(p, d, tuple(rows))


def _stacked_rank(a: PointSet, d: int) -> int:
    rows = []
    for p in a:
        rows.extend(tangent_block(p, d).matrix)
    return exact.rank(rows)


def terracini_defect(a: PointSet, d: int) -> int:
    """``len(a) * (n+1)`` minus the dimension of the sum of the tangent spaces."""
    if exact.rank([power_vector(p.coords, d) for p in a]) != len(a):
        raise TerraciniError("dependent d-th powers")
    return len(a) * (a.n + 1) - _stacked_rank(a, d)


def in_concise_terracini(a: PointSet) -> bool:
    """Membership of ``n+2`` spanning points in the concise Terracini locus (d = 3)."""
    n = a.n
    if n < 3:
        raise TerraciniError("classifier needs n >= 3")
    if len(a) != n + 2 or span_dim(a) != n:
        raise TerraciniError("classifier needs n+2 points spanning P^n")
    return kruskal_rank(a) <= 3


def _coordinates_in(basis: Sequence[Sequence], v: Sequence) -> tuple[Fraction, ...] | None:
    return exact.solve_linear(exact.transpose(basis), v)


def restricted_dependence(a: PointSet, basis: Sequence[Sequence], d: int) -> tuple[bool, bool]:
    """Tangent-space dependence in P^n and inside the subspace spanned by ``basis``."""
    basis = [tuple(Fraction(x) for x in v) for v in basis]
    k = len(basis)
    if exact.rank(basis) != k:
        raise TerraciniError("subspace basis is not independent")
    local = []
    for p in a:
        c = _coordinates_in(basis, p.coords)
        if c is None:
            raise TerraciniError(f"point {p!r} lies outside the subspace")
        local.append(c)
    ambient = _stacked_rank(a, d) < len(a) * (a.n + 1)
    inner = PointSet(k - 1, local)
    restricted = _stacked_rank(inner, d) < len(a) * k
    return ambient, restricted


def _chart_jacobian(v: Sequence[Fraction], j: int) -> list[list[Fraction]]:
    """Derivative of ``v -> (v_i / v_j)_{i != j}``; rows are outputs."""
    vj = v[j]
    out = []
    for i in range(len(v)):
        if i == j:
            continue
        row = [Fraction(0)] * len(v)
        row[i] = 1 / vj
        row[j] = -v[i] / vj ** 2
        out.append(row)
    return out


def orbit_jacobian(vs: Sequence[Sequence[Fraction]], lams: Sequence[Fraction]) -> list[list[Fraction]]:
    """Jacobian of ``(v_0..v_n, lam) -> ([v_0], ..., [v_n], [sum lam_i v_i])`` in affine charts."""
    m = len(vs)
    size = len(vs[0])
    r = len(lams)
    ncols = m * size + r
    rows: list[list[Fraction]] = []
    for k, v in enumerate(vs):
        j = next(i for i, x in enumerate(v) if x)
        for jr in _chart_jacobian(v, j):
            row = [Fraction(0)] * ncols
            row[k * size:(k + 1) * size] = jr
            rows.append(row)
    w = [sum((lams[i] * vs[i][c] for i in range(r)), Fraction(0)) for c in range(size)]
    j = next(i for i, x in enumerate(w) if x)
    jw = _chart_jacobian(w, j)
    for jr in jw:
        row = [Fraction(0)] * ncols
        # dw/dv_i = lam_i * I, dw/dlam_i = v_i
        for i in range(r):
            for c in range(size):
                row[i * size + c] = lams[i] * jr[c]
            row[m * size + i] = sum((jr[c] * vs[i][c] for c in range(size)), Fraction(0))
        rows.append(row)
    return rows


def orbit_dimension_estimate(n: int, r: int, seed: int) -> int:
    """Exact Jacobian rank of the orbit parametrization at a seeded random point."""
    if not 2 <= r <= n + 1:
        raise TerraciniError(f"r must lie in 2..{n + 1}")
    for attempt in range(MAX_ATTEMPTS):
        rng = random.Random(subseed(seed, "orbit-dim", n, r, attempt))
        vs = [[Fraction(rng.randint(-SAMPLE_BOUND, SAMPLE_BOUND)) for _ in range(n + 1)] for _ in range(n + 1)]
        lams = [Fraction(rng.randint(-SAMPLE_BOUND, SAMPLE_BOUND)) for _ in range(r)]
        if not all(lams) or exact.rank(vs) != n + 1:
            continue
        return exact.rank(orbit_jacobian(vs, lams))
    raise TerraciniError("resample budget exceeded")


def noint_ranks(group1: PointSet, group2: PointSet, d: int) -> tuple[int, int, int]:
    """Ranks of the tangent stacks of each group and of their union."""
    r1 = _stacked_rank(group1, d)
    r2 = _stacked_rank(group2, d)
    return r1, r2, _stacked_rank(group1.union(group2), d)


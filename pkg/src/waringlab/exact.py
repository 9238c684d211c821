"""Exact rational arithmetic and dense linear algebra.

Rationals are :class:`fractions.Fraction`.  A matrix is any sequence of
equal-length rows whose entries are ints or Fractions; functions here never
mutate their inputs and return plain lists / tuples.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Optional, Sequence

Rat = Fraction
Matrix = Sequence[Sequence[Fraction]]

_RAT_RE = re.compile(r"^\s*(-?\d+)(?:/(\d+))?\s*$")


class InvalidRational(ValueError):
    pass


def parse_rat(text) -> Fraction:
    """Parse a canonical ``"p/q"`` (or ``"p"``) string; ints pass through."""
    if isinstance(text, bool):
        raise InvalidRational(f"invalid rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvalidRational(f"invalid rational: {text!r}")
    m = _RAT_RE.match(text)
    if m is None:
        raise InvalidRational(f"invalid rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise InvalidRational(f"invalid rational: {text!r}")
    return Fraction(num, den)


def format_rat(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def shape(m: Matrix) -> tuple[int, int]:
    rows = len(m)
    return rows, (len(m[0]) if rows else 0)


def transpose(m: Matrix) -> list[list[Fraction]]:
    return [list(col) for col in zip(*m)]


def matmul(a: Matrix, b: Matrix) -> list[list[Fraction]]:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def common_denominator(row: Sequence) -> int:
    den = 1
    for x in row:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return den


def integer_row(row: Sequence) -> list[int]:
    """Scale a rational row by the lcm of its denominators."""
    den = common_denominator(row)
    if den == 1:
        return [int(x) for x in row]
    out = []
    for x in row:
        if isinstance(x, int):
            out.append(x * den)
        else:
            out.append(x.numerator * (den // x.denominator))
    return out


def _bareiss_echelon(a: list[list[int]]) -> list[int]:
    """Fraction-free row echelon reduction in place; returns the pivot columns.

    Every entry stays a minor of the input, so dividing by the previous
    pivot is exact even when columns are skipped.
    """
    rows = len(a)
    if rows == 0:
        return []
    cols = len(a[0])
    prev = 1
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
        prow = a[r]
        p = prow[c]
        tail = prow[c + 1:]
        for i in range(r + 1, rows):
            row = a[i]
            f = row[c]
            if f:
                row[c + 1:] = [(x * p - f * y) // prev for x, y in zip(row[c + 1:], tail)]
            elif p != prev:
                row[c + 1:] = [x * p // prev for x in row[c + 1:]]
            row[c] = 0
        prev = p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def rank(m: Matrix) -> int:
    """Exact rank over the rationals."""
    rows, cols = shape(m)
    if rows == 0 or cols == 0:
        return 0
    # Eliminating along the shorter side keeps the work proportional to rank.
    if cols < rows:
        m = transpose(m)
    return len(_bareiss_echelon([integer_row(row) for row in m]))


def rref(m: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns (first nonzero pivoting).

    Only the nonzero rows are returned.
    """
    a = [integer_row(row) for row in m]
    pivots = _bareiss_echelon(a)
    red = [[Fraction(x) for x in a[i]] for i in range(len(pivots))]
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        inv = 1 / red[i][c]
        red[i] = [x * inv for x in red[i]]
        prow = red[i]
        for k in range(i):
            f = red[k][c]
            if f:
                red[k] = [x - f * y for x, y in zip(red[k], prow)]
    return red, pivots


def kernel_basis(m: Matrix, cols: Optional[int] = None) -> list[tuple[Fraction, ...]]:
    """Basis of the right null space, one tuple per basis vector.

    ``cols`` is needed only when ``m`` has no rows.
    """
    rows, ncols = shape(m)
    if rows == 0:
        ncols = cols or 0
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    red, pivots = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][fc]
        basis.append(tuple(v))
    return basis


def solve_linear(m: Matrix, b: Sequence) -> Optional[tuple[Fraction, ...]]:
    """Return some ``x`` with ``m x = b``, or None when inconsistent.

    Free variables are set to zero, so a unique solution is returned exactly.
    """
    rows, cols = shape(m)
    if len(b) != rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {rows}")
    if rows == 0:
        return tuple(Fraction(0) for _ in range(cols))
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(m, b)]
    red, pivots = rref(aug)
    if pivots and pivots[-1] == cols:
        return None
    x = [Fraction(0)] * cols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][cols]
    return tuple(x)


def inverse(m: Matrix) -> list[list[Fraction]]:
    n, cols = shape(m)
    if n != cols:
        raise ValueError("inverse of a non-square matrix")
    aug = [list(row) + e for row, e in zip(m, identity(n))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in red]


def is_invertible(m: Matrix) -> bool:
    n, cols = shape(m)
    return n == cols and rank(m) == n

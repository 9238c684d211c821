"""Seeded exact generators for forms with several decompositions.

Every generator returns a :class:`Witness` whose decompositions have been
re-certified exactly (membership, independence of the cubes, nonzero
coefficients, conciseness).  Degenerate random draws are retried with
sub-seeds derived from ``(seed, attempt)``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from . import decomp, exact, forms, points
from .decomp import Decomposition, certify, decomposition_of
from .forms import Form, combine, is_concise
from .points import PointSet, ProjPoint, kruskal_rank, standard_set
from .seeding import subseed

COORD_BOUND = 9
MAX_ATTEMPTS = 64

FAMILIES = ("binary", "conic8", "two-lines", "case-ii", "case-iii", "fermat-plus", "penta", "kruskal-set", "case-i")


class GenerationError(RuntimeError):
    pass


class Degenerate(Exception):
    """Raised inside a single attempt to request a resample."""


@dataclass(frozen=True)
class Witness:
    form: Form
    decomps: tuple[Decomposition, ...]
    family: str
    seed: int
    n: int
    d: int

    def certify(self) -> None:
        if not is_concise(self.form):
            raise decomp.DecompositionError("witness form is not concise")
        for dec in self.decomps:
            certify(self.form, dec)


def _rng(seed: int, label: str, attempt: int) -> random.Random:
    return random.Random(subseed(seed, label, attempt))


def _retry(label: str, seed: int, build: Callable[[random.Random], object]):
    for attempt in range(MAX_ATTEMPTS):
        try:
            return build(_rng(seed, label, attempt))
        except Degenerate:
            continue
    raise GenerationError(f"{label}: resample budget of {MAX_ATTEMPTS} attempts exceeded (seed {seed})")


def _rand_int(rng: random.Random) -> int:
    return rng.randint(-COORD_BOUND, COORD_BOUND)


def _distinct_points(n: int, candidates: Sequence[Sequence]) -> PointSet:
    try:
        pts = [ProjPoint(tuple(c)) for c in candidates]
    except points.PointError:
        raise Degenerate from None
    if len(set(pts)) != len(pts):
        raise Degenerate
    return PointSet(n, sorted(pts, key=lambda p: p.coords))


def _split_relation(a: PointSet, d: int, k: int) -> tuple[Form, Decomposition, Decomposition]:
    """Split the unique full-support cube relation of ``a`` as first ``k`` versus rest."""
    ker = exact.kernel_basis(decomp.power_matrix(a, d))
    if len(ker) != 1 or not all(ker[0]):
        raise Degenerate
    c = ker[0]
    first = a.subset(range(k))
    rest = a.subset(range(k, len(a)))
    f = combine([p.coords for p in first], c[:k], d, n=a.n)
    da = Decomposition(first, c[:k], d)
    db = Decomposition(rest, [-x for x in c[k:]], d)
    return f, da, db


def _finish(f: Form, decs: Sequence[Decomposition], family: str, seed: int) -> Witness:
    # Never trust the construction: coefficients are re-solved from scratch.
    if not is_concise(f):
        raise Degenerate
    out = []
    for dec in decs:
        try:
            solved = decomposition_of(f, dec.pts)
            certify(f, solved)
        except decomp.DecompositionError:
            raise Degenerate from None
        out.append(solved)
    w = Witness(f, tuple(out), family, seed, f.n, f.d)
    w.certify()
    return w


def gen_binary_pair(seed: int) -> Witness:
    """Binary cubic with disjoint decompositions of lengths 2 and 3."""

    def build(rng):
        a = _distinct_points(1, [(_rand_int(rng), _rand_int(rng)) for _ in range(5)])
        f, da, db = _split_relation(a, 3, 2)
        return _finish(f, [da, db], "binary", seed)

    return _retry("binary", seed, build)


def gen_conic8(seed: int) -> Witness:
    """Plane cubic with two disjoint length-4 decompositions on the conic x0 x2 = x1^2."""

    def build(rng):
        ts = rng.sample(range(-COORD_BOUND, COORD_BOUND + 1), 8)
        a = _distinct_points(2, [(1, t, t * t) for t in ts])
        f, da, db = _split_relation(a, 3, 4)
        return _finish(f, [da, db], "conic8", seed)

    return _retry("conic8", seed, build)


def _line_points(rng, first: int, n: int, count: int) -> list[tuple[int, ...]]:
    out = []
    for _ in range(count):
        v = [0] * (n + 1)
        v[first], v[first + 1] = _rand_int(rng), _rand_int(rng)
        out.append(tuple(v))
    return out


def gen_two_lines(seed: int) -> Witness:
    """Concise quaternary cubic with disjoint length-5 decompositions on two skew lines."""

    def build(rng):
        line1 = _distinct_points(3, _line_points(rng, 0, 3, 5))
        line2 = _distinct_points(3, _line_points(rng, 2, 3, 5))
        f1, a1, b1 = _split_relation(line1, 3, 3)
        f2, a2, b2 = _split_relation(line2, 3, 2)
        f = f1 + f2
        da = Decomposition(a1.pts.union(a2.pts), a1.coeffs + a2.coeffs, 3)
        db = Decomposition(b1.pts.union(b2.pts), b1.coeffs + b2.coeffs, 3)
        return _finish(f, [da, db], "two-lines", seed)

    return _retry("two-lines", seed, build)


def _embed(p: ProjPoint, n: int) -> tuple[Fraction, ...]:
    return p.coords + (Fraction(0),) * (n - p.n)


def extend_with_generic_cubes(w: Witness, n_target: int, seed: int) -> Witness:
    """Add ``n_target - w.n`` generic cubes shared by every decomposition."""
    if n_target < w.n:
        raise ValueError("target dimension below the witness dimension")
    if n_target == w.n:
        return w
    extra = n_target - w.n
    # generic extension keeps a dependent core's Kruskal rank and keeps an
    # independent core independent
    expected = [len(dec) + extra if points.is_independent(dec.pts) else kruskal_rank(dec.pts) for dec in w.decomps]

    def build(rng):
        new = [tuple(_rand_int(rng) for _ in range(n_target + 1)) for _ in range(extra)]
        tail = [v[w.n + 1:] for v in new]
        if exact.rank(tail) != extra:
            raise Degenerate
        new_pts = [ProjPoint(v) for v in new]
        core = _embed_form(w.form, n_target)
        f = core + combine([p.coords for p in new_pts], [1] * extra, w.d, n=n_target)
        decs = []
        for dec, k in zip(w.decomps, expected):
            pts = PointSet(n_target, [_embed(p, n_target) for p in dec.pts] + new_pts)
            if kruskal_rank(pts) != k:
                raise Degenerate
            decs.append(Decomposition(pts, dec.coeffs + (Fraction(1),) * extra, w.d))
        return _finish(f, decs, w.family, w.seed)

    return _retry(f"extend-{w.family}-{n_target}", seed, build)


def _embed_form(f: Form, n: int) -> Form:
    pad = (0,) * (n - f.n)
    return Form(n, f.d, {e + pad: c for e, c in f.coeffs.items()})


def gen_case_II(n: int, seed: int) -> Witness:
    if n < 3:
        raise ValueError("case II needs n >= 3")
    w = extend_with_generic_cubes(gen_two_lines(seed), n, seed)
    return _relabel(w, "case-ii")


def gen_case_III(n: int, seed: int) -> Witness:
    if n < 2:
        raise ValueError("case III needs n >= 2")
    w = extend_with_generic_cubes(gen_conic8(seed), n, seed)
    return _relabel(w, "case-iii")


def gen_fermat_plus(n: int, seed: int) -> Witness:
    """Concise cubic with decompositions of lengths n+1 (listed first) and n+2."""
    if n < 1:
        raise ValueError("fermat-plus needs n >= 1")
    w = extend_with_generic_cubes(gen_binary_pair(seed), n, seed)
    return _relabel(w, "fermat-plus")


def gen_pentahedral_nonunique(seed: int) -> Witness:
    """``F = F' + L^3`` with ``F'`` a conic8 plane cubic: two length-5 decompositions in P^3."""
    w = extend_with_generic_cubes(gen_conic8(seed), 3, seed)
    return _relabel(w, "penta")


def _relabel(w: Witness, family: str) -> Witness:
    return Witness(w.form, w.decomps, family, w.seed, w.n, w.d)


def random_kruskal_set(n: int, r: int, seed: int) -> PointSet:
    """A random ``GL``-translate of ``standard_set(n, r)``."""
    base = standard_set(n, r)

    def build(rng):
        g = [[_rand_int(rng) for _ in range(n + 1)] for _ in range(n + 1)]
        if exact.rank(g) != n + 1:
            raise Degenerate
        a = base.transform(g)
        if len(a) != n + 2 or kruskal_rank(a) != r:
            raise Degenerate
        return PointSet(n, sorted(a, key=lambda p: p.coords))

    return _retry(f"kruskal-{n}-{r}", seed, build)


def gen_kruskal_set(n: int, r: int, seed: int) -> Witness:
    """Sum of the cubes of ``random_kruskal_set(n, r, seed)`` with unit coefficients."""
    a = random_kruskal_set(n, r, seed)
    f = combine([p.coords for p in a], [1] * len(a), 3, n=n)
    try:
        return _finish(f, [Decomposition(a, [1] * len(a), 3)], "kruskal-set", seed)
    except Degenerate:
        raise GenerationError(f"kruskal-set: sum of cubes is not a certified witness (seed {seed})") from None


def generate(family: str, n: int, seed: int, r: int | None = None) -> Witness:
    """Dispatch by family name; fixed-dimension families reject other ``n``.

    ``r`` is the Kruskal rank for ``kruskal-set`` (default ``n + 1``).
    """
    fixed = {"binary": (1, gen_binary_pair), "conic8": (2, gen_conic8), "two-lines": (3, gen_two_lines),
             "penta": (3, gen_pentahedral_nonunique)}
    if family in fixed:
        dim, fn = fixed[family]
        if n != dim:
            raise ValueError(f"{family} requires n = {dim}")
        return fn(seed)
    if family == "case-ii":
        return gen_case_II(n, seed)
    if family == "case-iii":
        return gen_case_III(n, seed)
    if family == "fermat-plus":
        return gen_fermat_plus(n, seed)
    if family == "case-i":
        return gen_case_I(n, seed)
    if family == "kruskal-set":
        r = n + 1 if r is None else r
        if not 2 <= r <= n + 1:
            raise ValueError(f"kruskal-set needs 2 <= r <= {n + 1}")
        return gen_kruskal_set(n, r, seed)
    raise ValueError(f"unknown family {family!r}")


# Serialization ---------------------------------------------------------------


def to_dict(w: Witness) -> dict:
    return {
        "family": w.family,
        "seed": w.seed,
        "n": w.n,
        "d": w.d,
        "form": forms.to_dict(w.form),
        "decompositions": [decomp.to_dict(dec) for dec in w.decomps],
    }


def from_dict(obj: Mapping) -> Witness:
    f = forms.from_dict(obj["form"])
    decs = tuple(decomp.from_dict(x) for x in obj.get("decompositions", []))
    return Witness(f, decs, obj.get("family", "custom"), int(obj.get("seed", 0)), f.n, f.d)


def dumps(w: Witness) -> str:
    return json.dumps(to_dict(w), indent=2)


def loads(text: str) -> Witness:
    return from_dict(json.loads(text))


def gen_case_I(n: int, seed: int) -> Witness:
    """LGP length-(n+2) decomposition with generic nonzero coefficients."""
    if n < 3:
        raise ValueError("case I needs n >= 3")

    def build(rng):
        a = random_kruskal_set(n, n + 1, subseed(seed, "case-i-points", rng.random()))
        coeffs = [rng.choice([c for c in range(-COORD_BOUND, COORD_BOUND + 1) if c]) for _ in a]
        f = combine([p.coords for p in a], coeffs, 3, n=n)
        return _finish(f, [Decomposition(a, coeffs, 3)], "case-i", seed)

    return _retry("case-i", seed, build)

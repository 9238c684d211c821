"""Floating-point search for cubic Waring decompositions over the complex numbers.

The unknowns are ``r`` complex vectors ``v_1..v_r`` in C^(n+1), stored as
``2 r (n+1)`` reals (all real parts first, then all imaginary parts).  The
residual is the coefficient vector of ``F - sum v_i^3`` split into real and
imaginary halves; runs are damped Gauss-Newton (Levenberg) with restarts.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .decomp import on_two_flats
from .forms import Form, monomials, multinomials
from .seeding import subseed

MATCH_THRESHOLD = 1e-6
THIRD_TURN = 2 * math.pi / 3
OMEGA = cmath.exp(1j * THIRD_TURN)


@dataclass(frozen=True)
class NumDecomp:
    vectors: tuple[tuple[complex, ...], ...]
    residual: float

    def array(self) -> np.ndarray:
        return np.array(self.vectors, dtype=complex).reshape(len(self.vectors), -1)


@dataclass
class SearchResult:
    classes: list[NumDecomp]
    converged: int
    restarts: int
    residuals: list[float] = field(default_factory=list)

    @property
    def convergence_rate(self) -> float:
        return self.converged / self.restarts if self.restarts else 0.0

    def to_dict(self) -> dict:
        return {
            "restarts": self.restarts,
            "converged": self.converged,
            "convergence_rate": self.convergence_rate,
            "classes": [
                {
                    "residual": c.residual,
                    "vectors": [[[z.real, z.imag] for z in v] for v in c.vectors],
                }
                for c in self.classes
            ],
        }


class CubicModel:
    """Residual map and analytic Jacobian for ``F - sum_i v_i^3``."""

    def __init__(self, n: int, r: int):
        self.n = n
        self.r = r
        mons = monomials(n, 3)
        self.weights = np.array(multinomials(n, 3), dtype=float)
        # each degree-3 monomial as a sorted index triple (i <= j <= k)
        triples = []
        for e in mons:
            idx = [i for i, a in enumerate(e) for _ in range(a)]
            triples.append(idx)
        self.triples = np.array(triples, dtype=int)
        self.size = n + 1
        eye = np.eye(self.size)
        self._onehot = [eye[self.triples[:, s]] for s in range(3)]

    def cubes(self, vs: np.ndarray) -> np.ndarray:
        """Coefficient vectors of ``v^3`` for each row of ``vs`` (shape r x N)."""
        i, j, k = self.triples.T
        return self.weights * vs[:, i] * vs[:, j] * vs[:, k]

    def unpack(self, x: np.ndarray) -> np.ndarray:
        m = self.r * self.size
        return (x[:m] + 1j * x[m:]).reshape(self.r, self.size)

    def pack(self, vs: np.ndarray) -> np.ndarray:
        flat = np.asarray(vs, dtype=complex).reshape(-1)
        return np.concatenate([flat.real, flat.imag])

    def complex_residual(self, target: np.ndarray, x: np.ndarray) -> np.ndarray:
        return target - self.cubes(self.unpack(x)).sum(axis=0)

    def residual(self, target: np.ndarray, x: np.ndarray) -> np.ndarray:
        c = self.complex_residual(target, x)
        return np.concatenate([c.real, c.imag])

    def complex_jacobian(self, x: np.ndarray) -> np.ndarray:
        """Holomorphic derivative of the complex residual (N x r(n+1))."""
        vs = self.unpack(x)
        nmon = len(self.triples)
        # d(v_i v_j v_k)/dv_m summed over the three slots, as dense 0/1 scatters
        jac = np.zeros((nmon, self.r, self.size), dtype=complex)
        for slot in range(3):
            a, b = [self.triples[:, s] for s in range(3) if s != slot]
            vals = -self.weights * vs[:, a] * vs[:, b]
            jac += vals[:, :, None].transpose(1, 0, 2) * self._onehot[slot][:, None, :]
        return jac.reshape(nmon, -1)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """Real Jacobian of :meth:`residual` with respect to the packed reals."""
        jc = self.complex_jacobian(x)
        # d/dRe = jc, d/dIm = i * jc
        top = np.hstack([jc.real, -jc.imag])
        bottom = np.hstack([jc.imag, jc.real])
        return np.vstack([top, bottom])


def form_target(f: Form) -> np.ndarray:
    return np.array([float(c) for c in f.vector()], dtype=complex)


def levenberg(model: CubicModel, target: np.ndarray, x0: np.ndarray, tol: float = 1e-18,
              max_iter: int = 500, damping: float = 1e-3) -> tuple[np.ndarray, float]:
    x = x0.copy()
    res = model.residual(target, x)
    cost = float(res @ res)
    lam = damping
    eye = np.eye(len(x))
    for _ in range(max_iter):
        if cost < tol:
            break
        jac = model.jacobian(x)
        jtj = jac.T @ jac
        grad = jac.T @ res
        try:
            step = np.linalg.solve(jtj + lam * eye, -grad)
        except np.linalg.LinAlgError:
            lam *= 2
            continue
        x_new = x + step
        res_new = model.residual(target, x_new)
        cost_new = float(res_new @ res_new)
        if cost_new < cost:
            x, res, cost = x_new, res_new, cost_new
            lam /= 3
        else:
            lam *= 2
            if lam > 1e16:
                break
    return x, cost


def _lead_phase(v: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(v)) if v.size else 0.0
    if scale == 0:
        return v
    lead = next(z for z in v if abs(z) > 1e-8 * scale)
    angle = cmath.phase(lead) % (2 * math.pi)
    # window [0, 2pi/3), nudged so that real positive leads never wrap
    k = math.floor((angle + 1e-9) / THIRD_TURN) % 3
    return v * OMEGA ** (-k)


def canonical(vectors, residual: float = 0.0) -> NumDecomp:
    """Phase-normalize each vector and sort; invariant under permutation and cube roots of unity."""
    arr = np.array(vectors, dtype=complex)
    normed = [_lead_phase(v) for v in arr]
    normed.sort(key=lambda v: tuple(np.round(np.concatenate([v.real, v.imag]), 6)))
    return NumDecomp(tuple(tuple(complex(z) for z in v) for v in normed), float(residual))


def _vector_distance(u: np.ndarray, v: np.ndarray) -> float:
    return min(float(np.linalg.norm(u - OMEGA ** k * v)) for k in range(3))


def match_distance(a: NumDecomp, b: NumDecomp) -> float:
    """Best matching distance over permutations and cube roots of unity."""
    va, vb = a.array(), b.array()
    if va.shape != vb.shape:
        return math.inf
    cost = np.array([[_vector_distance(u, v) for v in vb] for u in va])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) if len(rows) else 0.0


def dedupe(found: list[NumDecomp], threshold: float = MATCH_THRESHOLD) -> list[NumDecomp]:
    classes: list[NumDecomp] = []
    for cand in sorted(found, key=lambda c: c.residual):
        if all(match_distance(cand, c) > threshold for c in classes):
            classes.append(cand)
    return sorted(classes, key=lambda c: tuple(np.round(c.array().view(float).ravel(), 6)))


def symmetric_tensor(f: Form) -> np.ndarray:
    """Real symmetric tensor ``T`` with ``f(x) = sum T[i, j, k] x_i x_j x_k``."""
    size = f.n + 1
    t = np.zeros((size,) * 3)
    for e, c, w in zip(monomials(f.n, 3), f.vector(), multinomials(f.n, 3)):
        idx = [i for i, a in enumerate(e) for _ in range(a)]
        for perm in set(itertools.permutations(idx)):
            t[perm] = float(c) / w
    return t


def tensor_coefficients(t: np.ndarray) -> np.ndarray:
    n = t.shape[0] - 1
    out = []
    for e, w in zip(monomials(n, 3), multinomials(n, 3)):
        idx = tuple(i for i, a in enumerate(e) for _ in range(a))
        out.append(t[idx] * w)
    return np.array(out, dtype=complex)


def balance(t: np.ndarray, iters: int = 200, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Operator scaling: find ``h`` making the flattening Gram of ``t(h., h., h.)`` a multiple of I.

    Returns the unit-norm balanced tensor and the accumulated map ``h``; a
    degenerate flattening (non-concise form) leaves the tensor unchanged.
    """
    size = t.shape[0]
    h_total = np.eye(size)
    t = t / np.linalg.norm(t)
    for _ in range(iters):
        flat = t.reshape(size, -1)
        gram = flat @ flat.T
        gram *= size / np.trace(gram)
        w, u = np.linalg.eigh(gram)
        if w[0] <= 1e-12 * w[-1]:
            break
        if np.abs(w - 1).max() < tol:
            break
        # quarter power: the step acts on all three slots at once
        h = (u * w ** -0.25) @ u.T
        t = np.einsum("ijk,ia,jb,kc->abc", t, h, h, h)
        t /= np.linalg.norm(t)
        h_total = h_total @ h
    return t, h_total


def start_norm(n: int, r: int) -> float:
    """RMS coefficient norm of ``sum v_i^3`` for ``r`` unit-variance complex Gaussian vectors."""
    return math.sqrt(6 * r * (n + 1) ** 3)


def decompose_numeric(f: Form, r: int, restarts: int = 50, tol: float = 1e-18, seed: int = 0,
                      max_iter: int = 500) -> SearchResult:
    """Damped Gauss-Newton with restarts; returns the distinct convergent classes.

    The search runs on a balanced copy ``a f(h x)`` rescaled to the size of a
    random start; solutions ``w`` map back to ``a^(-1/3) h^(-T) w``.  Convergence
    is judged on the balanced residual, and reported residuals are for ``f``.
    """
    if f.d != 3:
        raise ValueError("numerical search handles cubics only")
    if r < 1:
        raise ValueError("r must be at least 1")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    model = CubicModel(f.n, r)
    original = form_target(f)
    found = []
    residuals = []
    if not original.any():
        return SearchResult([], 0, restarts, residuals)
    t = symmetric_tensor(f)
    _, h = balance(t)
    moved = tensor_coefficients(np.einsum("ijk,ia,jb,kc->abc", t, h, h, h))
    # target(x) = a f(h x), so a solution w of the target gives a^(-1/3) h^(-T) w for f
    a = start_norm(f.n, r) / float(np.linalg.norm(moved))
    target = a * moved
    back = np.linalg.inv(h).T * a ** (-1 / 3)
    for k in range(restarts):
        rng = np.random.default_rng(subseed(seed, "restart", k))
        # unit-variance Gaussian complex entries
        z = (rng.standard_normal((r, f.n + 1)) + 1j * rng.standard_normal((r, f.n + 1))) / math.sqrt(2)
        x, cost = levenberg(model, target, model.pack(z), tol=tol, max_iter=max_iter)
        if cost < tol:
            vs = model.unpack(x) @ back.T
            res = model.complex_residual(original, model.pack(vs))
            real_cost = float(np.vdot(res, res).real)
            residuals.append(real_cost)
            found.append(canonical(vs, real_cost))
        else:
            residuals.append(cost)
    return SearchResult(dedupe(found), len(found), restarts, residuals)


def exact_to_numeric(points, coeffs) -> NumDecomp:
    """Absorb coefficients into the vectors via a complex cube root."""
    vecs = []
    for p, a in zip(points, coeffs):
        root = complex(float(a)) ** (1 / 3)
        vecs.append([root * float(c) for c in p])
    return canonical(vecs)


def numerical_rank(rows: np.ndarray, tol: float) -> int:
    rows = np.asarray(rows, dtype=complex)
    if rows.size == 0:
        return 0
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    sv = np.linalg.svd(rows / np.where(norms == 0, 1, norms), compute_uv=False)
    return int(np.sum(sv > tol))


def numerical_kruskal(rows: np.ndarray, tol: float) -> int:
    from itertools import combinations

    rows = np.asarray(rows, dtype=complex)
    m, size = rows.shape
    cap = min(m, size)
    for k in range(1, cap + 1):
        for idx in combinations(range(m), k):
            if numerical_rank(rows[list(idx)], tol) < k:
                return k - 1
    return cap


def numeric_structure(nd: NumDecomp, tol: float = 1e-8) -> dict:
    rows = nd.array()

    def rank_fn(sub):
        return numerical_rank(np.array(sub), tol)

    collinear = len(rows) == 0 or rank_fn(list(rows)) <= 2
    two_lines = collinear or on_two_flats(list(rows), 1, rank_fn=rank_fn)
    two_planes = two_lines or on_two_flats(list(rows), 2, rank_fn=rank_fn)
    return {
        "kruskal": numerical_kruskal(rows, tol) if len(rows) else 0,
        "collinear": collinear,
        "two_lines": two_lines,
        "two_planes": two_planes,
    }


def numeric_pair_report(a: NumDecomp, b: NumDecomp, tol: float = 1e-8, match_tol: float = MATCH_THRESHOLD) -> dict:
    """Structural comparison of two numerical decompositions (projective point matching)."""
    va = [_unit(v) for v in a.array()]
    vb = [_unit(v) for v in b.array()]
    used = set()
    shared = 0
    only_a = []
    for u in va:
        hit = next((j for j, v in enumerate(vb) if j not in used and _proj_distance(u, v) < match_tol), None)
        if hit is None:
            only_a.append(u)
        else:
            used.add(hit)
            shared += 1
    only_b = [v for j, v in enumerate(vb) if j not in used]
    diff = NumDecomp(tuple(tuple(complex(z) for z in v) for v in only_a + only_b), 0.0)
    out = numeric_structure(diff, tol) if only_a or only_b else {"collinear": True, "two_lines": True, "two_planes": True}
    out = {k: v for k, v in out.items() if k != "kruskal"}
    out["intersection"] = shared
    return out


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _proj_distance(u: np.ndarray, v: np.ndarray) -> float:
    # 1 - |<u, v>| for unit vectors vanishes exactly on the same projective point
    return float(max(0.0, 1.0 - abs(np.vdot(u, v))))

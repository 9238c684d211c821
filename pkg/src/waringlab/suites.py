"""Seeded verification suites, one per structural statement.

Each suite runs ``trials`` seeded checks for every ``n`` in an inclusive
range and records pass/fail counts plus the first counterexample.  Trial
seeds are derived from ``(seed, theorem, n, trial)``, so the report does not
depend on evaluation order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import decomp, families, points
from .decomp import check_sum_bound, disjointify, pair_report, verify_fermat_plus_one
from .forms import catalecticant_rank, combine, is_concise
from .points import cb_check, cb_hf_inequality, kruskal_rank
from .seeding import subseed
from .terracini import in_concise_terracini, terracini_defect

N_MAX = 10

# inclusive n bounds per theorem
SUPPORTED = {
    "main": (2, N_MAX),
    "sylvester-bound": (1, N_MAX),
    "terracini": (3, N_MAX),
    "cb": (1, N_MAX),
    "fermat-plus": (1, N_MAX),
    "penta": (3, 3),
}
THEOREMS = tuple(SUPPORTED)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    theorem: str
    n_lo: int
    n_hi: int
    trials: int
    seed: int
    output: Optional[str] = None

    def __post_init__(self):
        if self.theorem not in SUPPORTED:
            raise ConfigError(f"unknown theorem {self.theorem!r}; choose from {', '.join(THEOREMS)}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        lo, hi = SUPPORTED[self.theorem]
        if self.n_lo > self.n_hi:
            raise ConfigError(f"empty n range {self.n_lo}..{self.n_hi}")
        if self.n_lo < lo or self.n_hi > hi:
            raise ConfigError(f"{self.theorem} supports n in {lo}..{hi}")


@dataclass
class Outcome:
    ok: bool
    detail: dict
    witness: Optional[dict] = None


@dataclass
class NResult:
    n: int
    passed: int = 0
    failed: int = 0
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"n": self.n, "passed": self.passed, "failed": self.failed, "stats": dict(sorted(self.stats.items()))}


@dataclass
class SuiteResult:
    config: SuiteConfig
    per_n: list[NResult]
    counterexample: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return all(r.failed == 0 for r in self.per_n)

    def to_dict(self) -> dict:
        c = self.config
        return {
            "theorem": c.theorem,
            "n_range": [c.n_lo, c.n_hi],
            "trials": c.trials,
            "seed": c.seed,
            "passed": self.passed,
            "results": [r.to_dict() for r in self.per_n],
            "counterexample": self.counterexample,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _families_at(n: int) -> list[str]:
    """Two-decomposition families that exist in dimension ``n``."""
    out = ["fermat-plus"]
    if n >= 2:
        out.append("case-iii")
    if n >= 3:
        out.append("case-ii")
    if n == 3:
        out.append("penta")
    return out


def _witness(family: str, n: int, seed: int) -> families.Witness:
    return families.generate(family, n, seed)


# Individual checks --------------------------------------------------------------


def check_main(n: int, seed: int, trial: int) -> Outcome:
    detail = {}
    bad = None
    plans = [("case-iii", 3, 2, "diff_two_planes")]
    if n >= 3:
        plans.insert(0, ("case-ii", 2, 3, "diff_two_lines"))
    for family, kr, drop, flag in plans:
        w = _witness(family, n, seed)
        a, b = w.decomps[0].pts, w.decomps[1].pts
        rep = pair_report(a, b)
        ok = (
            rep.main_prop_holds(n)
            and rep.intersection >= n - drop
            and getattr(rep, flag)
            and rep.kruskal_a == kr
            and rep.kruskal_b == kr
            and (n < 4 or rep.intersection > 0)
        )
        detail[family] = {"intersection": rep.intersection, "kruskal": [rep.kruskal_a, rep.kruskal_b], flag: getattr(rep, flag)}
        if not ok and bad is None:
            bad = families.to_dict(w)
    return Outcome(bad is None, detail, bad)


def check_sylvester(n: int, seed: int, trial: int) -> Outcome:
    fams = _families_at(n)
    family = fams[trial % len(fams)]
    w = _witness(family, n, seed)
    holds, slack = check_sum_bound(w.form, w.decomps[0], w.decomps[1])
    # equality exactly on the extended binary family
    ok = holds and (slack == 0) == (family == "fermat-plus")
    detail = {"family": family, "lengths": [len(w.decomps[0]), len(w.decomps[1])], "slack": slack, "sharp": slack == 0}
    return Outcome(ok, detail, None if ok else families.to_dict(w))


def check_terracini(n: int, seed: int, trial: int) -> Outcome:
    r = 2 + trial % n
    a = families.random_kruskal_set(n, r, seed)
    defect = terracini_defect(a, 3)
    locus = in_concise_terracini(a)
    ok = kruskal_rank(a) == r and (defect > 0) == (r <= 3) == locus
    detail = {"r": r, "defect": defect, "in_locus": locus}
    return Outcome(ok, detail, None if ok else points.to_dict(a))


def cb_outcome(w: families.Witness) -> Outcome:
    """CB(3) and the Hilbert-function inequality for the disjointified pair of ``w``."""
    f2, a2, b2 = disjointify(w.form, w.decomps[0], w.decomps[1])
    z = a2.pts.union(b2.pts)
    cb = cb_check(z, 3)
    hf = cb_hf_inequality(z, 3)
    # implication on a perturbed set as well: dropping a point usually breaks CB
    z_minus = z.without(0)
    implication = len(z_minus) < 2 or not cb_check(z_minus, 3) or cb_hf_inequality(z_minus, 3)
    ok = cb and hf and implication
    detail = {"family": w.family, "union_length": len(z), "cb3": cb, "hf_inequality": hf}
    return Outcome(ok, detail, None if ok else families.to_dict(w))


def check_cb(n: int, seed: int, trial: int) -> Outcome:
    fams = _families_at(n)
    return cb_outcome(_witness(fams[trial % len(fams)], n, seed))


def check_fermat_plus(n: int, seed: int, trial: int) -> Outcome:
    w = _witness("fermat-plus", n, seed)
    ok = verify_fermat_plus_one(w.form, w.decomps[0], w.decomps[1])
    rep = pair_report(w.decomps[0].pts, w.decomps[1].pts)
    detail = {"intersection": rep.intersection, "diff_collinear": rep.diff_collinear}
    return Outcome(ok, detail, None if ok else families.to_dict(w))


def check_penta(n: int, seed: int, trial: int) -> Outcome:
    w = _witness("penta", n, seed)
    a, b = w.decomps
    rep = pair_report(a.pts, b.pts)
    shared = a.pts.intersection(b.pts)
    core_ok = False
    if len(shared) == 1:
        l = shared[0]
        core = w.form - combine([l.coords], [a.coeff_of(l)], 3, n=n)
        core_ok = catalecticant_rank(core) == 3
    ok = (
        is_concise(w.form)
        and len(a) == len(b) == 5
        and a.pts.as_set() != b.pts.as_set()
        and rep.diff_two_planes
        and core_ok
    )
    detail = {"intersection": rep.intersection, "core_in_sub3": core_ok, "diff_two_planes": rep.diff_two_planes}
    return Outcome(ok, detail, None if ok else families.to_dict(w))


CHECKS: dict[str, Callable[[int, int, int], Outcome]] = {
    "main": check_main,
    "sylvester-bound": check_sylvester,
    "terracini": check_terracini,
    "cb": check_cb,
    "fermat-plus": check_fermat_plus,
    "penta": check_penta,
}


def _tally(stats: dict, detail: dict) -> None:
    for key in ("sharp", "in_locus", "cb3"):
        if detail.get(key):
            stats[key] = stats.get(key, 0) + 1
    if "family" in detail:
        key = "family:" + detail["family"]
        stats[key] = stats.get(key, 0) + 1


def run_suite(cfg: SuiteConfig) -> SuiteResult:
    check = CHECKS[cfg.theorem]
    per_n = []
    first = None
    for n in range(cfg.n_lo, cfg.n_hi + 1):
        res = NResult(n)
        for t in range(cfg.trials):
            seed = subseed(cfg.seed, cfg.theorem, n, t)
            try:
                out = check(n, seed, t)
            except (families.GenerationError, decomp.DecompositionError, ValueError) as exc:
                out = Outcome(False, {"error": str(exc)})
            _tally(res.stats, out.detail)
            if out.ok:
                res.passed += 1
            else:
                res.failed += 1
                if first is None:
                    first = {"n": n, "trial": t, "seed": seed, "detail": out.detail, "witness": out.witness}
        per_n.append(res)
    return SuiteResult(cfg, per_n, first)

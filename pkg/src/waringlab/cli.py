"""``waringlab`` command line: analyze, generate, suite, search.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import decomp, families, forms, numsearch, points, suites
from .decomp import Decomposition, coefficients_for, is_nonredundant, pair_report, predict_cases
from .exact import InvalidRational, format_rat
from .forms import Form, catalecticant_rank, is_concise
from .points import PointSet, cb_check, h_vector, kruskal_rank, span_dim

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

SEED_ENV = "WARINGLAB_SEED"


class UsageError(Exception):
    pass


# Input ------------------------------------------------------------------------


def _read_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _guard(path: str, fn, obj):
    try:
        return fn(obj)
    except (InvalidRational, forms.FormError, points.PointError, decomp.DecompositionError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed input: {exc}") from None


def load_instance(path: str) -> tuple[Form, list[Decomposition]]:
    """A form file is either a bare form object or a witness object."""
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise UsageError(f"{path}: expected a JSON object")
    if "form" in obj:
        w = _guard(path, families.from_dict, obj)
        return w.form, list(w.decomps)
    return _guard(path, forms.from_dict, obj), []


def load_points(path: str) -> list[PointSet]:
    """Point sets from a point-set, decomposition or witness file."""
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise UsageError(f"{path}: expected a JSON object")
    if "decompositions" in obj:
        return [d.pts for d in _guard(path, families.from_dict, obj).decomps]
    if "coeffs" in obj:
        return [_guard(path, decomp.from_dict, obj).pts]
    return [_guard(path, points.from_dict, obj)]


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


# Reports ----------------------------------------------------------------------


def _hv(z: PointSet) -> list[int]:
    return list(h_vector(z).values)


def point_report(f: Form, a: PointSet) -> dict:
    if a.n != f.n:
        raise UsageError(f"dimension mismatch: form has n = {f.n}, points have n = {a.n}")
    coeffs = coefficients_for(f, a)
    out = {
        "length": len(a),
        "points": points.to_dict(a)["points"],
        "coefficients": None if coeffs is None else [format_rat(c) for c in coeffs],
        "nonredundant": coeffs is not None and is_nonredundant(f, a),
        "kruskal_rank": kruskal_rank(a) if len(a) else 0,
        "h_vector": _hv(a),
        "cb3": cb_check(a, 3) if len(a) >= 2 else None,
    }
    # prediction only for n+2 spanning points with n >= 3
    if f.n >= 3 and len(a) == f.n + 2 and span_dim(a) == f.n:
        out["predicted_cases"] = sorted(predict_cases(a))
    return out


def analyze(f: Form, sets: Sequence[PointSet]) -> dict:
    out = {
        "n": f.n,
        "d": f.d,
        "concise": is_concise(f),
        "catalecticant_rank": catalecticant_rank(f),
        "concise_support_dim": decomp.shared_support(f),
        "decompositions": [point_report(f, a) for a in sets],
    }
    if len(sets) >= 2:
        a, b = sets[0], sets[1]
        rep = pair_report(a, b)
        pair = rep.to_dict()
        pair["union_h_vector"] = _hv(a.union(b))
        pair["main_prop_holds"] = rep.main_prop_holds(f.n)
        out["pair"] = pair
    return out


def _yes(flag) -> str:
    return "yes" if flag else "no"


def render_analysis(rep: dict) -> str:
    lines = [
        f"n: {rep['n']}",
        f"d: {rep['d']}",
        f"concise: {_yes(rep['concise'])}",
        f"catalecticant rank: {rep['catalecticant_rank']}",
        f"concise support dimension: {rep['concise_support_dim']}",
    ]
    for i, d in enumerate(rep["decompositions"]):
        lines.append(f"decomposition {i}: {d['length']} points")
        coeffs = d["coefficients"]
        lines.append("  coefficients: " + ("not a decomposition" if coeffs is None else " ".join(coeffs)))
        lines.append(f"  non-redundant: {_yes(d['nonredundant'])}")
        lines.append(f"  Kruskal rank: {d['kruskal_rank']}")
        lines.append("  h-vector: (" + ",".join(str(x) for x in d["h_vector"]) + ")")
        if d["cb3"] is not None:
            lines.append(f"  CB(3): {_yes(d['cb3'])}")
        if "predicted_cases" in d:
            lines.append("  cases: {" + ",".join(d["predicted_cases"]) + "}")
    if "pair" in rep:
        p = rep["pair"]
        lines.append(f"pair: intersection {p['intersection']}")
        lines.append("  union h-vector: (" + ",".join(str(x) for x in p["union_h_vector"]) + ")")
        lines.append(f"  difference collinear: {_yes(p['diff_collinear'])}")
        lines.append(f"  difference on two lines: {_yes(p['diff_two_lines'])}")
        lines.append(f"  difference on two planes: {_yes(p['diff_two_planes'])}")
    return "\n".join(lines)


def witness_summary(w: families.Witness) -> dict:
    out = {
        "family": w.family,
        "n": w.n,
        "seed": w.seed,
        "lengths": [len(d) for d in w.decomps],
        "concise": is_concise(w.form),
    }
    if len(w.decomps) >= 2:
        a, b = w.decomps[0].pts, w.decomps[1].pts
        rep = pair_report(a, b)
        out["intersection"] = rep.intersection
        out["kruskal_ranks"] = [rep.kruskal_a, rep.kruskal_b]
        out["diff_two_lines"] = rep.diff_two_lines
        out["diff_two_planes"] = rep.diff_two_planes
        out["union_h_vector"] = _hv(a.union(b))
    else:
        out["kruskal_ranks"] = [kruskal_rank(w.decomps[0].pts)]
    return out


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _emit(args, report: dict, human: str) -> None:
    text = _dump(report)
    if getattr(args, "out", None) and args.command != "generate":
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text if args.json else human)


# Commands ---------------------------------------------------------------------


def cmd_analyze(args) -> int:
    f, decs = load_instance(args.form)
    sets = load_points(args.points) if args.points else [d.pts for d in decs]
    rep = analyze(f, sets)
    _emit(args, rep, render_analysis(rep))
    if args.points and any(d["coefficients"] is None for d in rep["decompositions"]):
        return EXIT_FAIL
    return EXIT_OK


def cmd_generate(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    try:
        w = families.generate(args.family, args.n, seed, r=args.rank)
    except families.GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        w.certify()
    except decomp.DecompositionError as exc:
        print(f"error: certification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = families.dumps(w)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    summary = witness_summary(w)
    human = "\n".join(f"{k}: {v}" for k, v in summary.items())
    if args.json:
        print(_dump(summary) if args.out else text)
    else:
        print(human)
    return EXIT_OK


def _parse_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        k = int(text)
        return k, k
    except ValueError:
        raise UsageError(f"bad n range {text!r}; use LO..HI or a single integer") from None


def cmd_suite(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    if args.n_range is not None:
        lo, hi = _parse_range(args.n_range)
    elif args.n is not None:
        lo = hi = args.n
    else:
        lo, hi = suites.SUPPORTED.get(args.theorem, (1, 1))
        hi = min(hi, lo + 2)
    try:
        cfg = suites.SuiteConfig(args.theorem, lo, hi, args.trials, seed, args.out)
    except suites.ConfigError as exc:
        raise UsageError(str(exc)) from None
    res = suites.run_suite(cfg)
    text = res.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    if args.json:
        print(text)
    else:
        lines = [f"theorem: {cfg.theorem}  seed: {cfg.seed}  trials: {cfg.trials}"]
        for r in res.per_n:
            extra = "".join(f"  {k}={v}" for k, v in sorted(r.stats.items()))
            lines.append(f"n={r.n}: {r.passed} passed, {r.failed} failed{extra}")
        if res.counterexample:
            ce = res.counterexample
            lines.append(f"first counterexample: n={ce['n']} trial={ce['trial']} seed={ce['seed']} {ce['detail']}")
        lines.append("all pass" if res.passed else "FAILURES")
        print("\n".join(lines))
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_search(args) -> int:
    if args.rank < 1:
        raise UsageError("--rank must be at least 1")
    if args.restarts < 1:
        raise UsageError("--restarts must be at least 1")
    f, _ = load_instance(args.form)
    if f.d != 3:
        raise UsageError(f"numerical search needs a cubic, got degree {f.d}")
    seed = default_seed() if args.seed is None else args.seed
    res = numsearch.decompose_numeric(f, args.rank, restarts=args.restarts, tol=args.tol, seed=seed)
    report = res.to_dict()
    report.update({"n": f.n, "rank": args.rank, "seed": seed, "tol": args.tol, "residuals": res.residuals})
    human = [
        f"rank: {args.rank}  restarts: {res.restarts}  seed: {seed}",
        f"converged: {res.converged} ({res.convergence_rate:.0%})",
        f"distinct classes: {len(res.classes)}",
    ]
    for i, c in enumerate(res.classes):
        human.append(f"  class {i}: residual {c.residual:.3e}")
    if len(res.classes) == 1:
        human.append("uniqueness: corroborated (not proven)")
    _emit(args, report, "\n".join(human))
    return EXIT_OK


# Parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="waringlab", description="Exact and numerical tools for cubic Waring decompositions.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="report on a form and optional point sets")
    a.add_argument("form", help="form or witness JSON file")
    a.add_argument("--points", help="point set, decomposition or witness JSON file")
    a.add_argument("--json", action="store_true", help="print the JSON report")
    a.add_argument("--out", help="also write the JSON report here")

    g = sub.add_parser("generate", help="generate a certified witness")
    g.add_argument("--family", required=True, choices=families.FAMILIES)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int)
    g.add_argument("--rank", type=int, help="Kruskal rank for kruskal-set (default n+1)")
    g.add_argument("--out", help="witness output path")
    g.add_argument("--json", action="store_true", help="print JSON instead of the summary")

    s = sub.add_parser("suite", help="run a seeded verification suite")
    s.add_argument("--theorem", required=True, choices=suites.THEOREMS)
    s.add_argument("--n-range", help="inclusive range LO..HI")
    s.add_argument("--n", type=int, help="single n (ignored with --n-range)")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="write the JSON report here")
    s.add_argument("--json", action="store_true")

    r = sub.add_parser("search", help="numerical decomposition search")
    r.add_argument("form", help="form or witness JSON file")
    r.add_argument("--rank", type=int, required=True)
    r.add_argument("--restarts", type=int, default=50)
    r.add_argument("--tol", type=float, default=1e-18)
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="write the JSON report here")
    r.add_argument("--json", action="store_true")
    return p


COMMANDS = {"analyze": cmd_analyze, "generate": cmd_generate, "suite": cmd_suite, "search": cmd_search}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

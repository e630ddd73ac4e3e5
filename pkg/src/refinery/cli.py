"""Command-line front end.

Results go to standard output as JSON with exact scalars written as
strings; a short human summary goes to standard error.  Exit status is 0 on
success, 1 when a verification fails or a search contradicts a conjecture,
2 on usage, parse or input errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .conjectures import (
    SearchSpec,
    conjecture3_check,
    factor_through_projection,
    search_refinement,
)
from .exactfield import QuadScalar, format_scalar
from .fileio import (
    ParseError,
    export_off,
    format_map,
    format_refinement,
    parse_polytope,
    parse_refinement,
)
from .formspace import build_form_space
from .refinement import (
    Refinement,
    StatisticalModel,
    counterexample_section,
    example_parallelogram,
    example_pentagon_edges,
    example_pentagon_midpoint,
    holevo_refinement,
    verify_refinement,
)


class InputError(Exception):
    pass


def jsonable(obj):
    """Exact scalars to strings, tuples to lists, recursively."""
    if isinstance(obj, (Fraction, QuadScalar)):
        return format_scalar(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str, float)):
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


class _Run:
    def __init__(self, argv):
        self.argv = list(argv)
        self.inputs = {}

    def read(self, path: str) -> str:
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from None
        self.inputs[path] = hashlib.sha256(data).hexdigest()
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError:
            raise InputError(f"{path}: not UTF-8 text") from None

    def polytope(self, path: str):
        text = self.read(path)
        try:
            return parse_polytope(text)
        except ParseError as exc:
            raise InputError(f"{path}: {exc}") from None

    def refinement(self, path: str):
        text = self.read(path)
        try:
            return parse_refinement(text)
        except ParseError as exc:
            raise InputError(f"{path}: {exc}") from None


# -- result builders -----------------------------------------------------------

def _report_dict(rep) -> dict:
    return {
        "summary": rep.summary(),
        "passed": rep.passed,
        "pairs_checked": rep.pairs_checked,
        "axioms": {k: {"passed": r.passed, "witness": r.witness} for k, r in rep.axioms.items()},
    }


def form_matrix(omega) -> list[tuple]:
    """One row per complementary pair of non-constant extreme forms."""
    values = [omega.values(y) for y in omega.space.vertices]
    n = len(omega.base.vertices)
    const = {tuple(Fraction(0) for _ in range(n)), tuple(Fraction(1) for _ in range(n))}
    rows, seen = [], set()
    for v in values:
        if v in const or v in seen:
            continue
        c = tuple(1 - x for x in v)
        seen.update({v, c})
        key = lambda r: (sum(r, Fraction(0)), [float(x) for x in r])
        rows.append(min(v, c, key=key))

    def order(r):
        first_one = next((j for j, x in enumerate(r) if x == 1), n)
        return (first_one, [float(x) for x in r])

    return sorted(rows, key=order)


def cmd_formspace(args, run):
    C = run.polytope(args.polytope)
    omega = build_form_space(C)
    res = {
        "base_vertices": C.vertices,
        "dimension": omega.dim,
        "extreme_form_count": len(omega.space.vertices),
        "extreme_forms": [omega.values(y) for y in omega.space.vertices],
        "coordinates": "values at base vertices " + ",".join(str(i) for i in omega.basis),
        "inequalities": omega.space.inequalities,
        "equalities": omega.space.equalities,
    }
    if args.matrix:
        res["matrix"] = form_matrix(omega)
    summary = f"form space: dim {omega.dim}, {len(omega.space.vertices)} extreme forms"
    return res, summary, 0


def _model_and_refinement(run, model_path, refinement_path):
    M = StatisticalModel.of(run.polytope(model_path))
    T, f, g = run.refinement(refinement_path)
    return M, Refinement(T, build_form_space(T), f, g)


def cmd_holevo(args, run):
    M = StatisticalModel.of(run.polytope(args.model))
    R = holevo_refinement(M)
    rep = verify_refinement(R, M)
    text = format_refinement(R.T, R.f, R.g)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    res = {
        "simplex_vertices": len(R.T.vertices),
        "g_domain_dimension": R.g.domain.dim,
        "g_domain_vertices": len(R.g.domain.vertices),
        "verification": _report_dict(rep),
        "refinement": text,
    }
    return res, rep.summary(), 0 if rep.passed else 1


def cmd_verify(args, run):
    M, R = _model_and_refinement(run, args.model, args.refinement)
    rep = verify_refinement(R, M)
    return {"verification": _report_dict(rep)}, rep.summary(), 0 if rep.passed else 1


def _section_results(report) -> dict:
    out = []
    for r in report.results:
        entry = {"form": r.form, "extendable": r.extendable}
        if r.extendable:
            entry["extension"] = r.extension
        else:
            entry["certificate"] = r.certificate
            entry["certificate_verified"] = r.certificate_verified
        out.append(entry)
    bad = report.non_extendable
    return {
        "simplex_vertices": len(report.T.vertices),
        "f": format_map(report.f),
        "f_injective": report.injective,
        "forms": out,
        "non_extendable_count": len(bad),
        "all_certificates_verified": all(r.certificate_verified for r in bad),
    }


def _counterexample():
    rep = counterexample_section()
    res = _section_results(rep)
    ok = res["non_extendable_count"] > 0 and res["all_certificates_verified"]
    summary = (f"section of the square in the tetrahedron: {res['non_extendable_count']} extreme forms "
               f"cannot extend, certificates {'verified' if res['all_certificates_verified'] else 'FAILED'}")
    return res, summary, 0 if ok else 1


_EXAMPLES = {
    "parallelogram": example_parallelogram,
    "pentagon-midpoint": example_pentagon_midpoint,
    "pentagon-edges": example_pentagon_edges,
}


def cmd_example(args, run):
    if args.name == "counterexample":
        return _counterexample()
    bundle = _EXAMPLES[args.name]()
    R = bundle.refinement
    res = {
        "verification": _report_dict(bundle.report),
        "features": bundle.features,
        "refinement": format_refinement(R.T, R.f, R.g),
    }
    feats_ok = all(v for v in bundle.features.values() if isinstance(v, bool))
    ok = bundle.report.passed and feats_ok
    summary = bundle.report.summary() + ("" if feats_ok else "; feature check failed")
    return res, summary, 0 if ok else 1


def cmd_counterexample(args, run):
    return _counterexample()


def cmd_search(args, run):
    M = StatisticalModel.of(run.polytope(args.model))
    spec = SearchSpec(M, args.simplex_vertices, args.grid, not args.no_faces, args.budget)
    result = search_refinement(spec)
    res = {"verdict": result.verdict, "stats": result.stats}
    code = 0
    m = len(M.C.vertices)
    if result.verdict == "found":
        R = result.refinement
        res["family"] = result.family
        res["assignment"] = result.assignment
        res["refinement"] = format_refinement(R.T, R.f, R.g)
        if not M.is_simplicial and args.simplex_vertices < m:
            res["contradicts"] = "fewer simplex vertices than extreme points"
            code = 1
    summary = f"search ({args.simplex_vertices} simplex vertices, grid 1/{args.grid}): {result.verdict}"
    return res, summary, code


def cmd_check(args, run):
    M, R = _model_and_refinement(run, args.model, args.refinement)
    if not verify_refinement(R, M).passed:
        raise InputError("the refinement does not verify; run 'verify' for details")
    if args.which == "1":
        fz = factor_through_projection(M, R)
        res = {"factors": fz.factors}
        if fz.factors:
            res["h"] = format_map(fz.h)
            res["witness_verified"] = fz.verified
        else:
            res["certificate"] = fz.certificate
            res["certificate_verified"] = fz.certificate_verified
        held = fz.factors and fz.verified
        summary = "factors through the projection" if held else "no factorization found"
        return res, summary, 0 if held else 1
    rep = conjecture3_check(M, R)
    res = {"minimal_faces": rep.faces, "violations": rep.violations}
    summary = "no meeting preimage faces" if rep.holds else f"{len(rep.violations)} meeting pairs"
    return res, summary, 0 if rep.holds else 1


def cmd_export_off(args, run):
    P = run.polytope(args.polytope)
    if args.formspace:
        P = build_form_space(P).space
    try:
        export_off(P, args.output, project=args.project)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    res = {"vertices": len(P.vertices), "dimension": P.dim, "path": args.output}
    return res, f"wrote {args.output}", 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="refinery", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"refinery {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("formspace", help="extreme forms and H-description of a form space")
    s.add_argument("polytope")
    s.add_argument("--matrix", action="store_true", help="also print the form/vertex value table")
    s.set_defaults(func=cmd_formspace)

    s = sub.add_parser("holevo", help="projection refinement of a model")
    s.add_argument("model")
    s.add_argument("--output", help="write the refinement file here")
    s.set_defaults(func=cmd_holevo)

    s = sub.add_parser("verify", help="check a refinement against a model")
    s.add_argument("model")
    s.add_argument("refinement")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("example", help="built-in worked examples")
    s.add_argument("name", choices=sorted(_EXAMPLES) + ["counterexample"])
    s.set_defaults(func=cmd_example)

    s = sub.add_parser("counterexample", help="the square sliced from the tetrahedron")
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("search", help="bounded search for small refinements")
    s.add_argument("--model", required=True)
    s.add_argument("--simplex-vertices", type=int, required=True)
    s.add_argument("--grid", type=int, default=1)
    s.add_argument("--budget", type=int, default=1_000_000)
    s.add_argument("--no-faces", action="store_true", help="skip the face-pattern family")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("check-conjecture", help="instance checks of the refinement conjectures")
    s.add_argument("which", choices=["1", "3"])
    s.add_argument("--model", required=True)
    s.add_argument("--refinement", required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("export-off", help="write a 3-polytope as an OFF file")
    s.add_argument("polytope")
    s.add_argument("output")
    s.add_argument("--formspace", action="store_true", help="export the form space of the polytope")
    s.add_argument("--project", action="store_true",
                   help="project higher-dimensional polytopes orthogonally to 3-D")
    s.set_defaults(func=cmd_export_off)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = _Run(argv)
    start = time.perf_counter()
    try:
        results, summary, code = args.func(args, run)
    except (InputError, ValueError) as exc:
        print(f"refinery: error: {exc}", file=sys.stderr)
        return 2
    report = {
        "command": argv,
        "inputs": run.inputs,
        "results": jsonable(results),
        "summary": summary,
        "timing": {"seconds": round(time.perf_counter() - start, 3)},
        "version": __version__,
    }
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    print(summary, file=sys.stderr)
    return code

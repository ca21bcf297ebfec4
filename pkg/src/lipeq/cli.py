"""Command-line front end.

Exit codes:

====  =====================================================================
0     success (in class / verified / Equivalent)
1     unreadable spec, expression syntax error, usage error
2     class violation, equation mismatch, failed verification or check
3     ``equiv`` is Inconclusive
====  =====================================================================
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .algebra import ExprSyntaxError
from .coding import DistortionViolation, bilip_constants, sample_bilip_check
from .dimension import (
    BudgetExceeded,
    box_count_dim,
    count_matrix,
    default_cap,
    hausdorff_dim,
    spectral_radius,
)
from .gds import (
    DEFAULT_DEPTH,
    DisjointnessFailure,
    EquationMismatch,
    Equivalent,
    build_custom_graph,
    decide_equivalence,
    decide_graph_equivalence,
    theorem_graph,
    verify_equations,
)
from .ifs_model import Violation, gamma_signature, validate_class
from .render import render_svg
from .specfile import SpecError, load_spec

log = logging.getLogger("lipeq")

EXIT_OK, EXIT_INPUT, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def dumps(obj, indent: int = 0) -> str:
    """JSON with one line per scalar-only list, so reports diff cleanly."""
    pad, inner = " " * indent, " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 2)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(x, (dict, list, tuple)) for x in obj):
            return json.dumps(list(obj))
        return "[\n" + ",\n".join(inner + dumps(x, indent + 2) for x in obj) + "\n" + pad + "]"
    return json.dumps(obj)


def _emit(obj: dict):
    sys.stdout.write(dumps(obj) + "\n")


def _spec_header(spec) -> dict:
    return {"name": spec.name, "dim": spec.dim, "lambda": spec.lam, "maps": spec.maps}


def _opt(args, spec, key, fallback):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return spec.analysis.get(key, fallback)


def _graph_for(spec, depth):
    """``(gds, route, extra)``; custom partitions are verified, theorem graphs built."""
    ifs = spec.ifs()
    if spec.custom:
        return build_custom_graph(ifs, spec.pieces, spec.edges, depth=depth), "custom", {}
    norm, cert, gds = theorem_graph(ifs)
    extra = {"reflected": norm is not ifs, "certificate": cert.to_dict()}
    return gds, "theorem", extra


def cmd_validate(args) -> int:
    spec = load_spec(args.spec)
    out = {"command": "validate", "spec": _spec_header(spec)}
    try:
        cert = validate_class(spec.ifs())
    except Violation as v:
        out.update(result="violation", violation=v.to_dict())
        _emit(out)
        return EXIT_FAIL
    out.update(result="in-class", certificate=cert.to_dict())
    _emit(out)
    return EXIT_OK


def cmd_gamma(args) -> int:
    spec = load_spec(args.spec)
    out = {"command": "gamma", "spec": _spec_header(spec)}
    try:
        cert = validate_class(spec.ifs())
    except Violation as v:
        out.update(result="violation", violation=v.to_dict())
        _emit(out)
        return EXIT_FAIL
    out.update(k_vector=list(cert.k_vector),
               gamma={str(k): list(v) for k, v in cert.gamma.items()},
               gamma_rest=list(cert.gamma_rest),
               counts=list(gamma_signature(cert)))
    _emit(out)
    return EXIT_OK


def cmd_graph(args) -> int:
    spec = load_spec(args.spec)
    depth = _opt(args, spec, "depth", DEFAULT_DEPTH)
    out = {"command": "graph", "spec": _spec_header(spec)}
    try:
        gds, route, extra = _graph_for(spec, depth)
    except Violation as v:
        out.update(result="violation", violation=v.to_dict())
        _emit(out)
        return EXIT_FAIL
    except EquationMismatch as exc:
        out.update(result="equation-mismatch", vertex=exc.vertex, side=exc.side,
                   witness=exc.witness.as_strings(), message=str(exc))
        _emit(out)
        return EXIT_FAIL
    except DisjointnessFailure as exc:
        out.update(result="disjointness-failure", message=str(exc))
        _emit(out)
        return EXIT_FAIL
    report = verify_equations(gds, depth=depth)
    out.update(route=route, **extra)
    out["graph"] = gds.to_dict()
    out["verification"] = report.to_dict()
    out["result"] = "verified" if report.ok else "unverified"
    _emit(out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_equiv(args) -> int:
    spec_a, spec_b = load_spec(args.spec_a), load_spec(args.spec_b)
    depth = _opt(args, spec_a, "depth", DEFAULT_DEPTH)
    pairs = _opt(args, spec_a, "pairs", 500)
    seed = _opt(args, spec_a, "seed", 0)
    sample_depth = _opt(args, spec_a, "sample_depth", 5)
    out = {"command": "equiv", "a": _spec_header(spec_a), "b": _spec_header(spec_b)}
    try:
        if not spec_a.custom and not spec_b.custom:
            decision = decide_equivalence(spec_a.ifs(), spec_b.ifs(), depth=depth)
        else:
            ga, _, _ = _graph_for(spec_a, depth)
            gb, _, _ = _graph_for(spec_b, depth)
            decision = decide_graph_equivalence(ga, gb, depth=depth, route="custom")
    except Violation as v:
        out.update(result="violation", violation=v.to_dict())
        _emit(out)
        return EXIT_FAIL
    except (EquationMismatch, DisjointnessFailure) as exc:
        out.update(result="graph-error", message=str(exc))
        _emit(out)
        return EXIT_FAIL
    out["decision"] = decision.to_dict()
    if not isinstance(decision, Equivalent):
        _emit(out)
        return EXIT_INCONCLUSIVE
    cert = bilip_constants(decision.gds_a, decision.gds_b, depth)
    out["bilipschitz"] = cert.to_dict()
    try:
        report = sample_bilip_check(decision.gds_a, decision.gds_b, decision.matching, cert,
                                    pair_count=pairs, depth=sample_depth, seed=seed)
    except DistortionViolation as exc:
        out["sample_check"] = {"violation": str(exc)}
        _emit(out)
        return EXIT_FAIL
    out["sample_check"] = report.to_dict()
    _emit(out)
    return EXIT_OK


def cmd_dim(args) -> int:
    spec = load_spec(args.spec)
    depth = _opt(args, spec, "depth", DEFAULT_DEPTH)
    box_depth = args.box_depth if args.box_depth is not None else spec.analysis.get("box_depth", 8)
    tol = _opt(args, spec, "tol", 1e-12)
    cap = _opt(args, spec, "cap", default_cap())
    out = {"command": "dim", "spec": _spec_header(spec)}
    try:
        gds, route, _ = _graph_for(spec, depth)
    except Violation as v:
        out.update(result="violation", violation=v.to_dict())
        _emit(out)
        return EXIT_FAIL
    report = verify_equations(gds, depth=depth)
    if not report.ok:
        out.update(result="unverified", verification=report.to_dict())
        _emit(out)
        return EXIT_FAIL
    M = count_matrix(gds)
    dim = hausdorff_dim(gds, tol, separation=report.separation)
    out["route"] = route
    out["count_matrix"] = M.tolist()
    if gds.homogeneous():
        out["spectral_radius"] = float(f"{spectral_radius(M, tol):.12g}")
    out["spectral_dimension"] = float(f"{dim:.12g}")
    lam = spec.ifs().lam
    try:
        bc = box_count_dim(spec.ifs(), box_depth, cap)
    except BudgetExceeded as exc:
        out["box_count"] = {"error": str(exc)}
    else:
        out["box_count"] = bc.to_dict() | {"depth": box_depth}
        out["discrepancy"] = float(f"{abs(bc.slope - dim):.12g}")
    out["log_inverse_lambda"] = float(f"{math.log(1 / float(lam)):.12g}")
    _emit(out)
    return EXIT_OK


def cmd_render(args) -> int:
    specs = [load_spec(p) for p in args.specs]
    svg = render_svg([(s.name, s.ifs()) for s in specs])
    try:
        Path(args.output).write_text(svg)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit({"command": "render", "output": str(args.output), "panels": [s.name for s in specs]})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipeq", description=(
        "Lipschitz equivalence of homogeneous self-similar sets with complete overlaps."))
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check class membership")
    p.add_argument("spec")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gamma", help="print overlap index sets and counts")
    p.add_argument("spec")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("graph", help="build and verify the graph-directed partition")
    p.add_argument("spec")
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("equiv", help="decide Lipschitz equivalence (sufficient test)")
    p.add_argument("spec_a")
    p.add_argument("spec_b")
    p.add_argument("--depth", type=int)
    p.add_argument("--pairs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sample-depth", dest="sample_depth", type=int)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("dim", help="spectral dimension and box-count cross-check")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, help="verification depth")
    p.add_argument("--box-depth", dest="box_depth", type=int, help="box-count depth (default 8)")
    p.add_argument("--tol", type=float)
    p.add_argument("--cap", type=int, help="enumeration cap (env LIPEQ_ENUM_CAP)")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("render", help="SVG of the first-level images")
    p.add_argument("specs", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ExprSyntaxError as exc:
        _emit({"command": args.command, "result": "syntax-error", "message": str(exc),
               "position": exc.pos})
        return EXIT_INPUT
    except (SpecError, OSError) as exc:
        _emit({"command": args.command, "result": "input-error", "message": str(exc)})
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

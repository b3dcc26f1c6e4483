"""Batch command line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error,
3 load or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import normality, theorems
from .relations import (
    CarrierBoundExceeded, RelationError,
    enumerate_congruences, parse_relation_literal,
)
from .structures import (
    FiniteStructure, ParseError, StructureError, Subobject,
    load_structure_path, subalgebra_closure, validate_structure,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_LOAD = 3


class _LoadFailure(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normrel",
        description="Validate finite structures and verify the "
                    "correspondence between Bourn-normal subobjects and "
                    "congruences on them.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, subset=False, rel=False, many=False):
        if many:
            p.add_argument("paths", nargs="+", metavar="FILE")
        else:
            p.add_argument("path", metavar="FILE")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--max-carrier", type=int, default=12,
                       help="bound for congruence/witness enumeration")
        if subset:
            p.add_argument("--subset", required=True, metavar="GENERATORS",
                           help="comma-separated generators, closed to a "
                                "subobject before use")
        if rel:
            p.add_argument("--rel", required=True, metavar="LITERAL",
                           help="relation literal such as \"{0,2},{1,3}\"")

    common(sub.add_parser("validate", help="check the context axioms"),
           many=True)
    common(sub.add_parser("congruences", help="list every congruence"))
    common(sub.add_parser("nor", help="normalization of a relation"), rel=True)
    common(sub.add_parser("rel", help="least relation witnessing a subobject"),
           subset=True)
    common(sub.add_parser("check-normal", help="test Bourn-normality"),
           subset=True)
    common(sub.add_parser("witnesses",
                          help="every relation a subobject is Bourn-normal to"),
           subset=True)
    common(sub.add_parser("verify", help="run every suite"), many=True)
    return parser


def _load(path) -> FiniteStructure:
    try:
        x = load_structure_path(path)
    except ParseError as exc:
        raise _LoadFailure(f"{path}: {exc}") from None
    report = validate_structure(x)
    if not report.ok:
        detail = "; ".join(str(v) for v in report.violations)
        raise _LoadFailure(f"{path}: axiom violations: {detail}")
    return x


def _subset_of(x: FiniteStructure, text: str) -> Subobject:
    try:
        generators = [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise _LoadFailure(f"bad --subset value {text!r}") from None
    if any(not 0 <= g < x.size for g in generators):
        raise _LoadFailure(f"--subset generator out of range in {text!r}")
    return Subobject(x, subalgebra_closure(x, generators))


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _cmd_validate(args) -> int:
    results = []
    worst = EXIT_OK
    for path in args.paths:
        try:
            x = load_structure_path(path)
        except ParseError as exc:
            results.append({"path": str(path), "ok": False,
                            "error": str(exc)})
            worst = EXIT_LOAD
            continue
        report = validate_structure(x)
        entry = {"path": str(path), "ok": report.ok,
                 "violations": [{"axiom": v.axiom, "witness": list(v.witness)}
                                for v in report.violations]}
        results.append(entry)
        if not report.ok:
            worst = EXIT_LOAD
    lines = []
    for r in results:
        if r["ok"]:
            lines.append(f"{r['path']}: ok")
        elif "error" in r:
            lines.append(f"{r['path']}: parse error: {r['error']}")
        else:
            detail = "; ".join(f"{v['axiom']} at {tuple(v['witness'])}"
                               for v in r["violations"])
            lines.append(f"{r['path']}: invalid: {detail}")
    _emit(args, {"results": results}, lines)
    return worst


def _cmd_congruences(args) -> int:
    x = _load(args.path)
    relations = enumerate_congruences(x, args.max_carrier)
    literals = [r.to_literal(include_singletons=True) for r in relations]
    _emit(args, {"instance": x.name, "count": len(relations),
                 "congruences": literals},
          [f"{len(relations)} congruences on {x.name or args.path}:"]
          + [f"  {lit}" for lit in literals])
    return EXIT_OK


def _cmd_nor(args) -> int:
    x = _load(args.path)
    try:
        relation = parse_relation_literal(x, args.rel)
    except RelationError as exc:
        raise _LoadFailure(str(exc)) from None
    sub = normality.nor(relation)
    members = sorted(sub.members)
    _emit(args, {"instance": x.name, "rel": args.rel, "nor": members},
          ["nor = {" + ",".join(map(str, members)) + "}"])
    return EXIT_OK


def _cmd_rel(args) -> int:
    x = _load(args.path)
    sub = _subset_of(x, args.subset)
    relation = normality.rel(sub)
    _emit(args,
          {"instance": x.name, "subset": sorted(sub.members),
           "rel": relation.to_literal(include_singletons=True)},
          [f"subobject generated: {{{','.join(map(str, sub.sorted_members()))}}}",
           f"rel = {relation.to_literal(include_singletons=True)}"])
    return EXIT_OK


def _cmd_check_normal(args) -> int:
    x = _load(args.path)
    sub = _subset_of(x, args.subset)
    verdict = normality.is_bourn_normal(sub)
    payload = {"instance": x.name, "subset": sorted(sub.members),
               "bourn_normal": bool(verdict), "detail": verdict.message,
               "witness": {"subset": args.subset}}
    if verdict:
        _emit(args, payload, ["Bourn-normal"])
        return EXIT_OK
    _emit(args, payload, [f"not Bourn-normal: {verdict.message}"])
    return EXIT_CHECK_FAILED


def _cmd_witnesses(args) -> int:
    x = _load(args.path)
    sub = _subset_of(x, args.subset)
    witnesses = normality.normal_to_witnesses(sub, args.max_carrier)
    literals = [w.to_literal(include_singletons=True) for w in witnesses]
    _emit(args, {"instance": x.name, "subset": sorted(sub.members),
                 "count": len(witnesses), "witnesses": literals},
          [f"{len(witnesses)} witnessing relations:"]
          + [f"  {lit}" for lit in literals])
    return EXIT_OK


def _cmd_verify(args) -> int:
    reports = theorems.run_all(args.paths, args.max_carrier)
    payload = {"reports": [r.to_dict() for r in reports],
               "ok": all(r.ok for r in reports)}
    lines = []
    for r in reports:
        lines.append(r.summary())
        for c in r.checks:
            if not c.passed:
                lines.append(f"  FAIL {c.id}: {c.anchor}")
                if c.witness:
                    lines.append(f"       witness: {json.dumps(c.witness, sort_keys=True)}")
    total = sum(len(r.checks) for r in reports)
    good = sum(sum(c.passed for c in r.checks) for r in reports)
    lines.append(f"{len(reports)} instances, {good}/{total} checks passed")
    _emit(args, payload, lines)
    return EXIT_OK if payload["ok"] else EXIT_CHECK_FAILED


_COMMANDS = {
    "validate": _cmd_validate,
    "congruences": _cmd_congruences,
    "nor": _cmd_nor,
    "rel": _cmd_rel,
    "check-normal": _cmd_check_normal,
    "witnesses": _cmd_witnesses,
    "verify": _cmd_verify,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.verb](args)
    except _LoadFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    except CarrierBoundExceeded as exc:
        print(f"error: {exc} (raise --max-carrier)", file=sys.stderr)
        return EXIT_LOAD
    except (RelationError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()

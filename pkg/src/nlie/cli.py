"""Command-line front end: JSON in, deterministic reports out.

Exit codes form the CI contract: 0 when the checked property holds (or a
computation succeeded), 1 when a mathematical property fails (the report
carries a witness), 2 on input errors (malformed JSON, missing fields,
dimension mismatches, violated preconditions).

Stdout is byte-stable for a fixed input and tool version; wall-clock
timing goes to stderr.  Checker verbs print a small text report (or a
JSON envelope under ``--format json``).  Producer verbs (``deform
extend``, ``obstruction``, ``nijenhuis --generate-path``, ``algebroid
example-*``) print the produced document itself as JSON so it can be
piped straight into the next command.

``--threads`` is accepted for interface compatibility; all computations
run single-threaded, which is what keeps the outputs byte-stable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from typing import Any, Optional

from . import __version__
from .algebra import check_fundamental_identity
from .algebroid import (check_algebroid_axioms, example_tangent_fc,
                        example_tangent_topform)
from .chevalley import ce_differential_matrix
from .cohomology import DEFAULT_DEGREE_CAP, cohomology, differential_matrix
from .deformations import (check_deformation, check_equivalence,
                           check_nijenhuis, deformation_from_nijenhuis,
                           extend, obstruction, rigidity_probe)
from .errors import DimensionMismatch, InvalidStructure
from .io import (InputFormatError, algebra_from_json, algebroid_from_json,
                 algebroid_to_json, cochain_to_json,
                 cohomology_report_to_json, emap_from_json, load_document,
                 matrix_from_json, path_from_json, path_to_json,
                 report_value)
from .poly import poly_const, poly_var


def _sha256(path: str) -> str:
    try:
        data = open(path, "rb").read()
    except OSError as exc:
        raise InputFormatError(str(exc), location=path)
    return hashlib.sha256(data).hexdigest()


class Report:
    """Collects the verdict of one run and renders it in either format."""

    def __init__(self, command: str):
        self.command = command
        self.inputs: list[dict[str, str]] = []
        self.fields: dict[str, Any] = {}
        self.lines: list[str] = []
        self.artifact: Optional[dict] = None
        self.exit_code = 0

    def add_input(self, path: str) -> None:
        self.inputs.append({"path": path, "sha256": _sha256(path)})

    def set(self, key: str, value: Any, line: Optional[str] = None) -> None:
        self.fields[key] = value
        if line is not None:
            self.lines.append(line)

    def render(self, fmt: str) -> str:
        if self.artifact is not None:
            return json.dumps(self.artifact, indent=2) + "\n"
        if fmt == "json":
            doc = {"tool": "nlie", "version": __version__,
                   "command": self.command, "inputs": self.inputs}
            doc.update(self.fields)
            return json.dumps(doc, indent=2) + "\n"
        head = [f"nlie {__version__}"]
        head += [f"input: {i['path']} sha256:{i['sha256']}"
                 for i in self.inputs]
        return "\n".join(head + self.lines) + "\n"


def _witness_lines(report: Report, witness: Any) -> None:
    encoded = report_value(witness)
    report.fields["witness"] = encoded
    report.lines.append("witness: " + json.dumps(encoded, sort_keys=True))


def _load_algebra(report: Report, path: str):
    report.add_input(path)
    return algebra_from_json(load_document(path), where=path)


def _load_path(report: Report, path: str):
    report.add_input(path)
    return path_from_json(load_document(path), where=path)


# ------------------------------------------------------------------ verbs

def run_check(args, report: Report) -> None:
    alg = _load_algebra(report, args.algebra)
    res = check_fundamental_identity(alg)
    status = "holds" if res.holds else "fails"
    report.set("status", status, f"fundamental identity: {status}")
    if not res.holds:
        _witness_lines(report, res.witness)
        report.exit_code = 1


def run_cohomology(args, report: Report) -> None:
    alg = _load_algebra(report, args.algebra)
    rep = cohomology(alg, args.degree, max_degree_cap=args.max_degree_cap)
    doc = cohomology_report_to_json(rep)
    report.fields["status"] = "ok"
    report.fields.update(doc)
    report.lines += [
        f"degree: {rep.degree}",
        f"dim cochains: {rep.dim_cochains}",
        f"rank d_out: {rep.rank_d_out}",
        f"rank d_in: {rep.rank_d_in}",
        f"betti: {rep.betti}",
        f"representatives: {rep.betti}",
    ]


def run_nijenhuis(args, report: Report) -> None:
    alg = _load_algebra(report, args.algebra)
    report.add_input(args.operator)
    nmat = matrix_from_json(load_document(args.operator),
                            where=args.operator)
    res = check_nijenhuis(alg, nmat)
    status = "holds" if res.holds else "fails"
    report.set("status", status, f"nijenhuis condition: {status}")
    if not res.holds:
        _witness_lines(report, res.witness)
        report.exit_code = 1
    elif args.generate_path:
        report.artifact = path_to_json(deformation_from_nijenhuis(alg, nmat))


def run_deform_check(args, report: Report) -> None:
    path = _load_path(report, args.path)
    res = check_deformation(path, mode=args.mode)
    status = "holds" if res.holds else "fails"
    report.set("mode", res.mode)
    report.set("status", status,
               f"deformation equations ({res.mode}): {status}")
    if not res.holds:
        report.set("first_failing_power", res.first_failing_power,
                   f"first failing power: {res.first_failing_power}")
        report.exit_code = 1


def run_deform_extend(args, report: Report) -> None:
    path = _load_path(report, args.path)
    res = extend(path)
    if res.success:
        report.artifact = cochain_to_json(res.term)
    else:
        report.set("status", "fails", "extension: obstructed")
        report.set("certificate", res.certificate,
                   f"certificate: {res.certificate}")
        report.exit_code = 1


def run_deform_equiv(args, report: Report) -> None:
    path1 = _load_path(report, args.path1)
    path2 = _load_path(report, args.path2)
    report.add_input(args.map)
    emap = emap_from_json(load_document(args.map), where=args.map)
    res = check_equivalence(path1, path2, emap)
    status = "holds" if res.holds else "fails"
    report.set("status", status, f"equivalence: {status}")
    if not res.holds:
        report.set("first_failing_power", res.first_failing_power,
                   f"first failing power: {res.first_failing_power}")
        report.exit_code = 1


def run_deform_rigidity(args, report: Report) -> None:
    alg = _load_algebra(report, args.algebra)
    rep = rigidity_probe(alg, args.max_order, args.trials, seed=args.seed)
    status = "holds" if rep.all_trivialized else "fails"
    report.set("note", rep.note, f"note: {rep.note}")
    report.set("betti_h2", rep.betti_h2, f"betti h2: {rep.betti_h2}")
    report.set("max_order", rep.max_order)
    trials = [{"kind": t.kind, "trivialized": t.trivialized,
               "stuck_order": t.stuck_order} for t in rep.trials]
    report.fields["trials"] = trials
    for i, t in enumerate(rep.trials):
        verdict = "trivialized" if t.trivialized else \
            f"stuck at order {t.stuck_order}"
        report.lines.append(f"trial {i} ({t.kind}): {verdict}")
    word = "yes" if rep.all_trivialized else "no"
    report.set("status", status, f"all trivialized: {word}")
    if not rep.all_trivialized:
        report.exit_code = 1


def run_obstruction(args, report: Report) -> None:
    path = _load_path(report, args.path)
    theta = obstruction(path)
    report.artifact = cochain_to_json(theta)


def run_algebroid_check(args, report: Report) -> None:
    report.add_input(args.algebroid)
    abd = algebroid_from_json(load_document(args.algebroid),
                              where=args.algebroid)
    res = check_algebroid_axioms(abd, max_degree=args.max_degree,
                                 sections_degree=args.sections_degree)
    status = "holds" if res.holds else "fails"
    report.set("status", status, f"algebroid axioms: {status}")
    if not res.holds:
        _witness_lines(report, res.witness)
        report.exit_code = 1


_FC_POLYS = {
    "one": lambda m: poly_const(m, 1),
    "x1": lambda m: poly_var(m, 0),
    "x1sq": lambda m: poly_var(m, 0) * poly_var(m, 0),
}


def run_algebroid_fc(args, report: Report) -> None:
    alg = _load_algebra(report, args.algebra)
    f = _FC_POLYS[args.f](alg.dim)
    report.artifact = algebroid_to_json(example_tangent_fc(alg, f))


def run_algebroid_topform(args, report: Report) -> None:
    abd = example_tangent_topform(args.base_dim, args.wedge_degree)
    report.artifact = algebroid_to_json(abd)


def run_reduce_lie(args, report: Report) -> None:
    alg = _load_algebra(report, args.algebra)
    if alg.arity != 2:
        raise InputFormatError("reduce-lie needs a binary bracket "
                               f"(arity {alg.arity} given)", args.algebra)
    methods = {0: "matrix identity", 1: "matrix identity",
               2: "evaluation identity"}
    agreement: dict[str, bool] = {}
    for k in (0, 1, 2):
        if k < 2:
            same = differential_matrix(alg, k).entries == \
                ce_differential_matrix(alg, k).entries
        else:
            same = _ce_agrees_by_evaluation(alg)
        agreement[str(k)] = same
        word = "agree" if same else "disagree"
        report.lines.append(f"degree {k}: {word} ({methods[k]})")
    all_agree = all(agreement.values())
    report.fields["agreement"] = agreement
    report.set("status", "holds" if all_agree else "fails",
               f"reduction: {'agree' if all_agree else 'disagree'}")
    if not all_agree:
        report.exit_code = 1


def _ce_agrees_by_evaluation(alg) -> bool:
    import itertools

    from .chevalley import CECochain, ce_differential, ce_eval
    from .cochains import basis_cochains, eval_keys_z, from_bracket, \
        gla_bracket

    phi = from_bracket(alg)
    m = alg.dim
    for psi in basis_cochains(m, 2, 1):
        generic = gla_bracket(phi, psi)
        ce = ce_differential(
            alg, CECochain(m, 2, {key: val for (_, key), val
                                  in psi.entries.items()}))
        for i in range(m):
            for j, k in itertools.combinations(range(m), 2):
                if eval_keys_z(generic, ((i,), (j,)), k) != \
                        ce_eval(ce, (i, j, k)):
                    return False
    return True


# ------------------------------------------------------------- arg parsing

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "json"),
                        default=argparse.SUPPRESS,
                        help="report format (default: text)")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized sampling verbs")
    parser.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="accepted for compatibility; runs are "
                             "single-threaded")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlie",
        description="exact checkers for skew n-ary brackets, their "
                    "deformation cohomology, and polynomial algebroid "
                    "models")
    parser.set_defaults(format="text", seed=0, threads=1)
    _add_common(parser)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("check", help="fundamental identity of an algebra")
    _add_common(p)
    p.add_argument("algebra")
    p.set_defaults(run=run_check)

    p = sub.add_parser("cohomology", help="betti numbers of the "
                                          "deformation complex")
    _add_common(p)
    p.add_argument("algebra")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--max-degree-cap", type=int,
                   default=DEFAULT_DEGREE_CAP)
    p.set_defaults(run=run_cohomology)

    p = sub.add_parser("nijenhuis", help="check an operator and "
                                         "optionally emit its path")
    _add_common(p)
    p.add_argument("algebra")
    p.add_argument("operator", help="square matrix JSON")
    p.add_argument("--generate-path", action="store_true")
    p.set_defaults(run=run_nijenhuis)

    deform = sub.add_parser("deform", help="deformation path calculus")
    dsub = deform.add_subparsers(dest="subverb", required=True)

    p = dsub.add_parser("check", help="power-by-power deformation "
                                      "equations")
    _add_common(p)
    p.add_argument("path")
    p.add_argument("--mode", choices=("truncated", "full"),
                   default="truncated")
    p.set_defaults(run=run_deform_check)

    p = dsub.add_parser("extend", help="solve for the next term or "
                                       "certify the obstruction")
    _add_common(p)
    p.add_argument("path")
    p.set_defaults(run=run_deform_extend)

    p = dsub.add_parser("equiv", help="conjugate path1 and compare with "
                                      "path2")
    _add_common(p)
    p.add_argument("path1")
    p.add_argument("path2")
    p.add_argument("map", help="equivalence map JSON")
    p.set_defaults(run=run_deform_equiv)

    p = dsub.add_parser("rigidity", help="sampling probe for rigidity")
    _add_common(p)
    p.add_argument("algebra")
    p.add_argument("--max-order", type=int, default=2)
    p.add_argument("--trials", type=int, default=6)
    p.set_defaults(run=run_deform_rigidity)

    p = sub.add_parser("obstruction", help="emit the obstruction cochain "
                                           "of a path")
    _add_common(p)
    p.add_argument("path")
    p.set_defaults(run=run_obstruction)

    algebroid = sub.add_parser("algebroid", help="polynomial algebroid "
                                                 "models")
    asub = algebroid.add_subparsers(dest="subverb", required=True)

    p = asub.add_parser("check", help="algebroid axioms")
    _add_common(p)
    p.add_argument("algebroid")
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--sections-degree", type=int, default=0)
    p.set_defaults(run=run_algebroid_check)

    p = asub.add_parser("example-fc", help="scaled tangent-model "
                                           "algebroid over an algebra")
    _add_common(p)
    p.add_argument("algebra")
    p.add_argument("--f", choices=sorted(_FC_POLYS), default="x1",
                   help="scaling polynomial")
    p.set_defaults(run=run_algebroid_fc)

    p = asub.add_parser("example-topform", help="top-form tangent "
                                                "algebroid")
    _add_common(p)
    p.add_argument("base_dim", type=int)
    p.add_argument("wedge_degree", type=int)
    p.set_defaults(run=run_algebroid_topform)

    p = sub.add_parser("reduce-lie", help="compare the generic "
                                          "differential with the "
                                          "Chevalley-Eilenberg one")
    _add_common(p)
    p.add_argument("algebra")
    p.set_defaults(run=run_reduce_lie)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.verb + (f" {args.subverb}"
                           if getattr(args, "subverb", None) else "")
    report = Report(command)
    started = time.perf_counter()
    try:
        args.run(args, report)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DimensionMismatch, InvalidStructure) as exc:
        detail = ""
        witness = getattr(exc, "witness", None)
        if witness is not None:
            detail = " witness: " + json.dumps(report_value(witness),
                                               sort_keys=True)
        print(f"error: {exc}{detail}", file=sys.stderr)
        return 2
    finally:
        elapsed = time.perf_counter() - started
        print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)
    sys.stdout.write(report.render(args.format))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

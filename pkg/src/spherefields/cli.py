"""Command-line front end.

Exit codes: 0 success, 1 negative verdict of a yes/no test, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .errors import (
    BadParameters,
    DimensionMismatch,
    EmptySection,
    IndependenceNotCertified,
    NotDegreeOneHomogeneous,
    NotFirstIntegral,
    NotInvariant,
    NotTangent,
    OddDimension,
    ParseError,
    SphereFieldError,
)
from .extactic import extactic_report, find_meridians, find_parallels, meridian_basis, parallel_basis
from .generators import FAMILIES, generate
from .hamiltonian import cubic_kernel_s3, deg1_hamiltonian_test, verify_hamiltonian
from .poly import Q, parse_polynomial
from .sphere_geometry import Hyperplane, cone_polynomial, sphere_invariance_check
from .stereographic import push_forward, radial_identity_holds
from .vector_field import (
    canonical_decompose,
    format_field,
    integrability_certificate,
    layered_decompose,
    parse_field,
    tangency_cofactor,
)

SCHEMA_VERSION = 1
FORMAT_ENV = "SPHEREFIELDS_FORMAT"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


class Negative(Exception):
    """A yes/no command answered no; carries the report."""

    def __init__(self, report):
        super().__init__("negative verdict")
        self.report = report


def read_field(source: str):
    if source == "-":
        text = sys.stdin.read()
    elif os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source
    return parse_field(text)


def _vector(text):
    return [Q(v.strip()) for v in text.split(",") if v.strip()]


# ---------------------------------------------------------------------------
# commands; each returns (report dict, text lines)


def cmd_check_tangent(args, fld):
    try:
        cert = tangency_cofactor(fld)
    except NotTangent as exc:
        raise Negative({"tangent": False, "reason": str(exc)}) from None
    return {"tangent": True, "certificate": cert.to_dict()}, ["tangent: yes", f"cofactor K = {cert.cofactor}"]


def cmd_decompose(args, fld):
    try:
        cf = layered_decompose(fld) if args.layered else canonical_decompose(fld)
    except NotTangent as exc:
        raise Negative({"tangent": False, "reason": str(exc)}) from None
    lines = [f"f{i + 1} = {f}" for i, f in enumerate(cf.f)]
    d = cf.dim
    for i in range(d):
        for j in range(i + 1, d):
            if cf.A[i, j]:
                lines.append(f"A{i + 1}{j + 1} = {cf.A[i, j]}")
    if cf.layers is not None:
        lines.append(f"layers d(m) = {cf.layer_count}")
        for i, row in enumerate(cf.layers):
            for j, fij in enumerate(row, 1):
                lines.append(f"f{i + 1},{j} = {fij}")
    return {"canonicalForm": cf.to_dict()}, lines


def cmd_extactic(args, fld):
    d = fld.dim
    if args.basis:
        basis = [parse_polynomial(b, d) for b in args.basis.split(",")]
    elif args.kind == "parallel":
        basis = parallel_basis(d)
    else:
        basis = meridian_basis(d)
    cands = [parse_polynomial(c, d) for c in args.candidates.split(";")] if args.candidates else []
    rep = extactic_report(fld, basis, cands)
    lines = [f"E = {rep.E}"]
    lines += [f"multiplicity of {f}: {m}" for f, m in rep.candidates]
    return {"extactic": rep.to_dict()}, lines


def _finding_lines(finding):
    lines = [f"{finding.kind}s: {finding.count} (with multiplicity {finding.total_multiplicity}),"
             f" complete: {'yes' if finding.complete else 'no'}"]
    for h in finding.hyperplanes:
        lines.append(f"  {h.hyperplane}  multiplicity {h.multiplicity}  cofactor {h.cofactor}")
    for k, v in sorted(finding.flags.items()):
        lines.append(f"  flag {k}: {v}")
    for u in finding.unresolved:
        lines.append(f"  unresolved factor: {u}")
    return lines


def cmd_meridians(args, fld):
    cands = json.loads(args.candidates) if args.candidates else None
    finding = find_meridians(fld, cands)
    return {"finding": finding.to_dict()}, _finding_lines(finding)


def cmd_parallels(args, fld):
    finding = find_parallels(fld)
    return {"finding": finding.to_dict()}, _finding_lines(finding)


def cmd_sphere_check(args, fld):
    h = Hyperplane(tuple(_vector(args.a)), Q(args.b))
    cone = cone_polynomial(h)
    try:
        cert = sphere_invariance_check(fld, h)
    except NotInvariant as exc:
        raise Negative({"invariant": False, "hyperplane": h.to_dict(), "cone": str(cone.polynomial),
                        "reason": str(exc)}) from None
    return ({"invariant": True, "hyperplane": h.to_dict(), "cone": str(cone.polynomial),
             "certificate": cert.to_dict()},
            [f"invariant: yes ({cert.mode})", f"f = {cert.f}", f"cofactor = {cert.cofactor}"])


def cmd_hamiltonian(args, fld):
    if args.H:
        H = parse_polynomial(args.H, fld.dim)
        ok = verify_hamiltonian(fld, H)
        rep = {"hamiltonian": ok, "H": str(H)}
        if not ok:
            raise Negative(rep)
        return rep, [f"H = {H} is a Hamiltonian"]
    rep = deg1_hamiltonian_test(fld)
    if not rep.symmetric:
        raise Negative({"report": rep.to_dict()})
    return {"report": rep.to_dict()}, ["hamiltonian: yes", f"H = {rep.H}"]


def cmd_project(args, fld):
    proj = push_forward(fld)
    rep = proj.to_dict()
    rep["radialIdentity"] = radial_identity_holds(proj)
    lines = [f"R{i + 1} = {r.to_string('u')}" for i, r in enumerate(proj.R)]
    lines.append(proj.time_rescale)
    return {"projected": rep}, lines


def cmd_integrals(args, fld):
    Gs = [parse_polynomial(g, fld.dim) for g in args.G]
    try:
        cert = integrability_certificate(fld, Gs, seed=args.seed)
    except NotFirstIntegral as exc:
        raise Negative({"certified": False, "reason": f"G{exc.index + 1} is not a first integral"}) from None
    except IndependenceNotCertified as exc:
        raise Negative({"certified": False, "reason": str(exc)}) from None
    pt = ", ".join(str(v) for v in cert.point)
    return {"certified": True, "certificate": cert.to_dict()}, [
        f"{len(Gs)} independent first integrals", f"Jacobian rank {cert.jacobian_rank} at ({pt})"]


def cmd_generate(args):
    params = json.loads(args.params) if args.params else {}
    if not isinstance(params, dict):
        raise BadParameters("--params must be a JSON object")
    gen = generate(args.family, params, args.seed)
    return gen.to_dict(), [format_field(gen.field)] + [
        f"{k}: {json.dumps(v)}" for k, v in sorted(gen.to_dict()["metadata"].items())]


def cmd_selftest(args):
    res = cubic_kernel_s3()
    rep = {"test": args.name, **res.to_dict()}
    if res.dimension != 0:
        raise Negative(rep)
    return rep, [f"kernel dimension {res.dimension}"]


FIELD_COMMANDS = {
    "check-tangent": cmd_check_tangent,
    "decompose": cmd_decompose,
    "extactic": cmd_extactic,
    "meridians": cmd_meridians,
    "parallels": cmd_parallels,
    "sphere-check": cmd_sphere_check,
    "hamiltonian": cmd_hamiltonian,
    "project": cmd_project,
    "integrals": cmd_integrals,
}


def build_parser():
    default_fmt = os.environ.get(FORMAT_ENV, "text")
    if default_fmt not in ("text", "json"):
        default_fmt = "text"
    p = argparse.ArgumentParser(prog="spherefields",
                                description="Exact analysis of polynomial vector fields tangent to spheres.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--format", choices=("text", "json"), default=default_fmt,
                   help=f"output format (default from ${FORMAT_ENV}, else text)")
    sub = p.add_subparsers(dest="command", required=True)

    def field_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("field", help="field file, '-' for stdin, or inline 'dim d; P1 = ...' text")
        return sp

    field_cmd("check-tangent", "certify tangency with the cofactor K")
    sp = field_cmd("decompose", "canonical (f, A) decomposition")
    sp.add_argument("--layered", action="store_true", help="also give the layered f_ij form")
    sp = field_cmd("extactic", "extactic polynomial of a subspace")
    sp.add_argument("--basis", help="comma-separated basis polynomials")
    sp.add_argument("--kind", choices=("meridian", "parallel"), default="meridian")
    sp.add_argument("--candidates", help="';'-separated polynomials whose multiplicity to report")
    sp = field_cmd("meridians", "invariant meridian hyperplanes")
    sp.add_argument("--candidates", help="JSON list of coefficient vectors to verify")
    field_cmd("parallels", "invariant parallel hyperplanes")
    sp = field_cmd("sphere-check", "invariance of the section {a.x + b = 0}")
    sp.add_argument("--a", required=True, help="comma-separated normal vector")
    sp.add_argument("--b", default="0", help="offset b (rational)")
    sp = field_cmd("hamiltonian", "degree-one Hamiltonian test, or verify a given H")
    sp.add_argument("--H", help="candidate Hamiltonian to verify")
    field_cmd("project", "stereographic push-forward from the north pole")
    sp = field_cmd("integrals", "certify independent first integrals")
    sp.add_argument("--G", action="append", required=True, help="first integral (repeatable)")
    sp.add_argument("--seed", type=int, default=0)
    sp = sub.add_parser("generate", help="build a field from a named family")
    sp.add_argument("--family", required=True, choices=FAMILIES)
    sp.add_argument("--params", help="JSON object of family parameters")
    sp.add_argument("--seed", type=int, default=None)
    sp = sub.add_parser("selftest", help="fixed exact computations")
    sp.add_argument("name", choices=("cubic-kernel-s3",))
    return p


INPUT_ERRORS = (ParseError, DimensionMismatch, EmptySection, BadParameters, OddDimension,
                NotDegreeOneHomogeneous, ValueError, OSError, json.JSONDecodeError)


def _emit(fmt, command, fld, report, lines, verdict, out):
    if fmt == "json":
        doc = {"schemaVersion": SCHEMA_VERSION, "command": command, "verdict": verdict,
               "result": report}
        if fld is not None:
            doc["input"] = fld.to_dict()
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        for line in lines:
            out.write(line + "\n")


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    fld = None
    try:
        if args.command in FIELD_COMMANDS:
            fld = read_field(args.field)
            report, lines = FIELD_COMMANDS[args.command](args, fld)
        elif args.command == "generate":
            report, lines = cmd_generate(args)
        else:
            report, lines = cmd_selftest(args)
    except Negative as neg:
        text = [f"{args.command}: no"] + [f"{k}: {v}" for k, v in sorted(neg.report.items())
                                           if isinstance(v, (str, bool, int))]
        _emit(args.format, args.command, fld, neg.report, text, "negative", out)
        return EXIT_NEGATIVE
    except INPUT_ERRORS as exc:
        return _input_error(args, exc, out, err)
    except SphereFieldError as exc:
        return _input_error(args, exc, out, err)
    _emit(args.format, args.command, fld, report, lines, "ok", out)
    return EXIT_OK


def _input_error(args, exc, out, err):
    err.write(f"error: {type(exc).__name__}: {exc}\n")
    if args.format == "json":
        info = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ParseError):
            info.update(line=exc.line, column=exc.column)
        out.write(json.dumps({"schemaVersion": SCHEMA_VERSION, "command": args.command,
                              "verdict": "error", "error": info},
                             indent=2, sort_keys=True) + "\n")
    return EXIT_INPUT


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

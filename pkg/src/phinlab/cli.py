"""Command-line front end: ``phinlab <command> [options] <files...>``."""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import cohomology_pairing as cp
from . import serialize as ser
from .errors import ParseError, PhinlabError, PropertyFailure, ValidationError
from .exact_core import FieldContext
from .family_cgs import aux_relation_check, cgs_residual, derive_theorem_from_aux, gamma_from_epsilon
from .fixtures import build_chain_module, build_section7_fixtures, zero_residual_family
from .linvariant import check_well_defined, is_strongly_marked, l_invariant
from .phin_module import (
    SECTION5_FLAGS,
    build_section5_module,
    is_weakly_admissible,
    validate,
)
from .properties import SUITES, run_suites
from .refinement import (
    PARAMETER_CONVENTION,
    enumerate_refinements,
    marked_indices,
    refinement_to_parameters,
    validate_refinement,
)

CONVENTIONS = {
    "newton_number": "t_N = v_p(det phi^f on one component)",
    "hodge_number": "t_H = (1/e) * sum over embeddings of the filtration jumps",
    "weight_sign": "stored weights are filtration jumps; the cyclotomic module has jump -1",
    "frobenius_shift": "components shift j -> j-1 mod f; phi(v)_c = Phi_c v_{c+1}",
    "dual_filtration": "Fil^i(D*) = annihilator of Fil^{1-i}(D); a jump k dualises to -k",
    "parameters": PARAMETER_CONVENTION,
    "pairing": cp.PAIRING_CONVENTION,
}

COMMANDS = (
    "validate",
    "admissible",
    "refinements",
    "nf",
    "linvariant",
    "cgs-check",
    "pairing",
    "fixtures",
    "properties",
)


def _parse_L(text: str | None) -> list[Fraction] | None:
    if text is None:
        return None
    try:
        return [ser.parse_rational(x.strip()) for x in text.split(",")]
    except ParseError:
        raise ParseError(f"--L expects comma-separated rationals, got {text!r}") from None


def _context(args) -> FieldContext:
    e, f = args.ext or (1, 1)
    return FieldContext(args.prime or 2, e, f)


def _broadcast(L, ctx: FieldContext):
    if L is None:
        return [Fraction(0)] * ctx.degree
    if len(L) == 1:
        return L * ctx.degree
    if len(L) != ctx.degree:
        raise ParseError(f"--L needs 1 or {ctx.degree} values, got {len(L)}")
    return L


def _load_doc(path: str, args) -> dict:
    doc = ser.load(path)
    if isinstance(doc, dict) and isinstance(doc.get("ctx"), dict):
        if args.prime is not None:
            doc["ctx"]["p"] = args.prime
        if args.ext is not None:
            doc["ctx"]["e"], doc["ctx"]["f"] = args.ext
    return doc


def _single_file(args) -> str:
    if len(args.files) != 1:
        raise ParseError(f"{args.command} takes exactly one input file")
    return args.files[0]


def _load_module(args):
    doc = _load_doc(_single_file(args), args)
    return ser.parse_safely(ser.module_from_json, doc)


def _checked_module(args):
    D, flags = _load_module(args)
    problems = validate(D)
    if problems:
        raise ValidationError(f"module violates the {problems[0]} invariant", problems[0])
    return D, flags


def _refinements(D, flags) -> list:
    if flags:
        return [validate_refinement(D, flag) for flag in flags]
    return enumerate_refinements(D)


# --- commands --------------------------------------------------------------------


def cmd_validate(args) -> dict:
    D, flags = _checked_module(args)
    for flag in flags:
        validate_refinement(D, flag)
    return {"valid": True, "n": D.n, "ctx": D.ctx.as_dict(), "refinements": len(flags)}


def cmd_admissible(args) -> dict:
    D, _ = _checked_module(args)
    res = is_weakly_admissible(D)
    return {
        "admissible": res.admissible,
        "t_H": res.t_H,
        "t_N": res.t_N,
        "destabilising_submodule": res.witness,
    }


def cmd_refinements(args) -> dict:
    D, _ = _checked_module(args)
    out = []
    for R in enumerate_refinements(D):
        out.append({"flag": R.as_json_flag(), "parameters": refinement_to_parameters(R)})
    return {"count": len(out), "refinements": out}


def _nf_entry(R) -> dict:
    nf = R.nf
    marks = marked_indices(R, nf)
    return {
        "flag": R.as_json_flag(),
        "alphas": list(R.data.alphas),
        "weights": [list(w) for w in R.data.weights],
        "nf_targets": [t for t in nf.targets],
        "nf_scalars": [None if s is None else list(s.components) for s in nf.scalars],
        "marked": list(marks.marked),
        "t": {str(s): marks.t[s] for s in marks.marked},
    }


def cmd_nf(args) -> dict:
    D, flags = _checked_module(args)
    return {"refinements": [_nf_entry(R) for R in _refinements(D, flags)]}


def cmd_linvariant(args) -> dict:
    D, flags = _checked_module(args)
    out = []
    for R in _refinements(D, flags):
        marks = marked_indices(R)
        indices = [args.s] if args.s is not None else list(marks.marked)
        rows = []
        for s in indices:
            row = {"s": s, "t": marks.t.get(s)}
            if args.consistency:
                rep = check_well_defined(D, R, s, args.t)
                row.update(
                    decompositions=rep.decompositions,
                    perfect=rep.perfect,
                    consistent=rep.consistent,
                    L=list(rep.value),
                )
            elif args.s is None and not is_strongly_marked(D, R, s):
                row.update(strongly_marked=False, L=None)
            else:
                row.update(strongly_marked=True, L=list(l_invariant(D, R, s, args.t)))
            rows.append(row)
        out.append({"flag": R.as_json_flag(), "marked": list(marks.marked), "invariants": rows})
    return {"refinements": out}


def cmd_cgs_check(args) -> dict:
    fam = ser.parse_safely(ser.family_from_json, _load_doc(_single_file(args), args))
    ctx, chars = fam["ctx"], fam["characters"]
    s = args.s if args.s is not None else fam["s"] or 1
    t = args.t if args.t is not None else fam["t"] or len(chars)
    L = _broadcast(_parse_L(args.L), ctx) if args.L is not None else fam["L"]
    if L is None:
        raise ParseError("no L-invariant given (use --L or an 'L' field)")
    residual = cgs_residual(chars, s, t, L, ctx)
    g_s = gamma_from_epsilon(chars[s - 1], ctx)
    g_t = gamma_from_epsilon(chars[t - 1], ctx)
    aux = aux_relation_check(g_t, g_s, L)
    rep = derive_theorem_from_aux(chars[s - 1], chars[t - 1], L, ctx)
    return {
        "s": s,
        "t": t,
        "L": list(L),
        "residual": residual,
        "residual_zero": residual == 0,
        "gamma_s": {"gamma0": g_s.gamma0, "gamma_tau": list(g_s.gamma_tau)},
        "gamma_t": {"gamma0": g_t.gamma0, "gamma_tau": list(g_t.gamma_tau)},
        "aux_relation": aux,
        "derivation_consistent": rep.consistent,
        "all_checks_pass": residual == 0 and aux and rep.consistent,
    }


def cmd_pairing(args) -> dict:
    if len(args.files) != 2:
        raise ParseError("pairing takes an unramified-side and a Kummer-side class file")
    classes = [ser.parse_safely(ser.class_from_json, ser.load(p)) for p in args.files]
    x = next((c for c in classes if isinstance(c, cp.UnramifiedSideClass)), None)
    y = next((c for c in classes if isinstance(c, cp.KummerSideClass)), None)
    if x is None or y is None:
        raise ParseError("need one unramified-side and one Kummer-side class")
    if len(x.a) != len(y.b):
        raise ValidationError("classes have different numbers of embeddings", "embeddings")
    return {"value": cp.cup_product(x, y), "de_rham": cp.is_de_rham_cocycle(x)}


def _fixture_documents(args) -> dict:
    ctx = _context(args)
    L = _broadcast(_parse_L(args.L), ctx)
    if args.section == "5":
        D = build_section5_module(L, ctx)
        flags = [validate_refinement(D, SECTION5_FLAGS[k]).as_json_flag() for k in sorted(SECTION5_FLAGS)]
        return {"section5.json": ser.module_to_json(D, flags)}
    if args.section == "7":
        D, R = build_chain_module(args.n, L, ctx)
        fx = build_section7_fixtures(D, R)
        return {
            "section7_base.json": ser.module_to_json(D, [R.as_json_flag()]),
            "section7_rank4.json": ser.module_to_json(fx.big),
            "section7_rank3.json": ser.module_to_json(fx.small),
        }
    length = max(args.n, 2)
    chars = zero_residual_family(ctx, L, n=length, s=1, t=length, seed=args.seed)
    return {"family.json": ser.family_to_json(ctx, chars, 1, length, L)}


def cmd_fixtures(args) -> dict:
    docs = _fixture_documents(args)
    report = {"section": args.section, "files": sorted(docs)}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for name, doc in docs.items():
            with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
                fh.write(ser.dumps(doc))
    else:
        report["documents"] = docs
    return report


def cmd_properties(args) -> dict:
    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ParseError(f"unknown suites: {', '.join(unknown)}")
    results = run_suites(names, args.trials, args.seed)
    report = {"suites": [r.as_dict() for r in results], "all_ok": all(r.ok for r in results)}
    if not report["all_ok"]:
        raise PropertyFailure("property suite failed", ) from _Carry(report)
    return report


class _Carry(Exception):
    """Lets a failing command hand its partial report to the error path."""

    def __init__(self, report):
        super().__init__("partial report")
        self.report = report


HANDLERS = {
    "validate": cmd_validate,
    "admissible": cmd_admissible,
    "refinements": cmd_refinements,
    "nf": cmd_nf,
    "linvariant": cmd_linvariant,
    "cgs-check": cmd_cgs_check,
    "pairing": cmd_pairing,
    "fixtures": cmd_fixtures,
    "properties": cmd_properties,
}


# --- output ----------------------------------------------------------------------


def _text_lines(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            lines += _text_lines(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return lines
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        lines = []
        for i, v in enumerate(obj):
            lines += _text_lines(v, f"{prefix}[{i}]")
        return lines
    if isinstance(obj, list):
        return [f"{prefix}: [{', '.join('null' if v is None else str(v) for v in obj)}]"]
    return [f"{prefix}: {'null' if obj is None else obj}"]


def emit(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return ser.dumps(report)
    return "\n".join(_text_lines(ser.jsonable(report))) + "\n"


def _request_echo(args) -> dict:
    echo = {"command": args.command, "files": list(args.files), "seed": args.seed}
    for key in ("prime", "ext", "trials", "section", "L", "n", "s", "t", "suite"):
        value = getattr(args, key, None)
        if value is not None:
            echo[key] = list(value) if isinstance(value, (list, tuple)) else value
    if args.consistency:
        echo["consistency"] = True
    return echo


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="phinlab", description="Exact analysis of filtered (phi,N)-modules.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("files", nargs="*")
    ap.add_argument("--prime", type=int, help="override (or choose) the prime p")
    ap.add_argument("--ext", type=int, nargs=2, metavar=("E", "F"), help="ramification index and residue degree")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--format", choices=("text", "json"), default="json")
    ap.add_argument("--section", choices=("5", "7", "family"), default="5")
    ap.add_argument("--L", help="L-invariant: one rational or one per embedding, comma separated")
    ap.add_argument("--n", type=int, default=3, help="rank of the chain module behind the tensor fixture, or family length")
    ap.add_argument("--s", type=int)
    ap.add_argument("--t", type=int)
    ap.add_argument("--consistency", action="store_true", help="compare all perfect decompositions")
    ap.add_argument("--suite", action="append", help="property suite to run (repeatable)")
    ap.add_argument("--out", help="directory for fixture files")
    return ap


def run(argv=None) -> tuple[int, str]:
    args = build_parser().parse_args(argv)
    report = {"conventions": CONVENTIONS, "request": _request_echo(args)}
    try:
        report["result"] = HANDLERS[args.command](args)
        report["status"] = "ok"
        code = 0
    except PhinlabError as exc:
        code = exc.exit_code
        report["status"] = "error"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ValidationError):
            report["error"]["invariant"] = exc.invariant
        if isinstance(exc.__cause__, _Carry):
            report["result"] = exc.__cause__.report
    report["exit_code"] = code
    return code, emit(report, args.format)


def main(argv=None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

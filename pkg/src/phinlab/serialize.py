"""Canonical JSON for modules, refinements, families and pairing classes.

Every rational is written as a "num/den" string; on input plain integers and
integer strings are accepted as well.  Floats are rejected.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from . import linalg as la
from .cohomology_pairing import KummerSideClass, UnramifiedSideClass
from .errors import ParseError, PhinlabError
from .exact_core import FieldContext, to_str
from .family_cgs import InfinitesimalCharacter
from .phin_module import FilteredPhiNModule

SCHEMA = "phinlab/1"


def jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return to_str(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in exact reports")
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def parse_rational(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ParseError(f"not an exact rational: {x!r}")
    try:
        return la.frac(x)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ParseError(f"not an exact rational: {x!r}") from None


def _matrix(rows) -> tuple:
    if not isinstance(rows, list):
        raise ParseError("matrix must be a list of rows")
    return tuple(tuple(parse_rational(x) for x in row) for row in rows)


def _field(d: dict, key: str):
    try:
        return d[key]
    except (KeyError, TypeError):
        raise ParseError(f"missing field {key!r}") from None


def ctx_from_json(d: dict) -> FieldContext:
    try:
        return FieldContext(int(_field(d, "p")), int(d.get("e", 1)), int(d.get("f", 1)))
    except (TypeError, ValueError):
        raise ParseError("ctx needs integer p, e, f") from None


def _check_schema(d: dict, kind: str) -> None:
    if not isinstance(d, dict):
        raise ParseError("document must be a JSON object")
    if d.get("schema", SCHEMA) != SCHEMA:
        raise ParseError(f"unsupported schema {d.get('schema')!r}")
    if d.get("kind", kind) != kind:
        raise ParseError(f"expected a {kind!r} document, got {d.get('kind')!r}")


# --- modules -------------------------------------------------------------------


def module_to_json(D: FilteredPhiNModule, flags=None) -> dict:
    doc = {
        "schema": SCHEMA,
        "kind": "module",
        "ctx": D.ctx.as_dict(),
        "n": D.n,
        "phi": [list(map(list, m)) for m in D.phi],
        "N": [list(map(list, m)) for m in D.N],
        "filtration": [
            [{"jump": k, "basis": [list(v) for v in b]} for k, b in steps] for steps in D.filtration
        ],
    }
    if flags:
        doc["refinements"] = [[[list(map(list, part)) for part in step] for step in flag] for flag in flags]
    return jsonable(doc)


def module_from_json(d: dict) -> tuple[FilteredPhiNModule, list]:
    """Parse without validating; returns (module, list of flags)."""
    _check_schema(d, "module")
    ctx = ctx_from_json(_field(d, "ctx"))
    phi = [_matrix(m) for m in _field(d, "phi")]
    N = [_matrix(m) for m in _field(d, "N")]
    fil = []
    for steps in _field(d, "filtration"):
        fil.append([(int(_field(s, "jump")), _matrix(_field(s, "basis"))) for s in steps])
    D = FilteredPhiNModule.build(ctx, phi, N, fil)
    if "n" in d and int(d["n"]) != D.n:
        raise ParseError("declared rank does not match the matrices")
    flags = []
    for flag in d.get("refinements", []):
        flags.append([[_matrix(part) for part in step] for step in flag])
    return D, flags


# --- families and classes ---------------------------------------------------------

_CHAR_FIELDS = ("base_at_pi", "base_at_p", "eps_at_pi", "eps_at_p")


def character_to_json(c: InfinitesimalCharacter) -> dict:
    return jsonable(
        {
            "base_at_pi": c.base_at_pi,
            "base_at_p": c.base_at_p,
            "base_weights": list(c.base_weights),
            "eps_at_pi": c.eps_at_pi,
            "eps_at_p": c.eps_at_p,
            "eps_weights": list(c.eps_weights),
            "smooth_tag": c.smooth_tag,
        }
    )


def character_from_json(d: dict) -> InfinitesimalCharacter:
    kwargs = {k: parse_rational(_field(d, k)) for k in _CHAR_FIELDS}
    kwargs["base_weights"] = [parse_rational(x) for x in _field(d, "base_weights")]
    kwargs["eps_weights"] = [parse_rational(x) for x in _field(d, "eps_weights")]
    kwargs["smooth_tag"] = str(d.get("smooth_tag", ""))
    return InfinitesimalCharacter(**kwargs)


def family_to_json(ctx: FieldContext, chars, s=None, t=None, L=None) -> dict:
    doc = {
        "schema": SCHEMA,
        "kind": "family",
        "ctx": ctx.as_dict(),
        "characters": [character_to_json(c) for c in chars],
    }
    if s is not None:
        doc["s"] = s
    if t is not None:
        doc["t"] = t
    if L is not None:
        doc["L"] = [la.frac(x) for x in L]
    return jsonable(doc)


def family_from_json(d: dict) -> dict:
    _check_schema(d, "family")
    out = {
        "ctx": ctx_from_json(_field(d, "ctx")),
        "characters": [character_from_json(c) for c in _field(d, "characters")],
        "s": int(d["s"]) if "s" in d else None,
        "t": int(d["t"]) if "t" in d else None,
        "L": [parse_rational(x) for x in d["L"]] if "L" in d else None,
    }
    if not out["characters"]:
        raise ParseError("family has no characters")
    return out


def class_to_json(x) -> dict:
    if isinstance(x, UnramifiedSideClass):
        return jsonable({"schema": SCHEMA, "kind": "unramified", "a0": x.a0, "a": list(x.a)})
    return jsonable({"schema": SCHEMA, "kind": "kummer", "b0": x.b0, "b": list(x.b)})


def class_from_json(d: dict):
    if not isinstance(d, dict):
        raise ParseError("document must be a JSON object")
    kind = d.get("kind")
    _check_schema(d, kind)
    if kind == "unramified":
        return UnramifiedSideClass(parse_rational(_field(d, "a0")), [parse_rational(x) for x in _field(d, "a")])
    if kind == "kummer":
        return KummerSideClass(parse_rational(_field(d, "b0")), [parse_rational(x) for x in _field(d, "b")])
    raise ParseError(f"unknown class kind {kind!r}")


def load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg})") from None


def parse_safely(fn, *args):
    """Run a parser, turning stray type errors into ParseError."""
    try:
        return fn(*args)
    except PhinlabError:
        raise
    except (TypeError, ValueError, KeyError, IndexError) as exc:
        raise ParseError(f"malformed document: {exc}") from None

"""JSON wire formats for every object the command line reads or writes.

Conventions, fixed once here so all documents agree:

* basis indices are 1-based on the wire and 0-based in memory;
* rationals serialize as strings "p/q", or just "p" when the denominator
  is 1; plain JSON integers are accepted on input, floats are not;
* coefficient vectors serialize sparsely as objects mapping the 1-based
  component index (as a string) to a rational;
* polynomials serialize as term lists [{"exponents": [..], "coeff": "p/q"}]
  with one exponent per variable;
* matrices serialize as dense row lists of rationals.

Parsers raise ``InputFormatError`` carrying the path to the offending
field, so the command line can report the location and exit with the
input-error code instead of a traceback.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .algebra import (Key, NLieAlgebra, Representation, WedgeElement,
                      make_algebra, make_representation)
from .algebroid import PolyFilippovAlgebroid, make_poly_algebroid
from .cochains import Cochain, CochainKey, make_cochain
from .cohomology import CohomologyReport
from .deformations import (DeformationPath, EquivalenceMap,
                           make_deformation_path, make_equivalence_map)
from .errors import DimensionMismatch
from .linalg import Matrix, Vector
from .poly import MultiPoly, PolyVectorField, poly_from_terms


class InputFormatError(ValueError):
    """Malformed input document; ``location`` names the offending field."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def load_document(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputFormatError(str(exc), location=path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(
            f"invalid JSON: {exc.msg}",
            location=f"{path}: line {exc.lineno} column {exc.colno}")


def fraction_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else \
        f"{c.numerator}/{c.denominator}"


def parse_fraction(value: Any, where: str) -> Fraction:
    # bool is an int subclass; reject it before the int branch.
    if isinstance(value, bool):
        raise InputFormatError("expected a rational, got a boolean", where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise InputFormatError(f"cannot parse rational {value!r}", where)
    raise InputFormatError(
        f"expected a rational string or integer, got {type(value).__name__}",
        where)


def _expect_object(obj: Any, where: str) -> dict:
    if not isinstance(obj, dict):
        raise InputFormatError(
            f"expected an object, got {type(obj).__name__}", where)
    return obj


def _expect_list(obj: Any, where: str) -> list:
    if not isinstance(obj, list):
        raise InputFormatError(
            f"expected a list, got {type(obj).__name__}", where)
    return obj


def _field(obj: dict, name: str, where: str) -> Any:
    if name not in obj:
        raise InputFormatError(f"missing field {name!r}", where)
    return obj[name]


def _int_field(obj: dict, name: str, where: str) -> int:
    value = _field(obj, name, where)
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputFormatError(f"field {name!r} must be an integer", where)
    return value


def _index(value: Any, bound: int, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputFormatError("indices must be integers", where)
    if not 1 <= value <= bound:
        raise InputFormatError(
            f"index {value} out of range 1..{bound}", where)
    return value - 1


def _index_tuple(value: Any, bound: int, where: str) -> Key:
    items = _expect_list(value, where)
    return tuple(_index(v, bound, f"{where}[{t}]")
                 for t, v in enumerate(items))


def vector_to_json(vec: Vector) -> dict[str, str]:
    return {str(i + 1): fraction_str(c)
            for i, c in enumerate(vec) if c != 0}


def vector_from_json(obj: Any, dim: int, where: str) -> tuple[Fraction, ...]:
    table = _expect_object(obj, where)
    out = [Fraction(0)] * dim
    for raw_key, raw_val in table.items():
        try:
            component = int(raw_key)
        except ValueError:
            raise InputFormatError(
                f"component key {raw_key!r} is not an integer", where)
        i = _index(component, dim, where)
        out[i] = parse_fraction(raw_val, f"{where}.{raw_key}")
    return tuple(out)


def _wrap(ctor, where: str):
    """Run a library constructor, converting its validation failures into
    located input errors."""
    try:
        return ctor()
    except (DimensionMismatch, ValueError) as exc:
        if isinstance(exc, InputFormatError):
            raise
        raise InputFormatError(str(exc), where)


# ---------------------------------------------------------------- algebras

def algebra_to_json(alg: NLieAlgebra) -> dict:
    return {
        "arity": alg.arity,
        "dim": alg.dim,
        "brackets": [
            {"on": [i + 1 for i in key], "value": vector_to_json(vec)}
            for key, vec in sorted(alg.structure.items())
        ],
    }


def algebra_from_json(obj: Any, where: str = "algebra") -> NLieAlgebra:
    doc = _expect_object(obj, where)
    arity = _int_field(doc, "arity", where)
    dim = _int_field(doc, "dim", where)
    if arity < 2 or dim < 1:
        raise InputFormatError("need arity >= 2 and dim >= 1", where)
    brackets: dict[Key, tuple[Fraction, ...]] = {}
    entries = _expect_list(_field(doc, "brackets", where), f"{where}.brackets")
    for t, entry in enumerate(entries):
        here = f"{where}.brackets[{t}]"
        item = _expect_object(entry, here)
        key = _index_tuple(_field(item, "on", here), dim, f"{here}.on")
        if list(key) != sorted(set(key)):
            raise InputFormatError(
                "'on' must be strictly increasing", f"{here}.on")
        if key in brackets:
            raise InputFormatError("duplicate bracket key", f"{here}.on")
        brackets[key] = vector_from_json(
            _field(item, "value", here), dim, f"{here}.value")
    return _wrap(lambda: make_algebra(arity, dim, brackets), where)


# ---------------------------------------------------------- representations

def representation_to_json(rho: Representation) -> dict:
    return {
        "arity": rho.arity,
        "algebra_dim": rho.algebra_dim,
        "module_dim": rho.module_dim,
        "action": [
            {"on": [i + 1 for i in key], "of": j + 1,
             "value": vector_to_json(vec)}
            for (key, j), vec in sorted(rho.action.items())
        ],
    }


def representation_from_json(obj: Any,
                             where: str = "representation") -> Representation:
    doc = _expect_object(obj, where)
    arity = _int_field(doc, "arity", where)
    m = _int_field(doc, "algebra_dim", where)
    r = _int_field(doc, "module_dim", where)
    if arity < 2 or m < 1 or r < 1:
        raise InputFormatError("need arity >= 2 and positive dimensions",
                               where)
    action: dict[tuple[Key, int], tuple[Fraction, ...]] = {}
    entries = _expect_list(_field(doc, "action", where), f"{where}.action")
    for t, entry in enumerate(entries):
        here = f"{where}.action[{t}]"
        item = _expect_object(entry, here)
        key = _index_tuple(_field(item, "on", here), m, f"{here}.on")
        if list(key) != sorted(set(key)):
            raise InputFormatError(
                "'on' must be strictly increasing", f"{here}.on")
        j = _index(_field(item, "of", here), r, f"{here}.of")
        if (key, j) in action:
            raise InputFormatError("duplicate action key", here)
        action[(key, j)] = vector_from_json(
            _field(item, "value", here), r, f"{here}.value")
    return _wrap(lambda: make_representation(m, r, arity, action), where)


# ---------------------------------------------------------------- cochains

def cochain_to_json(d: Cochain) -> dict:
    entries = []
    for (blocks, last), vec in sorted(d.entries.items()):
        entries.append({
            "tensor_blocks": [[i + 1 for i in b] for b in blocks],
            "wedge": [i + 1 for i in last],
            "value": vector_to_json(vec),
        })
    return {"arity": d.arity, "dim": d.dim, "degree": d.degree,
            "entries": entries}


def cochain_from_json(obj: Any, where: str = "cochain") -> Cochain:
    doc = _expect_object(obj, where)
    arity = _int_field(doc, "arity", where)
    dim = _int_field(doc, "dim", where)
    degree = _int_field(doc, "degree", where)
    if arity < 2 or dim < 1 or degree < 0:
        raise InputFormatError(
            "need arity >= 2, dim >= 1 and degree >= 0", where)
    table: dict[CochainKey, tuple[Fraction, ...]] = {}
    entries = _expect_list(_field(doc, "entries", where), f"{where}.entries")
    for t, entry in enumerate(entries):
        here = f"{where}.entries[{t}]"
        item = _expect_object(entry, here)
        raw_blocks = _expect_list(_field(item, "tensor_blocks", here),
                                  f"{here}.tensor_blocks")
        blocks = tuple(
            _index_tuple(b, dim, f"{here}.tensor_blocks[{s}]")
            for s, b in enumerate(raw_blocks))
        last = _index_tuple(_field(item, "wedge", here), dim,
                            f"{here}.wedge")
        if (blocks, last) in table:
            raise InputFormatError("duplicate cochain key", here)
        table[(blocks, last)] = vector_from_json(
            _field(item, "value", here), dim, f"{here}.value")
    return _wrap(lambda: make_cochain(arity, dim, degree, table), where)


# ---------------------------------------------------------------- matrices

def matrix_to_json(mat: Matrix) -> list[list[str]]:
    return [[fraction_str(c) for c in row] for row in mat.entries]


def matrix_from_json(obj: Any, where: str = "matrix") -> Matrix:
    rows = _expect_list(obj, where)
    if not rows:
        raise InputFormatError("matrix needs at least one row", where)
    parsed = []
    for r, row in enumerate(rows):
        items = _expect_list(row, f"{where}[{r}]")
        if len(items) != len(_expect_list(rows[0], where)):
            raise InputFormatError("ragged matrix rows", f"{where}[{r}]")
        parsed.append([parse_fraction(v, f"{where}[{r}][{s}]")
                       for s, v in enumerate(items)])
    return Matrix.from_rows(parsed)


def wedge_to_json(w: WedgeElement) -> dict:
    return {
        "grade": w.grade,
        "dim": w.dim,
        "coords": [
            {"on": [i + 1 for i in key], "coeff": fraction_str(c)}
            for key, c in sorted(w.coords.items())
        ],
    }


# ------------------------------------------------------- deformation paths

def path_to_json(path: DeformationPath) -> dict:
    return {
        "base": algebra_to_json(path.base),
        "order": path.order,
        "terms": [cochain_to_json(term) for term in path.terms],
    }


def path_from_json(obj: Any, where: str = "path") -> DeformationPath:
    doc = _expect_object(obj, where)
    base = algebra_from_json(_field(doc, "base", where), f"{where}.base")
    order = _int_field(doc, "order", where)
    raw_terms = _expect_list(_field(doc, "terms", where), f"{where}.terms")
    if order != len(raw_terms):
        raise InputFormatError(
            f"order {order} does not match {len(raw_terms)} terms",
            f"{where}.order")
    terms = [cochain_from_json(t, f"{where}.terms[{s}]")
             for s, t in enumerate(raw_terms)]
    return _wrap(lambda: make_deformation_path(base, terms), where)


def emap_to_json(emap: EquivalenceMap, dim: int) -> dict:
    return {
        "order": emap.order,
        "dim": dim,
        "maps": [matrix_to_json(mat) for mat in emap.maps],
    }


def emap_from_json(obj: Any, where: str = "equivalence") -> EquivalenceMap:
    doc = _expect_object(obj, where)
    order = _int_field(doc, "order", where)
    raw_maps = _expect_list(_field(doc, "maps", where), f"{where}.maps")
    maps = [matrix_from_json(m, f"{where}.maps[{s}]")
            for s, m in enumerate(raw_maps)]
    if maps:
        dim = maps[0].rows
    elif "dim" in doc:
        dim = _int_field(doc, "dim", where)
    else:
        raise InputFormatError(
            "cannot infer the dimension: give at least one map or a "
            "'dim' field", where)
    return _wrap(lambda: make_equivalence_map(dim, order, maps), where)


# -------------------------------------------------------------- algebroids

def poly_to_json(p: MultiPoly) -> list[dict]:
    return [{"exponents": list(exps), "coeff": fraction_str(c)}
            for exps, c in p.sorted_terms()]


def poly_from_json(obj: Any, num_vars: int, where: str = "poly") -> MultiPoly:
    items = _expect_list(obj, where)
    terms: dict[tuple[int, ...], Fraction] = {}
    for t, entry in enumerate(items):
        here = f"{where}[{t}]"
        item = _expect_object(entry, here)
        raw = _expect_list(_field(item, "exponents", here),
                           f"{here}.exponents")
        if len(raw) != num_vars:
            raise InputFormatError(
                f"expected {num_vars} exponents, got {len(raw)}",
                f"{here}.exponents")
        exps = []
        for s, e in enumerate(raw):
            if isinstance(e, bool) or not isinstance(e, int) or e < 0:
                raise InputFormatError("exponents must be integers >= 0",
                                       f"{here}.exponents[{s}]")
            exps.append(e)
        key = tuple(exps)
        coeff = parse_fraction(_field(item, "coeff", here), f"{here}.coeff")
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return poly_from_terms(num_vars, terms)


def _poly_list_from_json(obj: Any, count: int, num_vars: int,
                         where: str) -> tuple[MultiPoly, ...]:
    items = _expect_list(obj, where)
    if len(items) != count:
        raise InputFormatError(
            f"expected {count} polynomial components, got {len(items)}",
            where)
    return tuple(poly_from_json(p, num_vars, f"{where}[{s}]")
                 for s, p in enumerate(items))


def algebroid_to_json(abd: PolyFilippovAlgebroid) -> dict:
    return {
        "num_vars": abd.num_vars,
        "rank": abd.rank,
        "arity": abd.arity,
        "brackets": [
            {"on": [i + 1 for i in key],
             "value": [poly_to_json(p) for p in comps]}
            for key, comps in sorted(abd.bracket_table.items())
        ],
        "anchor": [
            {"on": [i + 1 for i in key],
             "field": [poly_to_json(p) for p in field.components]}
            for key, field in sorted(abd.anchor_table.items())
        ],
    }


def algebroid_from_json(obj: Any,
                        where: str = "algebroid") -> PolyFilippovAlgebroid:
    doc = _expect_object(obj, where)
    num_vars = _int_field(doc, "num_vars", where)
    rank = _int_field(doc, "rank", where)
    arity = _int_field(doc, "arity", where)
    if num_vars < 0 or rank < 1 or arity < 2:
        raise InputFormatError(
            "need num_vars >= 0, rank >= 1 and arity >= 2", where)
    brackets: dict[Key, tuple[MultiPoly, ...]] = {}
    entries = _expect_list(_field(doc, "brackets", where), f"{where}.brackets")
    for t, entry in enumerate(entries):
        here = f"{where}.brackets[{t}]"
        item = _expect_object(entry, here)
        key = _index_tuple(_field(item, "on", here), rank, f"{here}.on")
        if key in brackets:
            raise InputFormatError("duplicate bracket key", f"{here}.on")
        brackets[key] = _poly_list_from_json(
            _field(item, "value", here), rank, num_vars, f"{here}.value")
    anchors: dict[Key, PolyVectorField] = {}
    entries = _expect_list(_field(doc, "anchor", where), f"{where}.anchor")
    for t, entry in enumerate(entries):
        here = f"{where}.anchor[{t}]"
        item = _expect_object(entry, here)
        key = _index_tuple(_field(item, "on", here), rank, f"{here}.on")
        if key in anchors:
            raise InputFormatError("duplicate anchor key", f"{here}.on")
        comps = _poly_list_from_json(
            _field(item, "field", here), num_vars, num_vars, f"{here}.field")
        anchors[key] = PolyVectorField(num_vars, comps)
    return _wrap(lambda: make_poly_algebroid(num_vars, rank, arity,
                                             brackets, anchors), where)


# ---------------------------------------------------------------- reports

def cohomology_report_to_json(report: CohomologyReport) -> dict:
    reps = [wedge_to_json(r) if isinstance(r, WedgeElement)
            else cochain_to_json(r) for r in report.representatives]
    return {
        "degree": report.degree,
        "dim_cochains": report.dim_cochains,
        "rank_d_out": report.rank_d_out,
        "rank_d_in": report.rank_d_in,
        "betti": report.betti,
        "representatives": reps,
    }


def report_value(value: Any) -> Any:
    """Recursively JSON-encode a witness payload.

    Index tuples inside witnesses stay 0-based: they are meant to be fed
    back into the library, whose indices are 0-based, not into input files.
    """
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, (tuple, list)):
        return [report_value(v) for v in value]
    if isinstance(value, Mapping):
        return {str(k): report_value(v) for k, v in value.items()}
    if isinstance(value, MultiPoly):
        return poly_to_json(value)
    if isinstance(value, PolyVectorField):
        return [poly_to_json(p) for p in value.components]
    if isinstance(value, Cochain):
        return cochain_to_json(value)
    if isinstance(value, WedgeElement):
        return wedge_to_json(value)
    if isinstance(value, Matrix):
        return matrix_to_json(value)
    if hasattr(value, "comps"):
        return [poly_to_json(p) for p in value.comps]
    return str(value)

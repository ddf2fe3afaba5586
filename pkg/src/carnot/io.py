"""JSON formats for algebras, distributions, matrices and Anosov systems."""
from __future__ import annotations

import json
from typing import Any

from . import linalg as la
from .lie import GradedAlgebra, Grading, LieAlgebra
from .polyfield import Poly, PolyVectorField
from .scalar import FieldMismatchError, Scalar, format_scalar, is_squarefree, parse_scalar


class FormatError(ValueError):
    pass


def field_to_json(d: int):
    return "Q" if d == 1 else {"sqrt": d}


def field_from_json(obj) -> int:
    if obj in (None, "Q"):
        return 1
    if isinstance(obj, dict) and "sqrt" in obj:
        d = int(obj["sqrt"])
        if d < 2 or not is_squarefree(d):
            raise FormatError(f"field sqrt {d} is not a real quadratic field")
        return d
    raise FormatError(f"unknown field {obj!r}")


def scalar_from_json(x, d: int) -> Scalar:
    if isinstance(x, bool):
        raise FormatError("booleans are not scalars")
    if isinstance(x, int):
        return Scalar(x)
    if isinstance(x, str):
        try:
            return parse_scalar(x, d)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    raise FormatError(f"scalars must be strings or integers, got {x!r}")


def matrix_to_json(A) -> list:
    return [[format_scalar(x) for x in row] for row in A]


def matrix_from_json(rows, d: int) -> la.Matrix:
    if not isinstance(rows, list) or not rows or any(not isinstance(r, list) for r in rows):
        raise FormatError("matrix must be a nonempty list of rows")
    if len({len(r) for r in rows}) != 1:
        raise FormatError("ragged matrix")
    return tuple(tuple(scalar_from_json(x, d) for x in row) for row in rows)


def _field_of_values(values, declared: int) -> None:
    for v in values:
        if v.b and v.d != declared:
            raise FieldMismatchError(f"value {v} is outside Q(sqrt {declared})")


# algebras --------------------------------------------------------------------------

def algebra_to_json(g) -> dict:
    alg = g.algebra if isinstance(g, GradedAlgebra) else g
    out: dict[str, Any] = {
        "dim": alg.dim,
        "field": field_to_json(alg.field),
        "basis": list(alg.basis),
        "brackets": [
            {"i": i, "j": j, "out": {str(k): format_scalar(c) for k, c in row.items()}}
            for (i, j), row in alg.brackets.items()
        ],
    }
    if isinstance(g, GradedAlgebra):
        out["grading"] = [list(L) for L in g.layers]
    return out


def algebra_from_json(obj) -> GradedAlgebra | LieAlgebra:
    """A GradedAlgebra when a grading is present, else a bare LieAlgebra."""
    try:
        dim = int(obj["dim"])
        d = field_from_json(obj.get("field"))
        brackets = {}
        for entry in obj.get("brackets", []):
            i, j = int(entry["i"]), int(entry["j"])
            out = {int(k): scalar_from_json(v, d) for k, v in entry["out"].items()}
            key = (i, j)
            if key in brackets or (j, i) in brackets:
                raise FormatError(f"bracket ({i}, {j}) given twice")
            brackets[key] = out
        alg = LieAlgebra.from_brackets(dim, brackets, tuple(obj.get("basis", ())), d)
        grading = obj.get("grading")
        if grading is None:
            return alg
        return GradedAlgebra(alg, Grading(tuple(tuple(int(k) for k in L) for L in grading)))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed algebra: {exc}") from None


# distributions ---------------------------------------------------------------------

def _exponent(key: str, n: int) -> tuple:
    parts = key.strip().strip("()[]").split(",")
    try:
        e = tuple(int(p) for p in parts if p.strip() != "")
    except ValueError:
        raise FormatError(f"bad exponent key {key!r}") from None
    if len(e) != n:
        raise FormatError(f"exponent {key!r} needs {n} entries")
    return e


def distribution_from_json(obj) -> dict:
    """Returns {"fields": [PolyVectorField], "names": [...], "point": tuple | None, "field": d}."""
    try:
        n = int(obj["n"])
        d = field_from_json(obj.get("field"))
        fields = []
        for comps in obj["fields"]:
            if len(comps) != n:
                raise FormatError(f"each field needs {n} components")
            polys = [Poly(n, {_exponent(k, n): scalar_from_json(v, d) for k, v in c.items()}) for c in comps]
            fields.append(PolyVectorField(polys))
        if not fields:
            raise FormatError("no fields given")
        point = obj.get("point")
        if point is not None:
            point = tuple(scalar_from_json(x, d) for x in point)
        names = obj.get("names") or [f"X{i + 1}" for i in range(len(fields))]
        return {"fields": fields, "names": list(names), "point": point, "field": d,
                "vars": obj.get("vars") or [f"x{i + 1}" for i in range(n)]}
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed distribution: {exc}") from None


def poly_to_json(p: Poly) -> dict:
    return {",".join(str(k) for k in e): format_scalar(c) for e, c in sorted(p.terms.items())}


def field_to_json_terms(X: PolyVectorField) -> list:
    return [poly_to_json(p) for p in X.components]


# maps and systems ------------------------------------------------------------------

def map_from_json(obj) -> tuple[la.Matrix, int]:
    try:
        d = field_from_json(obj.get("field"))
        A = matrix_from_json(obj["matrix"], d)
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"malformed map: {exc}") from None
    if len(A) != len(A[0]):
        raise FormatError("map matrix must be square")
    return A, d


def map_to_json(A, d: int) -> dict:
    return {"field": field_to_json(d), "matrix": matrix_to_json(A)}


def system_to_json(system) -> dict:
    return {
        "kind": "product_anosov",
        "field": field_to_json(system.field),
        "algebra": algebra_to_json(system.factor.algebra),
        "lambda": format_scalar(system.lam),
        "weights": list(system.weights),
        "map": matrix_to_json(system.map),
        "lattice_basis": matrix_to_json(system.lattice_basis),
        "lattice_map": matrix_to_json(system.lattice_map),
        "certificates": dict(system.certificates),
    }


def system_from_json(obj):
    """Rebuild the system from (algebra, lambda, weights) and check the stored matrices."""
    from .nilmanifold import build_product_anosov

    if obj.get("kind") != "product_anosov":
        raise FormatError("expected a product_anosov system")
    d = field_from_json(obj.get("field"))
    g = algebra_from_json(obj["algebra"])
    if not isinstance(g, GradedAlgebra):
        raise FormatError("system algebra needs a grading")
    if g.field not in (1, d):
        raise FieldMismatchError(f"algebra over Q(sqrt {g.field}) in a system over Q(sqrt {d})")
    lam = scalar_from_json(obj["lambda"], d)
    system = build_product_anosov(g, lam, obj.get("weights"))
    for key, value in (("map", system.map), ("lattice_basis", system.lattice_basis),
                       ("lattice_map", system.lattice_map)):
        if key in obj and matrix_from_json(obj[key], d) != value:
            raise FormatError(f"stored {key} disagrees with the construction")
    return system


def load_json(path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"

"""JSON wire formats shared by the CLI and the file-based workflows.

Scalars serialize as strings: "p/q" (or "p" when the denominator is 1) over
the rationals, decimal residues over a prime field whose modulus is recorded
once per file in the "field" header.
"""

from __future__ import annotations

from typing import Any, Sequence

from .adhm import AdhmDatum
from .exactalg import QQ, Field, GF, Matrix, PrimeField
from .monad import LinearFormMatrix
from .quotmod import PolyVector

DATUM_SCHEMA = "adhm-datum@1"
POLYVEC_SCHEMA = "poly-vectors@1"
FORM_MATRIX_SCHEMA = "linear-form-matrix@1"


class FormatError(ValueError):
    """Input JSON does not match the documented schema."""


def field_to_obj(field: Field) -> Any:
    if isinstance(field, PrimeField):
        return {"prime": field.p}
    return "rational"


def field_from_obj(obj: Any) -> Field:
    if obj in (None, "rational"):
        return QQ
    if isinstance(obj, dict) and set(obj) == {"prime"}:
        try:
            return GF(int(obj["prime"]))
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    raise FormatError(f"unrecognized field header {obj!r}")


def _scalar(field: Field, raw: Any):
    if not isinstance(raw, str):
        raise FormatError(f"scalars are strings, got {raw!r}")
    try:
        return field.coerce(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad scalar {raw!r}: {exc}") from exc


def matrix_to_obj(m: Matrix) -> list:
    return [[m.field.format(x) for x in m.row_tuple(i)] for i in range(m.rows)]


def matrix_from_obj(field: Field, obj: Any, rows: int, cols: int) -> Matrix:
    if not isinstance(obj, list) or len(obj) != rows:
        raise FormatError(f"expected a {rows}x{cols} matrix")
    data = []
    for row in obj:
        if not isinstance(row, list) or len(row) != cols:
            raise FormatError(f"expected a {rows}x{cols} matrix")
        data.append([_scalar(field, x) for x in row])
    if not data:
        return Matrix.zero(field, rows, cols)
    return Matrix.from_rows(field, data)


def vector_to_obj(field: Field, vec: Sequence) -> list:
    return [field.format(x) for x in vec]


def datum_to_obj(x: AdhmDatum) -> dict:
    return {
        "schema": DATUM_SCHEMA,
        "field": field_to_obj(x.field),
        "n": x.n,
        "c": x.c,
        "r": x.r,
        "B": [matrix_to_obj(b) for b in x.B],
        "v": [vector_to_obj(x.field, vec) for vec in x.v],
    }


def datum_from_obj(obj: Any) -> AdhmDatum:
    if not isinstance(obj, dict):
        raise FormatError("datum document must be a JSON object")
    for key in ("n", "c", "r", "B", "v"):
        if key not in obj:
            raise FormatError(f"datum document is missing {key!r}")
    field = field_from_obj(obj.get("field"))
    try:
        n, c, r = int(obj["n"]), int(obj["c"]), int(obj["r"])
    except (TypeError, ValueError) as exc:
        raise FormatError("n, c, r must be integers") from exc
    if not isinstance(obj["B"], list) or len(obj["B"]) != n:
        raise FormatError(f"expected {n} matrices in B")
    if not isinstance(obj["v"], list) or len(obj["v"]) != r:
        raise FormatError(f"expected {r} vectors in v")
    bs = tuple(matrix_from_obj(field, m, c, c) for m in obj["B"])
    vs = []
    for vec in obj["v"]:
        if not isinstance(vec, list) or len(vec) != c:
            raise FormatError(f"marked vectors must have length {c}")
        vs.append(tuple(_scalar(field, x) for x in vec))
    try:
        return AdhmDatum(n, c, r, bs, tuple(vs))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def polyvector_to_obj(p: PolyVector, field: Field) -> list:
    return [
        {"alpha": list(alpha), "j": j, "coeff": field.format(coeff)}
        for (alpha, j), coeff in p.sorted_terms()
    ]


def polyvectors_to_obj(n: int, r: int, gens: Sequence[PolyVector], field: Field) -> dict:
    return {
        "schema": POLYVEC_SCHEMA,
        "field": field_to_obj(field),
        "n": n,
        "r": r,
        "generators": [polyvector_to_obj(g, field) for g in gens],
    }


def polyvectors_from_obj(obj: Any) -> tuple[int, int, list[PolyVector], Field]:
    if not isinstance(obj, dict):
        raise FormatError("generator document must be a JSON object")
    for key in ("n", "r", "generators"):
        if key not in obj:
            raise FormatError(f"generator document is missing {key!r}")
    field = field_from_obj(obj.get("field"))
    n, r = int(obj["n"]), int(obj["r"])
    gens = []
    for rec_list in obj["generators"]:
        terms = {}
        if not isinstance(rec_list, list):
            raise FormatError("each generator is a list of term records")
        for rec in rec_list:
            if not isinstance(rec, dict) or not {"alpha", "j", "coeff"} <= set(rec):
                raise FormatError("term records need alpha, j and coeff")
            alpha = tuple(int(a) for a in rec["alpha"])
            j = int(rec["j"])
            coeff = _scalar(field, rec["coeff"])
            if (alpha, j) in terms:
                raise FormatError(f"duplicate term {(alpha, j)}")
            terms[(alpha, j)] = coeff
        try:
            gens.append(PolyVector(n, r, terms))
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    return n, r, gens, field


def form_matrix_to_obj(m: LinearFormMatrix) -> dict:
    return {
        "schema": FORM_MATRIX_SCHEMA,
        "field": field_to_obj(m.field),
        "rows": m.rows,
        "cols": m.cols,
        "vars": m.var_count,
        "entries": [
            [
                [m.field.format(coeff) for coeff in m.entry(i, j).coeffs]
                for j in range(m.cols)
            ]
            for i in range(m.rows)
        ],
    }


def form_matrix_from_obj(obj: Any) -> LinearFormMatrix:
    from .monad import LinearForm

    if not isinstance(obj, dict):
        raise FormatError("form matrix document must be a JSON object")
    for key in ("rows", "cols", "vars", "entries"):
        if key not in obj:
            raise FormatError(f"form matrix document is missing {key!r}")
    field = field_from_obj(obj.get("field"))
    rows, cols, nvars = int(obj["rows"]), int(obj["cols"]), int(obj["vars"])
    raw = obj["entries"]
    if not isinstance(raw, list) or len(raw) != rows:
        raise FormatError("entries do not match the declared row count")
    entries = []
    for row in raw:
        if not isinstance(row, list) or len(row) != cols:
            raise FormatError("entries do not match the declared column count")
        for cell in row:
            if not isinstance(cell, list) or len(cell) != nvars:
                raise FormatError("each entry lists one coefficient per variable")
            entries.append(LinearForm(tuple(_scalar(field, x) for x in cell)))
    return LinearFormMatrix(field, rows, cols, nvars, tuple(entries))

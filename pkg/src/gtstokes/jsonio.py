"""JSON and CSV serialization.

Matrices use the repo-wide layout ``{"n": int, "entries": [[[re, im], ...], ...]}``
(row-major). Files flagged ``"hermitian": true`` may give only the upper
triangle, either as short rows starting at the diagonal or with ``null``
below it. Floats are written with 17 significant digits so reports are
byte-reproducible.
"""

import csv
import io
import json
import math

import numpy as np

from .errors import ParseError


def _fmt_float(x):
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    return s


def _encode(obj, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = "," if indent is None else ","
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # keep numeric leaves on one line
        if all(isinstance(v, (int, float, np.number, bool)) or v is None for v in obj):
            return "[" + ", ".join(_encode(v, None, 0) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[" + sep.join(items) + end + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """Serialize `obj` to JSON text with 17-significant-digit floats."""
    return _encode(obj, indent, 0) + "\n"


def matrix_to_json(M, hermitian=False):
    M = np.asarray(M, dtype=complex)
    out = {"n": int(M.shape[0]),
           "entries": [[[float(z.real), float(z.imag)] for z in row] for row in M]}
    if hermitian:
        out["hermitian"] = True
    return out


def _scalar(value, field):
    if isinstance(value, bool):
        raise ParseError(field, "expected a number or [re, im] pair, got a boolean")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    raise ParseError(field, f"expected a number or [re, im] pair, got {value!r}")


def matrix_from_json(obj, field="matrix"):
    """Parse the matrix layout described in the module docstring.

    Raises
    ------
    ParseError
        With a field path such as ``matrix.entries[1][0]``.
    """
    if not isinstance(obj, dict):
        raise ParseError(field, "expected an object with 'n' and 'entries'")
    if "n" not in obj or "entries" not in obj:
        raise ParseError(field, "missing 'n' or 'entries'")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"{field}.n", f"expected a positive integer, got {n!r}")
    rows = obj["entries"]
    if not isinstance(rows, list) or len(rows) != n:
        raise ParseError(f"{field}.entries", f"expected {n} rows")
    herm = bool(obj.get("hermitian", False))
    M = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        f_row = f"{field}.entries[{i}]"
        if not isinstance(row, list):
            raise ParseError(f_row, "expected a list")
        if herm and len(row) == n - i:
            start = i
        elif len(row) == n:
            start = 0
        else:
            raise ParseError(f_row, f"expected {n} entries" + (f" or {n - i}" if herm else ""))
        for j, value in enumerate(row, start=start):
            if herm and j < i:
                continue
            M[i, j] = _scalar(value, f"{f_row}[{j - start}]")
    if herm:
        upper = np.triu(M, 1)
        M = upper + upper.conj().T + np.diag(M.diagonal().real)
    return M


def load_matrix(path):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return matrix_from_json(obj)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()

"""JSON file schemas for problems, pencils and free parameters.

Complex scalars are stored as two-element [re, im] arrays; matrices are
flat row-major arrays of such pairs. A problem file looks like

    {
      "n": 2,
      "basis": "newton",
      "nodes": {"alpha": [[1,0],[2,0]], "beta": [[0,0],[0,0]]},
      "coefficients": {"A20": [...], "A11": [...], "A02": [...],
                       "A10": [...], "A01": [...], "A00": [...]}
    }

with each coefficient array of length n^2. ``nodes`` is present exactly
when the basis is "newton". Pencil files reuse the schema with a "blocks"
object holding L1/L2/L0 (monomial) or A1/A2/A3 (newton), each of length
(3n)^2, plus an optional "provenance" object. Serialization uses Python's
shortest round-trip float repr, so writing and re-reading is lossless.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .matpoly import MONOMIAL, NEWTON, MatrixPoly2, NewtonNodes
from .spaces import MonomialPencil, NewtonPencil

COEFF_NAMES = {"A20": (2, 0), "A11": (1, 1), "A02": (0, 2),
               "A10": (1, 0), "A01": (0, 1), "A00": (0, 0)}
MONOMIAL_BLOCKS = ("L1", "L2", "L0")
NEWTON_BLOCKS = ("A1", "A2", "A3")

__all__ = [
    "FileFormatError",
    "load_problem",
    "save_problem",
    "load_pencil",
    "save_pencil",
    "load_params",
    "params_to_dict",
    "params_from_dict",
]


class FileFormatError(ValueError):
    """Malformed input file; the message names the offending field."""


def _complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _pair_to_complex(value, where: str) -> complex:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(x, (int, float)) for x in value)):
        raise FileFormatError(f"{where}: expected a [re, im] number pair, got {value!r}")
    z = complex(value[0], value[1])
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise FileFormatError(f"{where}: non-finite value {value!r}")
    return z


def _matrix_to_flat(mat: np.ndarray) -> list:
    return [_complex_to_pair(z) for z in np.asarray(mat).ravel()]


def _flat_to_matrix(data, rows: int, cols: int, where: str) -> np.ndarray:
    if not isinstance(data, list) or len(data) != rows * cols:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise FileFormatError(
            f"{where}: expected {rows * cols} [re, im] pairs (row-major "
            f"{rows}x{cols}), got {got}"
        )
    values = [_pair_to_complex(entry, f"{where}[{k}]") for k, entry in enumerate(data)]
    return np.array(values, dtype=complex).reshape(rows, cols)


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise FileFormatError(f"{path}: file not found")
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON at line {exc.lineno}, "
                              f"column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top-level value must be an object")
    return doc


def _dump_json(path, doc: dict) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _parse_header(doc: dict, path) -> tuple[int, str, NewtonNodes | None]:
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FileFormatError(f"{path}: field 'n' must be a positive integer")
    basis = doc.get("basis")
    if basis not in (MONOMIAL, NEWTON):
        raise FileFormatError(f"{path}: field 'basis' must be 'monomial' or "
                              f"'newton', got {basis!r}")
    nodes = None
    if basis == NEWTON:
        raw = doc.get("nodes")
        if not isinstance(raw, dict):
            raise FileFormatError(f"{path}: newton basis requires a 'nodes' object")
        for key in ("alpha", "beta"):
            if not isinstance(raw.get(key), list) or len(raw[key]) != 2:
                raise FileFormatError(
                    f"{path}: nodes.{key} must be a list of two [re, im] pairs")
        nodes = NewtonNodes(
            _pair_to_complex(raw["alpha"][0], "nodes.alpha[0]"),
            _pair_to_complex(raw["alpha"][1], "nodes.alpha[1]"),
            _pair_to_complex(raw["beta"][0], "nodes.beta[0]"),
            _pair_to_complex(raw["beta"][1], "nodes.beta[1]"),
        )
    elif "nodes" in doc:
        raise FileFormatError(f"{path}: 'nodes' is only valid with basis 'newton'")
    return n, basis, nodes


def _nodes_to_dict(nodes: NewtonNodes) -> dict:
    return {
        "alpha": [_complex_to_pair(nodes.alpha1), _complex_to_pair(nodes.alpha2)],
        "beta": [_complex_to_pair(nodes.beta1), _complex_to_pair(nodes.beta2)],
    }


def load_problem(path) -> MatrixPoly2:
    doc = _load_json(path)
    n, basis, nodes = _parse_header(doc, path)
    raw = doc.get("coefficients")
    if not isinstance(raw, dict):
        raise FileFormatError(f"{path}: missing 'coefficients' object")
    coeffs = {}
    for name, key in COEFF_NAMES.items():
        if name not in raw:
            raise FileFormatError(f"{path}: coefficients.{name} is missing")
        coeffs[key] = _flat_to_matrix(raw[name], n, n, f"{path}: coefficients.{name}")
    if basis == MONOMIAL:
        return MatrixPoly2.monomial(coeffs)
    return MatrixPoly2.newton(coeffs, nodes)


def save_problem(path, poly: MatrixPoly2) -> None:
    doc = {
        "n": poly.n,
        "basis": poly.basis,
        "coefficients": {name: _matrix_to_flat(poly.coeff(*key))
                         for name, key in COEFF_NAMES.items()},
    }
    if poly.basis == NEWTON:
        doc["nodes"] = _nodes_to_dict(poly.nodes)
    _dump_json(path, doc)


def load_pencil(path):
    """Read a pencil file; returns (pencil, provenance dict)."""
    doc = _load_json(path)
    n, basis, nodes = _parse_header(doc, path)
    raw = doc.get("blocks")
    if not isinstance(raw, dict):
        raise FileFormatError(f"{path}: missing 'blocks' object")
    names = MONOMIAL_BLOCKS if basis == MONOMIAL else NEWTON_BLOCKS
    mats = []
    for name in names:
        if name not in raw:
            raise FileFormatError(f"{path}: blocks.{name} is missing")
        mats.append(_flat_to_matrix(raw[name], 3 * n, 3 * n, f"{path}: blocks.{name}"))
    provenance = doc.get("provenance", {})
    if not isinstance(provenance, dict):
        raise FileFormatError(f"{path}: 'provenance' must be an object")
    if basis == MONOMIAL:
        return MonomialPencil.from_blocks(*mats), provenance
    return NewtonPencil.from_blocks(nodes, *mats), provenance


def save_pencil(path, pencil, provenance: dict | None = None) -> None:
    if isinstance(pencil, NewtonPencil):
        basis = NEWTON
        names = NEWTON_BLOCKS
        blocks = pencil.blocks()
    elif isinstance(pencil, MonomialPencil):
        basis = MONOMIAL
        names = MONOMIAL_BLOCKS
        blocks = pencil.blocks()
    else:
        raise TypeError(f"cannot serialize pencil of type {type(pencil).__name__}")
    doc = {
        "n": pencil.n,
        "basis": basis,
        "blocks": {name: _matrix_to_flat(block)
                   for name, block in zip(names, blocks)},
    }
    if basis == NEWTON:
        doc["nodes"] = _nodes_to_dict(pencil.nodes)
    if provenance:
        doc["provenance"] = provenance
    _dump_json(path, doc)


def params_to_dict(params) -> dict:
    return {
        "Y11": _matrix_to_flat(params.y11),
        "Z1": _matrix_to_flat(params.z1),
        "Z2": _matrix_to_flat(params.z2),
    }


def params_from_dict(doc: dict, n: int, where: str = "params"):
    from .linearize import E1FreeParams

    for name in ("Y11", "Z1", "Z2"):
        if name not in doc:
            raise FileFormatError(f"{where}.{name} is missing")
    y11 = _flat_to_matrix(doc["Y11"], n, n, f"{where}.Y11")
    z1 = _flat_to_matrix(doc["Z1"], 3 * n, n, f"{where}.Z1")
    z2 = _flat_to_matrix(doc["Z2"], 3 * n, n, f"{where}.Z2")
    return E1FreeParams.build(y11, z1, z2)


def load_params(path, n: int):
    doc = _load_json(path)
    return params_from_dict(doc, n, where=f"{path}: params")

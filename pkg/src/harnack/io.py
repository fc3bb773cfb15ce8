"""JSON encoding shared by the CLI and the suite reports.

Complex numbers are ``[re, im]`` pairs, non-finite floats are the strings
``"inf"``, ``"-inf"`` and ``"nan"``, keys are sorted, so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .operators import ContractionMatrix, OperatorSpec, materialize
from .numerics import TolerancePolicy

__all__ = [
    "to_jsonable",
    "dumps",
    "write_json",
    "read_json",
    "operator_to_json",
    "load_operator",
    "load_tolerances",
]


def _float(x: float):
    if np.isfinite(x):
        return float(x)
    return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj):
        return to_jsonable(dataclasses.asdict(obj))
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InvalidInputError(f"no such file: {path}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc})") from None


def operator_to_json(T: ContractionMatrix) -> dict:
    doc = OperatorSpec("dense", entries=T.entries).to_json()
    doc["label"] = T.label
    return doc


def load_operator(path, tol: TolerancePolicy) -> ContractionMatrix:
    """Read an operator file (dense or named family) and materialize it."""
    doc = read_json(path)
    T = materialize(OperatorSpec.from_json(doc), tol)
    if isinstance(doc, dict) and doc.get("label") and doc.get("kind") == "dense":
        T = T.with_label(str(doc["label"]))
    return T


def load_tolerances(path) -> TolerancePolicy:
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise InvalidInputError("tolerance file must hold a JSON object")
    return TolerancePolicy.from_dict(doc)

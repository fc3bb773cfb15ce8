"""Finite-dimensional contractions: validated carrier, example families, algebra.

Infinite-dimensional models are replaced by finite surrogates: the bilateral
shift by the cyclic shift (a unitary with atomic spectrum), the unilateral
shift by its nilpotent truncation.

An :class:`OperatorSpec` is a declarative, JSON-serializable recipe that
:func:`materialize` turns into a :class:`ContractionMatrix`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InvalidInputError, NotAContractionError
from .numerics import DEFAULT_TOLERANCE, TolerancePolicy, as_square, hermitian_sqrt

__all__ = [
    "ContractionMatrix",
    "OperatorSpec",
    "SPEC_KINDS",
    "as_matrix",
    "materialize",
    "random_contraction",
    "truncated_shift",
    "cyclic_shift",
    "rank_one_perturbed_unitary",
    "weighted_cyclic_shift",
    "block_shift_perturbation",
    "mobius_transform",
    "direct_sum",
    "adjoint",
    "power",
    "scalar_multiple",
    "defect",
    "defect_squared",
    "unitarity_defect",
    "is_unitary",
]


@dataclass(frozen=True, eq=False)
class ContractionMatrix:
    """A dense complex square matrix with operator norm at most ``1 + atol``."""

    entries: np.ndarray
    label: str = ""
    tol: TolerancePolicy = field(default=DEFAULT_TOLERANCE, repr=False)

    def __post_init__(self):
        arr = as_square(self.entries, self.label or "operator").copy()
        norm = float(np.linalg.norm(arr, 2))
        if norm > 1 + self.tol.atol:
            raise NotAContractionError(
                f"{self.label or 'operator'}: operator norm {norm:.12g} exceeds 1"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, ContractionMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    __hash__ = None

    def with_label(self, label: str) -> "ContractionMatrix":
        return ContractionMatrix(self.entries, label, self.tol)


def as_matrix(T) -> np.ndarray:
    """Plain complex ndarray view of a ContractionMatrix or array-like."""
    if isinstance(T, ContractionMatrix):
        return T.entries
    return as_square(T)


def _wrap(arr, label, tol) -> ContractionMatrix:
    return ContractionMatrix(np.asarray(arr, dtype=complex), label, tol)


def _fmt(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:g}"
    return f"{z.real:g}{z.imag:+g}j"


# --- constructors -----------------------------------------------------------


def random_contraction(dim: int, seed: int, norm_cap: float = 1.0, tol=DEFAULT_TOLERANCE):
    """Seeded Ginibre sample with singular values clamped to ``norm_cap``.

    The generator is numpy's PCG64 seeded with ``seed``; real and imaginary
    parts are standard normals scaled by ``1/sqrt(2*dim)``.
    """
    dim, seed = _pos_int(dim, "dim"), _int(seed, "seed")
    norm_cap = float(norm_cap)
    if not (0 < norm_cap <= 1):
        raise InvalidInputError(f"norm_cap must lie in (0, 1], got {norm_cap}")
    rng = np.random.Generator(np.random.PCG64(seed))
    G = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2 * dim)
    U, s, Vh = np.linalg.svd(G)
    T = (U * np.minimum(s, norm_cap)) @ Vh
    return _wrap(T, f"random(dim={dim}, seed={seed}, norm_cap={norm_cap:g})", tol)


def truncated_shift(n: int, multiplicity: int = 1, tol=DEFAULT_TOLERANCE):
    """Unilateral shift cut to ``n`` blocks of size ``multiplicity`` (nilpotent)."""
    n, m = _pos_int(n, "n"), _pos_int(multiplicity, "multiplicity")
    S = np.kron(np.eye(n, k=-1), np.eye(m)).astype(complex)
    return _wrap(S, f"truncated_shift(n={n}, multiplicity={m})", tol)


def cyclic_shift(n: int, tol=DEFAULT_TOLERANCE):
    """Permutation ``e_k -> e_{k+1 mod n}``."""
    n = _pos_int(n, "n")
    U = np.roll(np.eye(n, dtype=complex), 1, axis=0)
    return _wrap(U, f"cyclic_shift(n={n})", tol)


def unitarity_defect(U) -> float:
    """``||U*U - I||`` (spectral norm)."""
    U = as_matrix(U)
    return float(np.linalg.norm(U.conj().T @ U - np.eye(len(U)), 2))


def is_unitary(U, tol=DEFAULT_TOLERANCE) -> bool:
    U = as_matrix(U)
    return unitarity_defect(U) <= tol.unitary_tol * len(U)


def _unit_vector(xi, dim: int, tol) -> np.ndarray:
    if isinstance(xi, (int, np.integer)) and not isinstance(xi, bool):
        if not 0 <= xi < dim:
            raise InvalidInputError(f"basis index {xi} out of range for dimension {dim}")
        v = np.zeros(dim, dtype=complex)
        v[int(xi)] = 1.0
        return v
    try:
        v = np.asarray(xi, dtype=complex).ravel()
    except (TypeError, ValueError):
        raise InvalidInputError("xi must be a basis index or a vector") from None
    if v.shape != (dim,) or not np.all(np.isfinite(v)):
        raise InvalidInputError(f"xi must be a finite vector of length {dim}")
    if abs(np.linalg.norm(v) - 1) > tol.atol * max(1, dim):
        raise InvalidInputError(f"xi must be a unit vector (norm {np.linalg.norm(v):.6g})")
    return v


def rank_one_perturbed_unitary(U, xi, alpha, tol=DEFAULT_TOLERANCE):
    """``T = U - (1 - alpha) U xi xi*``, so that ``I - T*T = (1-|alpha|^2) xi xi*``.

    ``xi`` may be a basis index or a unit vector.
    """
    Um = as_matrix(U)
    if not is_unitary(Um, tol):
        raise InvalidInputError(f"U is not unitary (||U*U - I|| = {unitarity_defect(Um):.3e})")
    alpha = _complex(alpha, "alpha")
    if abs(alpha) > 1 + tol.atol:
        raise NotAContractionError(f"|alpha| = {abs(alpha):.6g} > 1 gives a non-contraction")
    v = _unit_vector(xi, len(Um), tol)
    T = Um - (1 - alpha) * np.outer(Um @ v, v.conj())
    base = U.label if isinstance(U, ContractionMatrix) and U.label else "U"
    tag = f"e{xi}" if isinstance(xi, (int, np.integer)) else "xi"
    return _wrap(T, f"rank_one_perturbed_unitary({base}, {tag}, alpha={_fmt(alpha)})", tol)


def weighted_cyclic_shift(n: int, alpha, tol=DEFAULT_TOLERANCE):
    """Cyclic shift whose edge out of coordinate 0 carries the weight ``alpha``."""
    n = _pos_int(n, "n")
    if n < 2:
        raise InvalidInputError("weighted_cyclic_shift needs n >= 2")
    T = rank_one_perturbed_unitary(cyclic_shift(n, tol), 0, alpha, tol)
    return T.with_label(f"weighted_cyclic_shift(n={n}, alpha={_fmt(alpha)})")


def block_shift_perturbation(A, n: int, tol=DEFAULT_TOLERANCE):
    """Truncated block shift on ``E^n`` whose first subdiagonal block is ``A``.

    ``(x_0, ..., x_{n-1}) -> (0, A x_0, x_1, ..., x_{n-2})``.
    """
    Am = as_matrix(A)
    n = _pos_int(n, "n")
    if n < 2:
        raise InvalidInputError("block_shift_perturbation needs n >= 2")
    m = len(Am)
    T = np.kron(np.eye(n, k=-1), np.eye(m)).astype(complex)
    T[m : 2 * m, :m] = Am
    base = A.label if isinstance(A, ContractionMatrix) and A.label else "A"
    return _wrap(T, f"block_shift_perturbation({base}, n={n})", tol)


def mobius_transform(T, lam, tol=DEFAULT_TOLERANCE):
    """``(T - lam I)(I - conj(lam) T)^{-1}`` for ``|lam| < 1``."""
    Tm = as_matrix(T)
    lam = _complex(lam, "lam")
    if abs(lam) >= 1:
        raise InvalidInputError(f"Mobius parameter must satisfy |lam| < 1, got {abs(lam):.6g}")
    I = np.eye(len(Tm))
    # the two factors commute, so a left solve suffices
    X = np.linalg.solve(I - np.conj(lam) * Tm, Tm - lam * I)
    base = T.label if isinstance(T, ContractionMatrix) and T.label else "T"
    return _wrap(X, f"mobius({base}, lam={_fmt(lam)})", tol)


def direct_sum(*operands, tol=DEFAULT_TOLERANCE):
    if not operands:
        raise InvalidInputError("direct_sum needs at least one operand")
    mats = [as_matrix(T) for T in operands]
    n = sum(len(M) for M in mats)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for M in mats:
        out[k : k + len(M), k : k + len(M)] = M
        k += len(M)
    labels = [T.label if isinstance(T, ContractionMatrix) and T.label else "T" for T in operands]
    return _wrap(out, "direct_sum(" + ", ".join(labels) + ")", tol)


def adjoint(T, tol=DEFAULT_TOLERANCE):
    base = T.label if isinstance(T, ContractionMatrix) and T.label else "T"
    return _wrap(as_matrix(T).conj().T, f"adjoint({base})", tol)


def power(T, k: int, tol=DEFAULT_TOLERANCE):
    k = _int(k, "k")
    if k < 0:
        raise InvalidInputError("power exponent must be >= 0")
    base = T.label if isinstance(T, ContractionMatrix) and T.label else "T"
    return _wrap(np.linalg.matrix_power(as_matrix(T), k), f"power({base}, k={k})", tol)


def scalar_multiple(T, c, tol=DEFAULT_TOLERANCE):
    c = _complex(c, "c")
    base = T.label if isinstance(T, ContractionMatrix) and T.label else "T"
    return _wrap(c * as_matrix(T), f"scalar_multiple({base}, c={_fmt(c)})", tol)


def defect_squared(T) -> np.ndarray:
    """``I - T*T`` (Hermitian by construction)."""
    Tm = as_matrix(T)
    D2 = np.eye(len(Tm)) - Tm.conj().T @ Tm
    return (D2 + D2.conj().T) / 2


def defect(T, tol=DEFAULT_TOLERANCE) -> np.ndarray:
    """Defect operator ``(I - T*T)^{1/2}``."""
    return hermitian_sqrt(defect_squared(T), tol)


# --- declarative specs ------------------------------------------------------

# per kind: parameter name -> (type tag, required?, default)
_SCHEMA: dict[str, dict[str, tuple[str, bool, Any]]] = {
    "dense": {"entries": ("matrix", True, None)},
    "random": {"dim": ("int", True, None), "seed": ("int", True, None), "norm_cap": ("real", False, 1.0)},
    "truncated_shift": {"n": ("int", True, None), "multiplicity": ("int", False, 1)},
    "cyclic_shift": {"n": ("int", True, None)},
    "rank_one_perturbed_unitary": {
        "U": ("spec", True, None),
        "xi": ("index_or_vector", False, 0),
        "alpha": ("complex", True, None),
    },
    "weighted_cyclic_shift": {"n": ("int", True, None), "alpha": ("complex", True, None)},
    "block_shift_perturbation": {"A": ("spec", True, None), "n": ("int", True, None)},
    "direct_sum": {"operands": ("spec_list", True, None)},
    "mobius": {"T": ("spec", True, None), "lam": ("complex", True, None)},
    "adjoint": {"T": ("spec", True, None)},
    "power": {"T": ("spec", True, None), "k": ("int", True, None)},
    "scalar_multiple": {"T": ("spec", True, None), "c": ("complex", True, None)},
}

SPEC_KINDS = tuple(_SCHEMA)


def _int(x, name) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
        if isinstance(x, float) and x.is_integer():
            return int(x)
        raise InvalidInputError(f"{name} must be an integer, got {x!r}")
    return int(x)


def _pos_int(x, name) -> int:
    x = _int(x, name)
    if x < 1:
        raise InvalidInputError(f"{name} must be >= 1, got {x}")
    return x


def _real(x, name) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float, np.integer, np.floating)):
        raise InvalidInputError(f"{name} must be a real number, got {x!r}")
    if not np.isfinite(x):
        raise InvalidInputError(f"{name} must be finite")
    return float(x)


def _complex(x, name) -> complex:
    """Accept a number or an ``[re, im]`` pair."""
    if isinstance(x, (list, tuple)) and len(x) == 2:
        z = complex(_real(x[0], name), _real(x[1], name))
    elif isinstance(x, (int, float, complex, np.number)) and not isinstance(x, bool):
        z = complex(x)
    else:
        raise InvalidInputError(f"{name} must be a number or an [re, im] pair, got {x!r}")
    if not np.isfinite(z):
        raise InvalidInputError(f"{name} must be finite")
    return z


def _complex_vector(x, name) -> tuple[complex, ...]:
    if not isinstance(x, (list, tuple, np.ndarray)) or len(x) == 0:
        raise InvalidInputError(f"{name} must be a non-empty list")
    return tuple(_complex(v, name) for v in x)


def _complex_matrix(x, name) -> tuple[tuple[complex, ...], ...]:
    if isinstance(x, np.ndarray):
        x = x.tolist()
    if not isinstance(x, (list, tuple)) or len(x) == 0:
        raise InvalidInputError(f"{name} must be a non-empty list of rows")
    rows = tuple(_complex_vector(r, name) for r in x)
    if any(len(r) != len(rows) for r in rows):
        raise InvalidInputError(f"{name} must be square")
    return rows


def _normalize(tag, value, name):
    if tag == "int":
        return _int(value, name)
    if tag == "real":
        return _real(value, name)
    if tag == "complex":
        return _complex(value, name)
    if tag == "matrix":
        return _complex_matrix(value, name)
    if tag == "spec":
        return OperatorSpec.coerce(value)
    if tag == "spec_list":
        if not isinstance(value, (list, tuple)) or not value:
            raise InvalidInputError(f"{name} must be a non-empty list of specs")
        return tuple(OperatorSpec.coerce(v) for v in value)
    if tag == "index_or_vector":
        if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
            return int(value)
        return _complex_vector(value, name)
    raise AssertionError(tag)


def _encode(tag, value):
    if tag == "complex":
        return [value.real, value.imag]
    if tag == "matrix":
        return [[[z.real, z.imag] for z in row] for row in value]
    if tag == "spec":
        return value.to_json()
    if tag == "spec_list":
        return [v.to_json() for v in value]
    if tag == "index_or_vector" and not isinstance(value, int):
        return [[z.real, z.imag] for z in value]
    return value


@dataclass(frozen=True)
class OperatorSpec:
    """Declarative operator recipe; parameters are validated and normalized.

    Complex parameters are stored as Python ``complex``; child operators as
    nested specs, so a spec is a finite immutable tree.
    """

    kind: str
    params: tuple = ()

    def __init__(self, kind: str, params: dict | None = None, **kwargs):
        if kind not in _SCHEMA:
            raise InvalidInputError(f"unknown operator kind {kind!r}; expected one of {SPEC_KINDS}")
        raw = dict(params or {}, **kwargs)
        schema = _SCHEMA[kind]
        unknown = set(raw) - set(schema)
        if unknown:
            raise InvalidInputError(f"{kind}: unknown parameters {sorted(unknown)}")
        norm = []
        for name, (tag, required, default) in schema.items():
            if name not in raw:
                if required:
                    raise InvalidInputError(f"{kind}: missing parameter {name!r}")
                value = default
            else:
                value = _normalize(tag, raw[name], f"{kind}.{name}")
            norm.append((name, value))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(norm))

    def param(self, name):
        return dict(self.params)[name]

    @classmethod
    def coerce(cls, value) -> "OperatorSpec":
        if isinstance(value, OperatorSpec):
            return value
        if isinstance(value, dict):
            return cls.from_json(value)
        raise InvalidInputError(f"expected an operator spec, got {type(value).__name__}")

    def to_json(self) -> dict:
        schema = _SCHEMA[self.kind]
        encoded = {name: _encode(schema[name][0], v) for name, v in self.params}
        if self.kind == "dense":
            return {"kind": "dense", "entries": encoded["entries"]}
        return {"kind": self.kind, "params": encoded}

    @classmethod
    def from_json(cls, doc) -> "OperatorSpec":
        if not isinstance(doc, dict) or "kind" not in doc:
            raise InvalidInputError("operator document must be an object with a 'kind' field")
        kind = doc["kind"]
        extra = set(doc) - {"kind", "params", "entries", "label"}
        if extra:
            raise InvalidInputError(f"unexpected fields in operator document: {sorted(extra)}")
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise InvalidInputError("'params' must be an object")
        params = dict(params)
        if "entries" in doc:
            params["entries"] = doc["entries"]
        return cls(kind, params)


def materialize(spec, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> ContractionMatrix:
    """Build the contraction described by ``spec`` (an OperatorSpec or its JSON)."""
    spec = OperatorSpec.coerce(spec)
    p = dict(spec.params)
    kind = spec.kind
    if kind == "dense":
        return _wrap(np.array(p["entries"], dtype=complex), "dense", tol)
    if kind == "random":
        return random_contraction(p["dim"], p["seed"], p["norm_cap"], tol)
    if kind == "truncated_shift":
        return truncated_shift(p["n"], p["multiplicity"], tol)
    if kind == "cyclic_shift":
        return cyclic_shift(p["n"], tol)
    if kind == "rank_one_perturbed_unitary":
        xi = p["xi"] if isinstance(p["xi"], int) else np.array(p["xi"])
        return rank_one_perturbed_unitary(materialize(p["U"], tol), xi, p["alpha"], tol)
    if kind == "weighted_cyclic_shift":
        return weighted_cyclic_shift(p["n"], p["alpha"], tol)
    if kind == "block_shift_perturbation":
        return block_shift_perturbation(materialize(p["A"], tol), p["n"], tol)
    if kind == "direct_sum":
        return direct_sum(*(materialize(s, tol) for s in p["operands"]), tol=tol)
    if kind == "mobius":
        return mobius_transform(materialize(p["T"], tol), p["lam"], tol)
    if kind == "adjoint":
        return adjoint(materialize(p["T"], tol), tol)
    if kind == "power":
        return power(materialize(p["T"], tol), p["k"], tol)
    if kind == "scalar_multiple":
        return scalar_multiple(materialize(p["T"], tol), p["c"], tol)
    raise AssertionError(kind)

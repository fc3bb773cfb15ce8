"""Tolerance policy and Hermitian-pencil primitives.

Everything that decides "is this PSD", "is this zero" or "has this
converged" reads its thresholds from a :class:`TolerancePolicy`.  Scales:

* ``psd_floor`` is applied relative to ``max(1, ||H||)``, so large Poisson
  kernels near the unit circle are not rejected for roundoff.
* ``rank_rtol`` is applied relative to ``max(1, sigma_max)``.  All matrices in
  this package are built from contractions, so an absolute floor of 1 keeps
  pure roundoff (e.g. ``I - U*U`` for a unitary ``U``) classified as zero.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOLERANCE",
    "PSDVerdict",
    "PencilResult",
    "as_square",
    "hermitian_part",
    "psd_check",
    "generalized_rayleigh_sup",
    "pencil_sups",
    "hermitian_sqrt",
    "nullspace",
    "range_basis",
    "operator_norm",
]


@dataclass(frozen=True)
class TolerancePolicy:
    """Every numerical threshold used by the package.

    ``unitary_tol`` (relative ``||U*U - I||`` per dimension) and
    ``peripheral_band`` (distance to the unit circle below which an
    eigenvalue counts as peripheral) complete the set so that no operation
    carries a private constant.
    """

    atol: float = 1e-10
    psd_floor: float = -1e-8
    rank_rtol: float = 1e-8
    iter_tol: float = 1e-12
    max_iter: int = 10**6
    unitary_tol: float = 1e-8
    peripheral_band: float = 1e-8

    def __post_init__(self):
        for name in ("atol", "rank_rtol", "iter_tol", "unitary_tol", "peripheral_band"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidInputError(f"tolerance {name} must be finite and > 0, got {value!r}")
        if not (np.isfinite(self.psd_floor) and self.psd_floor < 0):
            raise InvalidInputError(f"psd_floor must be finite and < 0, got {self.psd_floor!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidInputError(f"max_iter must be a positive integer, got {self.max_iter!r}")

    def replace(self, **changes) -> "TolerancePolicy":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TolerancePolicy":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown tolerance fields: {sorted(unknown)}")
        try:
            kwargs = {k: (int(v) if k == "max_iter" else float(v)) for k, v in data.items()}
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"bad tolerance value: {exc}") from None
        return cls(**kwargs)


DEFAULT_TOLERANCE = TolerancePolicy()


class PSDVerdict(NamedTuple):
    is_psd: bool
    min_eigenvalue: float
    eigenvector: np.ndarray


class PencilResult(NamedTuple):
    """Outcome of ``sup <Mh,h> / <Nh,h>``.

    ``supremum`` is ``inf`` when the kernel condition fails; ``witness`` is a
    unit vector that attains the supremum (feasible) or lies in ``null(N)``
    with ``<M w, w> > 0`` (infeasible).
    """

    supremum: float
    feasible: bool
    witness: np.ndarray


def as_square(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite complex square ndarray or raise InvalidInputError."""
    try:
        arr = np.array(np.asarray(a), dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name}: cannot convert to a complex matrix ({exc})") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InvalidInputError(f"{name}: expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: non-finite entries")
    return arr


def _as_matrix(a, name: str) -> np.ndarray:
    try:
        arr = np.array(np.asarray(a), dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name}: cannot convert to a complex matrix ({exc})") from None
    if arr.ndim != 2 or 0 in arr.shape:
        raise InvalidInputError(f"{name}: expected a non-empty 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: non-finite entries")
    return arr


def hermitian_part(H, tol: TolerancePolicy = DEFAULT_TOLERANCE, name: str = "matrix") -> np.ndarray:
    """Symmetrize ``H``; a skew part larger than ``atol`` (relative) is an error."""
    H = as_square(H, name)
    scale = max(1.0, float(np.max(np.abs(H))))
    skew = float(np.max(np.abs(H - H.conj().T)))
    if skew > tol.atol * scale:
        raise InvalidInputError(f"{name}: not Hermitian (skew part {skew:.3e})")
    return (H + H.conj().T) / 2


def _floor(tol: TolerancePolicy, w: np.ndarray) -> float:
    return tol.psd_floor * max(1.0, float(np.max(np.abs(w))))


def psd_check(H, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> PSDVerdict:
    """Decide whether a Hermitian matrix is positive semidefinite.

    Returns the verdict together with the smallest eigenvalue and a unit
    eigenvector for it (a refuting direction when the verdict is false).
    """
    Hs = hermitian_part(H, tol)
    w, V = np.linalg.eigh(Hs)
    return PSDVerdict(bool(w[0] >= _floor(tol, w)), float(w[0]), V[:, 0])


class _Whitener(NamedTuple):
    range_map: np.ndarray  # columns v_i / sqrt(w_i) over the numerical range of N
    null_basis: np.ndarray  # orthonormal basis of the numerical kernel of N


def _whiten(N: np.ndarray, tol: TolerancePolicy) -> _Whitener:
    w, V = np.linalg.eigh(N)
    if w[0] < _floor(tol, w):
        raise InvalidInputError(f"denominator matrix is not PSD (eigenvalue {w[0]:.3e})")
    cutoff = tol.rank_rtol * max(1.0, float(w[-1]))
    keep = w > cutoff  # ties go to the kernel: conservative feasibility
    return _Whitener(V[:, keep] / np.sqrt(w[keep]), V[:, ~keep])


def _check_psd_numerator(M: np.ndarray, tol: TolerancePolicy) -> float:
    w = np.linalg.eigvalsh(M)
    if w[0] < _floor(tol, w):
        raise InvalidInputError(f"numerator matrix is not PSD (eigenvalue {w[0]:.3e})")
    return float(max(abs(w[0]), abs(w[-1])))


def _pencil(M: np.ndarray, wh: _Whitener, m_norm: float, tol: TolerancePolicy) -> PencilResult:
    n = M.shape[0]
    Z = wh.null_basis
    if Z.shape[1]:
        G = Z.conj().T @ M @ Z
        g, U = np.linalg.eigh((G + G.conj().T) / 2)
        if g[-1] >= tol.rank_rtol * max(1.0, m_norm):
            v = Z @ U[:, -1]
            return PencilResult(float("inf"), False, v / np.linalg.norm(v))
    W = wh.range_map
    if W.shape[1] == 0:
        # N vanishes: the ratio is 0/0 everywhere, report the trivial bound
        e0 = np.zeros(n, dtype=complex)
        e0[0] = 1.0
        return PencilResult(0.0, True, e0)
    A = W.conj().T @ M @ W
    a, U = np.linalg.eigh((A + A.conj().T) / 2)
    v = W @ U[:, -1]
    return PencilResult(max(float(a[-1]), 0.0), True, v / np.linalg.norm(v))


def generalized_rayleigh_sup(M, N, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> PencilResult:
    """Supremum of ``<Mh,h>/<Nh,h>`` over ``h`` outside ``null(N)``.

    Both arguments must be Hermitian PSD.  The computation is a congruence
    with the pseudo-inverse square root of ``N`` on its numerical range; the
    kernel inclusion ``null(N) <= null(M)`` is checked first and reported
    through ``feasible``.
    """
    M = hermitian_part(M, tol, "M")
    N = hermitian_part(N, tol, "N")
    if M.shape != N.shape:
        raise InvalidInputError(f"shape mismatch {M.shape} vs {N.shape}")
    m_norm = _check_psd_numerator(M, tol)
    return _pencil(M, _whiten(N, tol), m_norm, tol)


def pencil_sups(Ms, N, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> list[PencilResult]:
    """Batched :func:`generalized_rayleigh_sup` for many numerators sharing one ``N``."""
    Ms = np.asarray(Ms, dtype=complex)
    N = hermitian_part(N, tol, "N")
    if Ms.ndim != 3 or Ms.shape[1:] != N.shape:
        raise InvalidInputError(f"expected a (k, n, n) stack matching N, got {Ms.shape}")
    Ms = (Ms + np.conj(np.swapaxes(Ms, 1, 2))) / 2
    wh = _whiten(N, tol)
    Z, W = wh.null_basis, wh.range_map
    ws = np.linalg.eigvalsh(Ms)
    norms = np.max(np.abs(ws), axis=1)
    lows = ws[:, 0]
    floors = tol.psd_floor * np.maximum(1.0, norms)
    if np.any(lows < floors):
        k = int(np.argmax(lows < floors))
        raise InvalidInputError(f"numerator {k} is not PSD (eigenvalue {lows[k]:.3e})")
    if Z.shape[1] or W.shape[1] == 0:
        return [_pencil(M, wh, float(mn), tol) for M, mn in zip(Ms, norms)]
    A = np.conj(W.T)[None] @ Ms @ W[None]
    a, U = np.linalg.eigh((A + np.conj(np.swapaxes(A, 1, 2))) / 2)
    vs = (W[None] @ U[:, :, -1:])[:, :, 0]
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)
    return [PencilResult(max(float(s), 0.0), True, v) for s, v in zip(a[:, -1], vs)]


def hermitian_sqrt(P, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """PSD square root; eigenvalues inside the PSD floor are clamped to zero."""
    Ps = hermitian_part(P, tol)
    w, V = np.linalg.eigh(Ps)
    if w[0] < _floor(tol, w):
        raise InvalidInputError(f"matrix is not PSD (eigenvalue {w[0]:.3e})")
    R = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    return (R + R.conj().T) / 2


def _svd_split(A: np.ndarray, tol: TolerancePolicy):
    U, s, Vh = np.linalg.svd(A)
    cutoff = tol.rank_rtol * max(1.0, float(s[0]) if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return U, rank, Vh


def nullspace(A, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of ``A``."""
    A = _as_matrix(A, "A")
    _, rank, Vh = _svd_split(A, tol)
    return Vh[rank:].conj().T


def range_basis(A, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical range of ``A``."""
    A = _as_matrix(A, "A")
    U, rank, _ = _svd_split(A, tol)
    return U[:, :rank]


def operator_norm(A) -> float:
    A = _as_matrix(A, "A")
    return float(np.linalg.norm(A, 2))

"""Spectral and asymptotic classification of contractions, and pairwise reports.

In finite dimension weak stability, strong stability and uniform stability
of powers all reduce to ``spectral_radius < 1``; the flags below follow the
asymptotic limit ``S_T`` and read ``C_1.`` as "``S_T`` positive definite".
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import InvalidInputError, NumericalFailure
from .functionals import asymptotic_limit, circle_distance
from .numerics import DEFAULT_TOLERANCE, TolerancePolicy, generalized_rayleigh_sup, nullspace, range_basis
from .operators import as_matrix

__all__ = [
    "SpectralReport",
    "ClassificationFlags",
    "KernelRangeReport",
    "KTReport",
    "AsymptoticInequalityReport",
    "spectral_report",
    "classify_contraction",
    "unitary_part",
    "peripheral_distance",
    "kernel_range_report",
    "katznelson_tzafriri",
    "asymptotic_inequality_check",
]


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: tuple
    peripheral: tuple
    point_peripheral: tuple
    spectral_radius: float

    def to_dict(self) -> dict:
        enc = lambda zs: [[z.real, z.imag] for z in zs]
        return {
            "eigenvalues": enc(self.eigenvalues),
            "peripheral": enc(self.peripheral),
            "point_peripheral": enc(self.point_peripheral),
            "spectral_radius": self.spectral_radius,
        }


def spectral_report(T, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> SpectralReport:
    """Eigenvalues, the peripheral ones (``|mu| >= 1 - peripheral_band``) and the spectral radius.

    Every eigenvalue of a matrix has an eigenvector, so the peripheral point
    spectrum coincides with the peripheral spectrum.
    """
    Tm = as_matrix(T)
    try:
        ev = np.linalg.eigvals(Tm)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from None
    ev = ev[np.lexsort((ev.imag, ev.real))]
    per = tuple(complex(z) for z in ev if abs(z) >= 1 - tol.peripheral_band)
    return SpectralReport(tuple(complex(z) for z in ev), per, per, float(np.max(np.abs(ev))))


@dataclass(frozen=True)
class ClassificationFlags:
    is_unitary: bool
    is_isometry: bool
    is_coisometry: bool
    is_projection: bool
    c_dot0: bool
    c_0dot: bool
    c_00: bool
    c_1dot: bool
    c_dot1: bool
    c_11: bool
    completely_nonunitary: bool
    unitary_part_dim: int

    def to_dict(self) -> dict:
        return asdict(self)


def _zero_psd(S: np.ndarray, tol) -> bool:
    return float(np.linalg.eigvalsh(S)[-1]) <= tol.rank_rtol


def _definite(S: np.ndarray, tol) -> bool:
    return float(np.linalg.eigvalsh(S)[0]) > tol.rank_rtol


def unitary_part(T, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis of the largest reducing subspace on which ``T`` is unitary.

    Computed as ``N(I - S_T) & N(I - S_{T*})``.
    """
    Tm = as_matrix(T)
    I = np.eye(len(Tm))
    S = asymptotic_limit(Tm, tol).S
    Sa = asymptotic_limit(Tm.conj().T, tol).S
    return nullspace(np.vstack([I - S, I - Sa]), tol)


def classify_contraction(T, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> ClassificationFlags:
    Tm = as_matrix(T)
    n = len(Tm)
    I = np.eye(n)
    S = asymptotic_limit(Tm, tol).S
    Sa = asymptotic_limit(Tm.conj().T, tol).S
    iso = np.linalg.norm(Tm.conj().T @ Tm - I, 2) <= tol.unitary_tol * n
    coiso = np.linalg.norm(Tm @ Tm.conj().T - I, 2) <= tol.unitary_tol * n
    proj = (
        np.max(np.abs(Tm @ Tm - Tm)) <= tol.atol * n and np.max(np.abs(Tm - Tm.conj().T)) <= tol.atol
    )
    c0, c_0 = _zero_psd(S, tol), _zero_psd(Sa, tol)
    c1, c_1 = _definite(S, tol), _definite(Sa, tol)
    udim = nullspace(np.vstack([I - S, I - Sa]), tol).shape[1]
    if iso and coiso:
        udim = n
    return ClassificationFlags(
        bool(iso and coiso), bool(iso), bool(coiso), bool(proj),
        c_0, c0, c0 and c_0, c1, c_1, c1 and c_1, udim == 0, int(udim),
    )


def _merge(points, radius):
    out = []
    for z in points:
        if not any(abs(z - w) <= radius for w in out):
            out.append(z)
    return out


def peripheral_distance(a, b, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> float:
    """Distance between two peripheral spectra compared as sets.

    Points within ``rank_rtol`` are merged, then the two sets are paired by an
    optimal assignment under the circle (angle) metric; the result is the
    largest paired distance, or ``inf`` if the set sizes differ.
    """
    A = _merge(list(a), tol.rank_rtol)
    B = _merge(list(b), tol.rank_rtol)
    if len(A) != len(B):
        return float("inf")
    if not A:
        return 0.0
    cost = circle_distance(np.angle(np.array(A))[:, None], np.angle(np.array(B))[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


@dataclass(frozen=True)
class KernelRangeReport:
    kernel_dims: tuple
    max_principal_angle: float
    kernels_equal: bool
    range_residual: float
    range_contained: bool
    decomposition_residual: float

    def to_dict(self) -> dict:
        return asdict(self)


def kernel_range_report(
    T, Tp, tol: TolerancePolicy = DEFAULT_TOLERANCE, angle_tol: float = 1e-8
) -> KernelRangeReport:
    """Compare fixed spaces of ``T`` and ``T'`` and test ``R(T - T')`` inside ``R(I - T)``.

    The decomposition residual measures how far ``N(I - T)`` is from reducing
    ``T`` orthogonally to ``R(I - T)``, i.e. ``T = I (+) T_1``.
    """
    A, B = as_matrix(T), as_matrix(Tp)
    if A.shape != B.shape:
        raise InvalidInputError(f"dimension mismatch: {A.shape} vs {B.shape}")
    I = np.eye(len(A))
    K, Kp = nullspace(I - A, tol), nullspace(I - B, tol)
    if K.shape[1] != Kp.shape[1]:
        angle = np.pi / 2
    elif K.shape[1] == 0:
        angle = 0.0
    else:
        angle = float(np.max(scipy.linalg.subspace_angles(K, Kp)))
    Q = range_basis(I - A, tol)
    E = A - B
    range_res = float(np.linalg.norm(E - Q @ (Q.conj().T @ E), 2))
    P = K @ K.conj().T
    decomp = float(np.linalg.norm(P @ A - A @ P, 2))
    if K.shape[1] and Q.shape[1]:
        decomp = max(decomp, float(np.linalg.norm(K.conj().T @ Q, 2)))
    scale = max(1.0, float(np.linalg.norm(E, 2)))
    return KernelRangeReport(
        (K.shape[1], Kp.shape[1]), angle, angle <= angle_tol, range_res,
        range_res <= angle_tol * scale, decomp,
    )


@dataclass
class KTReport:
    trajectory: np.ndarray  # ||T^n (T - I)|| for n = 0..n_computed
    final: float
    limit_verdict: bool
    spectral_verdict: bool

    @property
    def agree(self) -> bool:
        return self.limit_verdict == self.spectral_verdict

    def to_dict(self) -> dict:
        return {
            "final": self.final,
            "limit_verdict": self.limit_verdict,
            "spectral_verdict": self.spectral_verdict,
            "agree": self.agree,
            "steps": len(self.trajectory) - 1,
        }


def katznelson_tzafriri(T, n_max: int, threshold: float = 1e-6, chunk: int = 512) -> KTReport:
    """Trajectory ``||T^n (T - I)||`` and the spectral test ``sigma(T) in D u {1}``.

    The limit verdict is ``||T^{n_max}(T - I)|| <= threshold``; the spectral
    verdict asks every eigenvalue with ``|mu| >= 1 - threshold`` to lie
    within ``threshold`` of 1.  Once the iterate underflows to exactly zero
    the remaining trajectory is zero and the loop stops.
    """
    Tm = as_matrix(T)
    if int(n_max) != n_max or n_max < 1:
        raise InvalidInputError("n_max must be a positive integer")
    n_max = int(n_max)
    X = Tm - np.eye(len(Tm))
    traj = []
    n = 0
    while n <= n_max:
        m = min(chunk, n_max + 1 - n)
        stack = np.empty((m,) + X.shape, dtype=complex)
        for k in range(m):
            stack[k] = X
            X = Tm @ X
        traj.append(np.linalg.norm(stack, 2, axis=(1, 2)))
        n += m
        if not np.any(X):
            traj.append(np.zeros(n_max + 1 - n))
            break
    traj = np.concatenate(traj)
    ev = np.linalg.eigvals(Tm)
    spectral = bool(np.all((np.abs(ev) < 1 - threshold) | (np.abs(ev - 1) <= threshold)))
    return KTReport(traj, float(traj[-1]), bool(traj[-1] <= threshold), spectral)


@dataclass(frozen=True)
class AsymptoticInequalityReport:
    max_violation: float
    kernel_inclusion_residual: float
    agreement_residual: float
    z_feasible: bool
    z_constant: float

    def to_dict(self) -> dict:
        return asdict(self)


def asymptotic_inequality_check(
    T, Tp, c: float, samples: int = 1000, seed: int = 0, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> AsymptoticInequalityReport:
    """Sample ``1/4 |<(S_T - S_T')h,h>|^2 + <(I - S_T)h,h> - c^2 <(I - S_T')h,h>``.

    Also reports ``||(I - S_T) K'||`` and ``||(T - T') K'||`` for an orthonormal
    basis ``K'`` of ``N(I - S_T')``, and the pencil ``(I - S_T, I - S_T')``.
    """
    A, B = as_matrix(T), as_matrix(Tp)
    if A.shape != B.shape:
        raise InvalidInputError(f"dimension mismatch: {A.shape} vs {B.shape}")
    n = len(A)
    I = np.eye(n)
    S = asymptotic_limit(A, tol).S
    Sp = asymptotic_limit(B, tol).S
    rng = np.random.default_rng(seed)
    H = rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    H /= np.linalg.norm(H, axis=1, keepdims=True)
    quad = lambda M: np.einsum("ki,ij,kj->k", H.conj(), M, H).real
    viol = 0.25 * quad(S - Sp) ** 2 + quad(I - S) - c * c * quad(I - Sp)
    Kp = nullspace(I - Sp, tol)
    incl = float(np.linalg.norm((I - S) @ Kp, 2)) if Kp.shape[1] else 0.0
    agree = float(np.linalg.norm((A - B) @ Kp, 2)) if Kp.shape[1] else 0.0
    z = generalized_rayleigh_sup(I - S, I - Sp, tol)
    return AsymptoticInequalityReport(float(viol.max()), incl, agree, z.feasible, float(z.supremum))

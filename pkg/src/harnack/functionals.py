"""Operator-valued functionals of a contraction.

Poisson kernel, block moment matrices, the asymptotic limit of
``T*^n T^n``, Cesaro means and the ergodic projection, the one-sided ergodic
Hilbert transform, the intertwining quotient ``C`` with ``C D_{T'} = T - T'``
and its row operator, resolvents (dense and rank-one structured), and atomic
spectral measures of unitaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, NumericalFailure, SingularResolventError
from .numerics import DEFAULT_TOLERANCE, TolerancePolicy, generalized_rayleigh_sup, nullspace
from .operators import as_matrix, defect_squared, is_unitary, unitarity_defect

__all__ = [
    "AsymptoticLimitResult",
    "AtomicMeasure",
    "HilbertPartial",
    "QuotientResult",
    "poisson_kernel",
    "moment_matrix",
    "asymptotic_iterates",
    "asymptotic_limit",
    "cesaro_mean",
    "ergodic_projection",
    "hilbert_transform_partial",
    "intertwining_quotient",
    "row_operator_norm",
    "resolvent",
    "rank_one_resolvent",
    "spectral_atoms",
    "density_ratio",
    "circle_distance",
]


def _check_disc(lam, name="lam") -> complex:
    lam = complex(lam)
    if not np.isfinite(lam) or abs(lam) >= 1:
        raise InvalidInputError(f"{name} must lie in the open unit disc, got {lam}")
    return lam


def _pair(T, Tp):
    A, B = as_matrix(T), as_matrix(Tp)
    if A.shape != B.shape:
        raise InvalidInputError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


def poisson_kernel(T, lam, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """``K(T, lam) = (I - conj(lam) T)^{-1} + (I - lam T*)^{-1} - I``.

    Also evaluated in factored form ``R* (I - |lam|^2 T*T) R`` with
    ``R = (I - conj(lam) T)^{-1}``; the two must agree to
    ``atol * dim / (1 - |lam|)^2`` or :class:`NumericalFailure` is raised.
    """
    Tm = as_matrix(T)
    lam = _check_disc(lam)
    n = len(Tm)
    I = np.eye(n)
    R = np.linalg.inv(I - np.conj(lam) * Tm)
    K_sum = R + R.conj().T - I
    K_fac = R.conj().T @ (I - abs(lam) ** 2 * Tm.conj().T @ Tm) @ R
    gap = float(np.max(np.abs(K_sum - K_fac)))
    if gap > tol.atol * n / (1 - abs(lam)) ** 2:
        raise NumericalFailure(f"Poisson kernel formulas disagree by {gap:.3e}", partial=K_sum)
    return (K_sum + K_sum.conj().T) / 2


def _signed_powers(Tm: np.ndarray, n: int) -> list[np.ndarray]:
    powers = [np.eye(len(Tm), dtype=complex)]
    for _ in range(1, n):
        powers.append(powers[-1] @ Tm)
    return powers


def moment_matrix(T, n: int) -> np.ndarray:
    """Block matrix with block ``(i, j)`` equal to ``T^{i-j}`` (``T*^{j-i}`` above the diagonal)."""
    Tm = as_matrix(T)
    if int(n) != n or n < 1:
        raise InvalidInputError(f"block order must be a positive integer, got {n}")
    n = int(n)
    d = len(Tm)
    P = _signed_powers(Tm, n)
    M = np.empty((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            M[i * d : (i + 1) * d, j * d : (j + 1) * d] = P[i - j] if i >= j else P[j - i].conj().T
    return M


@dataclass(frozen=True)
class AsymptoticLimitResult:
    """Limit ``S`` of ``T*^k T^k``, the number of iterations, and ``||T*ST - S||``."""

    S: np.ndarray
    iterations: int
    residual: float


def asymptotic_iterates(T) -> Iterator[np.ndarray]:
    """Yield ``P_0 = I, P_{k+1} = T* P_k T`` indefinitely."""
    Tm = as_matrix(T)
    Th = Tm.conj().T
    P = np.eye(len(Tm), dtype=complex)
    while True:
        yield P
        P = Th @ P @ Tm
        P = (P + P.conj().T) / 2


def asymptotic_limit(T, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> AsymptoticLimitResult:
    """Strong limit of ``T*^n T^n`` by the decreasing recurrence ``P <- T* P T``.

    Stops once consecutive iterates differ by at most ``iter_tol`` (spectral
    norm).  If ``max_iter`` is hit with residual above ``10 * iter_tol`` a
    :class:`NumericalFailure` carrying the last iterate is raised.
    """
    Tm = as_matrix(T)
    Th = Tm.conj().T
    P = np.eye(len(Tm), dtype=complex)
    residual = np.inf
    for k in range(1, tol.max_iter + 1):
        Q = Th @ P @ Tm
        Q = (Q + Q.conj().T) / 2
        residual = float(np.linalg.norm(Q - P, 2))
        P = Q
        if residual <= tol.iter_tol:
            return AsymptoticLimitResult(P, k, residual)
    result = AsymptoticLimitResult(P, tol.max_iter, residual)
    if residual > 10 * tol.iter_tol:
        raise NumericalFailure(
            f"asymptotic limit did not converge in {tol.max_iter} steps (residual {residual:.3e})",
            partial=result,
        )
    return result


def cesaro_mean(T, n: int) -> np.ndarray:
    """``(n+1)^{-1} sum_{j=0}^n T^j``."""
    Tm = as_matrix(T)
    if int(n) != n or n < 0:
        raise InvalidInputError(f"n must be a nonnegative integer, got {n}")
    P = np.eye(len(Tm), dtype=complex)
    acc = P.copy()
    for _ in range(int(n)):
        P = P @ Tm
        acc += P
    return acc / (int(n) + 1)


def ergodic_projection(T, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthogonal projection onto the fixed space ``N(I - T)``."""
    Tm = as_matrix(T)
    Z = nullspace(np.eye(len(Tm)) - Tm, tol)
    return Z @ Z.conj().T


class HilbertPartial(NamedTuple):
    value: np.ndarray
    tail: float  # max over m in [N/2, N] of ||sum_{n=m}^N T^n x / n||


def hilbert_transform_partial(T, x, N: int) -> HilbertPartial:
    """Partial sum ``sum_{n=1}^N T^n x / n`` with a last-half tail diagnostic."""
    Tm = as_matrix(T)
    x = np.asarray(x, dtype=complex).ravel()
    if x.shape != (len(Tm),):
        raise InvalidInputError(f"vector of length {len(Tm)} expected")
    if int(N) != N or N < 1:
        raise InvalidInputError(f"N must be a positive integer, got {N}")
    N = int(N)
    partial = np.zeros((N + 1, len(x)), dtype=complex)
    v = x
    for n in range(1, N + 1):
        v = Tm @ v
        partial[n] = partial[n - 1] + v / n
    m0 = max(1, (N + 1) // 2)
    tails = np.linalg.norm(partial[N] - partial[m0 - 1 : N], axis=1)
    return HilbertPartial(partial[N], float(tails.max()))


class QuotientResult(NamedTuple):
    """``C`` with ``C D_{T'} = T - T'`` (None when infeasible) and a witness."""

    C: np.ndarray | None
    feasible: bool
    witness: np.ndarray | None


def intertwining_quotient(T, Tp, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> QuotientResult:
    """Solve ``C D_{T'} = T - T'`` with ``C = 0`` on ``N(D_{T'})``.

    Feasible exactly when ``N(D_{T'})`` is contained in ``N(T - T')``; the
    decision is the kernel test of the pencil ``((T-T')*(T-T'), D_{T'}^2)``.
    """
    A, B = _pair(T, Tp)
    E = A - B
    D2 = defect_squared(B)
    pencil = generalized_rayleigh_sup(E.conj().T @ E, D2, tol)
    if not pencil.feasible:
        return QuotientResult(None, False, pencil.witness)
    w, V = np.linalg.eigh(D2)
    keep = w > tol.rank_rtol * max(1.0, float(w[-1]))
    Vr = V[:, keep]
    pinv_sqrt = (Vr / np.sqrt(w[keep])) @ Vr.conj().T
    return QuotientResult(E @ pinv_sqrt, True, None)


def row_operator_norm(T, Tp, N: int, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> float:
    """Norm of ``[C, TC, ..., T^{N-1} C]``; ``inf`` if the quotient is infeasible."""
    A, _ = _pair(T, Tp)
    if int(N) != N or N < 1:
        raise InvalidInputError(f"N must be a positive integer, got {N}")
    q = intertwining_quotient(T, Tp, tol)
    if not q.feasible:
        return float("inf")
    X = q.C
    G = np.zeros_like(X)
    for _ in range(int(N)):
        G += X @ X.conj().T
        X = A @ X
    return float(np.sqrt(max(np.linalg.eigvalsh((G + G.conj().T) / 2)[-1], 0.0)))


def resolvent(T, lam) -> np.ndarray:
    """``(I - lam T)^{-1}`` for ``|lam| < 1``."""
    Tm = as_matrix(T)
    lam = _check_disc(lam)
    return np.linalg.inv(np.eye(len(Tm)) - lam * Tm)


def rank_one_resolvent(U, a, b, lam, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> np.ndarray:
    """Resolvent of ``T = U - b a*`` from that of the unitary ``U``.

    ``(I - lam T)^{-1} = (I - lam U)^{-1} (I - b a_lam* / (1 + <b, a_lam>))`` with
    ``a_lam = conj(lam) (I - conj(lam) U*)^{-1} a``.  Raises
    :class:`SingularResolventError` when ``|1 + <b, a_lam>| <= atol``.  The
    result is cross-checked against a dense solve.
    """
    Um = as_matrix(U)
    if not is_unitary(Um, tol):
        raise InvalidInputError(f"U is not unitary (||U*U - I|| = {unitarity_defect(Um):.3e})")
    lam = _check_disc(lam)
    n = len(Um)
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != (n,) or b.shape != (n,):
        raise InvalidInputError(f"a and b must be vectors of length {n}")
    I = np.eye(n)
    RU = np.linalg.inv(I - lam * Um)
    a_lam = np.conj(lam) * (RU.conj().T @ a)
    denom = 1 + np.vdot(a_lam, b)
    if abs(denom) <= tol.atol:
        raise SingularResolventError(f"1 + <b, a_lam> = {denom:.3e} vanishes at lam = {lam}")
    R = RU @ (I - np.outer(b, a_lam.conj()) / denom)
    dense = np.linalg.inv(I - lam * (Um - np.outer(b, a.conj())))
    gap = float(np.max(np.abs(R - dense)))
    if gap > tol.atol / (1 - abs(lam)) ** 2 * max(1.0, float(np.max(np.abs(dense)))):
        raise NumericalFailure(f"rank-one resolvent update disagrees with dense solve by {gap:.3e}")
    return R


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite measure on the circle: ``atoms`` is a tuple of ``(angle, mass)``."""

    atoms: tuple = ()

    @property
    def total_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    @property
    def angles(self) -> np.ndarray:
        return np.array([t for t, _ in self.atoms])


def _unitary_eig(Um: np.ndarray):
    # complex Schur form of a normal matrix is diagonal with unitary Z
    D, Z = scipy.linalg.schur(Um, output="complex")
    return np.diag(D), Z


def spectral_atoms(U, y, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> AtomicMeasure:
    """Scalar spectral measure ``<E_U(.) y, y>`` of a unitary matrix.

    Eigenvalues closer than ``rank_rtol`` are merged into one atom; atoms of
    negligible mass (``<= atol * ||y||^2``) are dropped.
    """
    Um = as_matrix(U)
    if not is_unitary(Um, tol):
        raise InvalidInputError(f"U is not unitary (||U*U - I|| = {unitarity_defect(Um):.3e})")
    y = np.asarray(y, dtype=complex).ravel()
    if y.shape != (len(Um),):
        raise InvalidInputError(f"vector of length {len(Um)} expected")
    ev, Z = _unitary_eig(Um)
    angles = np.mod(np.angle(ev), 2 * np.pi)
    weights = np.abs(Z.conj().T @ y) ** 2
    order = np.argsort(angles)
    atoms = []
    for k in order:
        if atoms and circle_distance(atoms[-1][0], angles[k]) <= tol.rank_rtol:
            atoms[-1][1] += weights[k]
        else:
            atoms.append([angles[k], weights[k]])
    # wraparound merge of the first and last clusters
    if len(atoms) > 1 and circle_distance(atoms[0][0], atoms[-1][0]) <= tol.rank_rtol:
        atoms[0][1] += atoms.pop()[1]
    floor = tol.atol * float(np.vdot(y, y).real)
    return AtomicMeasure(tuple((float(t), float(m)) for t, m in atoms if m > floor))


def circle_distance(s, t):
    """Arc-length distance on the unit circle between angles ``s`` and ``t``."""
    d = np.mod(np.asarray(s) - np.asarray(t), 2 * np.pi)
    return np.minimum(d, 2 * np.pi - d)


def density_ratio(mu: AtomicMeasure, t0: float, eps: float) -> float:
    """``mu([t0 - eps, t0 + eps]) / (2 eps)`` with a closed window in the circle metric."""
    if not eps > 0:
        raise InvalidInputError("eps must be positive")
    if not mu.atoms:
        return 0.0
    angles = mu.angles
    masses = np.array([m for _, m in mu.atoms])
    inside = circle_distance(angles, t0) <= eps
    return float(masses[inside].sum() / (2 * eps))

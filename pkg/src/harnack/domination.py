"""Domination relations between two contractions of the same dimension.

Conventions: the Harnack constant ``c`` is the smallest number with
``K(T, lam) <= c^2 K(T', lam)``; Z-domination asks for
``||D_T h||^2 + ||(T - T')h||^2 <= c^2 ||D_{T'} h||^2``.  Every constant is
reported twice: ``raw_sup`` as computed and ``constant = max(1, raw_sup)``.

Poisson-kernel suprema are taken over a finite :class:`GridSpec`; a grid
value is a lower bound for the supremum over the disc and can only grow as
the grid is refined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .functionals import circle_distance, moment_matrix, spectral_atoms, density_ratio
from .numerics import (
    DEFAULT_TOLERANCE,
    PencilResult,
    TolerancePolicy,
    generalized_rayleigh_sup,
    pencil_sups,
)
from .operators import as_matrix, defect_squared, is_unitary, unitarity_defect

__all__ = [
    "GridSpec",
    "DEFAULT_GRID",
    "DominationCertificate",
    "MaximalityReport",
    "RELATIONS",
    "z_constant",
    "harnack_constant_poisson",
    "harnack_constant_moment",
    "resolvent_estimate_constant",
    "mobius_z_profile",
    "halperin_constant",
    "sharp_identity_form",
    "sharp_identity_residual",
    "maximality_probe",
    "check_relation",
]


@dataclass(frozen=True)
class GridSpec:
    """Points ``r e^{i theta}`` on circles of the given radii (plus optionally 0).

    Angles are ``2 pi k / angles_per_radius`` merged with ``extra_angles``,
    sorted ascending; the point order is zero first, then by radius, then by
    angle.  Ties in a grid maximum go to the first point in this order.
    """

    radii: tuple = (0.3, 0.6, 0.9, 0.99)
    angles_per_radius: int = 128
    include_zero: bool = True
    extra_angles: tuple = ()

    def __post_init__(self):
        try:
            radii = tuple(float(r) for r in self.radii)
            extra = tuple(float(t) for t in self.extra_angles)
        except (TypeError, ValueError):
            raise InvalidInputError("grid radii and angles must be real numbers") from None
        if not radii:
            raise InvalidInputError("grid needs at least one radius")
        if not all(0 < r < 1 for r in radii):
            raise InvalidInputError(f"grid radii must lie in (0, 1), got {radii}")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise InvalidInputError("grid radii must be strictly ascending")
        if not np.all(np.isfinite(extra)):
            raise InvalidInputError("extra angles must be finite")
        if int(self.angles_per_radius) != self.angles_per_radius or self.angles_per_radius < 8:
            raise InvalidInputError("angles_per_radius must be an integer >= 8")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "extra_angles", extra)
        object.__setattr__(self, "angles_per_radius", int(self.angles_per_radius))
        object.__setattr__(self, "include_zero", bool(self.include_zero))

    def angles(self) -> np.ndarray:
        base = 2 * np.pi * np.arange(self.angles_per_radius) / self.angles_per_radius
        return np.unique(np.mod(np.concatenate([base, self.extra_angles]), 2 * np.pi))

    def circle(self, r: float) -> np.ndarray:
        return r * np.exp(1j * self.angles())

    def points(self) -> np.ndarray:
        parts = [np.zeros(1, dtype=complex)] if self.include_zero else []
        parts += [self.circle(r) for r in self.radii]
        return np.concatenate(parts)

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "angles_per_radius": self.angles_per_radius,
            "include_zero": self.include_zero,
            "extra_angles": list(self.extra_angles),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(
            tuple(d["radii"]),
            d.get("angles_per_radius", 128),
            d.get("include_zero", True),
            tuple(d.get("extra_angles", ())),
        )


DEFAULT_GRID = GridSpec()

RELATIONS = ("harnack_poisson", "harnack_moment", "z", "resolvent", "mobius_z_profile")


def _cvec(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


def _cnum(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class DominationCertificate:
    """Outcome of one domination computation.

    ``witness`` is set when infeasible: a vector (and the grid point or block
    order where it lives) that violates the claimed inequality.
    ``attained_at`` locates the maximizer when feasible.  ``profile`` holds
    per-radius (or per-order, per-point) values; ``extras`` holds
    relation-specific summaries.
    """

    relation: str
    raw_sup: float
    feasible: bool
    grid: dict | None = None
    witness: dict | None = None
    attained_at: dict | None = None
    profile: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def constant(self) -> float:
        return max(1.0, self.raw_sup)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "raw_sup": self.raw_sup,
            "constant": self.constant,
            "feasible": self.feasible,
            "grid": self.grid,
            "witness": self.witness,
            "attained_at": self.attained_at,
            "profile": self.profile,
            "notes": list(self.notes),
            "extras": self.extras,
        }


def _pair(T, Tp):
    A, B = as_matrix(T), as_matrix(Tp)
    if A.shape != B.shape:
        raise InvalidInputError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


def _sqrt(x: float) -> float:
    return float(np.sqrt(x)) if np.isfinite(x) else float("inf")


# --- Z-domination -----------------------------------------------------------


def _z_pencil(A, B, tol) -> tuple[PencilResult, np.ndarray, np.ndarray]:
    E = B - A
    EE = E.conj().T @ E
    D2 = defect_squared(A)
    Dp2 = defect_squared(B)
    return generalized_rayleigh_sup(D2 + EE, Dp2, tol), (D2, EE), Dp2


def z_constant(T, Tp, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> DominationCertificate:
    """Smallest ``c`` with ``||D_T h||^2 + ||(T'-T)h||^2 <= c^2 ||D_{T'} h||^2``.

    Exact (no grid).  ``extras`` also reports the two separate ratios
    ``sup ||D_T h|| / ||D_{T'} h||`` and ``sup ||(T'-T)h|| / ||D_{T'} h||``.
    """
    A, B = _pair(T, Tp)
    p, (D2, EE), Dp2 = _z_pencil(A, B, tol)
    cert = DominationCertificate("z", _sqrt(p.supremum), p.feasible)
    if p.feasible:
        cert.attained_at = {"vector": _cvec(p.witness)}
        parts = [generalized_rayleigh_sup(M, Dp2, tol).supremum for M in (D2, EE)]
        cert.extras = {"defect_ratio": _sqrt(parts[0]), "difference_ratio": _sqrt(parts[1])}
    else:
        cert.witness = {"vector": _cvec(p.witness)}
        cert.notes.append("kernel of D_{T'} is not contained in the kernels of D_T and T - T'")
    return cert


def _z_raw(A, B, tol) -> PencilResult:
    return _z_pencil(A, B, tol)[0]


# --- Harnack domination through Poisson kernels -----------------------------


def _whitener_pd(P: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(P)
    if w[0] <= 0:
        raise InvalidInputError("Poisson factor is not positive definite")
    return V / np.sqrt(w)


def _poisson_circle(A, B, lams, r, chunk=256):
    """Pencil sups of ``(K(A, lam), K(B, lam))`` for ``lam`` on one circle.

    ``K(T, lam) = R* (I - r^2 T*T) R`` with ``R = (I - conj(lam) T)^{-1}``;
    substituting ``h = (I - conj(lam) B) g`` turns the pencil into
    ``(G* P G, P')`` with ``G = R_A (I - conj(lam) B)`` and ``P' = I - r^2 B*B``,
    whose right-hand side does not depend on the angle.
    """
    n = len(A)
    I = np.eye(n)
    PA = I - r * r * A.conj().T @ A
    PB = I - r * r * B.conj().T @ B
    W = _whitener_pd((PB + PB.conj().T) / 2)
    sups = np.empty(len(lams))
    vecs = np.empty((len(lams), n), dtype=complex)
    for s in range(0, len(lams), chunk):
        lc = np.conj(lams[s : s + chunk])[:, None, None]
        G = np.linalg.solve(I - lc * A, (I - lc * B) @ W)
        M = np.conj(np.swapaxes(G, 1, 2)) @ PA @ G
        M = (M + np.conj(np.swapaxes(M, 1, 2))) / 2
        w, V = np.linalg.eigh(M)
        sups[s : s + chunk] = w[:, -1]
        h = (I - lc * B) @ (W @ V[:, :, -1:])
        h = h[:, :, 0]
        vecs[s : s + chunk] = h / np.linalg.norm(h, axis=1, keepdims=True)
    return sups, vecs


def _poisson_scan(A, B, grid: GridSpec):
    """Yield ``(radius or 0, lams, sups, vecs)`` in grid order."""
    if grid.include_zero:
        yield 0.0, np.zeros(1, dtype=complex), np.ones(1), np.eye(len(A), 1, dtype=complex).T
    for r in grid.radii:
        lams = grid.circle(r)
        sups, vecs = _poisson_circle(A, B, lams, r)
        yield r, lams, sups, vecs


def harnack_constant_poisson(
    T, Tp, grid: GridSpec = DEFAULT_GRID, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> DominationCertificate:
    """Grid estimate of the smallest ``c`` with ``K(T, lam) <= c^2 K(T', lam)``.

    ``profile`` lists the running (cumulative) constant after each radius, so
    it is nondecreasing; ``extras["per_radius"]`` has the constant restricted
    to each circle.
    """
    A, B = _pair(T, Tp)
    best, best_lam, best_vec = -np.inf, 0j, None
    profile, per_radius = [], []
    for r, lams, sups, vecs in _poisson_scan(A, B, grid):
        k = int(np.argmax(sups))  # first maximizer in angle order
        if sups[k] > best:
            best, best_lam, best_vec = float(sups[k]), lams[k], vecs[k]
        c_r = _sqrt(max(float(sups[k]), 0.0))
        per_radius.append({"radius": r, "constant": c_r})
        profile.append({"radius": r, "constant": _sqrt(max(best, 0.0))})
    cert = DominationCertificate("harnack_poisson", _sqrt(max(best, 0.0)), True, grid.to_dict())
    cert.attained_at = {"lam": _cnum(best_lam), "vector": _cvec(best_vec)}
    cert.profile = profile
    cert.extras = {"per_radius": per_radius}
    return cert


def harnack_constant_moment(
    T, Tp, n_max: int = 32, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> DominationCertificate:
    """Smallest ``c`` with ``moment_matrix(T, n) <= c^2 moment_matrix(T', n)`` for ``n <= n_max``.

    The supremum is nondecreasing in ``n`` (leading blocks are principal
    submatrices), so it is evaluated on the ladder ``1, 2, 4, ..., n_max``.
    """
    A, B = _pair(T, Tp)
    if int(n_max) != n_max or n_max < 1:
        raise InvalidInputError("n_max must be a positive integer")
    n_max = int(n_max)
    ladder = sorted({2**k for k in range(n_max.bit_length()) if 2**k <= n_max} | {n_max})
    best, best_order, best_vec = -np.inf, 1, None
    profile = []
    for n in ladder:
        p = generalized_rayleigh_sup(moment_matrix(A, n), moment_matrix(B, n), tol)
        if not p.feasible:
            cert = DominationCertificate("harnack_moment", float("inf"), False)
            cert.witness = {"order": n, "vector": _cvec(p.witness)}
            cert.profile = profile + [{"order": n, "constant": float("inf")}]
            cert.notes.append(f"moment pencil infeasible at block order {n}")
            return cert
        if p.supremum > best:
            best, best_order, best_vec = p.supremum, n, p.witness
        profile.append({"order": n, "constant": _sqrt(best)})
    cert = DominationCertificate("harnack_moment", _sqrt(best), True)
    cert.attained_at = {"order": best_order, "vector": _cvec(best_vec)}
    cert.profile = profile
    cert.extras = {"n_max": n_max}
    return cert


# --- resolvent estimate -----------------------------------------------------


def resolvent_estimate_constant(
    T, Tp, grid: GridSpec = DEFAULT_GRID, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> DominationCertificate:
    """Smallest ``c`` with ``||(I - lam T)^{-1}(T - T')h||^2 <= c/(1-|lam|^2) ||D_{T'}h||^2`` on the grid.

    This constant lives on the squared scale: for a Harnack pair with
    constant ``c_H`` it is at most ``c_H^2``.
    """
    A, B = _pair(T, Tp)
    n = len(A)
    I = np.eye(n)
    E = A - B
    Dp2 = defect_squared(B)
    base = generalized_rayleigh_sup(E.conj().T @ E, Dp2, tol)
    if not base.feasible:
        cert = DominationCertificate("resolvent", float("inf"), False, grid.to_dict())
        cert.witness = {"lam": _cnum(0), "vector": _cvec(base.witness)}
        cert.notes.append("kernel of D_{T'} is not contained in the kernel of T - T'")
        return cert
    best, best_lam, best_vec = -np.inf, 0j, None
    profile = []
    circles = ([(0.0, np.zeros(1, dtype=complex))] if grid.include_zero else []) + [
        (r, grid.circle(r)) for r in grid.radii
    ]
    for r, lams in circles:
        RE = np.linalg.solve(I - lams[:, None, None] * A, np.broadcast_to(E, (len(lams), n, n)))
        Ms = np.conj(np.swapaxes(RE, 1, 2)) @ RE
        res = pencil_sups(Ms, Dp2, tol)
        vals = np.array([(1 - r * r) * p.supremum for p in res])
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, best_lam, best_vec = float(vals[k]), lams[k], res[k].witness
        profile.append({"radius": r, "constant": max(best, 0.0)})
    cert = DominationCertificate("resolvent", max(best, 0.0), True, grid.to_dict())
    cert.attained_at = {"lam": _cnum(best_lam), "vector": _cvec(best_vec)}
    cert.profile = profile
    return cert


# --- Mobius profile -----------------------------------------------------------


def _mobius(M: np.ndarray, lam: complex) -> np.ndarray:
    I = np.eye(len(M))
    return np.linalg.solve(I - np.conj(lam) * M, M - lam * I)


def mobius_z_profile(
    T, Tp, grid: GridSpec = DEFAULT_GRID, tol: TolerancePolicy = DEFAULT_TOLERANCE
) -> DominationCertificate:
    """Z-constants of the Mobius transforms ``(T_lam, T'_lam)`` over the grid.

    ``raw_sup`` is the largest raw Z-constant; ``extras["implied_harnack_bound"]``
    is ``sqrt(3)`` times the clamped value, an upper bound for the Harnack
    constant when the profile is uniform over the disc.
    """
    A, B = _pair(T, Tp)
    best, best_lam, best_vec = -np.inf, 0j, None
    profile = []
    for lam in grid.points():
        p = _z_raw(_mobius(A, lam), _mobius(B, lam), tol)
        if not p.feasible:
            cert = DominationCertificate("mobius_z_profile", float("inf"), False, grid.to_dict())
            cert.witness = {"lam": _cnum(lam), "vector": _cvec(p.witness)}
            cert.profile = profile + [{"lam": _cnum(lam), "raw": float("inf")}]
            cert.extras = {"implied_harnack_bound": float("inf")}
            cert.notes.append("Mobius transforms fail the Z kernel condition")
            return cert
        c = _sqrt(p.supremum)
        profile.append({"lam": _cnum(lam), "raw": c})
        if c > best:
            best, best_lam, best_vec = c, lam, p.witness
    cert = DominationCertificate("mobius_z_profile", best, True, grid.to_dict())
    cert.attained_at = {"lam": _cnum(best_lam), "vector": _cvec(best_vec)}
    cert.profile = profile
    cert.extras = {"implied_harnack_bound": float(np.sqrt(3) * max(1.0, best))}
    return cert


# --- Halperin constant, sharp identity ---------------------------------------


def halperin_constant(A, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> PencilResult:
    """Smallest ``K`` with ``||x - Ax||^2 <= K (||x||^2 - ||Ax||^2)``.

    Equals the squared Z-constant of the pair ``(I, A)``.
    """
    Am = as_matrix(A)
    F = np.eye(len(Am)) - Am
    return generalized_rayleigh_sup(F.conj().T @ F, defect_squared(Am), tol)


def sharp_identity_form(T, Tp, c: float, lam) -> np.ndarray:
    """Hermitian ``Q`` with ``<Q h, h>`` equal to :func:`sharp_identity_residual`.

    With ``R = (I - lam T)^{-1}``, ``E = T - T'``, ``G = R (I - lam T')`` and
    ``s = 1 - |lam|^2``::

        Q = (c^2 - 1)/s D_{T'}^2 - E* R* R E - (1 - 1/c^2)/s G* D_T^2 G
    """
    A, B = _pair(T, Tp)
    lam = complex(lam)
    if abs(lam) >= 1:
        raise InvalidInputError("lam must lie in the open unit disc")
    if not c >= 1:
        raise InvalidInputError("c must be >= 1")
    I = np.eye(len(A))
    R = np.linalg.inv(I - lam * A)
    RE = R @ (A - B)
    G = R @ (I - lam * B)
    s = 1 - abs(lam) ** 2
    Q = (c * c - 1) / s * defect_squared(B) - RE.conj().T @ RE - (1 - 1 / c**2) / s * (
        G.conj().T @ defect_squared(A) @ G
    )
    return (Q + Q.conj().T) / 2


def sharp_identity_residual(T, Tp, c: float, lam, h) -> float:
    """Right side minus left side of the two-sided resolvent inequality.

    ``(c^2-1)/(1-|lam|^2) (||h||^2 - ||T'h||^2)`` minus
    ``||(I - lam T)^{-1}(T - T')h||^2 + (1 - 1/c^2)/(1-|lam|^2) (||z||^2 - ||Tz||^2)``
    where ``z = (I - lam T)^{-1}(I - lam T')h``.  Nonnegative for all
    ``(lam, h)`` exactly when ``c`` is a Harnack constant of the pair.
    """
    A, B = _pair(T, Tp)
    lam = complex(lam)
    if abs(lam) >= 1:
        raise InvalidInputError("lam must lie in the open unit disc")
    if not c >= 1:
        raise InvalidInputError("c must be >= 1")
    h = np.asarray(h, dtype=complex).ravel()
    I = np.eye(len(A))
    R = np.linalg.inv(I - lam * A)
    z = R @ (I - lam * B) @ h
    s = 1 - abs(lam) ** 2
    sq = lambda v: float(np.vdot(v, v).real)
    lhs = sq(R @ (A - B) @ h) + (1 - 1 / c**2) / s * (sq(z) - sq(A @ z))
    rhs = (c * c - 1) / s * (sq(h) - sq(B @ h))
    return rhs - lhs


# --- maximality probe ---------------------------------------------------------


@dataclass
class MaximalityReport:
    status: str  # "equal operators" or "probed"
    radii: tuple = ()
    constants: tuple = ()
    lower_bound: float = 0.0
    lower_bound_profile: list = field(default_factory=list)
    largest_grid_constant: float = 0.0
    monotone: bool = False
    growth: float = 1.0
    divergence: bool = False
    threshold: float = 10.0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "radii": list(self.radii),
            "constants": list(self.constants),
            "lower_bound": self.lower_bound,
            "lower_bound_profile": self.lower_bound_profile,
            "largest_grid_constant": self.largest_grid_constant,
            "monotone": self.monotone,
            "growth": self.growth,
            "divergence": self.divergence,
            "threshold": self.threshold,
        }


def _density_lower_bound(U, T, tol, eps_list):
    """Lower bounds on the Harnack constant of ``(T, U)`` from atoms of ``U``.

    For ``y = (U - T)h`` the spectral measure of ``y`` satisfies
    ``mu_y([t-eps, t+eps]) / (2 eps) <= c^2 ||h||^2``.  For each eigenspace
    projection ``P`` of ``U`` the best ``h`` is the top right singular vector
    of ``P (U - T)``.
    """
    from .functionals import _unitary_eig

    ev, Z = _unitary_eig(U)
    angles = np.mod(np.angle(ev), 2 * np.pi)
    seen, atoms = [], []
    for t in angles:
        if not any(circle_distance(t, s) <= tol.rank_rtol for s in seen):
            seen.append(t)
            cols = circle_distance(angles, t) <= tol.rank_rtol
            atoms.append((t, Z[:, cols]))
    F = U - T
    rows = []
    for eps in eps_list:
        best = 0.0
        for t, Q in atoms:
            _, s, Vh = np.linalg.svd(Q.conj().T @ F)
            h = Vh[0].conj()
            mu = spectral_atoms(U, F @ h, tol)
            best = max(best, density_ratio(mu, t, eps) / float(np.vdot(h, h).real))
        rows.append({"eps": eps, "bound": float(np.sqrt(best))})
    return rows


def maximality_probe(
    U,
    T,
    radii: Sequence[float] = (0.9, 0.99, 0.999, 0.9999),
    angles_per_radius: int = 128,
    threshold: float = 10.0,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
) -> MaximalityReport:
    """Probe whether ``T`` is Harnack dominated by the unitary ``U``.

    Finite unitaries have atomic spectrum, so no ``T != U`` is dominated by
    them and the grid constants of ``(T, U)`` must blow up near the circle.
    The grid is augmented with the eigenangles of ``U`` (where the Poisson
    kernel of ``U`` peaks).  Divergence is flagged when the per-radius
    constants are nondecreasing, the last exceeds ``threshold`` times the
    first, and the density-ratio lower bound exceeds every grid constant.
    """
    Um, Tm = _pair(U, T)
    if not is_unitary(Um, tol):
        raise InvalidInputError(f"U is not unitary (||U*U - I|| = {unitarity_defect(Um):.3e})")
    if np.max(np.abs(Um - Tm)) <= tol.atol:
        return MaximalityReport("equal operators", tuple(radii), threshold=threshold)
    eig_angles = np.mod(np.angle(np.linalg.eigvals(Um)), 2 * np.pi)
    grid = GridSpec(tuple(radii), angles_per_radius, False, tuple(eig_angles))
    cert = harnack_constant_poisson(Tm, Um, grid, tol)
    constants = tuple(p["constant"] for p in cert.extras["per_radius"])
    eps_list = [10.0**-k for k in range(1, 17)]
    lb_rows = _density_lower_bound(Um, Tm, tol, eps_list)
    lower = lb_rows[-1]["bound"]
    largest = max(constants)
    monotone = all(b >= a for a, b in zip(constants, constants[1:]))
    growth = constants[-1] / constants[0] if constants[0] > 0 else float("inf")
    divergence = monotone and growth > threshold and lower > largest
    return MaximalityReport(
        "probed", tuple(grid.radii), constants, lower, lb_rows, largest, monotone, growth,
        divergence, threshold,
    )


# --- dispatcher ---------------------------------------------------------------


def check_relation(
    T,
    Tp,
    relation: str,
    grid: GridSpec = DEFAULT_GRID,
    order: int = 32,
    cap: float = 1e6,
    tol: TolerancePolicy = DEFAULT_TOLERANCE,
) -> DominationCertificate:
    """Certificate for ``relation`` in {harnack, z, resolvent, moment, mobius}.

    Harnack domination implies Z-domination with the same constant, so for
    ``harnack`` and ``moment`` the exact Z kernel condition is checked too:
    if it fails the pair is reported infeasible whatever the grid says.  Any
    constant above ``cap`` is also reported infeasible.
    """
    if relation == "z":
        cert = z_constant(T, Tp, tol)
    elif relation == "resolvent":
        cert = resolvent_estimate_constant(T, Tp, grid, tol)
    elif relation == "mobius":
        cert = mobius_z_profile(T, Tp, grid, tol)
    elif relation in ("harnack", "moment"):
        if relation == "harnack":
            cert = harnack_constant_poisson(T, Tp, grid, tol)
        else:
            cert = harnack_constant_moment(T, Tp, order, tol)
        z = z_constant(T, Tp, tol)
        cert.extras["z_constant"] = z.raw_sup
        if not z.feasible and cert.feasible:
            cert.extras["grid_constant"] = cert.raw_sup
            cert.feasible = False
            cert.raw_sup = float("inf")
            cert.witness = dict(z.witness, source="z")
            cert.notes.append("Z-domination fails, which rules out Harnack domination")
    else:
        raise InvalidInputError(
            f"unknown relation {relation!r}; expected harnack, z, resolvent, moment or mobius"
        )
    if cert.feasible and cert.constant > cap:
        cert.feasible = False
        cert.notes.append(f"constant {cert.constant:.6g} exceeds cap {cap:g}")
    cert.extras["cap"] = cap
    return cert

"""Named property suites over seeded random cases.

Case ``i`` of a run with seed ``s`` draws from
``numpy.random.default_rng(SeedSequence([s, i]))``, so cases are independent
and any case can be replayed on its own.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .classify import (
    asymptotic_inequality_check,
    classify_contraction,
    katznelson_tzafriri,
    kernel_range_report,
    peripheral_distance,
    spectral_report,
    unitary_part,
)
from .domination import (
    GridSpec,
    check_relation,
    halperin_constant,
    harnack_constant_moment,
    harnack_constant_poisson,
    maximality_probe,
    mobius_z_profile,
    resolvent_estimate_constant,
    sharp_identity_form,
    sharp_identity_residual,
    z_constant,
)
from .errors import HarnackError, InvalidInputError
from .functionals import cesaro_mean, ergodic_projection, hilbert_transform_partial
from .generators import (
    EXTENDED_GRID_RADII,
    capped_contraction,
    certified_pair,
    haar_unitary,
    random_projection,
)
from .numerics import DEFAULT_TOLERANCE, TolerancePolicy, generalized_rayleigh_sup, psd_check
from .operators import block_shift_perturbation, rank_one_perturbed_unitary, truncated_shift, weighted_cyclic_shift

__all__ = ["CaseRecord", "SuiteReport", "SUITES", "run_suite", "t_alpha_closed_form", "inputs_digest"]

EXTENDED_GRID = GridSpec(EXTENDED_GRID_RADII)
DEFAULT_GRID = GridSpec()
T_ALPHA_VALUES = (0.0, 0.3, 0.6j)


@dataclass
class CaseRecord:
    case_id: int
    inputs_digest: str
    verdict: bool
    metrics: dict
    tolerances: dict

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "inputs_digest": self.inputs_digest,
            "verdict": "pass" if self.verdict else "fail",
            "metrics": self.metrics,
            "tolerances": self.tolerances,
        }


@dataclass
class SuiteReport:
    suite_name: str
    seed: int
    anchor: str
    cases: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)

    @property
    def passed(self) -> int:
        return sum(c.verdict for c in self.cases)

    @property
    def failed(self) -> int:
        return len(self.cases) - self.passed

    @property
    def all_passed(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> dict:
        return {
            "suite_name": self.suite_name,
            "seed": self.seed,
            "anchor": self.anchor,
            "cases": [c.to_dict() for c in sorted(self.cases, key=lambda c: c.case_id)],
            "summary": {"passed": self.passed, "failed": self.failed, "total": len(self.cases)},
            "environment": self.environment,
        }


def inputs_digest(*mats) -> str:
    h = hashlib.sha256()
    for M in mats:
        M = np.ascontiguousarray(np.asarray(M, dtype=np.complex128))
        h.update(str(M.shape).encode())
        h.update(M.tobytes())
    return h.hexdigest()


def t_alpha_closed_form(a: complex, b: complex) -> float:
    """Constant for the pair ``(T(a), T(b))`` from the infinite-dimensional model."""
    return float(np.sqrt((abs(a - b) ** 2 + 1 - abs(a) ** 2) / (1 - abs(b) ** 2)))


# each case function returns (inputs, checks, metrics, thresholds) where checks
# is a dict of named booleans; the case passes when all checks hold


def _certify(T, Tp, tol):
    cert = check_relation(T, Tp, "harnack", EXTENDED_GRID, tol=tol)
    return cert.feasible, cert.constant


def _crosscheck(rng, tol):
    p = certified_pair(rng)
    ok, cH = _certify(p.T, p.Tp, tol)
    cP = harnack_constant_poisson(p.T, p.Tp, DEFAULT_GRID, tol).constant
    cM = harnack_constant_moment(p.T, p.Tp, 32, tol).constant
    z = z_constant(p.T, p.Tp, tol)
    rel = abs(cP - cM) / cM
    checks = {"certified": ok, "agreement": rel <= 0.05, "z_below_harnack": z.raw_sup <= cH * (1 + 1e-8)}
    metrics = {"kind": p.kind, "poisson": cP, "moment": cM, "relative_gap": rel, "z": z.raw_sup, "harnack": cH}
    return (p.T, p.Tp), checks, metrics, {"relative_gap": 0.05}


def _z_suite(rng, tol):
    p = certified_pair(rng)
    ok, cH = _certify(p.T, p.Tp, tol)
    z = z_constant(p.T, p.Tp, tol)
    # projections: Z-domination of P by Q holds iff Q <= P
    n = int(rng.integers(2, 9))
    P = random_projection(rng, n, int(rng.integers(1, n + 1)))
    if rng.random() < 0.5:
        w, V = np.linalg.eigh(P)
        R = V[:, w > 0.5]
        k = R.shape[1]
        Qb = R @ haar_unitary(rng, k)[:, : int(rng.integers(0, k + 1))]
        Q = Qb @ Qb.conj().T
    else:
        Q = random_projection(rng, n, int(rng.integers(1, n + 1)))
    order = psd_check(P - Q, tol).is_psd
    zproj = z_constant(P, Q, tol).feasible
    # positive contractions: Z-domination iff the pencil (I - A^2, I - A'^2) is feasible
    m = int(rng.integers(2, 7))
    W = haar_unitary(rng, m)
    wp = rng.uniform(0, 1, m)
    wp[rng.random(m) < 0.4] = 1.0
    w = np.where((wp == 1.0) & (rng.random(m) < 0.6), 1.0, rng.uniform(0, 1, m))
    Ap = (W * wp) @ W.conj().T
    A = (W * w) @ W.conj().T
    I = np.eye(m)
    kss = generalized_rayleigh_sup(I - A @ A, I - Ap @ Ap, tol).feasible
    zkss = z_constant(A, Ap, tol).feasible
    checks = {
        "certified": ok,
        "z_feasible": z.feasible,
        "z_below_harnack": z.raw_sup <= cH * (1 + 1e-8),
        "projection_order": zproj == order,
        "positive_pencil": kss == zkss,
    }
    metrics = {"kind": p.kind, "z": z.raw_sup, "harnack": cH, "projection_nested": order, "positive_feasible": kss}
    return (p.T, p.Tp, P, Q, A, Ap), checks, metrics, {"relative": 1e-8}


def _mobius_suite(rng, tol):
    p = certified_pair(rng)
    ok, cH = _certify(p.T, p.Tp, tol)
    mz = mobius_z_profile(p.T, p.Tp, DEFAULT_GRID, tol)
    s = mz.constant
    checks = {
        "certified": ok,
        "profile_feasible": mz.feasible,
        "lower": s <= cH * (1 + 1e-6),
        "upper": cH <= np.sqrt(3) * s * (1 + 1e-6),
    }
    return (p.T, p.Tp), checks, {"kind": p.kind, "profile_sup": s, "harnack": cH}, {"relative": 1e-6}


def _resolvent_suite(rng, tol):
    p = certified_pair(rng)
    ok, cH = _certify(p.T, p.Tp, tol)
    res = resolvent_estimate_constant(p.T, p.Tp, EXTENDED_GRID, tol)
    pts = EXTENDED_GRID.points()
    # two-sided identity: nonnegative just above the certified constant
    c_hi = 1.001 * cH
    worst = min(
        np.linalg.eigvalsh(sharp_identity_form(p.T, p.Tp, c_hi, lam))[0]
        / max(1.0, (c_hi**2 - 1) / (1 - abs(lam) ** 2))
        for lam in pts
    )
    checks = {
        "certified": ok,
        "resolvent_feasible": res.feasible,
        "resolvent_below_square": res.raw_sup <= cH**2 * (1 + 1e-8),
        "identity_nonnegative": worst >= -tol.atol,
    }
    metrics = {"kind": p.kind, "resolvent": res.raw_sup, "harnack": cH, "identity_min": worst}
    if cH > 1.05:
        c_lo = max(1.0, 0.95 * cH)
        best = None
        for lam in pts:
            w, V = np.linalg.eigh(sharp_identity_form(p.T, p.Tp, c_lo, lam))
            if best is None or w[0] < best[0]:
                best = (w[0], lam, V[:, 0])
        r = sharp_identity_residual(p.T, p.Tp, c_lo, best[1], best[2])
        checks["identity_refutes_low_constant"] = r < 0
        metrics["low_constant_residual"] = r
    return (p.T, p.Tp), checks, metrics, {"atol": tol.atol, "identity_slack": 1.001, "low_factor": 0.95}


def _te39_suite(rng, tol):
    p = certified_pair(rng)
    ok, cH = _certify(p.T, p.Tp, tol)
    kr = kernel_range_report(p.T, p.Tp, tol)
    n = len(p.T)
    I = np.eye(n)
    # series sum_k a_k T^k (T - T') h with a square-summable sequence a
    N = 400
    a = rng.standard_normal(N + 1) / np.arange(1, N + 2)
    h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v = (p.T - p.Tp) @ h
    partial = np.zeros((N + 1, n), dtype=complex)
    acc = np.zeros(n, dtype=complex)
    for k in range(N + 1):
        acc = acc + a[k] * v
        partial[k] = acc
        v = p.T @ v
    series_tail = float(np.max(np.linalg.norm(partial[N] - partial[N // 2 - 1 : N], axis=1)))
    # Hilbert transform and Cesaro means on R(I - T)
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = (I - p.T) @ y
    tails = [hilbert_transform_partial(p.T, x, N).tail for N in (1000, 4000)]
    logmean = [np.log(m) * np.linalg.norm(cesaro_mean(p.T, m) @ x) for m in (100, 1000, 10000)]
    PT = ergodic_projection(p.T, tol)
    ces = [np.linalg.norm(cesaro_mean(p.T, m) - PT, 2) for m in (1000, 4000)]
    checks = {
        "certified": ok,
        "kernels_equal": kr.max_principal_angle <= 1e-8,
        "range_contained": kr.range_contained,
        "decomposition": kr.decomposition_residual <= 1e-8,
        "series_cauchy": series_tail < 1e-8,
        "hilbert_tail_shrinks": tails[1] <= tails[0] + tol.atol,
        "log_cesaro_decay": logmean[0] > logmean[1] > logmean[2] or logmean[0] <= tol.atol,
        "cesaro_to_projection": ces[1] <= ces[0] + tol.atol,
    }
    metrics = {
        "kind": p.kind,
        "kernel_dims": list(kr.kernel_dims),
        "max_angle": kr.max_principal_angle,
        "range_residual": kr.range_residual,
        "decomposition_residual": kr.decomposition_residual,
        "series_tail": series_tail,
        "hilbert_tails": tails,
        "log_cesaro": logmean,
        "cesaro_gap": ces,
    }
    return (p.T, p.Tp), checks, metrics, {"angle": 1e-8, "series_tail": 1e-8}


def _pr812_suite(rng, tol):
    p = certified_pair(rng)
    ok, _ = _certify(p.T, p.Tp, tol)
    s, sp = spectral_report(p.T, tol), spectral_report(p.Tp, tol)
    dist = peripheral_distance(s.peripheral, sp.peripheral, tol)
    pdist = peripheral_distance(s.point_peripheral, sp.point_peripheral, tol)
    Hu, Hup = unitary_part(p.T, tol), unitary_part(p.Tp, tol)
    incl = float(np.linalg.norm(Hup - Hu @ (Hu.conj().T @ Hup), 2)) if Hup.shape[1] else 0.0
    agree = float(np.linalg.norm((p.T - p.Tp) @ Hup, 2)) if Hup.shape[1] else 0.0
    checks = {
        "certified": ok,
        "peripheral_match": dist <= 1e-6,
        "point_peripheral_match": pdist <= 1e-6,
        "unitary_part_inclusion": incl <= 1e-8,
        "equal_on_unitary_part": agree <= 1e-8,
    }
    metrics = {
        "kind": p.kind,
        "peripheral_distance": dist,
        "peripheral_count": len(s.peripheral),
        "unitary_dims": [Hu.shape[1], Hup.shape[1]],
        "inclusion_residual": incl,
        "agreement_residual": agree,
    }
    return (p.T, p.Tp), checks, metrics, {"peripheral": 1e-6, "subspace": 1e-8}


def _pr11_suite(rng, tol):
    p = certified_pair(rng)
    ok, cH = _certify(p.T, p.Tp, tol)
    r = asymptotic_inequality_check(p.T, p.Tp, cH, 500, int(rng.integers(2**31)), tol)
    checks = {
        "certified": ok,
        "inequality": r.max_violation <= 1e-8,
        "kernel_inclusion": r.kernel_inclusion_residual <= 1e-8,
        "equal_on_isometric_part": r.agreement_residual <= 1e-8,
        "limit_pencil_feasible": r.z_feasible,
    }
    metrics = dict(r.to_dict(), kind=p.kind, harnack=cH)
    return (p.T, p.Tp), checks, metrics, {"violation": 1e-8, "subspace": 1e-8}


def _pr14_suite(rng, tol):
    p = certified_pair(rng)
    ok, _ = _certify(p.T, p.Tp, tol)
    f, fp = classify_contraction(p.T, tol), classify_contraction(p.Tp, tol)
    r, rp = spectral_report(p.T, tol).spectral_radius, spectral_report(p.Tp, tol).spectral_radius
    band = tol.peripheral_band
    checks = {
        "certified": ok,
        "c_0dot_equal": f.c_0dot == fp.c_0dot,
        "c_dot0_equal": f.c_dot0 == fp.c_dot0,
        "c_00_iff_radius": f.c_00 == (r < 1 - band) and fp.c_00 == (rp < 1 - band),
    }
    metrics = {"kind": p.kind, "flags": f.to_dict(), "flags_rhs": fp.to_dict(), "radii": [r, rp]}
    return (p.T, p.Tp), checks, metrics, {"peripheral_band": band}


def kt_sample(rng) -> np.ndarray:
    """Contraction from the norm-capped or the spectrum-shifted family."""
    if rng.random() < 0.5:
        n = int(rng.integers(1, 13))
        return capped_contraction(rng, n, rng.uniform(0.5, 0.99))
    k = int(rng.integers(1, 4))
    m = int(rng.integers(1, 10))
    theta = rng.uniform(0.1, 2 * np.pi - 0.1, k)
    theta[rng.random(k) < 0.5] = 0.0
    A = capped_contraction(rng, m, rng.uniform(0.3, 0.9))
    D = np.block([[A, np.zeros((m, k))], [np.zeros((k, m)), np.diag(np.exp(1j * theta))]])
    W = haar_unitary(rng, m + k)
    return W @ D @ W.conj().T


def _kt_suite(rng, tol):
    T = kt_sample(rng)
    r = katznelson_tzafriri(T, 10**4, 1e-6)
    checks = {"verdicts_agree": r.agree}
    metrics = {"final": r.final, "limit": r.limit_verdict, "spectral": r.spectral_verdict}
    return (T,), checks, metrics, {"threshold": 1e-6, "n_max": 10**4}


def halperin_sample(rng, which: int) -> np.ndarray:
    """``which`` 0: zero, 1: ``diag(a)`` with ``a`` in [0, 0.9], 2: norm-one nilpotent."""
    if which == 0:
        return np.zeros((1, 1), dtype=complex)
    if which == 1:
        return np.array([[rng.uniform(0, 0.9)]], dtype=complex)
    m = int(rng.integers(2, 4))
    W = haar_unitary(rng, m)
    return W @ np.eye(m, k=1) @ W.conj().T


def _halperin_suite(rng, tol, case_id):
    which = case_id % 3
    A = halperin_sample(rng, which)
    m = len(A)
    n = 16
    S = truncated_shift(n, m, tol).entries
    Ta = block_shift_perturbation(A, n, tol).entries
    res = resolvent_estimate_constant(S, Ta, DEFAULT_GRID, tol)
    hal = halperin_constant(A, tol)
    checks = {"feasibility_match": res.feasible == hal.feasible}
    metrics = {"which": ["zero", "diagonal", "nilpotent"][which], "resolvent": res.raw_sup, "halperin": hal.supremum}
    if which < 2:
        a = A[0, 0].real
        K = (1 - a) / (1 + a)
        metrics["closed_form"] = K
        checks["tracks_closed_form"] = abs(res.raw_sup - K) <= 0.1 * K
    return (A,), checks, metrics, {"relative": 0.1}


T_ALPHA_GRID = GridSpec((0.3, 0.6, 0.9, 0.95))
T_ALPHA_COARSE = GridSpec((0.3, 0.6, 0.9), 64)


def _t_alpha_suite(rng, tol, case_id):
    pairs = [(a, b) for a in T_ALPHA_VALUES for b in T_ALPHA_VALUES if a != b]
    a, b = pairs[case_id % len(pairs)]
    n = 64
    T, Tp = weighted_cyclic_shift(n, a, tol).entries, weighted_cyclic_shift(n, b, tol).entries
    fwd = check_relation(T, Tp, "harnack", T_ALPHA_GRID, tol=tol)
    bwd = check_relation(Tp, T, "harnack", T_ALPHA_GRID, tol=tol)
    coarse = harnack_constant_poisson(T, Tp, T_ALPHA_COARSE, tol).constant
    mz = mobius_z_profile(T, Tp, T_ALPHA_GRID, tol)
    target = t_alpha_closed_form(a, b)
    prof = [q["constant"] for q in fwd.profile]
    checks = {
        "finite_both_ways": fwd.feasible and bwd.feasible,
        "profile_near_closed_form": abs(mz.constant - target) <= 0.1 * target,
        "refinement_monotone": fwd.constant >= coarse and all(y >= x for x, y in zip(prof, prof[1:])),
    }
    metrics = {
        "alpha": a,
        "alpha_ref": b,
        "harnack": fwd.constant,
        "harnack_reverse": bwd.constant,
        "profile_sup": mz.constant,
        "closed_form": target,
        "coarse": coarse,
    }
    return (T, Tp), checks, metrics, {"relative": 0.1}


def maximality_sample(rng):
    n = int(rng.integers(2, 9))
    U = haar_unitary(rng, n)
    if rng.random() < 0.5:
        T = capped_contraction(rng, n, rng.uniform(0.3, 1.0))
    else:
        xi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        alpha = rng.uniform(0, 0.95) * np.exp(2j * np.pi * rng.uniform())
        T = rank_one_perturbed_unitary(U, xi / np.linalg.norm(xi), alpha).entries
    return U, T


def _maximality_suite(rng, tol):
    U, T = maximality_sample(rng)
    r = maximality_probe(U, T, tol=tol)
    checks = {"divergence": r.divergence, "bound_beats_first_radius": r.lower_bound > r.constants[0]}
    metrics = {"constants": list(r.constants), "growth": r.growth, "lower_bound": r.lower_bound}
    return (U, T), checks, metrics, {"growth_threshold": r.threshold}


@dataclass(frozen=True)
class Suite:
    anchor: str
    default_cases: int
    run: Callable
    wants_id: bool = False


SUITES: dict[str, Suite] = {
    "thm1.1-crosscheck": Suite(
        "Poisson-kernel and moment-matrix criteria for Harnack domination yield the same constant", 50, _crosscheck
    ),
    "thm1.2-z": Suite(
        "Harnack domination implies Z-domination with the same constant; projections and positive contractions",
        50,
        _z_suite,
    ),
    "thm1.3-mobius": Suite(
        "Harnack constant sandwiched between the Mobius Z-profile and sqrt(3) times it", 50, _mobius_suite
    ),
    "thm-res-resolvent": Suite(
        "resolvent estimate from Harnack domination and its two-sided sharp form", 50, _resolvent_suite
    ),
    "te39-kernels": Suite(
        "equal fixed spaces, range inclusion, convergent perturbation series, Hilbert transform domain",
        50,
        _te39_suite,
    ),
    "pr812-spectrum": Suite("equal peripheral spectra and nested unitary parts", 50, _pr812_suite),
    "pr11-asymptotic": Suite(
        "inequality between asymptotic limits and Z-domination of their square roots", 50, _pr11_suite
    ),
    "pr14-classes": Suite("asymptotic classes C_0. and C_.0 preserved by Harnack domination", 50, _pr14_suite),
    "co47-kt": Suite("powers times (T - I) tend to zero iff the spectrum lies in the disc plus {1}", 100, _kt_suite),
    "halperin-example": Suite(
        "block shift perturbed by A meets the resolvent bound exactly when A has a finite Halperin constant",
        9,
        _halperin_suite,
        True,
    ),
    "t-alpha-family": Suite(
        "weighted cyclic shifts with different weights bound each other's Poisson kernels near the closed-form constants", 6, _t_alpha_suite, True
    ),
    "maximality": Suite(
        "Poisson-kernel ratios against a finite unitary blow up near the circle, so it dominates nothing else", 20, _maximality_suite
    ),
}


def run_suite(name: str, seed: int, cases: int | None = None, tol: TolerancePolicy = DEFAULT_TOLERANCE) -> SuiteReport:
    if name not in SUITES:
        raise InvalidInputError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    suite = SUITES[name]
    cases = suite.default_cases if cases is None else int(cases)
    if cases < 1:
        raise InvalidInputError("cases must be >= 1")
    report = SuiteReport(name, int(seed), suite.anchor, environment={"version": __version__, "tolerances": tol.to_dict()})
    for i in range(cases):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), i]))
        try:
            out = suite.run(rng, tol, i) if suite.wants_id else suite.run(rng, tol)
        except HarnackError as exc:
            report.cases.append(CaseRecord(i, "", False, {"error": f"{type(exc).__name__}: {exc}"}, {}))
            continue
        inputs, checks, metrics, thresholds = out
        checks = {k: bool(v) for k, v in checks.items()}
        metrics = dict(metrics, checks=checks)
        report.cases.append(CaseRecord(i, inputs_digest(*inputs), all(checks.values()), metrics, thresholds))
    return report

"""Seeded generators of test operators and of pairs with certified domination.

Certified pairs are built so that Harnack domination holds by construction:

* ``strict``: two contractions with norm at most 0.6 (every strict
  contraction is Harnack equivalent to 0, hence to every other one);
* ``zero``: a strict contraction against 0;
* ``unitary_part``: ``W (A (+) U) W*`` against ``W (A' (+) U) W*`` with
  ``A, A'`` strict, ``U`` a diagonal unitary (often containing 1) and ``W`` a
  random unitary, so the pair shares a nontrivial unitary part.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "haar_unitary",
    "ginibre",
    "capped_contraction",
    "random_projection",
    "psd_contraction",
    "CertifiedPair",
    "certified_pair",
    "EXTENDED_GRID_RADII",
]

# radii used when a grid constant must be close to the supremum over the disc
EXTENDED_GRID_RADII = (0.3, 0.6, 0.9, 0.99, 0.999, 0.9999)


def ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(ginibre(rng, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def capped_contraction(rng: np.random.Generator, n: int, cap: float) -> np.ndarray:
    U, s, Vh = np.linalg.svd(ginibre(rng, n))
    return (U * np.minimum(s, cap)) @ Vh


def random_projection(rng: np.random.Generator, n: int, rank: int) -> np.ndarray:
    Q = haar_unitary(rng, n)[:, :rank]
    return Q @ Q.conj().T


def psd_contraction(rng: np.random.Generator, n: int, top: float = 1.0) -> np.ndarray:
    """Hermitian ``0 <= A <= top`` with random eigenvalues, some possibly equal to ``top``."""
    Q = haar_unitary(rng, n)
    w = rng.uniform(0, top, n)
    w[rng.random(n) < 0.3] = top
    return (Q * w) @ Q.conj().T


@dataclass(frozen=True)
class CertifiedPair:
    kind: str
    T: np.ndarray
    Tp: np.ndarray


def certified_pair(rng: np.random.Generator, max_dim: int = 12, kind: str | None = None) -> CertifiedPair:
    """A pair ``(T, T')`` with ``T`` Harnack dominated by ``T'`` by construction."""
    kinds = ("strict", "zero", "unitary_part")
    kind = kind or kinds[int(rng.integers(len(kinds)))]
    if kind == "strict":
        n = int(rng.integers(2, max_dim + 1))
        T = capped_contraction(rng, n, rng.uniform(0.2, 0.6))
        Tp = capped_contraction(rng, n, rng.uniform(0.2, 0.6))
    elif kind == "zero":
        n = int(rng.integers(1, max_dim + 1))
        T = capped_contraction(rng, n, rng.uniform(0.2, 0.6))
        Tp = np.zeros((n, n), dtype=complex)
    elif kind == "unitary_part":
        k = int(rng.integers(1, 4))
        m = int(rng.integers(1, max_dim - k + 1))
        theta = rng.uniform(0.1, 2 * np.pi - 0.1, k)
        if rng.random() < 0.7:
            theta[0] = 0.0
        U = np.diag(np.exp(1j * theta))
        A = capped_contraction(rng, m, rng.uniform(0.2, 0.6))
        Ap = capped_contraction(rng, m, rng.uniform(0.2, 0.6))
        W = haar_unitary(rng, m + k)
        blk = lambda X: np.block([[X, np.zeros((m, k))], [np.zeros((k, m)), U]])
        T = W @ blk(A) @ W.conj().T
        Tp = W @ blk(Ap) @ W.conj().T
    else:
        raise ValueError(f"unknown pair kind {kind!r}")
    return CertifiedPair(kind, T, Tp)

import numpy as np
import pytest

from harnack.classify import (
    asymptotic_inequality_check,
    classify_contraction,
    katznelson_tzafriri,
    kernel_range_report,
    peripheral_distance,
    spectral_report,
    unitary_part,
)
from harnack.errors import InvalidInputError
from harnack.generators import capped_contraction, certified_pair, haar_unitary
from harnack.operators import cyclic_shift, truncated_shift, weighted_cyclic_shift


class TestSpectralReport:
    def test_cyclic_shift(self):
        s = spectral_report(cyclic_shift(4))
        roots = np.exp(2j * np.pi * np.arange(4) / 4)
        assert len(s.peripheral) == 4 and s.spectral_radius == pytest.approx(1.0)
        assert peripheral_distance(s.peripheral, roots) < 1e-12

    def test_nilpotent(self):
        s = spectral_report(truncated_shift(4, 1))
        assert np.allclose(s.eigenvalues, 0, atol=1e-3) and s.peripheral == ()
        assert s.spectral_radius < 1e-3

    def test_weighted(self):
        s = spectral_report(weighted_cyclic_shift(4, 0.5))
        assert s.spectral_radius == pytest.approx(0.5**0.25, rel=1e-12)

    def test_invariants(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            T = capped_contraction(rng, 6, 1.0)
            s = spectral_report(T)
            assert set(s.peripheral) <= set(s.eigenvalues)
            assert s.spectral_radius == pytest.approx(max(abs(z) for z in s.eigenvalues))


class TestPeripheralDistance:
    def test_sizes(self):
        assert peripheral_distance([1], [1, -1]) == np.inf
        assert peripheral_distance([], []) == 0

    def test_merges_repeats(self):
        assert peripheral_distance([1, 1, 1j], [1j, 1]) == pytest.approx(0, abs=1e-15)

    def test_circle_metric(self):
        assert peripheral_distance([np.exp(0.01j)], [np.exp(-0.01j)]) == pytest.approx(0.02)


class TestFlags:
    def test_unitary(self):
        U = haar_unitary(np.random.default_rng(1), 4)
        f = classify_contraction(U)
        assert f.is_unitary and f.is_isometry and f.is_coisometry and f.c_1dot and f.c_11
        assert f.unitary_part_dim == 4 and not f.completely_nonunitary

    def test_nilpotent(self):
        f = classify_contraction(truncated_shift(4, 1))
        assert f.c_00 and f.completely_nonunitary and not f.is_isometry

    def test_mixed_diagonal(self):
        f = classify_contraction(np.diag([0.5, np.exp(1j * np.pi / 3)]))
        assert f.unitary_part_dim == 1 and not f.c_0dot and not f.c_1dot

    def test_projection(self):
        f = classify_contraction(np.diag([1.0, 0.0]))
        assert f.is_projection and f.unitary_part_dim == 1

    def test_invariants_and_radius(self):
        rng = np.random.default_rng(2)
        stable = 0
        for _ in range(100):
            n = int(rng.integers(1, 8))
            if rng.random() < 0.5:
                T = capped_contraction(rng, n, rng.uniform(0.2, 0.95))
            else:
                W = haar_unitary(rng, n)
                d = np.where(rng.random(n) < 0.3, np.exp(2j * np.pi * rng.uniform(size=n)), rng.uniform(0, 0.9, n))
                T = (W * d) @ W.conj().T
            f = classify_contraction(T)
            r = spectral_report(T).spectral_radius
            assert f.c_00 == (f.c_0dot and f.c_dot0) and f.c_11 == (f.c_1dot and f.c_dot1)
            assert f.c_00 == (r < 1 - 1e-8)
            stable += f.c_00
        assert 20 < stable < 100

    def test_unitary_part_reduces(self):
        rng = np.random.default_rng(3)
        W = haar_unitary(rng, 5)
        D = np.zeros((5, 5), dtype=complex)
        D[:3, :3] = capped_contraction(rng, 3, 0.8)
        D[3:, 3:] = np.diag(np.exp([0.4j, 2.0j]))
        T = W @ D @ W.conj().T
        H = unitary_part(T)
        assert H.shape[1] == 2
        np.testing.assert_allclose(H @ (H.conj().T @ (T @ H)), T @ H, atol=1e-8)
        TH = T @ H
        np.testing.assert_allclose(TH.conj().T @ TH, np.eye(2), atol=1e-8)


class TestKernelRange:
    def test_equal(self):
        T = np.diag([1.0, 0.3, 1.0])
        r = kernel_range_report(T, T)
        assert r.kernels_equal and r.max_principal_angle == pytest.approx(0, abs=1e-12) and r.kernel_dims == (2, 2)

    def test_diagonal(self):
        r = kernel_range_report(np.diag([1, 0.5]), np.diag([1, 0]))
        assert r.kernels_equal and r.kernel_dims == (1, 1)
        assert r.range_contained and r.decomposition_residual < 1e-12

    def test_unequal(self):
        r = kernel_range_report(np.diag([1, 0.5]), np.diag([0.5, 0.5]))
        assert not r.kernels_equal and r.max_principal_angle == pytest.approx(np.pi / 2)
        assert not r.range_contained

    def test_certified_pairs(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            p = certified_pair(rng, 8)
            r = kernel_range_report(p.T, p.Tp)
            assert r.max_principal_angle <= 1e-8 and r.range_contained

    def test_mismatch(self):
        with pytest.raises(InvalidInputError):
            kernel_range_report(np.eye(2), np.eye(3))


class TestKatznelsonTzafriri:
    def test_identity(self):
        r = katznelson_tzafriri(np.eye(2), 50)
        assert np.all(r.trajectory == 0) and r.limit_verdict and r.spectral_verdict

    def test_minus_one(self):
        r = katznelson_tzafriri([[-1.0]], 50)
        np.testing.assert_allclose(r.trajectory, 2.0)
        assert not r.limit_verdict and not r.spectral_verdict and r.agree

    def test_diagonal(self):
        r = katznelson_tzafriri(np.diag([1, 0.5]), 60)
        np.testing.assert_allclose(r.trajectory, 0.5 ** (np.arange(61) + 1), rtol=1e-12)
        assert r.limit_verdict and r.spectral_verdict

    def test_nilpotent_early_stop(self):
        r = katznelson_tzafriri(truncated_shift(3), 10_000)
        assert len(r.trajectory) == 10_001 and r.final == 0 and r.agree

    def test_rotation_disagrees_with_zero(self):
        r = katznelson_tzafriri(np.diag([1, np.exp(0.5j)]), 2000)
        assert not r.limit_verdict and not r.spectral_verdict

    def test_bad_n(self):
        with pytest.raises(InvalidInputError):
            katznelson_tzafriri(np.eye(1), 0)


class TestAsymptoticInequality:
    def test_equal(self):
        T = np.diag([1.0, 0.4, np.exp(1j)])
        r = asymptotic_inequality_check(T, T, 1.0, 200)
        assert r.max_violation <= 1e-10 and r.z_feasible
        assert r.kernel_inclusion_residual <= 1e-10 and r.agreement_residual == 0

    def test_certified(self):
        from harnack.domination import GridSpec, harnack_constant_poisson
        from harnack.generators import EXTENDED_GRID_RADII

        rng = np.random.default_rng(5)
        for _ in range(8):
            p = certified_pair(rng, 8, kind="unitary_part")
            c = harnack_constant_poisson(p.T, p.Tp, GridSpec(EXTENDED_GRID_RADII)).constant
            r = asymptotic_inequality_check(p.T, p.Tp, c, 300, seed=int(rng.integers(1000)))
            assert r.max_violation <= 1e-8 and r.z_feasible
            assert r.kernel_inclusion_residual <= 1e-8 and r.agreement_residual <= 1e-8

    def test_low_constant_violates(self):
        # both asymptotic limits vanish, so the inequality reduces to 1 <= c^2
        r = asymptotic_inequality_check(np.diag([0.5, 0.5]), np.diag([0.5, 0.0]), 0.5, 200)
        assert r.max_violation > 0

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harnack.domination import (
    DominationCertificate,
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
from harnack.errors import InvalidInputError
from harnack.functionals import moment_matrix, poisson_kernel
from harnack.generators import (
    EXTENDED_GRID_RADII,
    capped_contraction,
    certified_pair,
    haar_unitary,
    random_projection,
)
from harnack.operators import (
    block_shift_perturbation,
    cyclic_shift,
    rank_one_perturbed_unitary,
    truncated_shift,
)

from oracles import grid_harnack, pointwise_harnack_sq, scalar_harnack_sq

EXTENDED = GridSpec(EXTENDED_GRID_RADII)
SMALL = GridSpec((0.3, 0.6, 0.9), 32)


def pairs(seed, count, max_dim=8):
    rng = np.random.default_rng(seed)
    return [certified_pair(rng, max_dim) for _ in range(count)]


class TestGridSpec:
    def test_points_order(self):
        g = GridSpec((0.5, 0.9), 8)
        pts = g.points()
        assert len(pts) == 17 and pts[0] == 0
        np.testing.assert_allclose(np.abs(pts[1:9]), 0.5)
        assert GridSpec.from_dict(g.to_dict()) == g

    @pytest.mark.parametrize(
        "kw", [{"radii": ()}, {"radii": (0.5, 1.0)}, {"radii": (0.9, 0.5)}, {"angles_per_radius": 4}, {"radii": (0,)}]
    )
    def test_invalid(self, kw):
        with pytest.raises(InvalidInputError):
            GridSpec(**kw)


class TestCertificate:
    def test_constant_clamped(self):
        c = DominationCertificate("z", 0.25, True)
        assert c.constant == 1.0 and c.to_dict()["raw_sup"] == 0.25


class TestZ:
    def test_reflexive(self):
        T = capped_contraction(np.random.default_rng(0), 4, 0.8)
        c = z_constant(T, T)
        assert c.feasible and c.raw_sup == pytest.approx(1.0) and c.constant == pytest.approx(1.0, abs=1e-12)

    def test_projection_example(self):
        c = z_constant(np.eye(2), np.diag([1.0, 0.0]))
        assert c.feasible and c.raw_sup == pytest.approx(1.0)

    def test_isometry(self):
        U = cyclic_shift(4).entries
        c = z_constant(0.9 * U, U)
        assert not c.feasible and c.raw_sup == np.inf
        h = np.array([complex(*z) for z in c.witness["vector"]])
        Dp2 = np.eye(4) - U.conj().T @ U
        assert np.vdot(h, Dp2 @ h).real <= 1e-10
        assert np.linalg.norm(0.1 * U @ h) > 0.05

    def test_separate_ratios_bounded_by_sum(self):
        for p in pairs(1, 10):
            c = z_constant(p.T, p.Tp)
            assert max(c.extras["defect_ratio"], c.extras["difference_ratio"]) <= c.raw_sup * (1 + 1e-10)
            assert c.raw_sup**2 <= (c.extras["defect_ratio"] ** 2 + c.extras["difference_ratio"] ** 2) * (1 + 1e-8)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            z_constant(np.eye(2), np.eye(3))

    def test_projections(self):
        rng = np.random.default_rng(5)
        nested = 0
        for _ in range(100):
            n = int(rng.integers(2, 7))
            P = random_projection(rng, n, int(rng.integers(1, n + 1)))
            if rng.random() < 0.5:
                w, V = np.linalg.eigh(P)
                R = V[:, w > 0.5]
                Qb = R @ haar_unitary(rng, R.shape[1])[:, : int(rng.integers(0, R.shape[1] + 1))]
                Q = Qb @ Qb.conj().T
            else:
                Q = random_projection(rng, n, int(rng.integers(1, n + 1)))
            below = np.linalg.eigvalsh(P - Q)[0] >= -1e-8
            nested += below
            assert z_constant(P, Q).feasible == below
        assert 20 < nested < 100

    def test_positive_contractions(self):
        rng = np.random.default_rng(6)
        seen = set()
        for _ in range(100):
            m = int(rng.integers(2, 6))
            W = haar_unitary(rng, m)
            wp = np.where(rng.random(m) < 0.4, 1.0, rng.uniform(0, 1, m))
            w = np.where((wp == 1.0) & (rng.random(m) < 0.6), 1.0, rng.uniform(0, 1, m))
            Ap, A = (W * wp) @ W.conj().T, (W * w) @ W.conj().T
            I = np.eye(m)
            # independent check: kernel of I - A'^2 must sit inside the kernel of I - A^2
            ker = W[:, wp == 1.0]
            expect = np.linalg.norm((I - A @ A) @ ker) <= 1e-8 if ker.size else True
            seen.add(bool(expect))
            assert z_constant(A, Ap).feasible == expect
        assert seen == {True, False}


class TestPoisson:
    def test_reflexive(self):
        T = capped_contraction(np.random.default_rng(1), 5, 1.0)
        assert harnack_constant_poisson(T, T).constant == pytest.approx(1.0)

    def test_scalar(self):
        c = harnack_constant_poisson([[0.5]], [[0.0]], GridSpec((0.3, 0.6, 0.9, 0.99, 0.999)))
        assert c.constant == pytest.approx(np.sqrt(3), rel=0.001)
        lam = complex(*c.attained_at["lam"])
        assert c.raw_sup**2 == pytest.approx(scalar_harnack_sq(0.5, lam), rel=1e-10)

    def test_matches_direct_eigh(self):
        for p in pairs(2, 8, 6):
            ours = harnack_constant_poisson(p.T, p.Tp, SMALL).raw_sup
            assert ours == pytest.approx(grid_harnack(p.T, p.Tp, SMALL.radii, 32), rel=1e-8)

    def test_profile_and_refinement_monotone(self):
        for p in pairs(3, 8, 6):
            c = harnack_constant_poisson(p.T, p.Tp, EXTENDED)
            prof = [q["constant"] for q in c.profile]
            assert all(b >= a for a, b in zip(prof, prof[1:]))
            coarse = harnack_constant_poisson(p.T, p.Tp, GridSpec((0.3, 0.9), 16))
            assert coarse.raw_sup <= c.raw_sup * (1 + 1e-12)

    def test_maximizer_reproduces(self):
        p = pairs(4, 1)[0]
        c = harnack_constant_poisson(p.T, p.Tp, SMALL)
        lam = complex(*c.attained_at["lam"])
        h = np.array([complex(*z) for z in c.attained_at["vector"]])
        num = np.vdot(h, poisson_kernel(p.T, lam) @ h).real
        den = np.vdot(h, poisson_kernel(p.Tp, lam) @ h).real
        assert num / den == pytest.approx(c.raw_sup**2, rel=1e-8)
        assert pointwise_harnack_sq(p.T, p.Tp, lam) == pytest.approx(c.raw_sup**2, rel=1e-8)

    def test_shift_perturbation_grows(self):
        U = cyclic_shift(4)
        T = rank_one_perturbed_unitary(U, 0, 0)
        per = harnack_constant_poisson(T, U, GridSpec((0.9, 0.99, 0.999, 0.9999))).extras["per_radius"]
        consts = [q["constant"] for q in per]
        assert all(b > a for a, b in zip(consts, consts[1:])) and consts[-1] > 10 * consts[0]

    def test_direct_sum_is_max(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            p, q = certified_pair(rng, 5), certified_pair(rng, 5)
            blk = lambda X, Y: np.block([[X, np.zeros((len(X), len(Y)))], [np.zeros((len(Y), len(X))), Y]])
            s = harnack_constant_poisson(blk(p.T, q.T), blk(p.Tp, q.Tp), SMALL).raw_sup
            a = harnack_constant_poisson(p.T, p.Tp, SMALL).raw_sup
            b = harnack_constant_poisson(q.T, q.Tp, SMALL).raw_sup
            assert s == pytest.approx(max(a, b), rel=1e-8)

    def test_adjoint_invariance(self):
        # the grid is closed under conjugation, and K(T*, lam) = conj of K(T, conj lam) entrywise
        for p in pairs(8, 6, 6):
            a = harnack_constant_poisson(p.T, p.Tp, SMALL).raw_sup
            b = harnack_constant_poisson(p.T.conj().T, p.Tp.conj().T, SMALL).raw_sup
            assert b == pytest.approx(a, rel=1e-8)

    def test_powers(self):
        for p in pairs(9, 6, 6):
            c = harnack_constant_poisson(p.T, p.Tp, EXTENDED).constant
            for n in range(2, 5):
                Tn, Tpn = np.linalg.matrix_power(p.T, n), np.linalg.matrix_power(p.Tp, n)
                assert harnack_constant_poisson(Tn, Tpn, EXTENDED).constant <= c + 1e-6


class TestMoment:
    def test_trivial(self):
        T = capped_contraction(np.random.default_rng(2), 3, 0.9)
        assert harnack_constant_moment(T, T, 8).constant == pytest.approx(1.0)
        assert harnack_constant_moment(T, np.zeros((3, 3)), 1).constant == 1.0

    def test_scalar_from_below(self):
        c = harnack_constant_moment([[0.5]], [[0.0]], 64)
        assert c.raw_sup < np.sqrt(3) and c.raw_sup == pytest.approx(np.sqrt(3), rel=0.01)
        prof = [q["constant"] for q in c.profile]
        assert [q["order"] for q in c.profile] == [1, 2, 4, 8, 16, 32, 64]
        assert all(b >= a for a, b in zip(prof, prof[1:]))

    def test_ladder_matches_every_order(self):
        # strict pairs keep the denominator positive definite, so a plain solve is a fair oracle
        p = certified_pair(np.random.default_rng(10), 4, kind="strict")
        full = max(
            np.linalg.eigvals(np.linalg.solve(moment_matrix(p.Tp, n), moment_matrix(p.T, n))).real.max()
            for n in range(1, 13)
        )
        assert harnack_constant_moment(p.T, p.Tp, 12).raw_sup == pytest.approx(np.sqrt(full), rel=1e-8)

    def test_infeasible(self):
        U = cyclic_shift(3).entries
        c = harnack_constant_moment(0.5 * U, U, 8)
        assert not c.feasible and c.witness["order"] == 2

    def test_bad_order(self):
        with pytest.raises(InvalidInputError):
            harnack_constant_moment(np.eye(1), np.eye(1), 0)


class TestCrossRelations:
    def test_ordering_and_agreement(self):
        for p in pairs(11, 12, 8):
            h = harnack_constant_poisson(p.T, p.Tp, EXTENDED).raw_sup
            m = harnack_constant_moment(p.T, p.Tp, 32).raw_sup
            z = z_constant(p.T, p.Tp).raw_sup
            assert z <= h * (1 + 1e-8)
            assert abs(max(1, h) - max(1, m)) <= 0.05 * max(1, m)

    def test_sandwich(self):
        for p in pairs(12, 8, 6):
            h = harnack_constant_poisson(p.T, p.Tp, EXTENDED).constant
            s = mobius_z_profile(p.T, p.Tp, SMALL).constant
            assert s <= h * (1 + 1e-6) and h <= np.sqrt(3) * s * (1 + 1e-6)

    def test_mobius_reflexive(self):
        T = capped_contraction(np.random.default_rng(3), 3, 1.0)
        m = mobius_z_profile(T, T, SMALL)
        assert all(q["raw"] == pytest.approx(1.0) for q in m.profile)
        assert m.extras["implied_harnack_bound"] == pytest.approx(np.sqrt(3))

    def test_resolvent_reflexive(self):
        T = capped_contraction(np.random.default_rng(3), 3, 0.8)
        r = resolvent_estimate_constant(T, T)
        assert r.raw_sup == 0 and r.constant == 1

    def test_resolvent_below_square(self):
        for p in pairs(13, 10, 8):
            h = harnack_constant_poisson(p.T, p.Tp, EXTENDED).constant
            r = resolvent_estimate_constant(p.T, p.Tp, EXTENDED)
            assert r.feasible and r.raw_sup <= h**2 * (1 + 1e-8)

    def test_resolvent_at_zero_is_halperin_like(self):
        p = pairs(14, 1)[0]
        r = resolvent_estimate_constant(p.T, p.Tp, GridSpec((0.5,), 8))
        E = p.T - p.Tp
        Dp2 = np.eye(len(E)) - p.Tp.conj().T @ p.Tp
        base = np.linalg.eigvals(np.linalg.solve(Dp2, E.conj().T @ E)).real.max()
        assert r.profile[0]["constant"] == pytest.approx(base, rel=1e-8)


class TestHalperin:
    def test_examples(self):
        assert halperin_constant(np.zeros((2, 2))).supremum == pytest.approx(1.0)
        for a in (0.0, 0.3, 0.5, 0.9):
            assert halperin_constant([[a]]).supremum == pytest.approx((1 - a) / (1 + a))
        assert halperin_constant(np.diag([0.2, 0.6])).supremum == pytest.approx(0.8 / 1.2)
        assert not halperin_constant(np.array([[0, 1], [0, 0]])).feasible

    def test_equals_z_squared(self):
        rng = np.random.default_rng(15)
        for _ in range(10):
            A = capped_contraction(rng, 4, 0.9)
            assert halperin_constant(A).supremum == pytest.approx(z_constant(np.eye(4), A).raw_sup ** 2)

    def test_block_shift_tracks_halperin(self):
        S = truncated_shift(4).entries
        for A, feasible in ((np.diag([0.5]), True), (np.zeros((1, 1)), True)):
            r = resolvent_estimate_constant(S, block_shift_perturbation(A, 4).entries)
            assert r.feasible == feasible and np.isfinite(r.raw_sup)
        N = np.array([[0, 1], [0, 0]])
        S2 = truncated_shift(4, 2).entries
        assert not resolvent_estimate_constant(S2, block_shift_perturbation(N, 4).entries).feasible


class TestSharpIdentity:
    def test_equal_operators(self):
        rng = np.random.default_rng(16)
        T = capped_contraction(rng, 4, 0.9)
        for _ in range(10):
            lam = 0.9 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
            h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            assert sharp_identity_residual(T, T, 1.0, lam, h) == pytest.approx(0, abs=1e-12)

    def test_form_matches_residual(self):
        rng = np.random.default_rng(17)
        p = pairs(17, 1)[0]
        n = len(p.T)
        for _ in range(5):
            lam = 0.8 * np.exp(2j * np.pi * rng.uniform())
            h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            Q = sharp_identity_form(p.T, p.Tp, 1.7, lam)
            assert np.vdot(h, Q @ h).real == pytest.approx(sharp_identity_residual(p.T, p.Tp, 1.7, lam, h), rel=1e-9)

    def test_nonnegative_above_and_refuted_below(self):
        refuted = 0
        for p in pairs(18, 8, 6):
            c = harnack_constant_poisson(p.T, p.Tp, EXTENDED).constant
            hi = 1.001 * c
            for lam in EXTENDED.points()[::7]:
                w = np.linalg.eigvalsh(sharp_identity_form(p.T, p.Tp, hi, lam))[0]
                assert w >= -1e-10 * max(1, (hi**2 - 1) / (1 - abs(lam) ** 2))
            if c > 1.05:
                lo = 0.95 * c
                worst = min(
                    (np.linalg.eigh(sharp_identity_form(p.T, p.Tp, lo, lam)) + (lam,) for lam in EXTENDED.points()),
                    key=lambda t: t[0][0],
                )
                w, V, lam = worst
                assert sharp_identity_residual(p.T, p.Tp, lo, lam, V[:, 0]) < 0
                refuted += 1
        assert refuted > 0

    def test_bad_arguments(self):
        with pytest.raises(InvalidInputError):
            sharp_identity_residual(np.eye(1), np.eye(1), 0.5, 0.1, [1])
        with pytest.raises(InvalidInputError):
            sharp_identity_residual(np.eye(1), np.eye(1), 1.0, 1.0, [1])


class TestMaximality:
    def test_equal(self):
        U = cyclic_shift(3)
        assert maximality_probe(U, U).status == "equal operators"

    def test_not_unitary(self):
        with pytest.raises(InvalidInputError):
            maximality_probe(np.diag([1, 0.5]), np.eye(2))

    def test_cyclic_example(self):
        U = cyclic_shift(8)
        T = rank_one_perturbed_unitary(U, 0, 0.5)
        r = maximality_probe(U, T, (0.9, 0.99, 0.999))
        assert all(b > a for a, b in zip(r.constants, r.constants[1:]))
        bounds = [row["bound"] for row in r.lower_bound_profile]
        # the atomic lower bound scales like eps^{-1/2} for the constant
        assert bounds[-1] > 1e6 * bounds[0]
        assert r.lower_bound > r.largest_grid_constant
        r4 = maximality_probe(U, T)
        assert r4.divergence and r4.growth > 10

    def test_reducing_part(self):
        U = np.diag([1.0, -1.0])
        T = U @ np.diag([1.0, 0.0])
        r = maximality_probe(U, T)
        assert r.divergence


class TestCheckRelation:
    def test_unknown(self):
        with pytest.raises(InvalidInputError):
            check_relation(np.eye(1), np.eye(1), "bogus")

    def test_z_precheck(self):
        U = cyclic_shift(4).entries
        c = check_relation(0.9 * U, U, "harnack", SMALL)
        assert not c.feasible and c.witness["source"] == "z"
        assert np.isfinite(c.extras["grid_constant"])

    def test_cap(self):
        c = check_relation([[0.5]], [[0.0]], "harnack", SMALL, cap=1.2)
        assert not c.feasible and c.extras["cap"] == 1.2

    @pytest.mark.parametrize("relation", ["harnack", "z", "resolvent", "moment", "mobius"])
    def test_reflexive(self, relation):
        T = capped_contraction(np.random.default_rng(19), 3, 0.9)
        c = check_relation(T, T, relation, SMALL, order=8)
        assert c.feasible and c.constant == pytest.approx(1.0)

    @pytest.mark.parametrize("relation", ["harnack", "z", "moment"])
    def test_infeasible_witness_reproduces(self, relation):
        U = cyclic_shift(3).entries
        T = 0.5 * U
        c = check_relation(T, U, relation, SMALL, order=8)
        assert not c.feasible
        h = np.array([complex(*z) for z in c.witness["vector"]])
        if "order" in c.witness and relation == "moment":
            n = c.witness["order"]
            Mt, Mu = moment_matrix(T, n), moment_matrix(U, n)
            assert np.vdot(h, Mu @ h).real <= 1e-8 and np.vdot(h, Mt @ h).real > 1e-6
        else:
            # Z violation: the right side vanishes while the left side does not
            rhs = np.linalg.norm(h) ** 2 - np.linalg.norm(U @ h) ** 2
            lhs = np.linalg.norm(h) ** 2 - np.linalg.norm(T @ h) ** 2 + np.linalg.norm((T - U) @ h) ** 2
            assert abs(rhs) <= 1e-10 and lhs > 0.5


@st.composite
def contraction_pair(draw):
    n = draw(st.integers(1, 5))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return capped_contraction(rng, n, draw(st.floats(0.1, 0.9))), capped_contraction(rng, n, draw(st.floats(0.1, 0.9)))


@settings(max_examples=25, deadline=None)
@given(contraction_pair())
def test_constants_at_least_one_and_ordered(pair):
    T, Tp = pair
    h = harnack_constant_poisson(T, Tp, SMALL)
    z = z_constant(T, Tp)
    assert h.constant >= 1 and z.constant >= 1
    assert z.raw_sup <= harnack_constant_poisson(T, Tp, EXTENDED).raw_sup * (1 + 1e-8)

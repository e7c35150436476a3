import numpy as np
import pytest

from alohagame import (
    Game,
    FixedPointSet,
    best_response,
    chain_matrix,
    diag_dominant,
    kleene_lfp,
    krasovskii_matrix,
    krasovskii_verdict,
    leading_minors,
    lyapunov_value,
    multistart_fixed_points,
    residual_jacobian,
    roa_estimate,
    stability_consistency,
    sylvester_pd,
)
from conftest import P_SADDLE, Q_STAR

CHAIN = chain_matrix(3)


class TestJacobian:
    def test_single_player(self):
        g = Game(np.zeros((1, 1)), [0.4])
        assert np.array_equal(residual_jacobian([0.2], g), [[-1.0]])

    def test_edgeless_is_negative_identity(self):
        g = Game(np.zeros((3, 3)), [0.1, 0.2, 0.3])
        assert np.array_equal(residual_jacobian([0.3, 0.5, 0.7], g), -np.eye(3))

    def test_chain_entry_at_equilibrium(self, chain3):
        # at a fixed point the response equals the point itself, so
        # J_12 = q*_1 / (1 - q*_2), which is 0.2540 at the chain NE
        point = kleene_lfp(chain3, tol=1e-13).point
        jac = residual_jacobian(point, chain3)
        assert jac[0, 1] == pytest.approx(point[0] / (1.0 - point[1]), abs=1e-10)
        assert jac[0, 1] == pytest.approx(0.2540, abs=1e-4)
        assert jac[0, 2] == 0.0
        assert np.array_equal(np.diag(jac), [-1.0, -1.0, -1.0])

    def test_matches_central_differences(self, chain3):
        rng = np.random.default_rng(5)
        h = 1e-5
        for _ in range(20):
            q = rng.uniform(0.02, 0.55, 3)
            analytic = residual_jacobian(q, chain3) + np.eye(3)
            fd = np.zeros((3, 3))
            for j in range(3):
                e = np.zeros(3)
                e[j] = h
                fd[:, j] = (best_response(q + e, chain3) - best_response(q - e, chain3)) / (2 * h)
            assert np.abs(fd - analytic).max() <= 1e-6 * max(1.0, np.abs(analytic).max())

    def test_saturated_row_is_flat(self, chain3):
        # player 1's quotient is 0.15/0.05 = 3, clipped: its row derivative is 0
        jac = residual_jacobian([0.1, 0.95, 0.1], chain3)
        assert jac[0, 1] == 0.0
        assert jac[1, 0] != 0.0

    def test_neighbour_at_one_rejected(self, chain3):
        with pytest.raises(ValueError, match="singular"):
            residual_jacobian([0.1, 1.0, 0.1], chain3)


class TestKrasovskiiMatrix:
    def test_edgeless_gives_twice_identity(self):
        g = Game(np.zeros((3, 3)), [0.1, 0.2, 0.3])
        assert np.array_equal(krasovskii_matrix([0.4, 0.4, 0.4], g), 2.0 * np.eye(3))

    def test_chain_entries_at_equilibrium(self, chain3):
        point = kleene_lfp(chain3, tol=1e-13).point
        c = krasovskii_matrix(point, chain3)
        expected_12 = -(point[0] / (1 - point[1]) + point[1] / (1 - point[0]))
        assert c[0, 1] == pytest.approx(expected_12, abs=1e-10)
        assert c[0, 1] == pytest.approx(-0.5418, abs=1e-4)
        assert c[0, 2] == 0.0

    def test_symmetric_with_diagonal_two(self, chain3):
        rng = np.random.default_rng(9)
        for _ in range(20):
            q = rng.uniform(0.0, 0.9, 3)
            c = krasovskii_matrix(q, chain3)
            assert np.array_equal(c, c.T)
            assert np.array_equal(np.diag(c), [2.0, 2.0, 2.0])

    def test_saddle_off_diagonals_exceed_two(self, chain3):
        c = krasovskii_matrix(P_SADDLE, chain3)
        assert np.abs(c[0, 1]) > 2.0


class TestSylvester:
    def test_scaled_identity(self):
        pd, minors = sylvester_pd(2.0 * np.eye(3))
        assert pd
        assert np.allclose(minors, [2.0, 4.0, 8.0])

    def test_chain_equilibria_classified(self, chain3):
        assert sylvester_pd(krasovskii_matrix(Q_STAR, chain3))[0]
        assert not sylvester_pd(krasovskii_matrix(P_SADDLE, chain3))[0]

    def test_agrees_with_eigenvalues_on_random_symmetric_matrices(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            n = int(rng.integers(1, 6))
            m = rng.normal(size=(n, n))
            c = (m + m.T) / 2
            by_minors = sylvester_pd(c)[0]
            by_eigs = bool(np.linalg.eigvalsh(c).min() > 1e-12)
            assert by_minors == by_eigs

    def test_minor_count(self):
        minors = leading_minors(np.diag([1.0, 2.0, 3.0, 4.0]))
        assert np.allclose(minors, [1.0, 2.0, 6.0, 24.0])


class TestDiagDominance:
    def test_edgeless(self):
        g = Game(np.zeros((3, 3)), [0.1, 0.1, 0.1])
        assert diag_dominant([0.1, 0.1, 0.1], g)

    def test_chain_equilibrium_rows_under_two(self, chain3):
        # middle row carries both couplings: 2 * 0.5418 < 2
        assert diag_dominant(Q_STAR, chain3)

    def test_saddle_violates(self, chain3):
        assert not diag_dominant(P_SADDLE, chain3)

    def test_dominance_implies_positive_definite(self, chain3):
        for point in multistart_fixed_points(chain3).points:
            if diag_dominant(point, chain3):
                assert sylvester_pd(krasovskii_matrix(point, chain3))[0]


class TestVerdict:
    def test_equilibrium_stable(self, chain3):
        v = krasovskii_verdict(Q_STAR, chain3, fp_tol=1e-3)
        assert v.stable and v.classification == "stable" and not v.clipped
        assert v.diag_dominant

    def test_saddle_unstable(self, chain3):
        v = krasovskii_verdict(P_SADDLE, chain3, fp_tol=1e-3)
        assert not v.stable and v.classification == "unstable"

    def test_near_fold_minor_vanishes(self):
        # at the merge point of the two equilibria the certificate sits on
        # the definiteness boundary; compare with the order-one minors at
        # interior stable points
        g = Game(CHAIN, [0.15, 0.246, 0.15])
        v = krasovskii_verdict([0.3138, 0.5223, 0.3138], g, fp_tol=1e-3)
        assert np.abs(v.leading_minors).min() < 0.06

    def test_non_fixed_point_rejected(self, chain3):
        with pytest.raises(ValueError, match="fixed point"):
            krasovskii_verdict([0.5, 0.5, 0.5], chain3)

    def test_saturated_boundary_point_flagged_clipped(self):
        g = Game(np.zeros((1, 1)), [1.0])
        v = krasovskii_verdict([1.0], g, fp_tol=1e-12)
        assert v.clipped and v.stable

    def test_all_ones_is_singular_for_the_certificate(self, chain3):
        with pytest.raises(ValueError, match="singular"):
            krasovskii_verdict(np.ones(3), chain3, fp_tol=1e-9)


class TestLyapunov:
    def test_zero_at_fixed_point(self, chain3):
        point = kleene_lfp(chain3, tol=1e-13).point
        assert lyapunov_value(point, chain3) <= 1e-24

    def test_at_origin(self, chain3):
        assert lyapunov_value(np.zeros(3), chain3) == pytest.approx(3 * 0.15**2, abs=1e-15)


class TestRoaEstimate:
    def test_chain_start_region_inside(self, chain3):
        point = kleene_lfp(chain3).point
        roa = roa_estimate(chain3, point)
        assert roa.contains(point)
        for a in (0.01, 0.14):
            for b in (0.01, 0.14):
                for c in (0.01, 0.14):
                    assert roa.contains([a, b, c])

    def test_saddle_outside(self, chain3):
        roa = roa_estimate(chain3, kleene_lfp(chain3).point)
        assert not roa.contains(P_SADDLE)

    def test_edgeless_marks_everything(self):
        g = Game(np.zeros((2, 2)), [0.3, 0.3])
        roa = roa_estimate(g, kleene_lfp(g).point, resolution=11)
        assert roa.mask.all()

    def test_unstable_point_rejected(self, chain3):
        with pytest.raises(ValueError, match="stable"):
            roa_estimate(chain3, P_SADDLE, fp_tol=1e-3)

    def test_size_limit(self):
        g = Game(np.zeros((5, 5)), np.full(5, 0.1))
        with pytest.raises(ValueError, match="players"):
            roa_estimate(g, np.full(5, 0.1), resolution=5)


class TestConsistency:
    def test_chain_least_stable_no_violation(self, chain3):
        report = stability_consistency(multistart_fixed_points(chain3), chain3)
        assert report.least_stable is True
        assert not report.violation
        assert len(report.verdicts) == 2

    def test_past_fold_vacuous(self):
        g = Game(CHAIN, [0.15, 0.30, 0.15])
        report = stability_consistency(multistart_fixed_points(g), g)
        assert report.least_point is None
        assert not report.violation

    def test_non_fixed_points_rejected(self, chain3):
        fps = FixedPointSet(points=[np.array([0.5, 0.5, 0.5])])
        with pytest.raises(ValueError, match="fixed point"):
            stability_consistency(fps, chain3)

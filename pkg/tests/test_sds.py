import numpy as np
import pytest

from conftest import D_MINUS, D_PLUS
from sdc_engine.pencil import LinearPencil, MaxRankWitness, max_rank_point
from sdc_engine.reduction import ReductionResult, reduce
from sdc_engine.sds import (
    Defective,
    NonCommuting,
    ReducedFamily,
    build_reduced_family,
    joint_diagonalize,
    pairwise_commute,
)
from sdc_engine.shared.errors import SingularPencilError


def family(*mats, lambda0=None):
    stack = np.stack([np.asarray(m, dtype=complex) for m in mats])
    lam = np.eye(len(mats))[0] if lambda0 is None else np.asarray(lambda0, dtype=complex)
    return ReducedFamily(stack, lam)


def reduced_from(mats, cfg):
    p = LinearPencil.from_matrices(mats, cfg)
    w = max_rank_point(p, cfg)
    return reduce(p, w, cfg), w


class TestBuildReducedFamily:
    def test_complex_needed_family(self, cfg, complex_needed):
        rr, w = reduced_from(complex_needed, cfg)
        f = build_reduced_family(rr, w, cfg)
        np.testing.assert_allclose(f.L[0], np.eye(2), atol=1e-14)
        np.testing.assert_allclose(f.L[1], [[0, -1], [1, 1]], atol=1e-14)
        assert f.identity_residual < 1e-14

    def test_single_member_gives_identity(self, cfg):
        rr, w = reduced_from([np.array([[2, 1j], [1j, 3]])], cfg)
        f = build_reduced_family(rr, w, cfg)
        np.testing.assert_allclose(f.L[0], np.eye(2), atol=1e-14)

    def test_entrywise_division(self, cfg):
        rr, w = reduced_from([np.diag([1.0, 2.0]), np.diag([3.0, 4.0])], cfg)
        f = build_reduced_family(rr, w, cfg)
        np.testing.assert_allclose(f.L[1], np.diag([3.0, 2.0]), atol=1e-14)

    def test_identity_combination(self, cfg):
        rng = np.random.default_rng(1)
        mats = []
        for _ in range(3):
            g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            mats.append(g + g.T)
        p = LinearPencil.from_matrices(mats, cfg)
        w = max_rank_point(p, cfg, include_basis=False)
        f = build_reduced_family(reduce(p, w, cfg), w, cfg)
        np.testing.assert_allclose(np.tensordot(w.lambda0, f.L, axes=1), np.eye(4), atol=1e-10)

    def test_singular_pivot(self, cfg):
        rr = ReductionResult(np.eye(2), np.stack([np.diag([1.0, 0.0])]).astype(complex), np.zeros((2, 0)), 2)
        with pytest.raises(SingularPencilError):
            build_reduced_family(rr, MaxRankWitness(2, np.array([1.0])), cfg)

    def test_empty_reduction(self, cfg):
        rr, w = reduced_from([np.zeros((2, 2)), np.zeros((2, 2))], cfg)
        f = build_reduced_family(rr, w, cfg)
        assert f.L.shape == (2, 0, 0)


class TestPairwiseCommute:
    def test_identity_commutes(self, cfg):
        assert pairwise_commute(family(np.eye(2), [[0, -1], [1, 1]]), cfg).commuting

    def test_witness_pair(self, cfg):
        check = pairwise_commute(family([[0, 1], [1, 0]], np.diag([1, 2])), cfg)
        assert not check.commuting
        assert check.pair == (1, 2)

    def test_singleton(self, cfg):
        assert pairwise_commute(family([[1, 2], [3, 4]]), cfg).commuting

    def test_first_failing_pair_is_reported(self, cfg):
        check = pairwise_commute(family(np.eye(2), np.diag([1, 2]), [[0, 1], [1, 0]]), cfg)
        assert check.pair == (2, 3)

    def test_skipping_identity_member_agrees(self, cfg):
        a = np.diag([1.0, 2.0, 3.0])
        b = np.diag([2.0, -1.0, 0.5])
        lam = np.array([0.6, 0.8j, 0.0])
        f = family(a, b, np.eye(3), lambda0=lam)
        assert pairwise_commute(f, cfg, skip_identity_member=True).commuting
        assert pairwise_commute(f, cfg).commuting

        g = family(np.eye(2), np.diag([1, 2]), [[0, 1], [1, 0]], lambda0=[1, 0, 0])
        assert not pairwise_commute(g, cfg, skip_identity_member=True).commuting


class TestJointDiagonalize:
    def test_complex_eigenbasis(self, cfg):
        result = joint_diagonalize(family(np.eye(2), [[0, -1], [1, 1]]), cfg)
        assert result.is_sds
        np.testing.assert_allclose(np.diag(result.diagonals[1]), [D_PLUS, D_MINUS], atol=1e-12)
        np.testing.assert_allclose(np.diag(result.diagonals[0]), [1, 1], atol=1e-12)
        assert result.block_sizes == [1, 1]
        assert result.residual < 1e-12

    def test_jordan_block_is_defective(self, cfg):
        result = joint_diagonalize(family(np.eye(2), [[0, 1], [0, 0]]), cfg)
        assert not result.is_sds
        assert result.reason == Defective(2)

    def test_noncommuting_checked_first(self, cfg):
        result = joint_diagonalize(family([[0, 1], [1, 0]], np.diag([1, 2])), cfg)
        assert result.reason == NonCommuting(1, 2)
        assert result.reason.kind == "non-commuting"

    def test_already_diagonal_tuples(self, cfg):
        result = joint_diagonalize(family(np.diag([1, 1, 2]), np.diag([3, 4, 4])), cfg)
        assert result.is_sds
        np.testing.assert_allclose(result.tuples, [[1, 3], [1, 4], [2, 4]], atol=1e-12)
        np.testing.assert_allclose(np.abs(result.P), np.eye(3), atol=1e-12)

    def test_eigenvector_property(self, cfg):
        rng = np.random.default_rng(8)
        s = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        s_inv = np.linalg.inv(s)
        mats = [s @ np.diag(d) @ s_inv for d in ([1, 1, 2, 2], [5, 6, 5, 6], [0, 1j, 2, 3])]
        f = family(*mats)
        result = joint_diagonalize(f, cfg)
        assert result.is_sds
        for j, l in enumerate(f.L):
            d = np.diag(result.diagonals[j])
            for col in range(4):
                p = result.P[:, col]
                assert np.linalg.norm(l @ p - d[col] * p) <= 1e-8 * np.linalg.norm(l, 2)

    def test_repeated_tuple_forms_one_block(self, cfg):
        rng = np.random.default_rng(9)
        s = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        s_inv = np.linalg.inv(s)
        f = family(np.eye(3), s @ np.diag([2, 2, 5]) @ s_inv)
        result = joint_diagonalize(f, cfg)
        assert result.is_sds
        assert result.block_sizes == [2, 1]
        np.testing.assert_allclose(result.tuples[:, 1], [2, 5], atol=1e-10)

    def test_defect_seen_in_second_member_only(self, cfg):
        # first member is scalar on the block where the second has a Jordan block
        l1 = np.diag([1.0, 1.0, 3.0])
        l2 = np.array([[2.0, 1.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 7.0]])
        result = joint_diagonalize(family(l1, l2), cfg)
        assert result.reason == Defective(2)

    def test_empty_family(self, cfg):
        result = joint_diagonalize(ReducedFamily(np.zeros((2, 0, 0), dtype=complex), np.array([1.0, 0.0])), cfg)
        assert result.is_sds
        assert result.P.shape == (0, 0)
        assert result.diagonals.shape == (2, 0, 0)

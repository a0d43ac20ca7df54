import numpy as np
import pytest

from sdc_engine.core_linalg import numerical_rank
from sdc_engine.pencil import LinearPencil, evaluate, max_rank_point
from sdc_engine.shared.config import ToleranceConfig
from sdc_engine.shared.errors import DimensionError, NotSymmetricError
from sdc_engine.synth import generate


class TestLinearPencil:
    def test_shape(self, cfg, complex_needed):
        p = LinearPencil.from_matrices(complex_needed, cfg)
        assert (p.m, p.n) == (2, 2)
        assert p.matrices.dtype == complex

    def test_empty_family(self, cfg):
        with pytest.raises(DimensionError):
            LinearPencil.from_matrices([], cfg)

    def test_mismatched_sizes(self, cfg):
        with pytest.raises(DimensionError, match="matrix 2"):
            LinearPencil.from_matrices([np.eye(2), np.eye(3)], cfg)

    def test_asymmetric_member_reports_index(self, cfg):
        with pytest.raises(NotSymmetricError) as excinfo:
            LinearPencil.from_matrices([np.eye(2), np.array([[0, 1], [2, 0]])], cfg)
        assert excinfo.value.index == 2

    def test_tiny_asymmetric_member_is_rejected(self, cfg):
        with pytest.raises(NotSymmetricError) as excinfo:
            LinearPencil.from_matrices([1e-9 * np.array([[1.0, 2.0], [3.0, 4.0]])], cfg)
        assert excinfo.value.index == 1


class TestEvaluate:
    def test_basis_vector(self, cfg, complex_needed):
        p = LinearPencil.from_matrices(complex_needed, cfg)
        np.testing.assert_allclose(evaluate(p, [1, 0]), complex_needed[0])

    def test_zero_combination(self, cfg, complex_needed):
        p = LinearPencil.from_matrices(complex_needed, cfg)
        np.testing.assert_allclose(evaluate(p, [0, 0]), np.zeros((2, 2)))

    def test_general_combination(self, cfg, kernel_deficit):
        p = LinearPencil.from_matrices(kernel_deficit, cfg)
        l1, l2 = 2.0 - 1j, 0.5j
        expected = np.array([[l1, l1, l2], [l1, 0, 0], [l2, 0, 0]])
        np.testing.assert_allclose(evaluate(p, [l1, l2]), expected)

    def test_length_mismatch(self, cfg, complex_needed):
        p = LinearPencil.from_matrices(complex_needed, cfg)
        with pytest.raises(DimensionError):
            evaluate(p, [1, 0, 0])


class TestMaxRankPoint:
    def test_full_rank_at_first_basis_vector(self, cfg, complex_needed):
        w = max_rank_point(LinearPencil.from_matrices(complex_needed, cfg), cfg)
        assert w.r == 2
        np.testing.assert_allclose(w.lambda0, [1, 0])
        assert w.source == "basis[1]"

    def test_identically_singular_pencil(self, cfg, kernel_deficit):
        p = LinearPencil.from_matrices(kernel_deficit, cfg)
        w = max_rank_point(p, cfg)
        assert w.r == 2
        assert numerical_rank(evaluate(p, [1, 1]), cfg) == 2
        assert w.sigma_next < 1e-12

    def test_zero_pencil(self, cfg):
        w = max_rank_point(LinearPencil.from_matrices([np.zeros((3, 3))], cfg), cfg)
        assert w.r == 0
        assert np.linalg.norm(w.lambda0) == pytest.approx(1.0)

    def test_witness_is_unit_and_attains_rank(self, cfg):
        instance = generate("sdc", 5, 3, 3, seed=2)
        p = LinearPencil.from_matrices(list(instance.matrices), cfg)
        w = max_rank_point(p, cfg, include_basis=False)
        assert w.source.startswith("sample")
        assert np.linalg.norm(w.lambda0) == pytest.approx(1.0)
        assert numerical_rank(evaluate(p, w.lambda0), cfg) == w.r == 3

    def test_scale_invariance(self, cfg, complex_needed):
        p = LinearPencil.from_matrices(complex_needed, cfg)
        lam = np.array([0.3 - 0.1j, 1.2j])
        assert numerical_rank(evaluate(p, lam), cfg) == numerical_rank(evaluate(p, -7j * lam), cfg)

    def test_deterministic_for_seed(self, cfg):
        instance = generate("sdc", 4, 3, 2, seed=9)
        p = LinearPencil.from_matrices(list(instance.matrices), cfg)
        a = max_rank_point(p, ToleranceConfig(rng_seed=3), include_basis=False)
        b = max_rank_point(p, ToleranceConfig(rng_seed=3), include_basis=False)
        np.testing.assert_array_equal(a.lambda0, b.lambda0)

    def test_no_candidate_beats_witness(self, cfg):
        instance = generate("noncommuting", 4, 3, 3, seed=1)
        p = LinearPencil.from_matrices(list(instance.matrices), cfg)
        w = max_rank_point(p, cfg)
        rng = np.random.default_rng(0)
        for _ in range(10):
            lam = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            assert numerical_rank(evaluate(p, lam), cfg) <= w.r

"""
Evolution-algebra front-end.

A commutative algebra with structure constants e_i e_j = sum_k m_ijk e_k is an
evolution algebra (admits a natural basis) iff its structure matrices
M_k = (m_ijk)_{i,j} are simultaneously diagonalizable via congruence.
"""
import logging
from dataclasses import dataclass

import numpy as np

from sdc_engine.core_linalg import max_abs
from sdc_engine.pencil import LinearPencil
from sdc_engine.sdc import SdcCertificate, decide_sdc
from sdc_engine.shared.config import ToleranceConfig
from sdc_engine.shared.errors import DimensionError, NonCommutativeTensorError

logger = logging.getLogger(__name__)


@dataclass
class EvolutionResult:
    certificate: SdcCertificate
    # C with e~_i^2 = sum_l C_il e~_l in the natural basis, when one exists
    natural_constants: np.ndarray | None = None

    @property
    def is_evolution_algebra(self) -> bool:
        return self.certificate.is_sdc


def check_commutative(tensor: np.ndarray, cfg: ToleranceConfig) -> None:
    """Raise NonCommutativeTensorError at the first (i, j, k), i < j, with m_ijk != m_jik."""
    tensor = np.asarray(tensor, dtype=complex)
    if tensor.ndim != 3 or len(set(tensor.shape)) != 1:
        raise DimensionError(f"structure tensor must be n x n x n, got shape {tensor.shape}")
    tol = cfg.residual_tol * max_abs(tensor)
    gap = np.abs(tensor - np.transpose(tensor, (1, 0, 2)))
    for i, j, k in np.argwhere(gap > tol):
        if i < j:
            raise NonCommutativeTensorError(
                int(i) + 1, int(j) + 1, int(k) + 1,
                f"|m_ijk - m_jik| = {gap[i, j, k]:.3e}",
            )


def structure_matrices(tensor: np.ndarray) -> np.ndarray:
    """Stack of M_k = (m_ijk)_{i,j}, k = 1..n."""
    return np.moveaxis(np.asarray(tensor, dtype=complex), 2, 0)


def natural_basis_constants(P: np.ndarray, matrices: np.ndarray) -> np.ndarray:
    """Structure constants C = W P^{-T} in the basis e~_i = sum_a P_ai e_a.

    W_ik = (P^T M_k P)_ii, so e~_i^2 = sum_k W_ik e_k = sum_l C_il e~_l.
    """
    w = np.einsum("ai,kab,bi->ik", P, matrices, P)
    return np.linalg.solve(P, w.T).T


def decide_evolution(tensor: np.ndarray, cfg: ToleranceConfig) -> EvolutionResult:
    check_commutative(tensor, cfg)
    matrices = structure_matrices(tensor)
    # slices agree with their transposes up to the tensor-wide tolerance checked above
    matrices = (matrices + np.transpose(matrices, (0, 2, 1))) / 2
    cert = decide_sdc(LinearPencil.from_matrices(list(matrices), cfg), cfg)
    if not cert.is_sdc:
        logger.info("structure matrices are not SDC: no natural basis")
        return EvolutionResult(cert)
    return EvolutionResult(cert, natural_basis_constants(cert.P, matrices))

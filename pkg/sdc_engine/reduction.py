"""
Kernel test and reduction of the n x n family to an r x r family with a
nonsingular pencil.

With Q = [complement | kernel] unitary, Q^T A_j Q = A~_j (+) 0_{n-r} whenever the
common kernel has dimension exactly n - r.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from sdc_engine.core_linalg import fixed_dim_nullspace, max_abs, nullspace_basis
from sdc_engine.pencil import LinearPencil, MaxRankWitness
from sdc_engine.shared.config import ToleranceConfig
from sdc_engine.shared.errors import DimensionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelDeficit:
    """The common kernel is smaller than n - r, which refutes SDC on its own."""

    dim: int
    expected: int

    kind = "kernel-deficit"

    def describe(self) -> str:
        return f"dim of common kernel {self.dim} < n - r = {self.expected}"


@dataclass(frozen=True)
class ReductionResult:
    Q: np.ndarray
    reduced: np.ndarray
    kernel_basis: np.ndarray
    r: int
    # largest entry dropped outside the leading r x r block of Q^T A_j Q
    discarded: float = 0.0
    # kernel dimension measured by the rank test when it exceeded n - r
    measured_kernel_dimension: int | None = None

    @property
    def kernel_dimension(self) -> int:
        return self.kernel_basis.shape[1]


def kernel_intersection(p: LinearPencil, cfg: ToleranceConfig) -> np.ndarray:
    """Orthonormal basis of the intersection of ker A_j (nullspace of the stacked family)."""
    basis = nullspace_basis(p.matrices.reshape(p.m * p.n, p.n), cfg)
    logger.debug("common kernel dimension %d", basis.shape[1])
    return basis


def _complement(kernel: np.ndarray) -> np.ndarray:
    n, k = kernel.shape
    if k == 0:
        return np.eye(n, dtype=complex)
    projector = np.eye(n) - kernel @ kernel.conj().T
    q, _, _ = scipy.linalg.qr(projector, pivoting=True)
    return q[:, : n - k]


def reduce(p: LinearPencil, w: MaxRankWitness, cfg: ToleranceConfig) -> ReductionResult | KernelDeficit:
    """Split off the common kernel, or report that it is too small.

    Returns KernelDeficit when dim(common kernel) < n - r. A measured kernel larger
    than n - r is cut to the n - r smallest right singular directions of the
    stacked family and recorded in measured_kernel_dimension; verification of the
    final transform decides.
    """
    if np.asarray(w.lambda0).size != p.m or not 0 <= w.r <= p.n:
        raise DimensionError(
            f"witness (r={w.r}, |lambda0|={np.asarray(w.lambda0).size}) does not fit a pencil "
            f"with n={p.n}, m={p.m}"
        )

    kernel = kernel_intersection(p, cfg)
    k = kernel.shape[1]
    expected = p.n - w.r
    if k < expected:
        logger.info("kernel deficit: dim %d < n - r = %d", k, expected)
        return KernelDeficit(k, expected)
    measured = None
    if k > expected:
        logger.warning("common kernel dimension %d exceeds n - r = %d, keeping %d directions",
                       k, expected, expected)
        measured = k
        kernel = fixed_dim_nullspace(p.matrices.reshape(p.m * p.n, p.n), expected)
        k = expected

    r = w.r
    q = np.hstack([_complement(kernel), kernel]) if k else np.eye(p.n, dtype=complex)
    transformed = np.einsum("ai,jab,bk->jik", q, p.matrices, q)
    reduced = transformed[:, :r, :r]
    reduced = (reduced + np.transpose(reduced, (0, 2, 1))) / 2

    outside = transformed.copy()
    outside[:, :r, :r] = 0
    discarded = max_abs(outside)
    scale = max(1.0, max_abs(p.matrices))
    if discarded > cfg.residual_tol * scale:
        logger.warning("reduction drops off-block entries up to %.3e", discarded)
    else:
        logger.debug("reduction drops off-block entries up to %.3e", discarded)
    return ReductionResult(q, reduced, kernel, r, discarded, measured)

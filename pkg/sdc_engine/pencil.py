"""
Linear pencil A(lambda) = sum_j lambda_j A_j of a symmetric family and its
maximum-rank witness.
"""
import logging
from dataclasses import dataclass

import numpy as np

from sdc_engine.core_linalg import as_matrix, numerical_rank, require_symmetric, singular_gap
from sdc_engine.shared.config import ToleranceConfig
from sdc_engine.shared.errors import DimensionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearPencil:
    """m symmetric n x n matrices stored as an (m, n, n) complex stack."""

    matrices: np.ndarray

    @property
    def m(self) -> int:
        return self.matrices.shape[0]

    @property
    def n(self) -> int:
        return self.matrices.shape[1]

    def __iter__(self):
        return iter(self.matrices)

    @classmethod
    def from_matrices(cls, matrices, cfg: ToleranceConfig) -> "LinearPencil":
        """Validate and symmetrize a family of matrices.

        Raises DimensionError for an empty family or mismatched shapes and
        NotSymmetricError (with the 1-based member index) for asymmetric input.
        """
        mats = [as_matrix(a) for a in matrices]
        if not mats:
            raise DimensionError("a pencil needs at least one matrix")
        n = mats[0].shape[0]
        stack = []
        for index, a in enumerate(mats, start=1):
            if a.shape != (n, n):
                raise DimensionError(f"matrix {index} has shape {a.shape}, expected {(n, n)}")
            stack.append(require_symmetric(a, cfg, index=index))
        return cls(np.stack(stack))


def evaluate(p: LinearPencil, lam) -> np.ndarray:
    """A(lambda) = sum_j lambda_j A_j."""
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    if lam.size != p.m:
        raise DimensionError(f"lambda has length {lam.size}, pencil has {p.m} members")
    return np.tensordot(lam, p.matrices, axes=1)


@dataclass(frozen=True)
class MaxRankWitness:
    r: int
    lambda0: np.ndarray
    # singular values sigma_r and sigma_{r+1} of A(lambda0), kept for diagnostics
    sigma_last: float = 0.0
    sigma_next: float = 0.0
    source: str = "basis"


def _candidates(m: int, cfg: ToleranceConfig, include_basis: bool):
    if include_basis:
        for j in range(m):
            yield f"basis[{j + 1}]", np.eye(m, dtype=complex)[j]
        if m > 1:
            yield "ones", np.ones(m, dtype=complex) / np.sqrt(m)
    rng = cfg.rng()
    for k in range(cfg.max_rank_samples):
        draw = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        yield f"sample[{k}]", draw / np.linalg.norm(draw)


def max_rank_point(p: LinearPencil, cfg: ToleranceConfig, include_basis: bool = True) -> MaxRankWitness:
    """Maximum numerical rank of the pencil over a deterministic candidate set.

    Candidates are tried in order (basis vectors, the normalized all-ones vector,
    then max_rank_samples seeded complex Gaussian draws); the first one reaching
    the best rank is kept. The search stops early once rank n is reached.
    """
    best_rank = -1
    best_lam = None
    best_source = ""
    for source, lam in _candidates(p.m, cfg, include_basis):
        rank = numerical_rank(evaluate(p, lam), cfg)
        if rank > best_rank:
            best_rank, best_lam, best_source = rank, lam, source
            if rank == p.n:
                break

    if best_rank <= 0:
        # identically zero pencil: every unit vector is a witness
        best_rank = 0
        best_lam = np.eye(p.m, dtype=complex)[0]
        best_source = "basis[1]"

    sigma_last, sigma_next = singular_gap(evaluate(p, best_lam), best_rank)
    logger.debug("max rank %d of %d at %s (sigma_r=%.3e, sigma_r+1=%.3e)",
                 best_rank, p.n, best_source, sigma_last, sigma_next)
    return MaxRankWitness(best_rank, best_lam, sigma_last, sigma_next, best_source)

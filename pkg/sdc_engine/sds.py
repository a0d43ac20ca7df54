"""
Reduced family L_j = A~(lambda0)^{-1} A~_j and simultaneous diagonalization by
similarity.

The joint eigenbasis is found by recursive eigenspace refinement: the space is
kept as a list of common invariant subspaces (orthonormal bases B), and each
L_j in turn splits every subspace into the eigenspaces of B^H L_j B. Each L_j
is checked for defectiveness on every subspace it acts on.
"""
import functools
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from sdc_engine.core_linalg import eig, fixed_dim_nullspace, max_abs, numerical_rank, spectral_norm
from sdc_engine.pencil import MaxRankWitness
from sdc_engine.reduction import ReductionResult
from sdc_engine.shared.config import ToleranceConfig
from sdc_engine.shared.errors import SingularPencilError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NonCommuting:
    """L_j and L_k (1-based) do not commute."""

    j: int
    k: int

    kind = "non-commuting"

    def describe(self) -> str:
        return f"L_{self.j} and L_{self.k} do not commute"


@dataclass(frozen=True)
class Defective:
    """L_j (1-based) is not diagonalizable on a common invariant subspace."""

    j: int

    kind = "defective"

    def describe(self) -> str:
        return f"L_{self.j} is defective"


@dataclass(frozen=True)
class ReducedFamily:
    L: np.ndarray
    lambda0: np.ndarray
    # max |sum_j lambda0_j L_j - I|
    identity_residual: float = 0.0

    @property
    def m(self) -> int:
        return self.L.shape[0]

    @property
    def r(self) -> int:
        return self.L.shape[1]


@dataclass(frozen=True)
class CommutationCheck:
    commuting: bool
    pair: tuple[int, int] | None = None
    # largest |L_j L_k - L_k L_j|_max / (|L_j|_2 |L_k|_2) seen
    worst: float = 0.0


@dataclass(frozen=True)
class SdsResult:
    is_sds: bool
    reason: NonCommuting | Defective | None = None
    P: np.ndarray | None = None
    diagonals: np.ndarray | None = None
    block_sizes: list[int] = field(default_factory=list)
    # one row of joint eigenvalues (alpha_a^(1), ..., alpha_a^(m)) per block
    tuples: np.ndarray | None = None
    residual: float = 0.0
    commutator: float = 0.0


def build_reduced_family(rr: ReductionResult, w: MaxRankWitness, cfg: ToleranceConfig) -> ReducedFamily:
    """L_j = A~(lambda0)^{-1} A~_j via one LU factorization of A~(lambda0)."""
    lam = np.asarray(w.lambda0, dtype=complex)
    m, r = rr.reduced.shape[0], rr.r
    if r == 0:
        return ReducedFamily(np.zeros((m, 0, 0), dtype=complex), lam, 0.0)

    pivot = np.tensordot(lam, rr.reduced, axes=1)
    if numerical_rank(pivot, cfg) < r:
        raise SingularPencilError(
            f"reduced pencil at lambda0 has rank {numerical_rank(pivot, cfg)} < r = {r}"
        )
    lu = scipy.linalg.lu_factor(pivot)
    family = np.stack([scipy.linalg.lu_solve(lu, a) for a in rr.reduced])

    identity_residual = max_abs(np.tensordot(lam, family, axes=1) - np.eye(r))
    logger.debug("reduced family built, |sum lambda0_j L_j - I| = %.3e", identity_residual)
    return ReducedFamily(family, lam, identity_residual)


def pairwise_commute(f: ReducedFamily, cfg: ToleranceConfig, skip_identity_member: bool = False) -> CommutationCheck:
    """All-pairs commutation test, |[L_j, L_k]|_max <= residual_tol |L_j|_2 |L_k|_2.

    With skip_identity_member the member with the largest |lambda0_j| is left out:
    it is a combination of the identity and the others, so m - 1 members
    commuting pairwise is enough.
    """
    members = list(range(f.m))
    if skip_identity_member and f.m > 1:
        members.remove(int(np.argmax(np.abs(f.lambda0))))
    norms = [spectral_norm(l) for l in f.L]

    worst = 0.0
    for pos, j in enumerate(members):
        for k in members[pos + 1:]:
            scale = norms[j] * norms[k]
            if scale == 0.0:
                continue
            commutator = max_abs(f.L[j] @ f.L[k] - f.L[k] @ f.L[j])
            worst = max(worst, commutator / scale)
            if commutator > cfg.residual_tol * scale:
                logger.info("L_%d and L_%d do not commute (%.3e)", j + 1, k + 1, commutator)
                return CommutationCheck(False, (j + 1, k + 1), worst)
    return CommutationCheck(True, None, worst)


def _tuple_order(tol: float):
    def compare(a: np.ndarray, b: np.ndarray) -> int:
        for x, y in zip(a, b):
            if abs(x.real - y.real) > tol:
                return -1 if x.real < y.real else 1
            # conjugate pairs: upper half plane first
            if abs(x.imag - y.imag) > tol:
                return -1 if x.imag > y.imag else 1
        return 0

    return functools.cmp_to_key(lambda pa, pb: compare(pa[1], pb[1]))


def joint_diagonalize(f: ReducedFamily, cfg: ToleranceConfig) -> SdsResult:
    """Decide SDS for the reduced family and build its joint eigenbasis.

    Non-commuting families are rejected first. On success the columns of P are
    unit vectors grouped by joint eigenvalue tuple, blocks sorted by tuple.
    """
    m, r = f.m, f.r
    if r == 0:
        return SdsResult(True, None, np.zeros((0, 0), dtype=complex),
                         np.zeros((m, 0, 0), dtype=complex), [], np.zeros((0, m), dtype=complex))

    check = pairwise_commute(f, cfg)
    if not check.commuting:
        return SdsResult(False, NonCommuting(*check.pair), commutator=check.worst)

    blocks: list[tuple[np.ndarray, list[complex]]] = [(np.eye(r, dtype=complex), [])]
    for j in range(m):
        refined = []
        for basis, values in blocks:
            restricted = basis.conj().T @ f.L[j] @ basis
            decomposition = eig(restricted, cfg)
            if decomposition.defective:
                logger.info("L_%d is defective on a %d-dimensional invariant subspace", j + 1, basis.shape[1])
                return SdsResult(False, Defective(j + 1), commutator=check.worst)
            size = basis.shape[1]
            for cluster in decomposition.clusters:
                if len(cluster) == size:
                    sub = basis
                else:
                    center = decomposition.cluster_center(cluster)
                    sub = basis @ fixed_dim_nullspace(restricted - center * np.eye(size), len(cluster))
                value = complex(np.trace(sub.conj().T @ f.L[j] @ sub)) / sub.shape[1]
                refined.append((sub, values + [value]))
        blocks = refined
        logger.debug("after L_%d: %d invariant subspaces", j + 1, len(blocks))

    scale = max(1.0, max(spectral_norm(l) for l in f.L))
    blocks.sort(key=_tuple_order(cfg.eig_cluster_tol * scale))

    p = np.hstack([basis for basis, _ in blocks])
    sizes = [basis.shape[1] for basis, _ in blocks]
    tuples = np.array([values for _, values in blocks], dtype=complex)
    diagonals = np.stack([np.diag(np.repeat(tuples[:, j], sizes)) for j in range(m)])

    similar = np.stack([np.linalg.solve(p, l @ p) for l in f.L])
    residual = max(
        max_abs(similar[j] - diagonals[j]) / max(1.0, spectral_norm(f.L[j])) for j in range(m)
    )
    logger.info("reduced family is SDS: %d blocks, residual %.3e", len(sizes), residual)
    return SdsResult(True, None, p, diagonals, sizes, tuples, residual, check.worst)

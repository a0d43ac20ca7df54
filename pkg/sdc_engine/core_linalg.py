"""
Dense complex matrix kernels used by the SDC pipeline.

Every operation is a pure function of its inputs and a ToleranceConfig:
- numerical_rank / nullspace_basis via the singular value decomposition
- eig with cluster-wise defectiveness detection
- takagi factorization of complex symmetric matrices
"""
import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from sdc_engine.shared.config import ToleranceConfig
from sdc_engine.shared.errors import DimensionError, NotSymmetricError

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


def as_matrix(value) -> np.ndarray:
    """Return value as a 2-D complex128 array (a copy is made only when needed)."""
    arr = np.asarray(value, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def spectral_norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def is_symmetric(m: np.ndarray, tol: float) -> bool:
    """Plain-transpose symmetry, relative to |M|_max (the zero matrix is symmetric)."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max_abs(m)
    if scale == 0.0:
        return True
    return max_abs(m - m.T) <= tol * scale


def require_symmetric(m, cfg: ToleranceConfig, index: int | None = None) -> np.ndarray:
    """Validate symmetry and return the exactly symmetrized matrix."""
    m = as_matrix(m)
    label = f"matrix {index}" if index is not None else "matrix"
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{label} is not square: shape {m.shape}")
    if not is_symmetric(m, cfg.residual_tol):
        raise NotSymmetricError(
            f"{label} is not symmetric: max |M - M^T| = {max_abs(m - m.T):.3e}", index=index
        )
    return (m + m.T) / 2


def is_unitary(u: np.ndarray, tol: float) -> bool:
    u = as_matrix(u)
    return max_abs(u.conj().T @ u - np.eye(u.shape[1])) <= tol


def _count_above(singular_values: np.ndarray, scale: float, dim: int, rel_tol: float) -> int:
    if singular_values.size == 0 or scale <= 0:
        return 0
    threshold = rel_tol * dim * scale
    return int(np.count_nonzero(singular_values > threshold))


def numerical_rank(m, cfg: ToleranceConfig) -> int:
    """Number of singular values above rank_rel_tol * max(rows, cols) * sigma_max."""
    m = as_matrix(m)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return _count_above(s, float(s[0]), max(m.shape), cfg.rank_rel_tol)


def rank_at_scale(m, scale: float, cfg: ToleranceConfig) -> int:
    """Numerical rank measured against an external scale instead of sigma_max(m)."""
    m = as_matrix(m)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return _count_above(s, scale, max(m.shape), cfg.rank_rel_tol)


def singular_gap(m, rank: int) -> tuple[float, float]:
    """(sigma_r, sigma_{r+1}) of m, with 0.0 standing in for missing values."""
    m = as_matrix(m)
    s = np.linalg.svd(m, compute_uv=False) if m.size else np.zeros(0)
    last = float(s[rank - 1]) if 0 < rank <= s.size else 0.0
    following = float(s[rank]) if rank < s.size else 0.0
    return last, following


def nullspace_basis(m, cfg: ToleranceConfig) -> np.ndarray:
    """Orthonormal kernel basis (as columns) of m."""
    m = as_matrix(m)
    cols = m.shape[1]
    if m.size == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    rank = _count_above(s, float(s[0]), max(m.shape), cfg.rank_rel_tol)
    if rank == 0:
        return np.eye(cols, dtype=complex)
    return vh[rank:].conj().T


def fixed_dim_nullspace(m: np.ndarray, dim: int) -> np.ndarray:
    """The `dim` right singular vectors of m with the smallest singular values."""
    cols = m.shape[1]
    if dim <= 0:
        return np.zeros((cols, 0), dtype=complex)
    _, _, vh = np.linalg.svd(m, full_matrices=True)
    return vh[cols - dim:].conj().T


# ============================================
# EIGENVALUE CLUSTERING
# ============================================

def cluster_values(values: np.ndarray, radius: float) -> list[list[int]]:
    """Group indices whose values lie within radius of each other (transitive closure).

    Indices are visited in (Re, Im) order; clusters come out in order of their
    first member in that ordering.
    """
    values = np.asarray(values, dtype=complex).ravel()
    if values.size == 0:
        return []
    order = np.lexsort((values.imag, values.real))
    adjacency = csr_matrix(np.abs(values[:, None] - values[None, :]) <= radius)
    _, labels = connected_components(adjacency, directed=False)

    clusters: dict[int, list[int]] = {}
    for i in order:
        clusters.setdefault(int(labels[i]), []).append(int(i))
    return list(clusters.values())


class EigResult(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray
    defective: bool
    clusters: list[list[int]]

    def cluster_center(self, cluster: list[int]) -> complex:
        return complex(np.mean(self.values[cluster]))


def eig(m, cfg: ToleranceConfig) -> EigResult:
    """Eigendecomposition with a geometric-vs-algebraic multiplicity check.

    Clusters are formed with radius eig_cluster_tol * max(1, |M|_2). A cluster of
    size k around centre c is defective when rank(M - cI) > n - k, with the rank
    measured against the scale of M. Tight clusters within the wider
    eig_loose_tol radius of each other are merged and the merged group gets the
    same rank test, counted at eig_loose_tol, which catches Jordan blocks whose
    eigenvalues rounding split apart.
    """
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"eig needs a square matrix, got shape {m.shape}")
    if n == 0:
        return EigResult(np.zeros(0, dtype=complex), np.zeros((0, 0), dtype=complex), False, [])

    values, vectors = scipy.linalg.eig(m)
    values = values.astype(complex)
    vectors = vectors.astype(complex)
    norms = np.linalg.norm(vectors, axis=0)
    vectors = vectors / np.where(norms > 0, norms, 1.0)

    scale = max(1.0, spectral_norm(m))
    clusters = cluster_values(values, cfg.eig_cluster_tol * scale)
    identity = np.eye(n)

    defective = False
    for cluster in clusters:
        k = len(cluster)
        if k == 1:
            continue
        center = complex(np.mean(values[cluster]))
        if rank_at_scale(m - center * identity, scale, cfg) > n - k:
            logger.debug("cluster at %s of size %d is defective", center, k)
            defective = True
            break

    if not defective:
        defective = _merged_cluster_defect(m, values, clusters, scale, cfg)

    return EigResult(values, vectors, defective, clusters)


def _merged_cluster_defect(m, values, clusters, scale, cfg: ToleranceConfig) -> bool:
    """Rank test on groups of tight clusters lying within eig_loose_tol of each other.

    The rank of M - cI is counted at the loose tolerance. Distinct close
    eigenvalues leave M - cI below that threshold, while a Jordan block that
    rounding split into neighbouring clusters keeps a singular value of order |M|.
    """
    n = m.shape[0]
    cluster_of = {i: label for label, cluster in enumerate(clusters) for i in cluster}
    identity = np.eye(n)
    for group in cluster_values(values, cfg.eig_loose_tol * scale):
        if len({cluster_of[i] for i in group}) < 2:
            continue
        center = complex(np.mean(values[group]))
        s = np.linalg.svd(m - center * identity, compute_uv=False)
        if _count_above(s, scale, n, cfg.eig_loose_tol) > n - len(group):
            logger.debug("merged cluster at %s of size %d is defective", center, len(group))
            return True
    return False


# ============================================
# TAKAGI FACTORIZATION
# ============================================

class TakagiFactor(NamedTuple):
    V: np.ndarray
    D: np.ndarray

    @property
    def singular_values(self) -> np.ndarray:
        return np.diag(self.D).real


def takagi(c, cfg: ToleranceConfig) -> TakagiFactor:
    """Unitary V with V^T C V = D, D real non-negative diagonal in descending order.

    Built from the SVD C = U S W^H: inside each group of equal singular values the
    matrix Z = U_g^T W_g is symmetric unitary and its square root fixes the phases.
    When the residual of that construction is not at rounding level (close but not
    merged singular values), the factor is recomputed from the real symmetric
    embedding [[Re C, Im C], [Im C, -Re C]].
    """
    c = require_symmetric(c, cfg)
    n = c.shape[0]
    if n == 0:
        return TakagiFactor(np.zeros((0, 0), dtype=complex), np.zeros((0, 0)))

    u, s, wh = np.linalg.svd(c)
    top = float(s[0])
    if top == 0.0:
        return TakagiFactor(np.eye(n, dtype=complex), np.zeros((n, n)))

    zero_threshold = cfg.rank_rel_tol * n * top
    nonzero = int(np.count_nonzero(s > zero_threshold))
    w = wh.conj().T

    v = np.zeros((n, n), dtype=complex)
    for group in _singular_value_groups(s[:nonzero], cfg.eig_cluster_tol * top):
        u_g = u[:, group]
        z = u_g.T @ w[:, group]
        if len(group) == 1:
            root = np.sqrt(np.conj(z))
        else:
            root = scipy.linalg.sqrtm(np.conj(z))
        v[:, group] = np.conj(u_g @ root)
    # null directions: C conj(u) = 0 for left null vectors u
    v[:, nonzero:] = np.conj(u[:, nonzero:])

    d = np.diag(s)
    refine_tol = 100 * n * _EPS
    if not _takagi_accurate(c, v, d, refine_tol * top, refine_tol):
        logger.info("SVD-based Takagi residual too large; using symmetric embedding")
        v, d = _takagi_embedding(c, u, nonzero)
        if not _takagi_accurate(c, v, d, cfg.residual_tol * top, cfg.residual_tol):
            logger.warning("Takagi residual exceeds tolerance for a %dx%d block", n, n)
    return TakagiFactor(v, d)


def _singular_value_groups(s: np.ndarray, gap: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, value in enumerate(s):
        if groups and s[groups[-1][-1]] - value <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _takagi_accurate(c, v, d, residual_tol: float, unitary_tol: float) -> bool:
    return max_abs(v.T @ c @ v - d) <= residual_tol and is_unitary(v, unitary_tol)


def _takagi_embedding(c: np.ndarray, u: np.ndarray, nonzero: int) -> tuple[np.ndarray, np.ndarray]:
    # [a; b] with H [a; b] = sigma [a; b] gives x = a + ib with C conj(x) = sigma x
    n = c.shape[0]
    a, b = c.real, c.imag
    h = np.block([[a, b], [b, -a]])
    evals, evecs = scipy.linalg.eigh(h)
    order = np.argsort(evals)[::-1][:nonzero]
    x = evecs[:n, order] + 1j * evecs[n:, order]

    v = np.zeros((n, n), dtype=complex)
    v[:, :nonzero] = np.conj(x)
    v[:, nonzero:] = np.conj(u[:, nonzero:])
    sigma = np.concatenate([np.clip(evals[order], 0.0, None), np.zeros(n - nonzero)])
    return v, np.diag(sigma)

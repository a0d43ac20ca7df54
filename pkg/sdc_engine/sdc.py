"""
SDC decision: runs the pipeline

    max_rank_point -> reduce -> build_reduced_family -> joint_diagonalize
    -> assemble_congruence -> verify_certificate

and returns an SdcCertificate. A NotSDC verdict carries the reason of the first
failing step; an SDC verdict always carries a verified congruence transform P.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from sdc_engine.core_linalg import max_abs, numerical_rank, takagi
from sdc_engine.pencil import LinearPencil, MaxRankWitness, max_rank_point
from sdc_engine.reduction import KernelDeficit, ReductionResult, reduce
from sdc_engine.sds import Defective, NonCommuting, SdsResult, build_reduced_family, joint_diagonalize
from sdc_engine.shared.config import ToleranceConfig
from sdc_engine.shared.errors import AssemblyError, DimensionError, VerificationError

logger = logging.getLogger(__name__)

MARGINAL_FACTOR = 10.0


class Verdict(str, Enum):
    SDC = "SDC"
    NOT_SDC = "NotSDC"


Reason = KernelDeficit | NonCommuting | Defective


@dataclass
class SdcCertificate:
    verdict: Verdict
    witness: MaxRankWitness
    n: int
    m: int
    reason: Reason | None = None
    P: np.ndarray | None = None
    diagonals: np.ndarray | None = None
    residual: float | None = None
    kernel_dimension: int | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_sdc(self) -> bool:
        return self.verdict is Verdict.SDC

    @property
    def r(self) -> int:
        return self.witness.r

    @property
    def marginal(self) -> bool:
        return bool(self.diagnostics.get("marginal", False))


@dataclass(frozen=True)
class BlockGrouping:
    """Sizes p_1..p_d of the joint-eigenvalue blocks and their distinct tuples."""

    boundaries: list[int]
    tuples: np.ndarray

    @classmethod
    def from_sds(cls, sds: SdsResult) -> "BlockGrouping":
        return cls(list(sds.block_sizes), sds.tuples)

    @property
    def offsets(self) -> list[int]:
        return [int(x) for x in np.concatenate([[0], np.cumsum(self.boundaries)])]

    def slices(self):
        offsets = self.offsets
        return [slice(offsets[a], offsets[a + 1]) for a in range(len(self.boundaries))]

    def expand(self, j: int) -> np.ndarray:
        """alpha_1^(j) I_p1 (+) ... (+) alpha_d^(j) I_pd as a vector."""
        return np.repeat(self.tuples[:, j], self.boundaries)


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    residual: float
    condition: float
    # (m, n) diagonal entries of P^T A_j P
    diagonals: np.ndarray
    singular: bool = False


@dataclass(frozen=True)
class CrossCheck:
    agree: bool
    verdict: Verdict
    lambda0: np.ndarray
    reason: str | None = None


def assemble_congruence(rr: ReductionResult, sds: SdsResult, w: MaxRankWitness,
                        cfg: ToleranceConfig) -> tuple[np.ndarray, np.ndarray]:
    """Lift the joint eigenbasis of the reduced family to a congruence transform.

    B = P_sds^T A~(lambda0) P_sds is block diagonal along the tuple groups; each
    diagonal block is Takagi-factored, P_r = P_sds (V_1 (+) ... (+) V_d) and
    P = Q (P_r (+) I_{n-r}). Returns P and the (m, n, n) stack of D_j.
    """
    if not sds.is_sds:
        raise AssemblyError("cannot assemble a transform for a family that is not SDS")
    n, r, m = rr.Q.shape[0], rr.r, rr.reduced.shape[0]
    if r == 0:
        return rr.Q.copy(), np.zeros((m, n, n), dtype=complex)

    grouping = BlockGrouping.from_sds(sds)
    pivot = np.tensordot(np.asarray(w.lambda0, dtype=complex), rr.reduced, axes=1)
    b = sds.P.T @ pivot @ sds.P
    b = (b + b.T) / 2

    off_block = b.copy()
    for block in grouping.slices():
        off_block[block, block] = 0
    leak = max_abs(off_block)
    if leak > cfg.residual_tol * max(1.0, max_abs(b)):
        raise AssemblyError(f"off-diagonal blocks of P^T A(lambda0) P reach {leak:.3e}")

    factors = [takagi(b[block, block], cfg) for block in grouping.slices()]
    v = scipy.linalg.block_diag(*[f.V for f in factors])
    scale = np.concatenate([f.singular_values for f in factors])
    p_r = sds.P @ v
    p = rr.Q @ scipy.linalg.block_diag(p_r, np.eye(n - r))

    diagonals = np.zeros((m, n, n), dtype=complex)
    for j in range(m):
        diagonals[j, :r, :r] = np.diag(scale * grouping.expand(j))
    logger.debug("assembled P from %d Takagi blocks", len(factors))
    return p, diagonals


def verify_certificate(p: LinearPencil, P: np.ndarray, cfg: ToleranceConfig) -> VerificationReport:
    """Recompute P^T A_j P and measure its largest off-diagonal entry.

    residual = max_j max_{k != l} |(P^T A_j P)_kl| / max(1, max_j |A_j|_max).
    A singular P fails without raising.
    """
    P = np.asarray(P, dtype=complex)
    if P.shape != (p.n, p.n):
        raise DimensionError(f"transform has shape {P.shape}, expected {(p.n, p.n)}")

    transformed = np.einsum("ai,jab,bk->jik", P, p.matrices, P)
    measured = np.diagonal(transformed, axis1=1, axis2=2).copy()
    off = transformed.copy()
    idx = np.arange(p.n)
    off[:, idx, idx] = 0
    residual = max_abs(off) / max(1.0, max_abs(p.matrices))

    singular = p.n > 0 and numerical_rank(P, cfg) < p.n
    if singular:
        condition = float("inf")
    else:
        condition = float(np.linalg.cond(P)) if p.n else 1.0
    passed = not singular and residual <= cfg.residual_tol
    return VerificationReport(passed, residual, condition, measured, singular)


def shared_zero_pattern(diagonals: np.ndarray, cfg: ToleranceConfig) -> list[int]:
    """Diagonal positions (0-based) where every D_j vanishes."""
    diagonals = np.asarray(diagonals)
    if diagonals.size == 0:
        return list(range(diagonals.shape[-1])) if diagonals.ndim == 3 else []
    entries = np.abs(np.diagonal(diagonals, axis1=1, axis2=2))
    threshold = cfg.residual_tol * max(1.0, float(entries.max()))
    return [int(i) for i in np.flatnonzero(np.all(entries <= threshold, axis=0))]


def _rank_preservation(p: LinearPencil, P: np.ndarray, cfg: ToleranceConfig) -> dict:
    ranks = []
    for a in p.matrices:
        ranks.append([numerical_rank(a, cfg), numerical_rank(P.T @ a @ P, cfg)])
    return {"preserved": all(before == after for before, after in ranks), "ranks": ranks}


def cross_check_witness(p: LinearPencil, cfg: ToleranceConfig, reference: Verdict | None = None) -> CrossCheck:
    """Re-decide with a generic random witness from another seed and compare verdicts."""
    if reference is None:
        reference = decide_sdc(p, cfg).verdict
    other = decide_sdc(p, cfg.with_seed(cfg.rng_seed + 1), include_basis=False)
    reason = other.reason.kind if other.reason is not None else None
    return CrossCheck(reference == other.verdict, other.verdict, other.witness.lambda0, reason)


def decide_sdc(family, cfg: ToleranceConfig | None = None, *, include_basis: bool = True,
               cross_check: bool = False) -> SdcCertificate:
    """Decide whether the family is simultaneously diagonalizable via congruence.

    family is a LinearPencil or a sequence of symmetric matrices (validated here).
    Raises VerificationError if an assembled transform fails verification.
    """
    cfg = cfg or ToleranceConfig.from_env()
    p = family if isinstance(family, LinearPencil) else LinearPencil.from_matrices(family, cfg)

    w = max_rank_point(p, cfg, include_basis=include_basis)
    diagnostics = {
        "sigma_r": w.sigma_last,
        "sigma_r_plus_1": w.sigma_next,
        "witness_source": w.source,
    }

    def not_sdc(reason: Reason, kernel_dimension: int) -> SdcCertificate:
        logger.info("verdict NotSDC (%s)", reason.describe())
        if cross_check:
            diagnostics["cross_check"] = cross_check_witness(p, cfg, Verdict.NOT_SDC)
        return SdcCertificate(Verdict.NOT_SDC, w, p.n, p.m, reason=reason,
                              kernel_dimension=kernel_dimension, diagnostics=diagnostics)

    rr = reduce(p, w, cfg)
    if isinstance(rr, KernelDeficit):
        diagnostics["kernel_dimension"] = rr.dim
        return not_sdc(rr, rr.dim)
    diagnostics["kernel_dimension"] = rr.kernel_dimension
    diagnostics["discarded"] = rr.discarded
    if rr.measured_kernel_dimension is not None:
        diagnostics["measured_kernel_dimension"] = rr.measured_kernel_dimension

    family_l = build_reduced_family(rr, w, cfg)
    diagnostics["identity_residual"] = family_l.identity_residual
    sds = joint_diagonalize(family_l, cfg)
    diagnostics["commutator"] = sds.commutator
    if not sds.is_sds:
        return not_sdc(sds.reason, rr.kernel_dimension)
    diagnostics["sds_residual"] = sds.residual
    diagnostics["block_sizes"] = list(sds.block_sizes)

    P, diagonals = assemble_congruence(rr, sds, w, cfg)
    report = verify_certificate(p, P, cfg)
    if not report.passed:
        raise VerificationError(
            f"assembled transform fails verification: residual {report.residual:.3e}, "
            f"condition {report.condition:.3e}"
        )

    marginal = report.residual > cfg.residual_tol / MARGINAL_FACTOR
    if marginal:
        logger.warning("residual %.3e is within a factor %g of the tolerance",
                       report.residual, MARGINAL_FACTOR)
    zeros = shared_zero_pattern(diagonals, cfg)
    diagnostics.update({
        "condition": report.condition,
        "marginal": marginal,
        "zero_pattern": zeros,
        "zero_pattern_trailing": zeros == list(range(w.r, p.n)),
        "rank_preservation": _rank_preservation(p, P, cfg),
    })
    if cross_check:
        diagnostics["cross_check"] = cross_check_witness(p, cfg, Verdict.SDC)

    logger.info("verdict SDC (r=%d, residual %.3e)", w.r, report.residual)
    return SdcCertificate(Verdict.SDC, w, p.n, p.m, P=P, diagonals=diagonals, residual=report.residual,
                          kernel_dimension=rr.kernel_dimension, diagnostics=diagnostics)

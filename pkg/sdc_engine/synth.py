"""
Seeded synthetic families with known answers.

- sdc:           A_j = Q0^T (Delta_j (+) 0_{n-r}) Q0, SDC by construction
- noncommuting:  reduced blocks diag, diag, then generic symmetric ones
- defective:     reduced blocks S, T with S^{-1} T a Jordan block, then their combinations
- bss:           A_j = Q^T D_j Q with n independent sources (r = n)

Every instance carries a ground-truth matrix set (Q0 followed by the reduced
blocks padded to n x n) which is written next to the family file.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg
from faker import Faker
from scipy.stats import unitary_group

from sdc_engine.matrix_io import FileMetadata, write_matrix_set
from sdc_engine.shared.errors import SynthError

logger = logging.getLogger(__name__)

KINDS = ("sdc", "noncommuting", "defective", "bss")

CONSTRUCTIONS = {
    "sdc": "A_j = Q0^T (Delta_j (+) 0) Q0 with random diagonal Delta_j",
    "noncommuting": "reduced blocks diag(Delta_1), diag(Delta_2) and random symmetric blocks for j >= 3",
    "defective": "reduced blocks [[0,1],[1,0]] (+) diag and [[0,1],[1,1]] (+) diag; "
                 "further members are random combinations of the first two",
    "bss": "A_j = Q^T D_j Q with full-rank mixing Q and diagonal source statistics D_j",
}


@dataclass
class SynthInstance:
    kind: str
    n: int
    m: int
    r: int
    seed: int
    matrices: np.ndarray
    mixing: np.ndarray
    # reduced r x r blocks A~_j before mixing
    blocks: np.ndarray
    name: str = ""
    notes: dict = field(default_factory=dict)

    def metadata(self) -> FileMetadata:
        return FileMetadata(
            name=self.name,
            seed=self.seed,
            provenance=f"sdc_engine synth kind={self.kind} n={self.n} m={self.m} r={self.r}",
            role="family",
            extra={"kind": self.kind, "r": self.r, **self.notes},
        )

    def truth_metadata(self) -> FileMetadata:
        return FileMetadata(
            name=f"{self.name}.truth",
            seed=self.seed,
            provenance=CONSTRUCTIONS[self.kind],
            role="ground-truth",
            extra={"kind": self.kind, "r": self.r, "layout": "Q0 followed by padded blocks", **self.notes},
        )

    def truth_stack(self) -> np.ndarray:
        padded = np.zeros((self.m, self.n, self.n), dtype=complex)
        padded[:, : self.r, : self.r] = self.blocks
        return np.concatenate([self.mixing[None], padded])


def _well_conditioned(rng: np.random.Generator, n: int) -> np.ndarray:
    """U diag(s) V with Haar unitaries and singular values in [0.5, 2]."""
    if n == 1:
        return np.array([[np.exp(2j * np.pi * rng.random()) * rng.uniform(0.5, 2.0)]])
    u = unitary_group.rvs(n, random_state=rng)
    v = unitary_group.rvs(n, random_state=rng)
    return u @ np.diag(rng.uniform(0.5, 2.0, n)) @ v


def _random_diagonal(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.uniform(0.5, 2.0, size) * np.exp(2j * np.pi * rng.random(size))


def _random_symmetric(rng: np.random.Generator, size: int) -> np.ndarray:
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return (g + g.T) / 2


def _validate(kind: str, n: int, m: int, r: int) -> None:
    if kind not in KINDS:
        raise SynthError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    if n < 1 or m < 1:
        raise SynthError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if not 1 <= r <= n:
        raise SynthError(f"need 1 <= r <= n, got r={r}, n={n}")
    if kind == "noncommuting" and (m < 3 or r < 2):
        raise SynthError("noncommuting families need m >= 3 and r >= 2")
    if kind == "defective" and (m < 2 or r < 2):
        raise SynthError("defective families need m >= 2 and r >= 2")
    if kind == "bss" and r != n:
        raise SynthError("bss families have r = n")


def _sdc_blocks(rng, m: int, r: int, notes: dict, allow_repeat: bool = True) -> np.ndarray:
    deltas = np.stack([_random_diagonal(rng, r) for _ in range(m)])
    if allow_repeat and r >= 3 and rng.random() < 0.5:
        # repeated joint eigenvalue: positions 1 and 2 share every Delta_j entry
        deltas[:, 1] = deltas[:, 0]
        notes["repeated_tuple"] = True
    return np.stack([np.diag(d) for d in deltas])


def _noncommuting_blocks(rng, m: int, r: int) -> np.ndarray:
    blocks = [np.diag(_random_diagonal(rng, r)), np.diag(_random_diagonal(rng, r))]
    blocks += [_random_symmetric(rng, r) for _ in range(m - 2)]
    return np.stack(blocks)


def _defective_blocks(rng, m: int, r: int) -> np.ndarray:
    s = np.array([[0, 1], [1, 0]], dtype=complex)
    t = np.array([[0, 1], [1, 1]], dtype=complex)
    first = scipy.linalg.block_diag(s, np.diag(_random_diagonal(rng, r - 2)))
    second = scipy.linalg.block_diag(t, np.diag(_random_diagonal(rng, r - 2)))
    blocks = [first, second]
    for _ in range(m - 2):
        c, d = _random_diagonal(rng, 2)
        blocks.append(c * first + d * second)
    return np.stack(blocks)


def generate(kind: str, n: int, m: int, r: int | None = None, seed: int = 0) -> SynthInstance:
    """Build a seeded synthetic family of the given kind (r defaults to n)."""
    r = n if r is None else r
    _validate(kind, n, m, r)
    rng = np.random.default_rng(seed)
    notes: dict = {}

    if kind == "sdc":
        blocks = _sdc_blocks(rng, m, r, notes)
    elif kind == "bss":
        blocks = _sdc_blocks(rng, m, r, notes, allow_repeat=False)
    elif kind == "noncommuting":
        blocks = _noncommuting_blocks(rng, m, r)
    else:
        blocks = _defective_blocks(rng, m, r)

    mixing = _well_conditioned(rng, n)
    padded = np.zeros((m, n, n), dtype=complex)
    padded[:, :r, :r] = blocks
    matrices = np.einsum("ai,jab,bk->jik", mixing, padded, mixing)
    matrices = (matrices + np.transpose(matrices, (0, 2, 1))) / 2

    fake = Faker()
    fake.seed_instance(seed)
    name = f"{kind}-{fake.word()}-{fake.word()}"
    logger.debug("synthesized %s (n=%d, m=%d, r=%d, seed=%d)", name, n, m, r, seed)
    return SynthInstance(kind, n, m, r, seed, matrices, mixing, blocks, name, notes)


def truth_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".truth.json")


def write_instance(path, instance: SynthInstance) -> tuple[Path, Path]:
    """Write the family and its ground-truth sidecar; returns both paths."""
    path = Path(path)
    sidecar = truth_path(path)
    write_matrix_set(path, instance.matrices, instance.metadata())
    write_matrix_set(sidecar, instance.truth_stack(), instance.truth_metadata())
    return path, sidecar


def source_recovery_error(mixing: np.ndarray, P: np.ndarray) -> float:
    """How far mixing @ P is from a scaled permutation (0.0 for exact recovery).

    Per column, the mass outside the largest entry relative to that entry;
    inf when the largest entries do not form a permutation.
    """
    product = np.abs(np.asarray(mixing) @ np.asarray(P))
    rows = np.argmax(product, axis=0)
    if len(set(rows.tolist())) != product.shape[1]:
        return float("inf")
    peaks = product[rows, np.arange(product.shape[1])]
    return float(np.max((product.sum(axis=0) - peaks) / peaks))

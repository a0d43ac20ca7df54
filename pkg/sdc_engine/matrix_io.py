"""
Matrix-set and structure-tensor files.

Both are JSON documents with complex entries stored as [re, im] pairs. Files
written here use a canonical layout (one matrix row per line, floats printed
with 17 significant digits) so that reading and rewriting a canonical file is
bit-identical.
"""
import json
import logging
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from sdc_engine.pencil import LinearPencil
from sdc_engine.shared.config import ToleranceConfig
from sdc_engine.shared.errors import MatrixFileError
from sdc_engine.shared.utils import complex_pair, pairs_to_array

logger = logging.getLogger(__name__)

MATRIX_SET_FORMAT = "sdc-matrix-set"
STRUCTURE_TENSOR_FORMAT = "sdc-structure-tensor"

Pair = tuple[float, float]


class FileMetadata(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    seed: int | None = None
    provenance: str | None = None
    role: Literal["family", "transform", "ground-truth"] = "family"
    extra: dict[str, Any] = Field(default_factory=dict)


class MatrixSetFile(BaseModel):
    """m dense n x n complex matrices."""

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    format: Literal["sdc-matrix-set"] = MATRIX_SET_FORMAT
    version: Literal[1] = 1
    n: int = Field(ge=0)
    m: int = Field(ge=1)
    metadata: FileMetadata = Field(default_factory=FileMetadata)
    matrices: list[list[list[Pair]]]

    @model_validator(mode="after")
    def _check_shapes(self):
        if len(self.matrices) != self.m:
            raise ValueError(f"declared m={self.m} but {len(self.matrices)} matrices given")
        for index, rows in enumerate(self.matrices, start=1):
            if len(rows) != self.n:
                raise ValueError(f"matrix {index} has {len(rows)} rows, expected n={self.n}")
            for row_no, row in enumerate(rows, start=1):
                if len(row) != self.n:
                    raise ValueError(
                        f"matrix {index} row {row_no} has {len(row)} entries, expected n={self.n}"
                    )
        return self

    def to_array(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros((self.m, 0, 0), dtype=complex)
        return pairs_to_array(self.matrices)

    @classmethod
    def from_array(cls, matrices, metadata: FileMetadata | dict | None = None) -> "MatrixSetFile":
        stack = np.asarray(matrices, dtype=complex)
        if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
            raise MatrixFileError(f"expected an (m, n, n) stack, got shape {stack.shape}")
        return cls(
            n=stack.shape[1],
            m=stack.shape[0],
            metadata=_as_metadata(metadata),
            matrices=[[[complex_pair(z) for z in row] for row in a] for a in stack],
        )


class StructureTensorFile(BaseModel):
    """Structure constants m_ijk of an n-dimensional algebra: e_i e_j = sum_k m_ijk e_k."""

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    format: Literal["sdc-structure-tensor"] = STRUCTURE_TENSOR_FORMAT
    version: Literal[1] = 1
    n: int = Field(ge=1)
    metadata: FileMetadata = Field(default_factory=FileMetadata)
    entries: list[list[list[Pair]]]

    @model_validator(mode="after")
    def _check_shape(self):
        if len(self.entries) != self.n:
            raise ValueError(f"entries has {len(self.entries)} slices, expected n={self.n}")
        for i, plane in enumerate(self.entries, start=1):
            if len(plane) != self.n or any(len(row) != self.n for row in plane):
                raise ValueError(f"entries[{i}] is not an n x n array of [re, im] pairs (n={self.n})")
        return self

    def to_array(self) -> np.ndarray:
        return pairs_to_array(self.entries)

    @classmethod
    def from_array(cls, entries, metadata: FileMetadata | dict | None = None) -> "StructureTensorFile":
        tensor = np.asarray(entries, dtype=complex)
        if tensor.ndim != 3 or len(set(tensor.shape)) != 1:
            raise MatrixFileError(f"expected an (n, n, n) tensor, got shape {tensor.shape}")
        return cls(
            n=tensor.shape[0],
            metadata=_as_metadata(metadata),
            entries=[[[complex_pair(z) for z in row] for row in plane] for plane in tensor],
        )


def _as_metadata(metadata) -> FileMetadata:
    if metadata is None:
        return FileMetadata()
    if isinstance(metadata, FileMetadata):
        return metadata
    return FileMetadata(**metadata)


# ============================================
# PARSING
# ============================================

def _format_location(loc: tuple) -> str:
    out = ""
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out


def _parse(text: str, model: type[BaseModel], source: str):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise MatrixFileError(f"invalid JSON: {e.msg} (column {e.colno})", f"{source}:{e.lineno}") from e
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = _format_location(first["loc"])
        location = f"{source}: {where}" if where else source
        raise MatrixFileError(first["msg"], location) from e


def parse_matrix_set(text: str, source: str = "<string>") -> MatrixSetFile:
    return _parse(text, MatrixSetFile, source)


def parse_structure_tensor(text: str, source: str = "<string>") -> StructureTensorFile:
    return _parse(text, StructureTensorFile, source)


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise MatrixFileError(f"cannot read file: {e.strerror}", str(path)) from e


def read_matrix_set(path) -> MatrixSetFile:
    model = parse_matrix_set(_read_text(path), str(path))
    logger.debug("read %d matrices of size %d from %s", model.m, model.n, path)
    return model


def read_structure_tensor(path) -> StructureTensorFile:
    return parse_structure_tensor(_read_text(path), str(path))


def load_family(path, cfg: ToleranceConfig) -> tuple[LinearPencil, MatrixSetFile]:
    """Read a matrix-set file and validate it as a symmetric family."""
    model = read_matrix_set(path)
    return LinearPencil.from_matrices(list(model.to_array()), cfg), model


# ============================================
# CANONICAL WRITING
# ============================================

def _number(x: float) -> str:
    return f"{float(x) + 0.0:.17g}"


def _row(row) -> str:
    return "[" + ", ".join(f"[{_number(re)}, {_number(im)}]" for re, im in row) + "]"


def _block(rows, indent: str) -> list[str]:
    lines = [f"{indent}["]
    for pos, row in enumerate(rows):
        comma = "," if pos < len(rows) - 1 else ""
        lines.append(f"{indent}  {_row(row)}{comma}")
    lines.append(f"{indent}]")
    return lines


def _dump(header: dict, key: str, blocks) -> str:
    lines = ["{"]
    for name, value in header.items():
        lines.append(f"  {json.dumps(name)}: {json.dumps(value, sort_keys=True)},")
    lines.append(f"  {json.dumps(key)}: [")
    for pos, rows in enumerate(blocks):
        block = _block(rows, "    ")
        if pos < len(blocks) - 1:
            block[-1] += ","
        lines.extend(block)
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dump_matrix_set(model: MatrixSetFile) -> str:
    header = {
        "format": model.format,
        "version": model.version,
        "n": model.n,
        "m": model.m,
        "metadata": model.metadata.model_dump(mode="json", exclude_none=True),
    }
    return _dump(header, "matrices", model.matrices)


def dump_structure_tensor(model: StructureTensorFile) -> str:
    header = {
        "format": model.format,
        "version": model.version,
        "n": model.n,
        "metadata": model.metadata.model_dump(mode="json", exclude_none=True),
    }
    return _dump(header, "entries", model.entries)


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise MatrixFileError(f"cannot write file: {e.strerror}", str(path)) from e


def write_matrix_set(path, matrices, metadata: FileMetadata | dict | None = None) -> MatrixSetFile:
    model = matrices if isinstance(matrices, MatrixSetFile) else MatrixSetFile.from_array(matrices, metadata)
    _write_text(path, dump_matrix_set(model))
    logger.debug("wrote %d matrices to %s", model.m, path)
    return model


def write_structure_tensor(path, entries, metadata: FileMetadata | dict | None = None) -> StructureTensorFile:
    model = entries if isinstance(entries, StructureTensorFile) else StructureTensorFile.from_array(entries, metadata)
    _write_text(path, dump_structure_tensor(model))
    return model


def write_transform(path, P: np.ndarray, diagonals: np.ndarray, source: str | None = None) -> MatrixSetFile:
    """Write [P, D_1, ..., D_m] as a matrix set with role "transform"."""
    stack = np.concatenate([np.asarray(P, dtype=complex)[None], np.asarray(diagonals, dtype=complex)])
    metadata = FileMetadata(
        name="congruence-transform",
        provenance=f"sdc_engine transform of {source}" if source else "sdc_engine transform",
        role="transform",
        extra={"layout": "P followed by D_1..D_m"},
    )
    return write_matrix_set(path, stack, metadata)

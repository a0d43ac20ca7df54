"""Exception hierarchy shared by every sdc_engine module.

Verdicts (kernel deficit, non-commuting, defective) are returned as values;
only genuine input or consistency failures are raised.
"""


class SdcError(Exception):
    """Base class for all sdc_engine errors."""


class ConfigError(SdcError, ValueError):
    """An environment variable holds a value that cannot be used."""


class NotSymmetricError(SdcError, ValueError):
    """A matrix that must be symmetric is not, within tolerance."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class DimensionError(SdcError, ValueError):
    """Shapes or lengths do not agree."""


class SingularPencilError(SdcError):
    """The reduced pencil at the witness point is numerically singular."""


class AssemblyError(SdcError):
    """Off-diagonal blocks of the congruence-transformed pencil are not small."""


class VerificationError(SdcError):
    """An assembled congruence transform did not pass verification."""


class MatrixFileError(SdcError):
    """A matrix-set or structure-tensor file is malformed."""

    def __init__(self, message: str, location: str | None = None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class NonCommutativeTensorError(MatrixFileError):
    """Structure constants violate m_ijk = m_jik (indices are 1-based)."""

    def __init__(self, i: int, j: int, k: int, detail: str = ""):
        message = f"structure tensor is not commutative at (i,j,k)=({i},{j},{k})"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.indices = (i, j, k)


class SynthError(SdcError, ValueError):
    """Invalid parameters for a synthetic instance."""

"""
Numerical thresholds and RNG seed used across the pipeline.

Defaults can be overridden from the environment (or a .env file):
- SDC_DEFAULT_TOL: residual_tol
- SDC_RANK_TOL: rank_rel_tol
- SDC_SEED: rng_seed
"""
import os

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

from sdc_engine.shared.errors import ConfigError

load_dotenv(override=True)

DEFAULT_RANK_REL_TOL = 1e-10
DEFAULT_EIG_CLUSTER_TOL = 1e-8
DEFAULT_RESIDUAL_TOL = 1e-8
DEFAULT_MAX_RANK_SAMPLES = 32
DEFAULT_RNG_SEED = 0


class ToleranceConfig(BaseModel):
    """All thresholds of the pipeline plus the seed for witness sampling."""

    model_config = ConfigDict(frozen=True)

    rank_rel_tol: float = Field(DEFAULT_RANK_REL_TOL, gt=0)
    eig_cluster_tol: float = Field(DEFAULT_EIG_CLUSTER_TOL, gt=0)
    residual_tol: float = Field(DEFAULT_RESIDUAL_TOL, gt=0)
    max_rank_samples: int = Field(DEFAULT_MAX_RANK_SAMPLES, ge=1)
    rng_seed: int = DEFAULT_RNG_SEED

    @classmethod
    def from_env(cls, **overrides) -> "ToleranceConfig":
        """Build a config from environment defaults, then apply explicit overrides."""
        values = {}
        residual = _read_env("SDC_DEFAULT_TOL", float)
        if residual is not None:
            values["residual_tol"] = residual
        rank = _read_env("SDC_RANK_TOL", float)
        if rank is not None:
            values["rank_rel_tol"] = rank
        seed = _read_env("SDC_SEED", int)
        if seed is not None:
            values["rng_seed"] = seed
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_seed(self, seed: int) -> "ToleranceConfig":
        return self.model_copy(update={"rng_seed": seed})

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.rng_seed)

    @property
    def eig_loose_tol(self) -> float:
        """Wider grouping radius for eigenvalues of a Jordan block split by rounding."""
        return 100.0 * self.eig_cluster_tol


def _read_env(name: str, kind):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = kind(raw)
    except ValueError as e:
        raise ConfigError(f"{name}={raw!r} is not a valid {kind.__name__}") from e
    if kind is float and not value > 0:
        raise ConfigError(f"{name} must be strictly positive, got {raw!r}")
    return value

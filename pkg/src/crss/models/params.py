"""Pydantic records for exponents, experiment settings and theorem constants."""

from typing import List, NamedTuple, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import config

# Guard band around the gamma poles at s = 0 and s = Q.
S_GUARD = 1e-6


class ModeIndex(NamedTuple):
    """Bidegree (j, k) of a bispherical harmonic space H_{j,k}."""

    j: int
    k: int


class InequalityParams(BaseModel):
    """Exponent bookkeeping shared by every formula: n, Q = 2n+2, s, q, p."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(1, ge=1, description="Complex dimension of H^n (sphere S^{2n+1})")
    s: float = Field(..., description="Fractional order, 0 < s < Q")

    @model_validator(mode="after")
    def _check_range(self) -> "InequalityParams":
        Q = 2 * self.n + 2
        if not (S_GUARD <= self.s <= Q - S_GUARD):
            raise ValueError(
                f"s={self.s} outside [{S_GUARD}, {Q - S_GUARD}]; use the limit entry points at the endpoints"
            )
        return self

    @property
    def Q(self) -> int:
        return 2 * self.n + 2

    @property
    def q(self) -> float:
        return 2.0 * self.Q / (self.Q - self.s)

    @property
    def p(self) -> float:
        return 2.0 * self.Q / (self.Q + self.s)

    @property
    def gap(self) -> float:
        """lambda = Q - s, the distance to the endpoint case."""
        return self.Q - self.s


class TheoremConstants(BaseModel):
    """Closed-form constants of the local and global remainder estimates."""

    fs_local: float = Field(..., description="2s/(Q+4+s), local FS stability constant")
    dual_ratio: float = Field(..., description="(Q+4+s)/(Q+4-s) * C, local dual remainder limit")
    bo_ratio: float = Field(..., description="n+2, local BO / Log-HLS limit")
    spectral_gap: float = Field(..., description="1 - lambda_{1,0}/lambda_{2,0}")


class Tolerances(BaseModel):
    """Acceptance tolerances; defaults follow the acceptance table."""

    identity: float = 1e-12
    extremizer: float = 1e-7
    local_ratio: float = 1e-2
    limit_ratio: float = 2e-2
    global_bound: float = 1e-8
    square_identity: float = 1e-8
    bo_extremizer: float = 1e-6
    invariance: float = 1e-5
    covariance: float = 1e-8
    upper_bound: float = 1e-3
    min_order: float = 0.8


class ExperimentConfig(BaseModel):
    """Settings of one reproducible experiment run (loaded from JSON)."""

    n: int = Field(1, ge=1, le=1, description="Complex dimension; the numerical layer lives on S^3")
    s_values: List[float] = Field(default_factory=lambda: [1.0, 2.0, 3.0])
    band_limit: int = Field(default_factory=lambda: config.BAND_LIMIT, ge=1)
    eps_schedule: List[float] = Field(default_factory=lambda: [3e-2, 1e-2, 3e-3, 1e-3])
    modes: List[Tuple[int, int]] = Field(default_factory=lambda: [(2, 0), (1, 1), (3, 0), (2, 1)])
    limit_modes: List[int] = Field(default_factory=lambda: [2, 3])
    bridge_gaps: List[float] = Field(default_factory=lambda: [0.2, 0.1, 0.05])
    seed: int = Field(default_factory=lambda: config.SEED)
    n_random: int = Field(20, ge=1, description="Random functions per check without its own count")
    n_global: int = Field(100, ge=1, description="Random positive functions for the dual global bound")
    n_square: int = Field(50, ge=1, description="Random positive functions for the completion of squares")
    n_pluriharmonic: int = Field(50, ge=1, description="Random pluriharmonic functions for the BO checks")
    n_invariants: int = Field(200, ge=1, description="Random functions for the FS and HLS inequalities")
    random_degree: int = Field(4, ge=1, description="Band j+k of random test functions")
    n_words: int = Field(20, ge=1)
    word_length: int = Field(3, ge=1, le=4)
    dilation_range: Tuple[float, float] = (0.85, 1.18)
    translation_scale: float = Field(0.25, gt=0)
    starts: int = Field(default_factory=lambda: config.STARTS, ge=1)
    xi_cap: float = Field(0.9, gt=0, lt=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output_dir: str = Field(default_factory=lambda: config.OUTPUT_DIR)

    @model_validator(mode="after")
    def _check_schedule(self) -> "ExperimentConfig":
        if len(self.eps_schedule) < 2:
            raise ValueError("eps_schedule needs at least two values for extrapolation")
        if any(e <= 0 for e in self.eps_schedule):
            raise ValueError("eps_schedule values must be positive")
        lo, hi = self.dilation_range
        if not (0 < lo <= 1 <= hi):
            raise ValueError(f"dilation_range {self.dilation_range} must bracket 1")
        return self

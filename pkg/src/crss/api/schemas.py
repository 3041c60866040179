"""Pydantic schemas for API responses."""

from datetime import datetime
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class HealthResponse(BaseModel):
    """Health check response."""

    status: str
    timestamp: datetime
    database: str
    total_runs: int


class ConstantsResponse(BaseModel):
    """Sharp constant and the closed-form theorem constants for one (n, s)."""

    n: int
    s: float
    Q: int
    q: float
    p: float
    sharp_constant: float = Field(..., description="C_{n,s}")
    lambda00: float
    lambda10: float
    lambda20: float
    fs_local: float = Field(..., description="2s/(Q+4+s)")
    dual_ratio: float = Field(..., description="C (Q+4+s)/(Q+4-s)")
    bo_ratio: float = Field(..., description="n+2")
    spectral_gap: float


class EigenEntry(BaseModel):
    j: int
    k: int
    eigenvalue: float
    dimension: Optional[int] = None


class EigenResponse(BaseModel):
    """Eigenvalue table of A_s for j, k <= jmax."""

    n: int
    s: float
    jmax: int
    entries: List[EigenEntry]


class CayleyResponse(BaseModel):
    """Cayley image of a group point with its Jacobian and homogeneous norm."""

    x: float
    y: float
    t: float
    zeta_re: List[float]
    zeta_im: List[float]
    jacobian: float
    homogeneous_norm: float


class RunResponse(BaseModel):
    """One row of the run ledger."""

    model_config = ConfigDict(from_attributes=True)

    id: int
    experiment: str
    config_hash: str
    seed: int
    band_limit: int
    status: str
    checks: int
    violations: int
    report_path: Optional[str]
    error_message: Optional[str]
    created_at: datetime

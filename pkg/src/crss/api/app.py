"""FastAPI application."""

import logging
from datetime import datetime
from typing import List, Optional

import numpy as np
from fastapi import Depends, FastAPI, Header, HTTPException, Query
from pydantic import ValidationError
from sqlalchemy import func
from sqlalchemy.orm import Session

from .. import __version__
from ..config import config
from ..exceptions import CRSSError
from ..models.database import get_db_session, init_db
from ..models.params import InequalityParams
from ..models.run import ExperimentRun
from ..services.constants import eigenvalue, sharp_constant, subspace_dimension, theorem_constants
from ..services.heisenberg import GroupPoint, cayley, cayley_jacobian, homogeneous_norm
from .schemas import (
    CayleyResponse,
    ConstantsResponse,
    EigenEntry,
    EigenResponse,
    HealthResponse,
    RunResponse,
)

logger = logging.getLogger(__name__)

app = FastAPI(
    title="CR Sphere Stability API",
    description="Read-only access to sharp constants, eigenvalue tables and recorded verification runs",
    version=__version__,
)


async def verify_api_key(x_api_key: str = Header(...)):
    """Verify API key from header."""
    if x_api_key != config.API_KEY:
        raise HTTPException(status_code=403, detail="Invalid API key")
    return x_api_key


def _params(n: int, s: float) -> InequalityParams:
    try:
        return InequalityParams(n=n, s=s)
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=e.errors()[0]["msg"])


@app.on_event("startup")
async def startup_event():
    """Initialize the run ledger on startup."""
    logger.info("Initializing run ledger...")
    init_db()
    logger.info("Run ledger initialized")


@app.get("/", tags=["Health"])
async def root():
    """Root endpoint."""
    return {
        "message": "CR Sphere Stability API",
        "docs": "/docs",
        "version": __version__,
    }


@app.get("/health", response_model=HealthResponse, tags=["Health"])
async def health_check(db: Session = Depends(get_db_session)):
    """Health check endpoint."""
    try:
        total_runs = db.query(func.count(ExperimentRun.id)).scalar()
        return HealthResponse(
            status="healthy",
            timestamp=datetime.utcnow(),
            database="connected",
            total_runs=total_runs,
        )
    except Exception as e:
        logger.error(f"Health check failed: {e}")
        raise HTTPException(status_code=503, detail="Service unavailable")


@app.get("/api/v1/constants", response_model=ConstantsResponse, tags=["Constants"])
async def get_constants(
    n: int = Query(1, ge=1, le=8, description="Complex dimension"),
    s: float = Query(..., description="Fractional order, 0 < s < Q"),
):
    """
    Sharp constant, low eigenvalues and theorem constants.

    - **n**: complex dimension of H^n
    - **s**: fractional order
    """
    params = _params(n, s)
    theorem = theorem_constants(params)
    return ConstantsResponse(
        n=n,
        s=s,
        Q=params.Q,
        q=params.q,
        p=params.p,
        sharp_constant=sharp_constant(params),
        lambda00=eigenvalue(params, (0, 0)),
        lambda10=eigenvalue(params, (1, 0)),
        lambda20=eigenvalue(params, (2, 0)),
        **theorem.model_dump(),
    )


@app.get("/api/v1/eigen", response_model=EigenResponse, tags=["Constants"])
async def get_eigen(
    n: int = Query(1, ge=1, le=8),
    s: float = Query(...),
    jmax: int = Query(6, ge=0, le=64, description="Largest j and k"),
):
    """Eigenvalues lambda_{j,k} of A_s for 0 <= j, k <= jmax."""
    params = _params(n, s)
    entries = [
        EigenEntry(
            j=j,
            k=k,
            eigenvalue=eigenvalue(params, (j, k)),
            dimension=subspace_dimension(n, (j, k)) if n == 1 else None,
        )
        for j in range(jmax + 1)
        for k in range(jmax + 1)
    ]
    return EigenResponse(n=n, s=s, jmax=jmax, entries=entries)


@app.get("/api/v1/geometry/cayley", response_model=CayleyResponse, tags=["Geometry"])
async def get_cayley(
    x: float = Query(0.0, description="Re z"),
    y: float = Query(0.0, description="Im z"),
    t: float = Query(0.0, description="Center coordinate"),
):
    """Cayley image, Jacobian and homogeneous norm of (x + iy, t) in H^1."""
    try:
        u = GroupPoint(np.array([complex(x, y)]), t)
        zeta = cayley(u).zeta
        return CayleyResponse(
            x=x,
            y=y,
            t=t,
            zeta_re=[float(v) for v in zeta.real],
            zeta_im=[float(v) for v in zeta.imag],
            jacobian=cayley_jacobian(u),
            homogeneous_norm=homogeneous_norm(u),
        )
    except CRSSError as e:
        raise HTTPException(status_code=422, detail=str(e))


@app.get("/api/v1/runs", response_model=List[RunResponse], tags=["Runs"])
async def get_runs(
    experiment: Optional[str] = Query(None, description="Experiment filter"),
    status: Optional[str] = Query(None, description="success, violation or failed"),
    limit: int = Query(100, ge=1, le=1000, description="Limit results"),
    offset: int = Query(0, ge=0, description="Offset for pagination"),
    db: Session = Depends(get_db_session),
    api_key: str = Depends(verify_api_key),
):
    """
    Recorded experiment runs, newest first.

    - **experiment**: filter by suite name
    - **status**: filter by outcome
    """
    try:
        query = db.query(ExperimentRun)
        if experiment:
            query = query.filter(ExperimentRun.experiment == experiment)
        if status:
            query = query.filter(ExperimentRun.status == status)
        runs = query.order_by(ExperimentRun.created_at.desc(), ExperimentRun.id.desc()).offset(offset).limit(limit).all()
        logger.info(f"Retrieved {len(runs)} runs (experiment={experiment}, status={status})")
        return runs
    except Exception as e:
        logger.error(f"Error retrieving runs: {e}")
        raise HTTPException(status_code=500, detail="Internal server error")


@app.get("/api/v1/runs/{run_id}", response_model=RunResponse, tags=["Runs"])
async def get_run(
    run_id: int,
    db: Session = Depends(get_db_session),
    api_key: str = Depends(verify_api_key),
):
    """One recorded run by id."""
    run = db.query(ExperimentRun).filter(ExperimentRun.id == run_id).first()
    if run is None:
        raise HTTPException(status_code=404, detail=f"Run {run_id} not found")
    return run

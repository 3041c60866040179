"""Engine and sessions of the run ledger (a local SQLite file unless DATABASE_URL says otherwise)."""

import logging
from contextlib import contextmanager
from typing import Generator, Iterator

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, sessionmaker

from ..config import config
from .run import Base

logger = logging.getLogger(__name__)


def make_engine(url: str) -> Engine:
    """Ledger engine; SQLite connections may be used from the API's worker threads."""
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
    return create_engine(url, echo=False, pool_pre_ping=True, connect_args=connect_args)


engine = make_engine(config.DATABASE_URL)
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


def init_db() -> None:
    """Create experiment_runs if it does not exist yet."""
    Base.metadata.create_all(bind=engine)
    logger.debug(f"Run ledger ready ({engine.url.get_backend_name()})")


@contextmanager
def get_db() -> Generator[Session, None, None]:
    """Ledger session for one CLI run: committed when the block succeeds, rolled back otherwise."""
    db = SessionLocal()
    try:
        yield db
        db.commit()
    except Exception:
        db.rollback()
        raise
    finally:
        db.close()


def get_db_session() -> Iterator[Session]:
    """Per-request ledger session for the API's Depends."""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()

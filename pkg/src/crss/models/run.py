"""SQLAlchemy ledger of experiment runs."""

from datetime import datetime
from sqlalchemy import Column, String, Integer, DateTime, Index
from sqlalchemy.ext.declarative import declarative_base

Base = declarative_base()


class ExperimentRun(Base):
    """One executed experiment suite and its outcome."""

    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    experiment = Column(String, nullable=False, index=True)
    config_hash = Column(String, nullable=False)
    seed = Column(Integer, nullable=False)
    band_limit = Column(Integer, nullable=False)
    status = Column(String, default="success")  # success, violation, failed
    checks = Column(Integer, default=0)
    violations = Column(Integer, default=0)
    report_path = Column(String, nullable=True)
    error_message = Column(String, nullable=True)
    created_at = Column(DateTime, default=datetime.utcnow)

    __table_args__ = (Index("idx_experiment_created", "experiment", "created_at"),)

    def __repr__(self):
        return f"<ExperimentRun(experiment={self.experiment}, status={self.status}, violations={self.violations})>"

"""Pytest fixtures and configuration."""

import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool
from fastapi.testclient import TestClient

from src.crss.models.run import Base
from src.crss.api.app import app
from src.crss.models.database import get_db_session
from src.crss.models.params import ExperimentConfig, InequalityParams
from src.crss.services.harmonics import load_basis


# Test database URL
TEST_DATABASE_URL = "sqlite:///:memory:"


@pytest.fixture(scope="function")
def test_db():
    """Create a test database."""
    engine = create_engine(
        TEST_DATABASE_URL, connect_args={"check_same_thread": False}, poolclass=StaticPool
    )
    TestingSessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

    Base.metadata.create_all(bind=engine)

    db = TestingSessionLocal()
    try:
        yield db
    finally:
        db.close()
        Base.metadata.drop_all(bind=engine)


@pytest.fixture(scope="function")
def client(test_db):
    """Create a test client."""
    def override_get_db():
        try:
            yield test_db
        finally:
            pass

    app.dependency_overrides[get_db_session] = override_get_db

    with TestClient(app) as test_client:
        yield test_client

    app.dependency_overrides.clear()


@pytest.fixture(scope="session")
def basis6():
    """Bispherical basis at band 6."""
    return load_basis(6)


@pytest.fixture(scope="session")
def basis8():
    """Bispherical basis at band 8."""
    return load_basis(8)


@pytest.fixture(scope="session")
def basis12():
    """Bispherical basis at the production band 12."""
    return load_basis(12)


@pytest.fixture
def params2():
    """n = 1, s = 2: the golden exponent."""
    return InequalityParams(n=1, s=2.0)


@pytest.fixture
def small_config(tmp_path):
    """Cheap experiment settings for suite smoke tests."""
    return ExperimentConfig(
        s_values=[2.0],
        band_limit=8,
        eps_schedule=[2e-2, 1e-2, 5e-3],
        modes=[(2, 0), (1, 1)],
        limit_modes=[2],
        n_random=3,
        n_global=3,
        n_square=2,
        n_pluriharmonic=3,
        n_invariants=4,
        random_degree=3,
        n_words=3,
        word_length=2,
        starts=1,
        output_dir=str(tmp_path),
    )


@pytest.fixture
def reduced_config(tmp_path):
    """Production band and tolerances with fewer samples, for pass/fail assertions."""
    return ExperimentConfig(
        band_limit=12,
        n_random=5,
        n_global=10,
        n_square=5,
        n_pluriharmonic=10,
        n_invariants=20,
        n_words=5,
        starts=2,
        output_dir=str(tmp_path),
    )

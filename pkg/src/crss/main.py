"""`crss serve`: the read-only API under uvicorn."""

import logging
from typing import Optional

import uvicorn

from .api.app import app
from .config import config

logger = logging.getLogger(__name__)


def main(host: Optional[str] = None, port: Optional[int] = None) -> None:
    """Serve constants, geometry and the run ledger; host and port default to the configuration."""
    logging.basicConfig(
        level=config.LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    host = host or config.API_HOST
    port = port or config.API_PORT
    logger.info(f"Serving the CR sphere API on {host}:{port} (ledger {config.DATABASE_URL.split(':', 1)[0]})")
    uvicorn.run(app, host=host, port=port, log_level=config.LOG_LEVEL.lower())


if __name__ == "__main__":
    main()

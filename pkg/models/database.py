"""Run ledger database: engine, SQLite tuning and schema."""
import logging
import os
import time

import streamlit as st
from sqlalchemy import create_engine, event, text
from sqlalchemy.exc import OperationalError

logger = logging.getLogger(__name__)


def _database_url() -> str:
    return os.getenv("DATABASE_URL", "sqlite:///mermin.db")


@st.cache_resource
def _engine_for(url: str):
    connect_args = {"check_same_thread": False, "timeout": 30} if url.startswith("sqlite") else {}
    engine = create_engine(url, future=True, connect_args=connect_args)

    if url.startswith("sqlite"):

        @event.listens_for(engine, "connect")
        def _set_sqlite_pragmas(dbapi_connection, connection_record):
            try:
                cursor = dbapi_connection.cursor()
                cursor.execute("PRAGMA journal_mode=WAL;")
                cursor.execute("PRAGMA synchronous=NORMAL;")
                cursor.execute("PRAGMA busy_timeout=5000;")
                cursor.close()
            except Exception:
                logger.debug("could not apply SQLite pragmas", exc_info=True)

    return engine


def get_engine():
    """SQLAlchemy engine for the current DATABASE_URL, one per URL."""
    return _engine_for(_database_url())


def with_sqlite_retry(fn, retries: int = 6, base_sleep_s: float = 0.08):
    """Retry wrapper for SQLite operations that may encounter locks."""
    last_exc: Exception | None = None
    for attempt in range(retries):
        try:
            return fn()
        except OperationalError as e:
            msg = str(e).lower()
            if "database is locked" not in msg and "database locked" not in msg:
                raise
            last_exc = e
            logger.warning("database locked, retry %d/%d", attempt + 1, retries)
            time.sleep(base_sleep_s * (attempt + 1))
    if last_exc:
        raise last_exc
    raise RuntimeError("SQLite retry failed")


def init_db() -> None:
    """Create the ledger tables."""
    engine = get_engine()
    with engine.begin() as conn:
        conn.execute(
            text(
                """
                CREATE TABLE IF NOT EXISTS runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    command TEXT NOT NULL,
                    request TEXT NOT NULL,
                    result TEXT NOT NULL,
                    created_at TEXT NOT NULL
                );
                """
            )
        )

        conn.execute(
            text(
                """
                CREATE TABLE IF NOT EXISTS pair_counts (
                    n_parties INTEGER NOT NULL,
                    dim INTEGER NOT NULL,
                    q INTEGER NOT NULL,
                    policy TEXT NOT NULL,
                    count INTEGER NOT NULL,
                    beta INTEGER,
                    variations INTEGER,
                    created_at TEXT NOT NULL,
                    PRIMARY KEY (n_parties, dim, q, policy)
                );
                """
            )
        )

        conn.execute(
            text(
                """
                CREATE TABLE IF NOT EXISTS qss_summaries (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    players INTEGER NOT NULL,
                    dim INTEGER NOT NULL,
                    attack TEXT NOT NULL,
                    rounds INTEGER NOT NULL,
                    accuracy REAL NOT NULL,
                    failure_rate REAL NOT NULL,
                    tv_distance REAL NOT NULL,
                    p_max REAL NOT NULL,
                    created_at TEXT NOT NULL
                );
                """
            )
        )


def reset_all_data() -> None:
    """Delete every recorded run, pair count and protocol summary."""
    engine = get_engine()
    with engine.begin() as conn:
        conn.execute(text("DELETE FROM runs;"))
        conn.execute(text("DELETE FROM pair_counts;"))
        conn.execute(text("DELETE FROM qss_summaries;"))

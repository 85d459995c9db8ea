"""Recorded runs, pair-count series and protocol summaries."""
import datetime as dt
import json
import logging

from sqlalchemy import text

from .database import get_engine, with_sqlite_retry

logger = logging.getLogger(__name__)


def record_run(command: str, request: dict, result: dict) -> int:
    """Append one command invocation to the ledger and return its id."""
    engine = get_engine()
    created_at = dt.datetime.now().isoformat()

    def _write() -> int:
        with engine.begin() as conn:
            res = conn.execute(
                text(
                    """
                    INSERT INTO runs (command, request, result, created_at)
                    VALUES (:command, :request, :result, :created_at);
                    """
                ),
                {
                    "command": command,
                    "request": json.dumps(request, sort_keys=True),
                    "result": json.dumps(result, sort_keys=True),
                    "created_at": created_at,
                },
            )
            return int(res.lastrowid)

    run_id = with_sqlite_retry(_write)
    logger.info("recorded %s run %d", command, run_id)
    return run_id


def list_runs(limit: int = 50, command: str | None = None) -> list[dict]:
    """Most recent runs first, optionally for one command."""
    engine = get_engine()
    where_sql = "command = :command" if command else "1=1"
    with engine.begin() as conn:
        rows = conn.execute(
            text(
                f"""
                SELECT id, command, request, result, created_at
                FROM runs
                WHERE {where_sql}
                ORDER BY id DESC
                LIMIT :limit;
                """
            ),
            {"limit": int(limit), "command": command},
        ).mappings().all()
    out = []
    for r in rows:
        d = dict(r)
        d["request"] = json.loads(d["request"])
        d["result"] = json.loads(d["result"])
        out.append(d)
    return out


def save_pair_counts(rows: list[dict]) -> None:
    """Upsert PairCount.to_dict() rows keyed by (N, D, q, policy)."""
    engine = get_engine()
    created_at = dt.datetime.now().isoformat()

    def _write() -> None:
        with engine.begin() as conn:
            for r in rows:
                conn.execute(
                    text(
                        """
                        INSERT OR REPLACE INTO pair_counts
                            (n_parties, dim, q, policy, count, beta, variations, created_at)
                        VALUES (:n, :d, :q, :policy, :count, :beta, :v, :created_at);
                        """
                    ),
                    {
                        "n": int(r["N"]),
                        "d": int(r["D"]),
                        "q": int(r["q"]),
                        "policy": r["policy"],
                        "count": int(r["count"]),
                        "beta": r.get("beta"),
                        "v": r.get("V"),
                        "created_at": created_at,
                    },
                )

    with_sqlite_retry(_write)


def pair_count_series(dim: int, q: int, policy: str = "combinations") -> list[dict]:
    """Stored counts for one (D, q, policy), ordered by N."""
    engine = get_engine()
    with engine.begin() as conn:
        rows = conn.execute(
            text(
                """
                SELECT n_parties AS N, dim AS D, q, policy, count, beta, variations AS V
                FROM pair_counts
                WHERE dim = :d AND q = :q AND policy = :policy
                ORDER BY n_parties ASC;
                """
            ),
            {"d": int(dim), "q": int(q), "policy": policy},
        ).mappings().all()
    return [dict(r) for r in rows]


def save_qss_summary(players: int, dim: int, summary: dict) -> None:
    """Store ProtocolRun.summary() for one configuration."""
    engine = get_engine()

    def _write() -> None:
        with engine.begin() as conn:
            conn.execute(
                text(
                    """
                    INSERT INTO qss_summaries
                        (players, dim, attack, rounds, accuracy, failure_rate, tv_distance, p_max, created_at)
                    VALUES (:players, :dim, :attack, :rounds, :accuracy, :failure_rate, :tv, :p_max, :created_at);
                    """
                ),
                {
                    "players": int(players),
                    "dim": int(dim),
                    "attack": summary.get("attack", "none"),
                    "rounds": int(summary["rounds"]),
                    "accuracy": float(summary["accuracy"]),
                    "failure_rate": float(summary["failure_rate"]),
                    "tv": float(summary["tv_distance"]),
                    "p_max": float(summary["p_max"]),
                    "created_at": dt.datetime.now().isoformat(),
                },
            )

    with_sqlite_retry(_write)


def list_qss_summaries(limit: int = 20) -> list[dict]:
    engine = get_engine()
    with engine.begin() as conn:
        rows = conn.execute(
            text(
                """
                SELECT players, dim, attack, rounds, accuracy, failure_rate, tv_distance, p_max, created_at
                FROM qss_summaries
                ORDER BY id DESC
                LIMIT :limit;
                """
            ),
            {"limit": int(limit)},
        ).mappings().all()
    return [dict(r) for r in rows]

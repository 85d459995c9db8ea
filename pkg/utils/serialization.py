"""JSON and CSV codecs for command artifacts."""
import json
from pathlib import Path
from typing import Iterable

from models.errors import InvalidInputError


def dumps(payload: dict) -> str:
    """Canonical JSON text: sorted keys, two-space indent, UTF-8 kept."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)


def load_json(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"cannot read JSON input {path}: {e}") from e
    if not isinstance(data, dict):
        raise InvalidInputError(f"JSON input {path} must hold an object")
    return data


def request_of(data: dict) -> dict:
    """The request part of an emitted artifact, or the object itself when it is a bare request."""
    request = data.get("request", data)
    if not isinstance(request, dict):
        raise InvalidInputError("the artifact's request must be an object")
    return request


def csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    return "\n".join(lines)


def gnuplot_script(csv_path: str, title: str) -> str:
    """Plot script for an N,D,q,policy,count series written to ``csv_path``."""
    return "\n".join(
        [
            "set datafile separator ','",
            f"set title '{title}'",
            "set xlabel 'N'",
            "set ylabel 'effective pairs'",
            "set key off",
            "set grid",
            f"plot '{csv_path}' using 1:5 every ::1 with linespoints pt 7",
        ]
    )

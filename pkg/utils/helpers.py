"""Helper utility functions."""
import os
from fractions import Fraction


def env_int(name: str, default: int) -> int:
    """Read an integer setting from the environment."""
    raw = os.getenv(name, "").strip()
    try:
        return int(raw) if raw else default
    except ValueError:
        return default


def env_float(name: str, default: float) -> float:
    """Read a float setting from the environment."""
    raw = os.getenv(name, "").strip()
    try:
        return float(raw) if raw else default
    except ValueError:
        return default


def parse_turn(value: str | int | Fraction) -> Fraction:
    """Parse an angle literal given in rational turns ("1/4" is a quarter turn, pi/2)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    text = (value or "").strip()
    if not text:
        raise ValueError("empty angle literal")
    return Fraction(text)


def parse_turns(value: str) -> list[Fraction]:
    """Parse a comma separated list of rational turns."""
    return [parse_turn(v) for v in (value or "").split(",") if v.strip()]


def format_turn(turn: Fraction) -> str:
    """Format a rational turn the way it is parsed."""
    return str(turn.numerator) if turn.denominator == 1 else f"{turn.numerator}/{turn.denominator}"


def parse_factors(value: str) -> list[int]:
    """Parse cyclic factors: "2,4" is Z2 x Z4."""
    return [int(v) for v in (value or "").replace("x", ",").split(",") if v.strip()]


def parse_elements(value: str) -> list[list[int]]:
    """Parse residue vectors separated by semicolons: "1,0;0,2"."""
    out: list[list[int]] = []
    for chunk in (value or "").split(";"):
        chunk = chunk.strip()
        if chunk:
            out.append([int(v) for v in chunk.split(",") if v.strip()])
    return out


def format_tuple(values) -> str:
    """Format an outcome tuple compactly, e.g. (0, 1, 1) -> "011" for single digits."""
    values = list(values)
    if all(0 <= v < 10 for v in values):
        return "".join(str(v) for v in values)
    return "(" + ",".join(str(v) for v in values) + ")"

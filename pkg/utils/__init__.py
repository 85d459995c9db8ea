"""Utilities package."""
from .constants import (
    DEFAULT_TOLERANCE,
    ENUMERATION_BOUND,
    MAX_AMPLITUDES,
    TABS,
)
from .helpers import (
    env_float,
    env_int,
    format_tuple,
    format_turn,
    parse_elements,
    parse_factors,
    parse_turn,
    parse_turns,
)

__all__ = [
    "DEFAULT_TOLERANCE",
    "ENUMERATION_BOUND",
    "MAX_AMPLITUDES",
    "TABS",
    "env_float",
    "env_int",
    "format_tuple",
    "format_turn",
    "parse_elements",
    "parse_factors",
    "parse_turn",
    "parse_turns",
]

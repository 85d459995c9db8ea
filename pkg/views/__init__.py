"""Views package for UI components."""
from .extension import render_extension
from .scenario import render_scenario
from .pairs import render_pairs
from .qss import render_qss
from .navigation import render_bottom_nav, render_header

__all__ = [
    "render_extension",
    "render_scenario",
    "render_pairs",
    "render_qss",
    "render_bottom_nav",
    "render_header",
]

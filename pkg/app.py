"""Mermin non-locality explorer.

Streamlit entry point: routes the query-parameter tab to its view.
"""
import streamlit as st
from models.database import init_db
from views import (
    render_extension,
    render_scenario,
    render_pairs,
    render_qss,
    render_bottom_nav,
)

st.set_page_config(
    page_title="Mermin Explorer",
    page_icon="⊕",
    layout="centered"
)

init_db()

VIEWS = {
    "extension": render_extension,
    "scenario": render_scenario,
    "pairs": render_pairs,
    "qss": render_qss,
}


def get_active_tab() -> str:
    """Get active tab from query parameters."""
    tab = st.query_params.get("tab", "extension")
    if tab not in VIEWS:
        tab = "extension"
    return tab


def main():
    """Main application entry point."""
    active_tab = get_active_tab()
    VIEWS[active_tab]()
    render_bottom_nav(active_tab)


if __name__ == "__main__":
    main()

"""Pairs view: effective (X, B) pairs as a function of the number of parties."""
import plotly.graph_objects as go
import streamlit as st

from models.errors import MerminError
from models.runs import pair_count_series, save_pair_counts
from models.scenario import pair_series
from utils.constants import PAIR_POLICIES
from .navigation import render_header


@st.cache_data(show_spinner=False)
def _series(parties: tuple[int, ...], dim: int, q: int, policy: str) -> list[dict]:
    return [pc.to_dict() for pc in pair_series(parties, dim, q, policy)]


def render_pairs():
    """Render the pair-count tab."""
    render_header("◔ Effective pairs", "Observables B that pair with X for N parties", "#43e97b 0%, #38f9d7 100%")

    with st.expander("Parameters", expanded=True):
        c1, c2, c3 = st.columns(3)
        with c1:
            dim = int(st.selectbox("D", [2, 3], index=0))
        with c2:
            q = int(st.number_input("Grid q", min_value=1, max_value=72, value=12 if dim == 2 else 9, step=1))
        with c3:
            policy = st.selectbox("Policy", [p for p in PAIR_POLICIES if p != "preset-qutrit-ten"])
        default = (3, 11) if dim == 2 else (4, 10)
        n_range = st.slider("N", min_value=2, max_value=12, value=default)
        source = st.radio("Source", ["compute", "ledger"], horizontal=True)

    if source == "ledger":
        rows = pair_count_series(dim, q, policy)
        if not rows:
            st.info("No stored counts for these parameters yet.")
            return
    else:
        try:
            with st.spinner("Counting..."):
                rows = _series(tuple(range(n_range[0], n_range[1] + 1)), dim, q, policy)
        except MerminError as e:
            st.error(str(e))
            return
        if st.button("Save to ledger", use_container_width=True):
            save_pair_counts(rows)
            st.success(f"Saved {len(rows)} counts")

    fig = go.Figure()
    fig.add_trace(
        go.Scatter(
            x=[r["N"] for r in rows],
            y=[r["count"] for r in rows],
            mode="lines+markers",
            line=dict(color="#10b981", width=3),
            marker=dict(size=8),
            hovertemplate="<b>N = %{x}</b><br>%{y} pairs<extra></extra>",
        )
    )
    fig.update_layout(
        margin=dict(l=20, r=20, t=20, b=20),
        height=300,
        paper_bgcolor="rgba(0,0,0,0)",
        plot_bgcolor="rgba(0,0,0,0)",
        xaxis=dict(title="N", dtick=1, showgrid=False),
        yaxis=dict(title="effective pairs", gridcolor="rgba(0,0,0,0.08)"),
        showlegend=False,
    )
    st.plotly_chart(fig, use_container_width=True)
    st.dataframe(
        [{k: r[k] for k in ("N", "count", "beta", "V")} for r in rows], use_container_width=True, hide_index=True
    )

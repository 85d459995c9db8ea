"""Scenario view: build a non-local scenario, inspect its outcomes and local models."""
import plotly.graph_objects as go
import streamlit as st

from models.errors import MerminError
from models.lhv import lhv_exists, quantum_table
from models.phases import PhasePoint
from models.scenario import PhaseEquation, build_nonlocal_scenario, evaluate_newcond
from utils.helpers import format_tuple
from .navigation import render_header


def _witness_form():
    with st.form("scenario_form"):
        c1, c2 = st.columns(2)
        with c1:
            dim = st.number_input("D", min_value=2, max_value=7, value=2, step=1)
            coeffs = st.text_input("Coefficients", value="2")
        with c2:
            phases = st.text_input("Phases (turns)", value="1/4", help='Separate phases with ";", components with ","')
            rhs = st.text_input("Right-hand side", value="1/2")
        layout = st.radio("Layout", ["cyclic", "combinations"], horizontal=True)
        parties = st.number_input("Parties (combinations, 0 = search)", min_value=0, max_value=12, value=0, step=1)
        submitted = st.form_submit_button("Build", use_container_width=True)
    return submitted, int(dim), coeffs, phases, rhs, layout, int(parties) or None


def render_scenario():
    """Render the scenario tab."""
    render_header("▣ Scenarios", "Controls, variations and local hidden variables", "#4facfe 0%, #00f2fe 100%")

    submitted, dim, coeffs, phases, rhs, layout, parties = _witness_form()
    if submitted:
        try:
            eq = PhaseEquation(
                tuple(int(c) for c in coeffs.split(",")),
                tuple(PhasePoint.parse(dim, p) for p in phases.split(";")),
                PhasePoint.parse(dim, rhs),
            )
            st.session_state["scenario"] = build_nonlocal_scenario(eq, layout=layout, parties=parties)
        except (MerminError, ValueError) as e:
            st.error(str(e))
            st.session_state.pop("scenario", None)

    scenario = st.session_state.get("scenario")
    if scenario is not None:
        _render_scenario_details(scenario)

    st.markdown("### Two-measurement check")
    _render_newcond()


def _render_scenario_details(scenario):
    st.markdown(f"**{len(scenario.rows)} rows on {scenario.num_parties} parties**")
    st.dataframe(
        [{"row": s, **{f"party {i}": str(p) for i, p in enumerate(row)}} for s, row in enumerate(scenario.rows)],
        use_container_width=True,
        hide_index=True,
    )

    try:
        table = quantum_table(scenario)
    except MerminError as e:
        st.warning(str(e))
        return

    s = st.selectbox("Row", list(range(len(scenario.rows))), format_func=lambda r: " ".join(f"[{p}]" for p in scenario.rows[r]))
    support = sorted(table.supports[s])
    probs = [float(table.distributions[s][o]) for o in support]
    fig = go.Figure(
        go.Bar(
            x=[format_tuple(o) for o in support],
            y=probs,
            marker_color="#4facfe",
            hovertemplate="<b>%{x}</b><br>p = %{y:.4f}<extra></extra>",
        )
    )
    fig.update_layout(
        margin=dict(l=20, r=20, t=20, b=20),
        height=260,
        paper_bgcolor="rgba(0,0,0,0)",
        plot_bgcolor="rgba(0,0,0,0)",
        xaxis=dict(type="category", title="outcome"),
        yaxis=dict(title="probability", gridcolor="rgba(0,0,0,0.08)"),
    )
    st.plotly_chart(fig, use_container_width=True)

    c1, c2 = st.columns(2)
    for col, mode in ((c1, "parity"), (c2, "possibilistic")):
        with col:
            try:
                verdict = lhv_exists(table, mode)
            except MerminError as e:
                st.warning(f"{mode}: {e}")
                continue
            if verdict.exists:
                st.warning(f"{mode}: a local model exists")
            else:
                st.success(f"{mode}: no local model")
            st.caption(verdict.message)


def _render_newcond():
    c1, c2, c3, c4 = st.columns(4)
    with c1:
        dim = int(st.number_input("D ", min_value=2, max_value=7, value=2, step=1))
    with c2:
        variations = int(st.number_input("V", min_value=1, value=3, step=1))
    with c3:
        beta = int(st.number_input("beta", min_value=1, value=2, step=1))
    with c4:
        b_text = st.text_input("b (turns)", value="1/4")
    try:
        result = evaluate_newcond(dim, variations, beta, PhasePoint.parse(dim, b_text))
    except (MerminError, ValueError) as e:
        st.error(str(e))
        return
    if result.structurally_ineffective:
        st.warning(f"V = {variations} is divisible by D = {dim}: no B is effective")
    elif result.effective:
        st.success(f"Effective: |sum e^(i c_j) + 1| = {abs(result.residual):.2e}")
    else:
        st.info(f"Not effective: |sum e^(i c_j) + 1| = {abs(result.residual):.3f}")

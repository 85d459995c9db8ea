"""Secret sharing view: protocol runs and attack simulations."""
import numpy as np
import plotly.graph_objects as go
import streamlit as st

from models.errors import MerminError
from models.phases import PhasePoint
from models.qss import QssConfig, run_protocol, simulate_device_independent_attack, simulate_pre_phase_attack
from models.runs import list_qss_summaries, save_qss_summary
from .navigation import render_header


def _histogram(values: np.ndarray, dim: int, title: str) -> go.Figure:
    counts = np.bincount(values, minlength=dim)[:dim]
    fig = go.Figure(go.Bar(x=[str(k) for k in range(dim)], y=counts, marker_color="#764ba2"))
    fig.update_layout(
        title=title,
        margin=dict(l=20, r=20, t=40, b=20),
        height=240,
        paper_bgcolor="rgba(0,0,0,0)",
        plot_bgcolor="rgba(0,0,0,0)",
        xaxis=dict(type="category"),
        yaxis=dict(gridcolor="rgba(0,0,0,0.08)"),
    )
    return fig


def render_qss():
    """Render the secret sharing tab."""
    render_header("⚿ Secret sharing", "Dealer and players on a phased GHZ state", "#f093fb 0%, #f5576c 100%")

    with st.form("qss_form"):
        c1, c2, c3 = st.columns(3)
        with c1:
            players = int(st.number_input("Players", min_value=1, max_value=6, value=2, step=1))
        with c2:
            dim = int(st.number_input("D", min_value=2, max_value=5, value=2, step=1))
        with c3:
            rounds = int(st.number_input("Rounds", min_value=1, max_value=200_000, value=10_000, step=1000))
        alphabet = st.text_input("Phase alphabet", value="0;1/4", help='Phases separated by ";"')
        c4, c5 = st.columns(2)
        with c4:
            secret = int(st.number_input("Secret", min_value=0, value=1, step=1))
        with c5:
            seed = int(st.number_input("Seed", min_value=0, value=0, step=1))
        attack = st.selectbox("Attack", ["none", "pre_phase_substitution", "post_phase_deterministic"])
        submitted = st.form_submit_button("Run", use_container_width=True)

    if submitted:
        try:
            cfg = QssConfig.uniform(
                players, dim, [PhasePoint.parse(dim, p) for p in alphabet.split(";")], seed=seed, rounds=rounds
            )
            _run(cfg, secret, attack)
        except (MerminError, ValueError) as e:
            st.error(str(e))

    history = list_qss_summaries(limit=10)
    if history:
        st.markdown("### Recent runs")
        st.dataframe(history, use_container_width=True, hide_index=True)


def _run(cfg: QssConfig, secret: int, attack: str) -> None:
    if attack == "none":
        run = run_protocol(cfg, secret)
        m1, m2, m3 = st.columns(3)
        m1.metric("Accuracy", f"{run.accuracy:.4f}")
        m2.metric("TV from uniform", f"{run.tv_distance:.4f}")
        m3.metric("p_max", f"{cfg.p_max:.4f}")
        st.plotly_chart(_histogram(run.batch.ciphertexts, cfg.dim, "Broadcast values"), use_container_width=True)
        save_qss_summary(cfg.players, cfg.dim, run.summary())
    elif attack == "pre_phase_substitution":
        report = simulate_pre_phase_attack(cfg, secret=secret)
        m1, m2, m3 = st.columns(3)
        m1.metric("Failure rate", f"{report.failure_rate:.4f}")
        m2.metric("Expected", f"{report.expected_failure:.4f}")
        m3.metric("Attacker accuracy", f"{report.guess_accuracy:.4f}")
        if not report.formula_applicable:
            st.warning("The alphabet's measurements are not mutually unbiased: the expected failure rate does not apply.")
    else:
        report = simulate_device_independent_attack(cfg)
        {"secure": st.success, "insecure": st.error}.get(report.verdict, st.warning)(f"Verdict: {report.verdict}")
        st.json(report.to_dict())

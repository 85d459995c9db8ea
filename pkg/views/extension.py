"""Extension view: is G a trivial extension of a subgroup H?"""
import streamlit as st

from models.abgroup import FinAbGroup, Subgroup, is_trivial_extension, oracle_verdict
from models.errors import MerminError
from models.runs import record_run
from utils.helpers import parse_elements, parse_factors
from .navigation import render_header


def render_extension():
    """Render the extension checker tab."""
    render_header("⊕ Extensions", "Systems solvable in G but not in H", "#667eea 0%, #764ba2 100%")

    with st.form("extension_form"):
        c1, c2 = st.columns(2)
        with c1:
            group_text = st.text_input("Group factors", value="4", help='"2,4" is Z2 x Z4')
        with c2:
            subgroup_text = st.text_input("Subgroup generators", value="2", help='"1,0;0,2"')
        run_oracle = st.checkbox("Cross-check with exhaustive search", value=False)
        submitted = st.form_submit_button("Check", use_container_width=True)

    if not submitted:
        st.caption("Examples: 4 / 2 is non-trivial; 2,2 / 1,0 and 3,3 / 1,0 are trivial.")
        return

    try:
        group = FinAbGroup(tuple(parse_factors(group_text)))
        subgroup = Subgroup.generated(group, parse_elements(subgroup_text))
        verdict = is_trivial_extension(group, subgroup)
        oracle = oracle_verdict(group, subgroup) if run_oracle else None
    except (MerminError, ValueError) as e:
        st.error(str(e))
        return

    m1, m2, m3 = st.columns(3)
    m1.metric("|G|", group.order)
    m2.metric("|H|", subgroup.order)
    m3.metric("exp(G)", group.exponent)

    if verdict.trivial:
        st.success(f"{group} is a trivial extension of H: every system with right-hand sides in H solvable in G is solvable in H.")
    else:
        witness = verdict.witness
        st.error(f"Non-trivial: {witness.system.format()} is solvable in G (x = {', '.join(str(x) for x in witness.solution)}) but not in H.")

    if oracle is not None:
        if oracle.trivial == verdict.trivial:
            st.info("Exhaustive search agrees.")
        else:
            st.warning("Exhaustive search disagrees with the divisor check.")

    with st.expander("Details"):
        st.json(verdict.to_dict())

    record_run("ext-check", {"group": list(group.factors), "subgroup": subgroup.to_dict()["generators"]}, verdict.to_dict())

"""Models package: group algebra, qudit simulation, scenarios, protocols and the run ledger."""
from .database import init_db, get_engine
from .abgroup import (
    FinAbGroup,
    GroupElement,
    Subgroup,
    EqSystem,
    SolutionSet,
    ExtensionVerdict,
    solve_system,
    is_trivial_extension,
    retraction_implies_trivial,
    oracle_verdict,
    abelian_groups,
    cyclic_subgroups,
)
from .phases import PhasePoint, phase_group, phase_sum
from .qudit import (
    StateVector,
    LinOperator,
    ghz_state,
    z_phase_gate,
    mermin_outcome_distribution,
    verify_laws,
    complementarity_report,
)
from .scenario import (
    MerminScenario,
    PhaseEquation,
    TwoMeasScenario,
    validate_scenario,
    build_nonlocal_scenario,
    newcond_check,
    count_effective_pairs,
)
from .lhv import PossibilisticTable, quantum_table, lhv_exists, classical_substitution, build_trivial_lhv
from .frel import build_sc_pair, verify_frel_laws, rel_phases, frel_locality_check
from .qss import (
    QssConfig,
    AttackModel,
    run_protocol,
    simulate_pre_phase_attack,
    simulate_device_independent_attack,
    withholding_leakage,
)
from .runs import record_run, list_runs, save_pair_counts, pair_count_series, save_qss_summary, list_qss_summaries

__all__ = [
    "init_db",
    "get_engine",
    "FinAbGroup",
    "GroupElement",
    "Subgroup",
    "EqSystem",
    "SolutionSet",
    "ExtensionVerdict",
    "solve_system",
    "is_trivial_extension",
    "retraction_implies_trivial",
    "oracle_verdict",
    "abelian_groups",
    "cyclic_subgroups",
    "PhasePoint",
    "phase_group",
    "phase_sum",
    "StateVector",
    "LinOperator",
    "ghz_state",
    "z_phase_gate",
    "mermin_outcome_distribution",
    "verify_laws",
    "complementarity_report",
    "MerminScenario",
    "PhaseEquation",
    "TwoMeasScenario",
    "validate_scenario",
    "build_nonlocal_scenario",
    "newcond_check",
    "count_effective_pairs",
    "PossibilisticTable",
    "quantum_table",
    "lhv_exists",
    "classical_substitution",
    "build_trivial_lhv",
    "build_sc_pair",
    "verify_frel_laws",
    "rel_phases",
    "frel_locality_check",
    "QssConfig",
    "AttackModel",
    "run_protocol",
    "simulate_pre_phase_attack",
    "simulate_device_independent_attack",
    "withholding_leakage",
    "record_run",
    "list_runs",
    "save_pair_counts",
    "pair_count_series",
    "save_qss_summary",
    "list_qss_summaries",
]

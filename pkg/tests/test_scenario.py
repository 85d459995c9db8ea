from fractions import Fraction

import numpy as np
import pytest

from models.errors import InvalidInputError, NotAWitnessError, ResourceBoundError, ScenarioConstraintError
from models.phases import PhasePoint
from models.qudit import mermin_outcome_distribution
from models.scenario import (
    MerminScenario,
    PhaseEquation,
    TwoMeasScenario,
    build_nonlocal_scenario,
    canonical_representative,
    count_effective_pairs,
    evaluate_newcond,
    grid_points,
    newcond_check,
    pair_series,
    parity_system,
    scan_newcond,
    validate_scenario,
)


def test_classic_mermin_layout(classic_mermin, quarter):
    zero = PhasePoint.zero(2)
    assert classic_mermin.num_parties == 3
    assert classic_mermin.rows == (
        (zero, zero, zero),
        (quarter, quarter, zero),
        (quarter, zero, quarter),
        (zero, quarter, quarter),
    )
    assert validate_scenario(classic_mermin).points == (0, 1, 1, 1)


def test_classic_mermin_parity_system_is_unsolvable(classic_mermin):
    ps = parity_system(classic_mermin)
    assert len(ps.variables) == 6
    assert ps.system.num_equations == 4
    assert not ps.solvable


def test_witness_has_no_classical_solution(mermin_witness):
    assert mermin_witness.lhs() == mermin_witness.rhs
    assert mermin_witness.classical_solution() is None


def test_solvable_equation_is_not_a_witness():
    half = PhasePoint.classical(2, 1)
    eq = PhaseEquation((2,), (half,), PhasePoint.zero(2))
    assert eq.classical_solution() is not None
    with pytest.raises(NotAWitnessError):
        build_nonlocal_scenario(eq)


def test_witness_must_balance(quarter):
    with pytest.raises(InvalidInputError):
        build_nonlocal_scenario(PhaseEquation((3,), (quarter,), PhasePoint.classical(2, 1)))
    with pytest.raises(InvalidInputError):
        PhaseEquation((1, 2), (quarter,), PhasePoint.zero(2))


def test_qutrit_cyclic_layout(qutrit_phase):
    eq = PhaseEquation((3,), (qutrit_phase,), PhasePoint.classical(3, 1))
    scenario = build_nonlocal_scenario(eq)
    assert scenario.num_parties == 4
    assert len(scenario.rows) == 5
    assert not parity_system(scenario).solvable


def test_qutrit_combinations_with_five_parties(qutrit_phase):
    eq = PhaseEquation((3,), (qutrit_phase,), PhasePoint.classical(3, 1))
    scenario = build_nonlocal_scenario(eq, layout="combinations", parties=5)
    assert len(scenario.rows) == 11
    assert all(sum(1 for p in row if p == qutrit_phase) == 3 for row in scenario.rows[1:])
    assert not parity_system(scenario).solvable


def test_combinations_search_finds_smallest_party_count(qutrit_phase):
    eq = PhaseEquation((3,), (qutrit_phase,), PhasePoint.classical(3, 1))
    scenario = build_nonlocal_scenario(eq, layout="combinations")
    assert scenario.num_parties == 4
    assert len(scenario.rows) == 5


def test_negative_coefficients_use_inverse_phase(quarter):
    eq = PhaseEquation((-2,), (-quarter,), PhasePoint.classical(2, 1))
    scenario = build_nonlocal_scenario(eq)
    assert quarter in scenario.distinct_phases()
    assert not parity_system(scenario).solvable


def test_several_witnesses_use_disjoint_parties(mermin_witness):
    scenario = build_nonlocal_scenario([mermin_witness, mermin_witness])
    assert scenario.num_parties == 6
    assert len(scenario.rows) == 8
    assert all(p.is_zero for p in scenario.rows[4][:3])


def test_unknown_layout(mermin_witness):
    with pytest.raises(InvalidInputError):
        build_nonlocal_scenario(mermin_witness, layout="spiral")


def test_combinations_bound(qutrit_phase):
    eq = PhaseEquation((3,), (qutrit_phase,), PhasePoint.classical(3, 1))
    with pytest.raises(ResourceBoundError):
        build_nonlocal_scenario(eq, layout="combinations", parties=12, bound=100)


def test_non_classical_rows_are_reported(quarter):
    zero = PhasePoint.zero(2)
    scenario = MerminScenario(2, ((zero, zero), (quarter, zero), (quarter, quarter)))
    with pytest.raises(ScenarioConstraintError) as excinfo:
        validate_scenario(scenario)
    assert excinfo.value.rows == [1]


def test_scenario_shape_checks(quarter):
    with pytest.raises(InvalidInputError):
        MerminScenario(2, ())
    with pytest.raises(InvalidInputError):
        MerminScenario(2, ((quarter,), (quarter, quarter)))
    with pytest.raises(InvalidInputError):
        MerminScenario(3, ((quarter,),))


def test_scenario_dict_round_trip(classic_mermin):
    data = classic_mermin.to_dict()
    assert MerminScenario.from_dict(data) == classic_mermin
    with pytest.raises(InvalidInputError):
        MerminScenario.from_dict({**data, "N": 4})


def test_newcond_qubit_quarter():
    result = evaluate_newcond(2, 3, 2, PhasePoint.parse(2, "1/4"))
    assert result.effective
    assert abs(result.residual) < 1e-12
    assert result.row_classical


def test_newcond_qutrit_ten_variations(qutrit_phase):
    result = evaluate_newcond(3, 10, 3, qutrit_phase)
    assert result.effective
    assert result.c == PhasePoint.classical(3, 1)


def test_newcond_structurally_ineffective():
    result = evaluate_newcond(2, 4, 2, PhasePoint.parse(2, "1/4"))
    assert result.structurally_ineffective
    assert not result.effective


def test_newcond_ineffective_phase():
    result = evaluate_newcond(2, 3, 2, PhasePoint.parse(2, "1/8"))
    assert not result.effective
    assert abs(result.residual) > 0.1


def test_two_measurement_scenarios(quarter):
    ts = TwoMeasScenario.cyclic(2, 3, 2, quarter)
    assert ts.num_parties == 3
    assert newcond_check(ts).effective
    assert not parity_system(ts.to_mermin_scenario()).solvable
    combos = TwoMeasScenario.combinations(3, 5, 3, PhasePoint.parse(3, "1/9,8/9"))
    assert combos.num_variations == 10
    assert newcond_check(combos).effective


def test_two_measurement_scenario_checks(quarter):
    with pytest.raises(InvalidInputError):
        TwoMeasScenario(3, 2, quarter, ({0}, {0, 1}))
    with pytest.raises(InvalidInputError):
        TwoMeasScenario(3, 2, quarter, ({0, 5},))
    with pytest.raises(InvalidInputError):
        TwoMeasScenario.cyclic(2, 3, 4, quarter, num_parties=3)


def test_scan_finds_quarter_turn_only():
    assert scan_newcond(2, 3, 2, 360) == [PhasePoint.parse(2, "1/4")]


def test_canonical_representative_is_shared_by_coset(qutrit_phase):
    shifted = qutrit_phase + PhasePoint.classical(3, 2)
    assert canonical_representative(shifted) == canonical_representative(qutrit_phase) == qutrit_phase


def test_grid_points():
    points = list(grid_points(3, 4))
    assert len(points) == 16
    assert points[1].turns == (Fraction(0), Fraction(1, 4))
    with pytest.raises(ResourceBoundError):
        list(grid_points(3, 100, bound=1000))
    with pytest.raises(InvalidInputError):
        list(grid_points(2, 0))


def test_three_qubits_have_one_effective_pair():
    pc = count_effective_pairs(3, 2, 4)
    assert pc.count == 1
    assert pc.beta == 2
    assert pc.num_variations == 3
    assert pc.solutions == (PhasePoint.parse(2, "1/4"),)


@pytest.mark.parametrize("q", [8, 12])
def test_finer_grids_keep_the_pair(q):
    assert count_effective_pairs(3, 2, q).count == 1


def test_even_variation_count_is_ineffective():
    assert count_effective_pairs(4, 2, 4).count == 0


def test_refined_grid_never_loses_pairs():
    coarse = pair_series(range(3, 6), 2, 4)
    fine = pair_series(range(3, 6), 2, 8)
    assert all(c.count <= f.count for c, f in zip(coarse, fine))


def test_qutrit_preset(qutrit_phase):
    pc = count_effective_pairs(5, 3, 9, "preset-qutrit-ten")
    assert pc.count >= 1
    assert pc.beta == 3
    assert pc.num_variations == 10
    assert qutrit_phase in pc.solutions


def test_default_policy_finds_qutrit_phase(qutrit_phase):
    pc = count_effective_pairs(5, 3, 18)
    assert pc.count >= 1
    assert qutrit_phase in pc.solutions


def test_unknown_or_misapplied_policy():
    with pytest.raises(InvalidInputError):
        count_effective_pairs(3, 2, 4, "spiral")
    with pytest.raises(InvalidInputError):
        count_effective_pairs(4, 3, 9, "preset-qutrit-ten")


def test_pair_count_rows():
    row = count_effective_pairs(3, 2, 4, "cyclic").to_dict()
    assert row["N"] == 3 and row["count"] == 1 and row["policy"] == "cyclic"
    assert count_effective_pairs(3, 2, 4).csv_row() == "3,2,4,combinations,1"


WITNESSES = {
    "quarter": (2, (2,), ("1/4",)),
    "qutrit": (3, (3,), ("1/9,-1/9",)),
    "eighth": (2, (4,), ("1/8",)),
}


@pytest.mark.parametrize("layout", ["cyclic", "combinations"])
@pytest.mark.parametrize("name", sorted(WITNESSES))
def test_built_rows_are_uniform_on_their_coset(name, layout):
    dim, coeffs, phases = WITNESSES[name]
    eq = PhaseEquation(coeffs, tuple(PhasePoint.parse(dim, p) for p in phases), PhasePoint.classical(dim, 1))
    scenario = build_nonlocal_scenario(eq, layout=layout)
    assert scenario.num_parties <= 5
    points = validate_scenario(scenario).points
    n = scenario.num_parties
    for row, g in zip(scenario.rows, points):
        dist = mermin_outcome_distribution(dim, n, row)
        sums = np.indices(dist.shape).sum(axis=0) % dim
        assert np.allclose(dist[sums == g], dim ** (1 - n))
        assert np.allclose(dist[sums != g], 0)

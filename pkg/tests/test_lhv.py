import itertools
from fractions import Fraction

import numpy as np
import pytest

from models.errors import InvalidInputError, ResourceBoundError
from models.lhv import (
    PossibilisticTable,
    build_trivial_lhv,
    classical_substitution,
    exhaustive_lhv_exists,
    lhv_exists,
    quantum_table,
)
from models.phases import PhasePoint, phase_sum
from models.scenario import MerminScenario


def test_classic_mermin_table(classic_mermin):
    table = quantum_table(classic_mermin)
    assert table.supports[0] == {(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)}
    for s in (1, 2, 3):
        assert all(sum(o) % 2 == 1 for o in table.supports[s])
    assert table.distributions[0][0, 1, 1] == pytest.approx(0.25)


def test_classic_mermin_refutes_parity_models(classic_mermin):
    verdict = lhv_exists(quantum_table(classic_mermin), "parity")
    assert not verdict.exists
    assert verdict.certificate.modulus == 2
    assert verdict.certificate.value == 1
    assert "mod 2" in verdict.message


def test_classic_mermin_refutes_possibilistic_models(classic_mermin):
    table = quantum_table(classic_mermin)
    verdict = lhv_exists(table, "possibilistic")
    assert not verdict.exists
    assert verdict.explored > 0
    assert not exhaustive_lhv_exists(table)


def test_qutrit_scenario_has_no_local_model(qutrit_phase):
    from models.scenario import PhaseEquation, build_nonlocal_scenario

    eq = PhaseEquation((3,), (qutrit_phase,), PhasePoint.classical(3, 1))
    table = quantum_table(build_nonlocal_scenario(eq))
    assert not lhv_exists(table, "parity").exists
    assert not lhv_exists(table, "possibilistic").exists


def _local_scenario():
    zero = PhasePoint.zero(2)
    quarter = PhasePoint.parse(2, "1/4")
    return MerminScenario(2, ((zero, zero, zero), (quarter, -quarter, zero), (zero, quarter, -quarter)))


@pytest.mark.parametrize("mode", ["parity", "possibilistic"])
def test_local_scenario_has_a_model(mode):
    scenario = _local_scenario()
    table = quantum_table(scenario)
    verdict = lhv_exists(table, mode)
    assert verdict.exists
    for s in range(len(scenario.rows)):
        assert verdict.model.support(s) == table.supports[s]
    assert exhaustive_lhv_exists(table)


def test_parity_model_reproduces_distributions():
    scenario = _local_scenario()
    table = quantum_table(scenario)
    model = lhv_exists(table, "parity").model
    for s in range(len(scenario.rows)):
        assert np.allclose(model.row_distribution(s), table.distributions[s], atol=1e-9)


def test_unknown_mode(classic_mermin):
    with pytest.raises(InvalidInputError):
        lhv_exists(quantum_table(classic_mermin), "bell")


def test_search_bound(classic_mermin):
    with pytest.raises(ResourceBoundError):
        lhv_exists(quantum_table(classic_mermin), "possibilistic", bound=3)


def test_table_checks(classic_mermin):
    with pytest.raises(InvalidInputError):
        PossibilisticTable(classic_mermin, (frozenset({(0, 0, 0)}),))
    with pytest.raises(InvalidInputError):
        PossibilisticTable(classic_mermin, (frozenset(),) * 4)


def test_table_dict_round_trip(classic_mermin):
    table = quantum_table(classic_mermin)
    restored = PossibilisticTable.from_dict(table.to_dict())
    assert restored.supports == table.supports
    assert restored.distributions is None
    assert not lhv_exists(restored, "possibilistic").exists


def test_classic_mermin_has_no_classical_substitution(classic_mermin):
    assert classical_substitution(classic_mermin) is None


def _random_classical_scenario(rng):
    dim = int(rng.integers(2, 4))
    parties = int(rng.integers(2, 5))
    rows = int(rng.integers(1, 5))
    return MerminScenario(
        dim,
        tuple(
            tuple(PhasePoint.classical(dim, int(g)) for g in rng.integers(0, dim, size=parties)) for _ in range(rows)
        ),
    )


def test_classical_scenarios_have_matching_local_models():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        scenario = _random_classical_scenario(rng)
        substitution = classical_substitution(scenario)
        assert substitution is not None
        model = build_trivial_lhv(scenario, substitution)
        table = quantum_table(scenario)
        assert lhv_exists(table, "parity").exists
        for s in range(len(scenario.rows)):
            assert np.allclose(model.row_distribution(s), table.distributions[s], atol=1e-9)


def test_substitution_for_non_classical_local_scenario():
    scenario = _local_scenario()
    substitution = classical_substitution(scenario)
    assert substitution is not None
    assert all(b.is_classical for b in substitution.values())
    model = build_trivial_lhv(scenario, substitution)
    assert model.support(0) == quantum_table(scenario).supports[0]


def test_bad_substitution_is_rejected(classic_mermin):
    zero = PhasePoint.zero(2)
    quarter = PhasePoint.parse(2, "1/4")
    with pytest.raises(InvalidInputError):
        build_trivial_lhv(classic_mermin, {zero: zero})
    with pytest.raises(InvalidInputError):
        build_trivial_lhv(classic_mermin, {zero: zero, quarter: zero})


def _random_two_setting_scenario(rng, parties, q):
    """Two grid settings per qubit party; rows are random classical-sum choices."""
    settings = [
        [PhasePoint(2, (Fraction(int(k), q),)) for k in rng.choice(q, size=2, replace=False)] for _ in range(parties)
    ]
    rows = [row for row in itertools.product(*settings) if phase_sum(row, 2).is_classical]
    if not rows:
        return None
    picked = rng.choice(len(rows), size=int(rng.integers(1, min(len(rows), 5) + 1)), replace=False)
    return MerminScenario(2, tuple(rows[int(i)] for i in sorted(picked)))


@pytest.mark.parametrize("parties, q", [(3, 4), (3, 8), (4, 4), (3, 6)])
def test_search_agrees_with_enumeration(parties, q):
    rng = np.random.default_rng(parties * 100 + q)
    checked = 0
    while checked < 40:
        scenario = _random_two_setting_scenario(rng, parties, q)
        if scenario is None:
            continue
        table = quantum_table(scenario)
        expected = exhaustive_lhv_exists(table)
        assert lhv_exists(table, "possibilistic").exists == expected
        assert lhv_exists(table, "parity").exists == expected
        checked += 1

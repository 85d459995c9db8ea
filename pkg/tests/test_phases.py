from fractions import Fraction

import pytest

from models.errors import DomainError, InvalidInputError
from models.phases import PhasePoint, phase_group, phase_sum
from utils.helpers import format_turn, parse_turns


def test_turns_are_reduced_mod_one():
    p = PhasePoint(3, (Fraction(10, 9), Fraction(-1, 9)))
    assert p.turns == (Fraction(1, 9), Fraction(8, 9))
    assert str(p) == "1/9,8/9"


def test_parse_accepts_negative_turns_and_bare_zero():
    assert PhasePoint.parse(3, "1/9,-1/9").turns == (Fraction(1, 9), Fraction(8, 9))
    assert PhasePoint.parse(4, "0").is_zero
    assert parse_turns("1/4, 3") == [Fraction(1, 4), Fraction(3)]
    assert format_turn(Fraction(3, 1)) == "3"


def test_wrong_arity_and_dimension():
    with pytest.raises(InvalidInputError):
        PhasePoint(3, (Fraction(1, 2),))
    with pytest.raises(DomainError):
        PhasePoint(1, ())
    with pytest.raises(DomainError):
        PhasePoint.zero(2) + PhasePoint.zero(3)


@pytest.mark.parametrize("dim", [2, 3, 5])
def test_classical_points(dim):
    for g in range(dim):
        point = PhasePoint.classical(dim, g)
        assert point.classical_value == g
        assert point.is_classical
    assert PhasePoint.classical(dim, dim).is_zero


def test_quarter_turn_doubles_to_classical(quarter):
    assert not quarter.is_classical
    assert 2 * quarter == PhasePoint.classical(2, 1)
    assert quarter + quarter + quarter + quarter == PhasePoint.zero(2)


def test_qutrit_witness_sums_to_classical(qutrit_phase):
    assert phase_sum([qutrit_phase] * 3, 3) == PhasePoint.classical(3, 1)
    assert qutrit_phase.classical_value is None
    assert qutrit_phase.denominator == 9


def test_non_classical_first_angle_with_classical_denominator():
    assert PhasePoint(3, (Fraction(1, 3), Fraction(1, 3))).classical_value is None


def test_json_round_trip():
    p = PhasePoint(3, (Fraction(1, 9), Fraction(8, 9)))
    assert p.to_json() == [[1, 9], [8, 9]]
    assert PhasePoint.from_json(3, p.to_json()) == p


def test_diagonal():
    diag = PhasePoint.parse(2, "1/4").diagonal()
    assert diag[0] == pytest.approx(1)
    assert diag[1] == pytest.approx(1j)


def test_phase_group_for_quarter_turns(quarter):
    emb = phase_group(2, [quarter])
    assert emb.modulus == 4
    assert emb.group.factors == (4,)
    assert emb.classical.order == 2
    assert emb.embed(quarter).coords == (1,)
    assert emb.embed(PhasePoint.classical(2, 1)) in emb.classical
    assert emb.embed(quarter) not in emb.classical
    assert emb.lift(emb.embed(quarter)) == quarter


def test_phase_group_for_qutrits(qutrit_phase):
    emb = phase_group(3, [qutrit_phase])
    assert emb.group.factors == (9, 9)
    assert emb.classical.order == 3
    assert emb.embed(qutrit_phase).coords == (1, 8)
    for g in range(3):
        assert emb.embed(PhasePoint.classical(3, g)) in emb.classical


def test_embedding_rejects_off_grid_phases(quarter):
    emb = phase_group(2)
    assert emb.modulus == 2
    with pytest.raises(DomainError):
        emb.embed(quarter)
    with pytest.raises(DomainError):
        emb.embed(PhasePoint.zero(3))

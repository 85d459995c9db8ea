"""Shared fixtures."""
from fractions import Fraction

import pytest

from models.phases import PhasePoint
from models.scenario import PhaseEquation, build_nonlocal_scenario


def turns(dim: int, *values) -> PhasePoint:
    return PhasePoint(dim, tuple(Fraction(v) for v in values))


@pytest.fixture
def quarter() -> PhasePoint:
    """The qubit phase pi/2."""
    return turns(2, "1/4")


@pytest.fixture
def mermin_witness(quarter) -> PhaseEquation:
    """2 * (pi/2) = pi, the classical point 1 of a qubit."""
    return PhaseEquation((2,), (quarter,), PhasePoint.classical(2, 1))


@pytest.fixture
def classic_mermin(mermin_witness):
    """Three qubits: one XXX control and the three cyclic YYX variations."""
    return build_nonlocal_scenario(mermin_witness)


@pytest.fixture
def qutrit_phase() -> PhasePoint:
    """(2 pi/9, -2 pi/9) on a qutrit."""
    return turns(3, "1/9", "-1/9")


@pytest.fixture
def ledger(tmp_path, monkeypatch):
    """Fresh SQLite ledger per test."""
    from models.database import init_db

    monkeypatch.setenv("DATABASE_URL", f"sqlite:///{tmp_path / 'ledger.db'}")
    init_db()
    yield tmp_path / "ledger.db"

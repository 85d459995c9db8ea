import numpy as np
import pytest

import models.frel as frel
from models.abgroup import FinAbGroup
from models.errors import ArityError, ResourceBoundError
from models.frel import (
    Relation,
    build_sc_pair,
    evaluate,
    frel_locality_check,
    is_rel_phase,
    is_x_copyable,
    phases_closed,
    rel_phases,
    verify_frel_laws,
)

GROUPS = [FinAbGroup.of(2), FinAbGroup.of(3), FinAbGroup.of(4), FinAbGroup.of(2, 2)]


def test_relation_composition_and_dagger():
    r = Relation(3, 1, 1, np.array([[1, 0, 0], [1, 0, 0], [0, 0, 1]]))
    ident = Relation.identity(3)
    assert r @ ident == r
    assert r.dagger.dagger == r
    assert r.image((0,)) == [(0,), (1,)]
    swap = Relation.swap(3)
    assert swap @ swap == Relation.identity(3, 2)


def test_relation_arity_checks():
    with pytest.raises(ArityError):
        Relation(2, 1, 1, np.zeros((2, 4)))
    with pytest.raises(ArityError):
        Relation.identity(2, 2) @ Relation.identity(2)


def test_evaluate_side_by_side():
    pair = build_sc_pair(FinAbGroup.of(2), FinAbGroup.of(2))
    ident = Relation.identity(pair.size)
    out = evaluate([[pair.z.comult, ident]], (pair.index(pair.g.element([1]), pair.h.zero), 0))
    assert len(out) == 2
    with pytest.raises(ArityError):
        evaluate([[pair.z.mult]], (0,))


@pytest.mark.parametrize("g", GROUPS, ids=str)
@pytest.mark.parametrize("h", GROUPS, ids=str)
def test_relational_laws(g, h):
    report = verify_frel_laws(build_sc_pair(g, h))
    assert report.all_ok
    assert report.to_dict()["quasi_special_scalar"] == 1


@pytest.mark.parametrize("g", GROUPS, ids=str)
@pytest.mark.parametrize("h", GROUPS[:2], ids=str)
def test_phases_form_the_power_group(g, h):
    phases = rel_phases(build_sc_pair(g, h))
    assert len(phases.phases) == g.order ** h.order
    assert len(phases.classical) == g.order
    assert phases.classical_subgroup.order == g.order
    assert phases_closed(phases)
    assert all(c in phases.classical_subgroup for c in phases.classical)


@pytest.mark.parametrize("g", GROUPS, ids=str)
@pytest.mark.parametrize("h", GROUPS, ids=str)
def test_relational_models_are_local(g, h):
    verdict = frel_locality_check(g, h)
    assert verdict.trivial


def test_single_point_is_not_a_phase():
    pair = build_sc_pair(FinAbGroup.of(3), FinAbGroup.of(2))
    state = Relation.state(pair.size, [0])
    assert not is_rel_phase(pair, state)


def test_constant_section_is_copyable():
    pair = build_sc_pair(FinAbGroup.of(3), FinAbGroup.of(2))
    one = pair.g.element([1])
    constant = Relation.state(pair.size, [pair.index(one, h) for h in (pair.h.element([0]), pair.h.element([1]))])
    varying = Relation.state(pair.size, [pair.index(one, pair.h.element([0])), pair.index(pair.g.zero, pair.h.element([1]))])
    assert is_rel_phase(pair, constant) and is_x_copyable(pair, constant)
    assert is_rel_phase(pair, varying) and not is_x_copyable(pair, varying)


def test_carrier_bound():
    with pytest.raises(ResourceBoundError):
        build_sc_pair(FinAbGroup.of(8), FinAbGroup.of(16))


def test_locality_check_forwards_bound(monkeypatch):
    seen = {}
    real = frel.is_trivial_extension

    def recording(group, subgroup, *, bound=None):
        seen["bound"] = bound
        return real(group, subgroup, bound=bound)

    monkeypatch.setattr(frel, "is_trivial_extension", recording)
    assert frel_locality_check(FinAbGroup.of(4), FinAbGroup.of(2), bound=8).trivial
    assert seen["bound"] == 8
    with pytest.raises(ResourceBoundError):
        frel_locality_check(FinAbGroup.of(4), FinAbGroup.of(2), bound=4)

import math

import numpy as np
import pytest

from models.abgroup import (
    EqSystem,
    exponent,
    FinAbGroup,
    Subgroup,
    abelian_groups,
    cyclic_subgroups,
    is_trivial_extension,
    oracle_verdict,
    quotient_projection,
    retraction_implies_trivial,
    solve_system,
    product_group,
)
from models.errors import DomainError, InvalidRetractionError, MalformedSystemError, ResourceBoundError


def test_group_basics():
    g = FinAbGroup.of(2, 4)
    assert g.order == 8
    assert g.exponent == 4
    assert g.rank == 2
    assert str(g) == "Z2 x Z4"
    assert len(list(g.elements())) == 8
    assert FinAbGroup(()).order == 1


def test_invariant_factors_merge_coprime_parts():
    assert FinAbGroup.of(2, 3).invariant_factors().factors == (6,)
    assert FinAbGroup.of(4, 2).invariant_factors().factors == (2, 4)
    assert FinAbGroup.of(2, 2).invariant_factors().factors == (2, 2)


def test_element_arithmetic_reduces_coordinates():
    g = FinAbGroup.of(2, 4)
    x = g.element([1, 3])
    assert (x + x).coords == (0, 2)
    assert (-x).coords == (1, 1)
    assert (4 * x).is_zero
    with pytest.raises(DomainError):
        g.element([1])


def test_abelian_groups_counts_isomorphism_classes():
    by_order = {}
    for g in abelian_groups(16):
        by_order.setdefault(g.order, []).append(g.factors)
    assert by_order[8] == [(2, 2, 2), (2, 4), (8,)]
    assert len(by_order[16]) == 5
    assert by_order[1] == [()]
    assert by_order[12] == [(2, 6), (12,)]


def test_cyclic_subgroups_are_distinct():
    subs = cyclic_subgroups(FinAbGroup.cyclic(4))
    assert sorted(s.order for s in subs) == [1, 2, 4]


def test_subgroup_order_and_membership():
    g = FinAbGroup.of(2, 4)
    h = Subgroup.generated(g, [[1, 2]])
    assert h.order == 2
    assert g.element([1, 2]) in h
    assert g.element([0, 2]) not in h
    assert Subgroup.whole(g).order == 8
    assert Subgroup.trivial(g).order == 1


def test_subgroup_equality_is_canonical():
    g = FinAbGroup.of(4, 4)
    a = Subgroup.generated(g, [[1, 1], [0, 2]])
    b = Subgroup.generated(g, [[3, 3], [2, 0]])
    assert a.same_as(b)
    assert not a.same_as(Subgroup.generated(g, [[1, 1]]))


def test_solve_in_whole_group():
    z4 = FinAbGroup.cyclic(4)
    system = EqSystem(((2,),), (z4.element([2]),))
    solved = solve_system(z4, system)
    assert solved.solvable
    assert system.is_solution(solved.solution)
    assert solved.kernel_order == 2


def test_unsolvable_system_carries_certificate():
    z4 = FinAbGroup.cyclic(4)
    solved = solve_system(z4, EqSystem(((2,),), (z4.element([1]),)))
    assert not solved.solvable
    cert = solved.certificate
    assert cert.modulus == 4
    assert cert.value % cert.modulus != 0
    assert all((m * 2) % 4 == 0 for m in cert.multipliers)


def test_solve_restricted_to_subgroup():
    z4 = FinAbGroup.cyclic(4)
    h = Subgroup.generated(z4, [[2]])
    system = EqSystem(((2,),), (z4.element([2]),))
    assert not solve_system(z4, system, h).solvable
    assert solve_system(z4, EqSystem(((1,),), (z4.element([2]),)), h).solution == (z4.element([2]),)


def test_inconsistent_parity_equations():
    z2 = FinAbGroup.cyclic(2)
    one, zero = z2.element([1]), z2.zero
    system = EqSystem(((1, 1), (1, 1)), (zero, one))
    solved = solve_system(z2, system)
    assert not solved.solvable
    assert solved.certificate.value == 1


def test_malformed_systems_are_rejected():
    z2 = FinAbGroup.cyclic(2)
    with pytest.raises(MalformedSystemError):
        EqSystem(((1,), (1, 1)), (z2.zero, z2.zero))
    with pytest.raises(MalformedSystemError):
        EqSystem(((1,),), ())
    with pytest.raises(MalformedSystemError):
        solve_system(FinAbGroup.cyclic(3), EqSystem(((1,),), (z2.zero,)))


def test_z4_over_two_is_nontrivial_with_witness():
    z4 = FinAbGroup.cyclic(4)
    verdict = is_trivial_extension(z4, Subgroup.generated(z4, [[2]]))
    assert not verdict.trivial
    assert verdict.witness.system.format() == "2x=2"
    assert verdict.witness.system.is_solution(verdict.witness.solution)
    assert verdict.to_dict()["witness"] == "2x=2"


@pytest.mark.parametrize(
    "factors, generators",
    [
        ((2, 2), [[1, 0]]),
        ((3, 3), [[1, 0]]),
        ((1,), [[1]]),
        ((6,), [[2]]),
        ((4,), []),
        ((4,), [[1]]),
        ((2, 4), [[1, 2]]),
    ],
)
def test_trivial_extensions(factors, generators):
    g = FinAbGroup(factors)
    assert is_trivial_extension(g, Subgroup.generated(g, generators)).trivial


def test_doubles_inside_subgroup_are_nontrivial():
    g = FinAbGroup.of(2, 4)
    verdict = is_trivial_extension(g, Subgroup.generated(g, [[0, 2]]))
    assert not verdict.trivial
    assert verdict.witness.system.is_solution(verdict.witness.solution)


def test_extension_rejects_foreign_subgroup():
    with pytest.raises(DomainError):
        is_trivial_extension(FinAbGroup.cyclic(4), Subgroup.generated(FinAbGroup.cyclic(2), [[1]]))


def test_retraction_certifies_triviality():
    g = FinAbGroup.of(2, 2)
    h = Subgroup.generated(g, [[1, 0]])
    assert retraction_implies_trivial(g, h, lambda x: g.element([x.coords[0], 0]))


def test_non_homomorphic_map_is_not_a_retraction():
    g = FinAbGroup.of(2, 2)
    h = Subgroup.generated(g, [[1, 0]])
    assert not retraction_implies_trivial(g, h, lambda x: g.element([1 if x == g.element([0, 1]) else x.coords[0], 0]))


def test_retraction_outside_subgroup_is_rejected():
    g = FinAbGroup.of(2, 2)
    h = Subgroup.generated(g, [[1, 0]])
    with pytest.raises(InvalidRetractionError):
        retraction_implies_trivial(g, h, lambda x: x)


def test_quotient_projection_keeps_selected_factors():
    target, project = quotient_projection(FinAbGroup.of(2, 3, 4), [0, 2])
    assert target.factors == (2, 4)
    assert project(FinAbGroup.of(2, 3, 4).element([1, 2, 3])).coords == (1, 3)


def test_enumeration_bound():
    with pytest.raises(ResourceBoundError):
        list(FinAbGroup.of(10, 10).elements(bound=50))


def _agreement(groups):
    disagreements = []
    for g in groups:
        for h in cyclic_subgroups(g):
            fast = is_trivial_extension(g, h).trivial
            slow = oracle_verdict(g, h).trivial
            if fast != slow:
                disagreements.append((g.factors, h.to_dict()))
    return disagreements


def test_divisor_check_matches_oracle_small_orders():
    assert _agreement(abelian_groups(8)) == []


def _factorizations(n, smallest=2):
    """Non-decreasing factor lists with product n."""
    if n == 1:
        yield ()
        return
    for d in range(smallest, n + 1):
        if n % d == 0:
            for rest in _factorizations(n // d, d):
                yield (d,) + rest


@pytest.mark.slow
def test_divisor_check_matches_oracle_up_to_sixteen():
    groups = [FinAbGroup(f) for n in range(2, 17) for f in _factorizations(n)]
    groups += [FinAbGroup(f) for f in [(3, 2), (4, 2), (4, 3), (8, 2), (6, 2)]]
    assert _agreement(groups) == []


def test_cyclic_witness_at_order_eight():
    z8 = FinAbGroup.cyclic(8)
    verdict = is_trivial_extension(z8, Subgroup.generated(z8, [[4]]))
    assert verdict.witness.system.format() == "2x=4"


def test_identity_coefficient():
    z4 = FinAbGroup.cyclic(4)
    assert solve_system(z4, EqSystem(((1,),), (z4.element([3]),))).solution == (z4.element([3]),)


def test_doubling_map_does_not_fix_subgroup():
    z4 = FinAbGroup.cyclic(4)
    assert not retraction_implies_trivial(z4, Subgroup.generated(z4, [[2]]), lambda x: 2 * x)


def test_identity_retraction_onto_whole_group():
    g = FinAbGroup.of(2, 3)
    assert retraction_implies_trivial(g, Subgroup.whole(g), lambda x: x)


def test_supporting_algebra():
    assert exponent(FinAbGroup.of(2, 4)) == 4
    assert product_group(FinAbGroup.of(2), FinAbGroup.of(3)).factors == (2, 3)
    _, project = quotient_projection(FinAbGroup.of(2, 2), [0])
    assert project(FinAbGroup.of(2, 2).element([1, 1])).coords == (1,)
    assert [x.coords for x in FinAbGroup.of(3).elements()] == [(0,), (1,), (2,)]


@pytest.mark.parametrize("factors", [(4,), (2, 4), (6,), (3, 9)])
def test_multiples_subgroup_identity(factors):
    g = FinAbGroup(factors)
    for d in range(1, 2 * g.exponent + 1):
        scaled = {d * x for x in g.elements()}
        reduced = {math.gcd(d, g.exponent) * x for x in g.elements()}
        assert scaled == reduced


def test_solutions_survive_unimodular_row_operations():
    g = FinAbGroup.of(4, 6)
    rng = np.random.default_rng(1)
    for _ in range(20):
        coeffs = rng.integers(-3, 4, size=(2, 2)).tolist()
        rhs = [g.element(rng.integers(0, 12, size=2).tolist()) for _ in range(2)]
        k = int(rng.integers(-3, 4))
        mixed = [coeffs[0], [a + k * b for a, b in zip(coeffs[1], coeffs[0])]]
        mixed_rhs = [rhs[0], rhs[1] + k * rhs[0]]
        first = solve_system(g, EqSystem(tuple(map(tuple, coeffs)), tuple(rhs)))
        second = solve_system(g, EqSystem(tuple(map(tuple, mixed)), tuple(mixed_rhs)))
        assert first.solvable == second.solvable
        if first.solvable:
            assert first.kernel_order == second.kernel_order
            assert EqSystem(tuple(map(tuple, mixed)), tuple(mixed_rhs)).is_solution(first.solution)

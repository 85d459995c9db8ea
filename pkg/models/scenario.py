"""Mermin measurement scenarios.

A scenario is a list of rows, each assigning one Z-phase per party; every row
must sum to an X-classical point. This module builds the controls/variations
scenario from an equation witness, validates rows, derives the Z_D parity
system a local model would have to satisfy, and evaluates the two-measurement
effectiveness condition sum_j e^{i c_j} = -1.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from utils.constants import DEFAULT_TOLERANCE, ENUMERATION_BOUND, PAIR_POLICIES
from .abgroup import EqSystem, FinAbGroup, solve_system
from .errors import InvalidInputError, NotAWitnessError, ResourceBoundError, ScenarioConstraintError
from .phases import PhasePoint, phase_group, phase_sum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MerminScenario:
    dim: int
    rows: tuple[tuple[PhasePoint, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.rows)
        if not rows:
            raise InvalidInputError("a scenario needs at least one measurement row")
        widths = {len(row) for row in rows}
        if len(widths) != 1 or 0 in widths:
            raise InvalidInputError(f"rows must all name the same positive number of parties, got {sorted(widths)}")
        for row in rows:
            for p in row:
                if p.dim != self.dim:
                    raise InvalidInputError(f"phase {p} has dimension {p.dim}, scenario has D={self.dim}")
        object.__setattr__(self, "rows", rows)

    @property
    def num_parties(self) -> int:
        return len(self.rows[0])

    def row_sum(self, s: int) -> PhasePoint:
        return phase_sum(self.rows[s], self.dim)

    def settings(self, party: int) -> list[PhasePoint]:
        """Distinct phases used by one party, in order of first use."""
        seen: list[PhasePoint] = []
        for row in self.rows:
            if row[party] not in seen:
                seen.append(row[party])
        return seen

    def distinct_phases(self) -> list[PhasePoint]:
        seen: list[PhasePoint] = []
        for row in self.rows:
            for p in row:
                if p not in seen:
                    seen.append(p)
        return seen

    def to_dict(self) -> dict:
        return {
            "D": self.dim,
            "N": self.num_parties,
            "rows": [[p.to_json() for p in row] for row in self.rows],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MerminScenario":
        dim = int(data["D"])
        scenario = cls(dim, tuple(tuple(PhasePoint.from_json(dim, p) for p in row) for row in data["rows"]))
        if "N" in data and int(data["N"]) != scenario.num_parties:
            raise InvalidInputError(f"declared N={data['N']} but rows have {scenario.num_parties} parties")
        return scenario

    def describe(self) -> list[str]:
        return [" ".join(f"[{p}]" for p in row) for row in self.rows]


@dataclass(frozen=True)
class ScenarioReport:
    points: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"valid": True, "classical_points": list(self.points)}


def validate_scenario(scenario: MerminScenario) -> ScenarioReport:
    """Classical point g_s of every row; raises listing the rows that are not classical."""
    points: list[int] = []
    bad: list[int] = []
    for s in range(len(scenario.rows)):
        g = scenario.row_sum(s).classical_value
        if g is None:
            bad.append(s)
        points.append(-1 if g is None else g)
    if bad:
        raise ScenarioConstraintError(f"rows {bad} do not sum to an X-classical point", rows=bad)
    return ScenarioReport(tuple(points))


# --- building non-local scenarios from witnesses -----------------------------


@dataclass(frozen=True)
class PhaseEquation:
    """sum_r coeffs[r] * phases[r] = rhs, with rhs an X-classical point."""

    coeffs: tuple[int, ...]
    phases: tuple[PhasePoint, ...]
    rhs: PhasePoint

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(n) for n in self.coeffs))
        object.__setattr__(self, "phases", tuple(self.phases))
        if len(self.coeffs) != len(self.phases) or not self.coeffs:
            raise InvalidInputError("a witness equation needs one coefficient per phase")

    @property
    def dim(self) -> int:
        return self.rhs.dim

    def lhs(self) -> PhasePoint:
        total = PhasePoint.zero(self.dim)
        for n, a in zip(self.coeffs, self.phases):
            total = total + n * a
        return total

    def classical_solution(self) -> tuple[PhasePoint, ...] | None:
        """Classical points b_r with sum n_r b_r = rhs, if any."""
        embedding = phase_group(self.dim, [*self.phases, self.rhs])
        system = EqSystem((self.coeffs,), (embedding.embed(self.rhs),))
        solved = solve_system(embedding.group, system, embedding.classical)
        if not solved.solvable:
            return None
        return tuple(embedding.lift(x) for x in solved.solution)

    def to_dict(self) -> dict:
        return {
            "D": self.dim,
            "coeffs": list(self.coeffs),
            "phases": [p.to_json() for p in self.phases],
            "rhs": self.rhs.to_json(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PhaseEquation":
        dim = int(data["D"])
        return cls(
            tuple(data["coeffs"]),
            tuple(PhasePoint.from_json(dim, p) for p in data["phases"]),
            PhasePoint.from_json(dim, data["rhs"]),
        )


def _check_witness(eq: PhaseEquation) -> None:
    if eq.lhs() != eq.rhs:
        raise InvalidInputError(f"the phases sum to {eq.lhs()}, not to the stated right-hand side {eq.rhs}")
    if not eq.rhs.is_classical:
        raise InvalidInputError(f"right-hand side {eq.rhs} is not an X-classical point")
    solution = eq.classical_solution()
    if solution is not None:
        raise NotAWitnessError(
            "the equation is solvable among classical points",
            solution=[p.to_json() for p in solution],
        )
    if any(n == 0 for n in eq.coeffs) or any(a.is_zero for a in eq.phases) or eq.rhs.is_zero:
        raise InvalidInputError("witness coefficients, phases and right-hand side must be non-zero")


def _expanded_row(eq: PhaseEquation) -> list[PhasePoint]:
    """The multiset (a_1 x n_1, ..., a_M x n_M) with negative n_r turned into copies of -a_r."""
    row: list[PhasePoint] = []
    for n, a in zip(eq.coeffs, eq.phases):
        row.extend([a if n > 0 else -a] * abs(n))
    return row


def _cyclic_block(eq: PhaseEquation) -> list[list[PhasePoint]]:
    k = eq.dim  # exponent of the classical subgroup Z_D
    alpha = _expanded_row(eq)
    n0 = 1
    while (len(alpha) + n0) % k != 1 % k:
        n0 += 1
    alpha = alpha + [PhasePoint.zero(eq.dim)] * n0
    size = len(alpha)
    controls = [[PhasePoint.zero(eq.dim)] * size for _ in range(n0)]
    variations = [[alpha[(i + v) % size] for i in range(size)] for v in range(size)]
    return controls + variations


def _combinations_block(eq: PhaseEquation, parties: int | None, *, bound: int) -> list[list[PhasePoint]]:
    if len(eq.phases) != 1:
        raise InvalidInputError("the combinations layout needs a single-phase witness n*a = g")
    n = abs(eq.coeffs[0])
    a = eq.phases[0] if eq.coeffs[0] > 0 else -eq.phases[0]
    zero = PhasePoint.zero(eq.dim)

    def rows_for(size: int) -> list[list[PhasePoint]]:
        if math.comb(size, n) > bound:
            raise ResourceBoundError(f"C({size},{n}) variations exceed the bound", bound=bound, requested=math.comb(size, n))
        variations = [[a if i in chosen else zero for i in range(size)] for chosen in itertools.combinations(range(size), n)]
        return [[zero] * size] + variations

    if parties is not None:
        if parties < n:
            raise InvalidInputError(f"{parties} parties cannot hold {n} copies of the phase")
        return rows_for(parties)
    for size in range(n, n + 4 * eq.dim * eq.dim):
        rows = rows_for(size)
        if not parity_system(MerminScenario(eq.dim, tuple(map(tuple, rows)))).solvable:
            return rows
    raise InvalidInputError(f"no party count up to {n + 4 * eq.dim * eq.dim} refutes local models for this witness")


def build_nonlocal_scenario(
    witness: PhaseEquation | Sequence[PhaseEquation],
    *,
    layout: str = "cyclic",
    parties: int | None = None,
    bound: int | None = None,
) -> MerminScenario:
    """Controls plus variations realising an equation with no classical solution.

    ``cyclic``: n_0 all-zero controls and the V cyclic shifts of the row
    (a_1 x n_1, ..., a_M x n_M, 0 x n_0), with n_0 the smallest positive count
    making V = sum n_r + n_0 congruent to 1 mod D. ``combinations``: one control
    and every placement of the n copies of a single phase among the parties.
    Several equations give independent blocks on disjoint parties.
    """
    limit = ENUMERATION_BOUND if bound is None else bound
    equations = [witness] if isinstance(witness, PhaseEquation) else list(witness)
    if not equations:
        raise InvalidInputError("no witness equations given")
    dim = equations[0].dim
    blocks = []
    for eq in equations:
        if eq.dim != dim:
            raise InvalidInputError("witness equations of different dimensions")
        _check_witness(eq)
        if layout == "cyclic":
            blocks.append(_cyclic_block(eq))
        elif layout == "combinations":
            blocks.append(_combinations_block(eq, parties, bound=limit))
        else:
            raise InvalidInputError(f"unknown layout {layout!r}", layouts=["cyclic", "combinations"])

    total = sum(len(b[0]) for b in blocks)
    zero = PhasePoint.zero(dim)
    rows: list[tuple[PhasePoint, ...]] = []
    offset = 0
    for block in blocks:
        width = len(block[0])
        for row in block:
            rows.append(tuple([zero] * offset + list(row) + [zero] * (total - offset - width)))
        offset += width
    scenario = MerminScenario(dim, tuple(rows))
    validate_scenario(scenario)
    logger.info("built %d-row scenario on %d parties (%s layout)", len(rows), total, layout)
    return scenario


# --- the parity system of local models --------------------------------------


@dataclass(frozen=True)
class ParitySystem:
    """sum_i x_{i, setting(s, i)} = g_s over Z_D, one unknown per (party, setting)."""

    group: FinAbGroup
    system: EqSystem
    variables: tuple[tuple[int, PhasePoint], ...]

    @property
    def solvable(self) -> bool:
        return solve_system(self.group, self.system).solvable


def parity_system(scenario: MerminScenario) -> ParitySystem:
    report = validate_scenario(scenario)
    group = FinAbGroup.cyclic(scenario.dim)
    variables: list[tuple[int, PhasePoint]] = []
    for i in range(scenario.num_parties):
        variables.extend((i, p) for p in scenario.settings(i))
    index = {v: n for n, v in enumerate(variables)}
    coeffs = []
    for row in scenario.rows:
        line = [0] * len(variables)
        for i, p in enumerate(row):
            line[index[(i, p)]] = 1
        coeffs.append(tuple(line))
    rhs = tuple(group.element([g]) for g in report.points)
    return ParitySystem(group, EqSystem(tuple(coeffs), rhs), tuple(variables))


# --- two-measurement scenarios ----------------------------------------------


@dataclass(frozen=True)
class TwoMeasScenario:
    """One control of all-X rows plus V variations, each measuring B on beta parties."""

    num_parties: int
    dim: int
    b: PhasePoint
    variations: tuple[frozenset[int], ...]

    def __post_init__(self):
        variations = tuple(frozenset(v) for v in self.variations)
        if not variations:
            raise InvalidInputError("a two-measurement scenario needs at least one variation")
        sizes = {len(v) for v in variations}
        if len(sizes) != 1:
            raise InvalidInputError(f"variations measure B on different numbers of parties: {sorted(sizes)}")
        if any(i < 0 or i >= self.num_parties for v in variations for i in v):
            raise InvalidInputError(f"variation party index outside 0..{self.num_parties - 1}")
        if self.b.dim != self.dim:
            raise InvalidInputError(f"B phase has dimension {self.b.dim}, scenario has D={self.dim}")
        object.__setattr__(self, "variations", variations)

    @property
    def beta(self) -> int:
        return len(self.variations[0])

    @property
    def num_variations(self) -> int:
        return len(self.variations)

    @classmethod
    def cyclic(cls, dim: int, num_variations: int, beta: int, b: PhasePoint, num_parties: int | None = None) -> "TwoMeasScenario":
        """Shifts of B on parties 0..beta-1 around a ring of N parties (default N = max(V, beta))."""
        n = num_parties or max(num_variations, beta)
        if beta > n:
            raise InvalidInputError(f"beta={beta} exceeds the {n} parties")
        variations = tuple(frozenset((i + v) % n for i in range(beta)) for v in range(num_variations))
        return cls(n, dim, b, variations)

    @classmethod
    def combinations(cls, dim: int, num_parties: int, beta: int, b: PhasePoint) -> "TwoMeasScenario":
        return cls(num_parties, dim, b, tuple(frozenset(c) for c in itertools.combinations(range(num_parties), beta)))

    def to_mermin_scenario(self) -> MerminScenario:
        zero = PhasePoint.zero(self.dim)
        rows = [tuple([zero] * self.num_parties)]
        rows += [tuple(self.b if i in v else zero for i in range(self.num_parties)) for v in self.variations]
        return MerminScenario(self.dim, tuple(rows))

    def to_dict(self) -> dict:
        return {
            "N": self.num_parties,
            "D": self.dim,
            "b": self.b.to_json(),
            "variations": [sorted(v) for v in self.variations],
        }


@dataclass(frozen=True)
class NewCondResult:
    effective: bool
    residual: complex
    c: PhasePoint
    structurally_ineffective: bool
    row_classical: bool
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "effective": self.effective,
            "residual": [float(self.residual.real), float(self.residual.imag)],
            "residual_abs": float(abs(self.residual)),
            "c": [str(t) for t in self.c.turns],
            "structurally_ineffective": self.structurally_ineffective,
            "row_classical": self.row_classical,
            "tolerance": self.tolerance,
        }


def evaluate_newcond(dim: int, num_variations: int, beta: int, b: PhasePoint, *, tol: float = DEFAULT_TOLERANCE) -> NewCondResult:
    """c_j = beta * (V mod D) * b_j; effective iff |sum_j e^{i c_j} + 1| <= tol."""
    factor = beta * (num_variations % dim)
    c = factor * b
    residual = complex(np.sum(c.diagonal()[1:]) + 1)
    structural = num_variations % dim == 0
    effective = not structural and abs(residual) <= tol
    return NewCondResult(effective, residual, c, structural, (beta * b).is_classical, tol)


def newcond_check(ts: TwoMeasScenario, *, tol: float = DEFAULT_TOLERANCE) -> NewCondResult:
    result = evaluate_newcond(ts.dim, ts.num_variations, ts.beta, ts.b, tol=tol)
    if result.structurally_ineffective:
        logger.warning("V=%d is divisible by D=%d: no B can be effective", ts.num_variations, ts.dim)
    return result


def canonical_representative(b: PhasePoint) -> PhasePoint:
    """Least member of b + {classical points}; b and b + classical measure the same basis."""
    return min((b + PhasePoint.classical(b.dim, g) for g in range(b.dim)), key=lambda p: p.turns)


def grid_points(dim: int, q: int, *, bound: int | None = None) -> Iterable[PhasePoint]:
    limit = ENUMERATION_BOUND if bound is None else bound
    if q < 1:
        raise InvalidInputError(f"grid denominator must be positive, got {q}")
    size = q ** (dim - 1)
    if size > limit:
        raise ResourceBoundError(f"grid of {size} phases for D={dim}, q={q}", bound=limit, requested=size)
    for coords in itertools.product(range(q), repeat=dim - 1):
        yield PhasePoint(dim, tuple(Fraction(c, q) for c in coords))


def scan_newcond(
    dim: int, num_variations: int, beta: int, q: int, *, tol: float = DEFAULT_TOLERANCE, bound: int | None = None
) -> list[PhasePoint]:
    """Non-classical grid phases b satisfying the condition, one per classical coset."""
    found: dict[tuple, PhasePoint] = {}
    for b in grid_points(dim, q, bound=bound):
        if b.is_classical:
            continue
        if evaluate_newcond(dim, num_variations, beta, b, tol=tol).effective:
            rep = canonical_representative(b)
            found.setdefault(rep.turns, rep)
    return [found[k] for k in sorted(found)]


# --- effective pair counting ------------------------------------------------


@dataclass(frozen=True)
class PairCount:
    num_parties: int
    dim: int
    q: int
    policy: str
    count: int
    beta: int | None
    num_variations: int | None
    solutions: tuple[PhasePoint, ...] = field(repr=False, default=())

    def to_dict(self) -> dict:
        return {
            "N": self.num_parties,
            "D": self.dim,
            "q": self.q,
            "policy": self.policy,
            "count": self.count,
            "beta": self.beta,
            "V": self.num_variations,
            "solutions": [str(p) for p in self.solutions],
        }

    def csv_row(self) -> str:
        return f"{self.num_parties},{self.dim},{self.q},{self.policy},{self.count}"


def _variation_choices(num_parties: int, dim: int, policy: str) -> list[tuple[int, tuple[frozenset[int], ...]]]:
    if policy == "combinations":
        return [
            (beta, tuple(frozenset(c) for c in itertools.combinations(range(num_parties), beta)))
            for beta in range(1, num_parties + 1)
        ]
    if policy == "cyclic":
        return [
            (beta, tuple(frozenset((i + v) % num_parties for i in range(beta)) for v in range(num_parties)))
            for beta in range(1, num_parties + 1)
        ]
    if policy == "preset-qutrit-ten":
        if (num_parties, dim) != (5, 3):
            raise InvalidInputError("the preset-qutrit-ten policy is defined for N=5, D=3 only")
        return [(3, tuple(frozenset(c) for c in itertools.combinations(range(5), 3)))]
    raise InvalidInputError(f"unknown variation policy {policy!r}", policies=PAIR_POLICIES)


def _refutes_local_models(num_parties: int, dim: int, variations: Sequence[frozenset[int]], g: int) -> bool:
    """True when controls at 0 and variations at g admit no deterministic local assignment."""
    group = FinAbGroup.cyclic(dim)
    coeffs = [tuple([0] * num_parties + [1] * num_parties)]
    for v in variations:
        coeffs.append(tuple([1 if i in v else 0 for i in range(num_parties)] + [0 if i in v else 1 for i in range(num_parties)]))
    rhs = (group.zero,) + tuple(group.element([g]) for _ in variations)
    return not solve_system(group, EqSystem(tuple(coeffs), rhs)).solvable


def count_effective_pairs(
    num_parties: int,
    dim: int,
    q: int,
    policy: str = "combinations",
    *,
    tol: float = DEFAULT_TOLERANCE,
    bound: int | None = None,
) -> PairCount:
    """Number of B observables (up to classical relabelling) paired with X in a non-local scenario.

    A grid phase b counts for a variation choice when beta*b is classical, the
    resulting scenario refutes local models, and the effectiveness condition
    holds; the reported count is the maximum over the policy's choices.
    """
    choices = _variation_choices(num_parties, dim, policy)
    grid = [b for b in grid_points(dim, q, bound=bound) if not b.is_classical]
    best = PairCount(num_parties, dim, q, policy, 0, None, None)
    for beta, variations in choices:
        viable: dict[int, bool] = {}
        found: dict[tuple, PhasePoint] = {}
        for b in grid:
            g = (beta * b).classical_value
            if g is None:
                continue
            if g not in viable:
                viable[g] = _refutes_local_models(num_parties, dim, variations, g)
            if not viable[g]:
                continue
            if evaluate_newcond(dim, len(variations), beta, b, tol=tol).effective:
                rep = canonical_representative(b)
                found.setdefault(rep.turns, rep)
        logger.debug("N=%d D=%d q=%d beta=%d: %d pairs", num_parties, dim, q, beta, len(found))
        if len(found) > best.count:
            solutions = tuple(found[k] for k in sorted(found))
            best = PairCount(num_parties, dim, q, policy, len(found), beta, len(variations), solutions)
    return best


def pair_series(
    parties: Iterable[int], dim: int, q: int, policy: str = "combinations", *, tol: float = DEFAULT_TOLERANCE, bound: int | None = None
) -> list[PairCount]:
    return [count_effective_pairs(n, dim, q, policy, tol=tol, bound=bound) for n in parties]

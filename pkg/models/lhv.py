"""Local hidden variable models for Mermin scenarios.

A local model is a mixture of deterministic assignments: each party fixes an
outcome in Z_D for every phase setting it may be asked to use. A row is
predicted by reading each party's value for that row's setting.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from utils.constants import DEFAULT_TOLERANCE, LHV_SEARCH_BOUND, POSSIBILITY_THRESHOLD
from utils.helpers import format_tuple
from .abgroup import EmptinessCertificate, EqSystem, solve_system
from .errors import InvalidInputError, ResourceBoundError
from .phases import PhasePoint, phase_group
from .qudit import mermin_outcome_distribution, outcome_support
from .scenario import MerminScenario, parity_system, validate_scenario

logger = logging.getLogger(__name__)

Variable = tuple[int, PhasePoint]


@dataclass(frozen=True)
class PossibilisticTable:
    scenario: MerminScenario
    supports: tuple[frozenset[tuple[int, ...]], ...]
    distributions: tuple[np.ndarray, ...] | None = field(default=None, repr=False)
    threshold: float = POSSIBILITY_THRESHOLD

    def __post_init__(self):
        supports = tuple(frozenset(tuple(int(v) for v in o) for o in s) for s in self.supports)
        if len(supports) != len(self.scenario.rows):
            raise InvalidInputError(f"{len(supports)} supports for {len(self.scenario.rows)} rows")
        empty = [s for s, sup in enumerate(supports) if not sup]
        if empty:
            raise InvalidInputError(f"rows {empty} have no possible outcome", rows=empty)
        if self.distributions is not None:
            for s, dist in enumerate(self.distributions):
                if abs(float(dist.sum()) - 1.0) > DEFAULT_TOLERANCE:
                    raise InvalidInputError(f"row {s} probabilities sum to {float(dist.sum())}")
        object.__setattr__(self, "supports", supports)

    def to_dict(self) -> dict:
        rows = []
        for s, support in enumerate(self.supports):
            entry: dict = {"row": s, "support": [list(o) for o in sorted(support)]}
            if self.distributions is not None:
                dist = self.distributions[s]
                entry["probs"] = {format_tuple(o): float(dist[o]) for o in sorted(support)}
            rows.append(entry)
        return {"scenario": self.scenario.to_dict(), "threshold": self.threshold, "rows": rows}

    @classmethod
    def from_dict(cls, data: dict) -> "PossibilisticTable":
        scenario = MerminScenario.from_dict(data["scenario"])
        supports = tuple(frozenset(tuple(o) for o in row["support"]) for row in data["rows"])
        return cls(scenario, supports, threshold=float(data.get("threshold", POSSIBILITY_THRESHOLD)))


def quantum_table(
    scenario: MerminScenario, *, bound: int | None = None, threshold: float = POSSIBILITY_THRESHOLD
) -> PossibilisticTable:
    """Born distributions of every row and their supports."""
    dists = tuple(
        mermin_outcome_distribution(scenario.dim, scenario.num_parties, row, bound=bound) for row in scenario.rows
    )
    supports = tuple(outcome_support(d, threshold) for d in dists)
    return PossibilisticTable(scenario, supports, dists, threshold)


@dataclass(frozen=True)
class LocalAssignment:
    variables: tuple[Variable, ...]
    values: tuple[int, ...]

    @cached_property
    def _index(self) -> dict[Variable, int]:
        return {v: n for n, v in enumerate(self.variables)}

    def outcome(self, party: int, setting: PhasePoint) -> int:
        return self.values[self._index[(party, setting)]]

    def predict(self, row: Sequence[PhasePoint]) -> tuple[int, ...]:
        return tuple(self.outcome(i, p) for i, p in enumerate(row))

    def to_dict(self) -> dict:
        return {"assignment": [[i, str(p), x] for (i, p), x in zip(self.variables, self.values)]}


@dataclass(frozen=True)
class LhvModel:
    scenario: MerminScenario
    assignments: tuple[LocalAssignment, ...]
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (len(self.assignments),) or (weights < 0).any():
            raise InvalidInputError("mixture weights must be one non-negative number per assignment")
        if abs(weights.sum() - 1.0) > DEFAULT_TOLERANCE:
            raise InvalidInputError(f"mixture weights sum to {weights.sum()}")
        object.__setattr__(self, "weights", weights)

    def row_distribution(self, s: int) -> np.ndarray:
        dist = np.zeros((self.scenario.dim,) * self.scenario.num_parties)
        row = self.scenario.rows[s]
        for assignment, w in zip(self.assignments, self.weights):
            dist[assignment.predict(row)] += w
        return dist

    def support(self, s: int) -> frozenset[tuple[int, ...]]:
        row = self.scenario.rows[s]
        return frozenset(a.predict(row) for a, w in zip(self.assignments, self.weights) if w > 0)

    def to_dict(self) -> dict:
        return {"assignments": len(self.assignments), "weights": "uniform" if np.ptp(self.weights) == 0 else self.weights.tolist()}


@dataclass(frozen=True)
class LhvVerdict:
    exists: bool
    mode: str
    model: LhvModel | None
    certificate: EmptinessCertificate | None
    message: str
    explored: int = 0

    def to_dict(self) -> dict:
        return {
            "lhv_exists": self.exists,
            "mode": self.mode,
            "model": None if self.model is None else self.model.to_dict(),
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "message": self.message,
            "explored": self.explored,
        }


def _shifted_mixture(
    scenario: MerminScenario, variables: Sequence[Variable], base: Mapping[Variable, int], *, bound: int
) -> LhvModel:
    """Uniform mixture over lambda in Z_D^N with sum 0 of x_{i,a} = base(i,a) + lambda_i."""
    dim, n = scenario.dim, scenario.num_parties
    size = dim ** (n - 1)
    if size > bound:
        raise ResourceBoundError(f"mixture over {size} shared values", bound=bound, requested=size)
    assignments = []
    for head in itertools.product(range(dim), repeat=n - 1):
        shift = list(head) + [(-sum(head)) % dim]
        values = tuple((base[(i, p)] + shift[i]) % dim for i, p in variables)
        assignments.append(LocalAssignment(tuple(variables), values))
    weights = np.full(len(assignments), 1 / len(assignments))
    return LhvModel(scenario, tuple(assignments), weights)


def _certificate_text(cert: EmptinessCertificate) -> str:
    rows = [f"{y}*row{p}" for p, y in enumerate(cert.multipliers) if y]
    return f"{' + '.join(rows) or '0'} gives 0 ≡ {cert.value} (mod {cert.modulus})"


def lhv_exists(table: PossibilisticTable, mode: str = "possibilistic", *, bound: int | None = None) -> LhvVerdict:
    """Decide whether a mixture of deterministic local assignments reproduces the table.

    ``parity``: solve the Z_D system sum_i x_{i,setting} = g_s; a solution shifted
    by every zero-sum lambda reproduces the uniform parity distributions.
    ``possibilistic``: search every assignment consistent with all supports; a
    model exists iff their predictions cover every support.
    """
    limit = LHV_SEARCH_BOUND if bound is None else bound
    scenario = table.scenario
    if mode == "parity":
        ps = parity_system(scenario)
        solved = solve_system(ps.group, ps.system)
        if not solved.solvable:
            text = _certificate_text(solved.certificate)
            logger.info("parity refutation: %s", text)
            return LhvVerdict(False, mode, None, solved.certificate, text)
        base = {v: x.coords[0] for v, x in zip(ps.variables, solved.solution)}
        model = _shifted_mixture(scenario, ps.variables, base, bound=limit)
        return LhvVerdict(True, mode, model, None, "parity system solvable")
    if mode != "possibilistic":
        raise InvalidInputError(f"unknown mode {mode!r}", modes=["possibilistic", "parity"])

    consistent, explored = _consistent_assignments(table, bound=limit)
    return _coverage_verdict(table, consistent, explored)


def _variables(scenario: MerminScenario) -> list[Variable]:
    out: list[Variable] = []
    for i in range(scenario.num_parties):
        out.extend((i, p) for p in scenario.settings(i))
    return out


def _consistent_assignments(table: PossibilisticTable, *, bound: int) -> tuple[list[LocalAssignment], int]:
    scenario = table.scenario
    variables = _variables(scenario)
    index = {v: n for n, v in enumerate(variables)}
    row_vars = [[index[(i, p)] for i, p in enumerate(row)] for row in scenario.rows]
    # rows become checkable once their last variable is fixed
    ready: dict[int, list[int]] = {}
    for s, idxs in enumerate(row_vars):
        ready.setdefault(max(idxs), []).append(s)

    found: list[LocalAssignment] = []
    values = [0] * len(variables)
    explored = 0

    def extend(depth: int) -> None:
        nonlocal explored
        if depth == len(variables):
            found.append(LocalAssignment(tuple(variables), tuple(values)))
            return
        for x in range(scenario.dim):
            explored += 1
            if explored > bound:
                raise ResourceBoundError(
                    "local assignment search exceeded its bound",
                    bound=bound,
                    partial={"consistent_found": len(found), "explored": explored},
                )
            values[depth] = x
            if all(tuple(values[k] for k in row_vars[s]) in table.supports[s] for s in ready.get(depth, [])):
                extend(depth + 1)

    extend(0)
    logger.debug("assignment search: %d nodes, %d consistent", explored, len(found))
    return found, explored


def _coverage_verdict(table: PossibilisticTable, consistent: list[LocalAssignment], explored: int) -> LhvVerdict:
    scenario = table.scenario
    if not consistent:
        return LhvVerdict(False, "possibilistic", None, None, "no deterministic assignment is consistent with every row", explored)
    uncovered = [
        s for s, row in enumerate(scenario.rows) if {a.predict(row) for a in consistent} != set(table.supports[s])
    ]
    if uncovered:
        return LhvVerdict(
            False, "possibilistic", None, None, f"consistent assignments never produce some outcomes of rows {uncovered}", explored
        )
    model = LhvModel(scenario, tuple(consistent), np.full(len(consistent), 1 / len(consistent)))
    return LhvVerdict(True, "possibilistic", model, None, f"{len(consistent)} consistent assignments cover every row", explored)


def exhaustive_lhv_exists(table: PossibilisticTable, *, bound: int | None = None) -> bool:
    """Plain enumeration of all D^(settings) assignments; cross-check for the search."""
    limit = LHV_SEARCH_BOUND if bound is None else bound
    scenario = table.scenario
    variables = tuple(_variables(scenario))
    total = scenario.dim ** len(variables)
    if total > limit:
        raise ResourceBoundError(f"{total} assignments to enumerate", bound=limit, requested=total)
    consistent = []
    for values in itertools.product(range(scenario.dim), repeat=len(variables)):
        a = LocalAssignment(variables, values)
        if all(a.predict(row) in table.supports[s] for s, row in enumerate(scenario.rows)):
            consistent.append(a)
    return _coverage_verdict(table, consistent, total).exists


def classical_substitution(scenario: MerminScenario) -> dict[PhasePoint, PhasePoint] | None:
    """Classical points b(a) per distinct phase a with every row sum preserved, if they exist."""
    report = validate_scenario(scenario)
    phases = scenario.distinct_phases()
    embedding = phase_group(scenario.dim, phases)
    coeffs = []
    rhs = []
    for s, row in enumerate(scenario.rows):
        coeffs.append(tuple(sum(1 for p in row if p == a) for a in phases))
        rhs.append(embedding.embed(PhasePoint.classical(scenario.dim, report.points[s])))
    solved = solve_system(embedding.group, EqSystem(tuple(coeffs), tuple(rhs)), embedding.classical)
    if not solved.solvable:
        return None
    return {a: embedding.lift(x) for a, x in zip(phases, solved.solution)}


def build_trivial_lhv(
    scenario: MerminScenario, classical_solution: Mapping[PhasePoint, PhasePoint], *, bound: int | None = None
) -> LhvModel:
    """Local model from a classical substitution a -> b(a).

    Parties share a uniform lambda in Z_D^N with zero sum; party i answers
    lambda_i + g(b(a)) to setting a, where g(b) is the classical value of b.
    """
    limit = LHV_SEARCH_BOUND if bound is None else bound
    report = validate_scenario(scenario)
    values: dict[PhasePoint, int] = {}
    for a in scenario.distinct_phases():
        b = classical_solution.get(a)
        if b is None or b.classical_value is None:
            raise InvalidInputError(f"phase {a} has no classical replacement", phase=a.to_json())
        values[a] = b.classical_value
    for s, row in enumerate(scenario.rows):
        if sum(values[p] for p in row) % scenario.dim != report.points[s]:
            raise InvalidInputError(f"replacement changes the classical point of row {s}", row=s)
    variables = _variables(scenario)
    base = {(i, p): values[p] for i, p in variables}
    model = _shifted_mixture(scenario, variables, base, bound=limit)
    logger.info("built local model with %d assignments", len(model.assignments))
    return model

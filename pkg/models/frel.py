"""Finite sets and relations: the groupoid model of a strongly complementary pair.

The carrier is G x H. The Z structure is the disjoint union over h of copies of
G, (g1, h)(g2, h) -> (g1 + g2, h); the X structure is the union over g of copies
of H. Relations are dense boolean matrices (target x source); diagrams with
several wires are evaluated by pushing sets of wire tuples through each layer.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from utils.constants import ENUMERATION_BOUND, FREL_CARRIER_BOUND
from .abgroup import (
    ExtensionVerdict,
    FinAbGroup,
    GroupElement,
    Subgroup,
    direct_power,
    enumerate_elements,
    is_trivial_extension,
)
from .errors import ArityError, ResourceBoundError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Relation:
    """Relation from ``inputs`` wires to ``outputs`` wires over a carrier of ``size`` points."""

    size: int
    inputs: int
    outputs: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=bool)
        if m.shape != (self.size**self.outputs, self.size**self.inputs):
            raise ArityError(f"relation shape {m.shape} does not match {self.inputs} -> {self.outputs} wires")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, size: int, wires: int = 1) -> "Relation":
        return cls(size, wires, wires, np.eye(size**wires, dtype=bool))

    @classmethod
    def swap(cls, size: int) -> "Relation":
        m = np.zeros((size * size, size * size), dtype=bool)
        for a in range(size):
            for b in range(size):
                m[b * size + a, a * size + b] = True
        return cls(size, 2, 2, m)

    @classmethod
    def state(cls, size: int, points: Iterable[int]) -> "Relation":
        m = np.zeros((size, 1), dtype=bool)
        m[list(points), 0] = True
        return cls(size, 0, 1, m)

    def __matmul__(self, other: "Relation") -> "Relation":
        if other.outputs != self.inputs or other.size != self.size:
            raise ArityError(f"cannot compose {self.inputs}-input relation after {other.outputs}-output relation")
        product = self.matrix.astype(np.float32) @ other.matrix.astype(np.float32)
        return Relation(self.size, other.inputs, self.outputs, product > 0)

    def tensor(self, other: "Relation") -> "Relation":
        return Relation(self.size, self.inputs + other.inputs, self.outputs + other.outputs, np.kron(self.matrix, other.matrix))

    @property
    def dagger(self) -> "Relation":
        return Relation(self.size, self.outputs, self.inputs, self.matrix.T)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Relation)
            and (self.size, self.inputs, self.outputs) == (other.size, other.inputs, other.outputs)
            and bool(np.array_equal(self.matrix, other.matrix))
        )

    __hash__ = None  # type: ignore[assignment]

    def image(self, inputs: Sequence[int]) -> list[tuple[int, ...]]:
        """Output wire tuples related to one input wire tuple."""
        col = 0
        for x in inputs:
            col = col * self.size + x
        return [_unflatten(r, self.size, self.outputs) for r in np.flatnonzero(self.matrix[:, col])]

    def points(self) -> frozenset[int]:
        """Carrier points of a state."""
        return frozenset(int(r) for r in np.flatnonzero(self.matrix[:, 0]))

    def to_dict(self) -> dict:
        return {"size": self.size, "inputs": self.inputs, "outputs": self.outputs, "matrix": self.matrix.astype(int).tolist()}


def _unflatten(index: int, size: int, wires: int) -> tuple[int, ...]:
    out = []
    for _ in range(wires):
        index, r = divmod(int(index), size)
        out.append(r)
    return tuple(reversed(out))


Layer = Sequence[Relation]


def evaluate(layers: Sequence[Layer], inputs: tuple[int, ...]) -> frozenset[tuple[int, ...]]:
    """Push one input tuple through layers of relations placed side by side."""
    current = {inputs}
    for layer in layers:
        nxt = set()
        for wires in current:
            if len(wires) != sum(r.inputs for r in layer):
                raise ArityError(f"layer expects {sum(r.inputs for r in layer)} wires, got {len(wires)}")
            partial = [()]
            pos = 0
            for rel in layer:
                outs = rel.image(wires[pos:pos + rel.inputs])
                pos += rel.inputs
                partial = [p + o for p in partial for o in outs]
            nxt.update(partial)
        current = nxt
    return frozenset(current)


def same_diagram(left: Sequence[Layer], right: Sequence[Layer], size: int, arity: int) -> bool:
    return all(
        evaluate(left, inputs) == evaluate(right, inputs) for inputs in itertools.product(range(size), repeat=arity)
    )


# --- groupoid algebras -------------------------------------------------------


@dataclass(frozen=True)
class GroupoidAlgebra:
    name: str
    mult: Relation
    unit: Relation

    @property
    def comult(self) -> Relation:
        return self.mult.dagger

    @property
    def counit(self) -> Relation:
        return self.unit.dagger

    @property
    def size(self) -> int:
        return self.mult.size


@dataclass(frozen=True)
class ScPair:
    g: FinAbGroup
    h: FinAbGroup
    carrier: tuple[tuple[GroupElement, GroupElement], ...]
    z: GroupoidAlgebra
    x: GroupoidAlgebra

    @property
    def size(self) -> int:
        return len(self.carrier)

    def index(self, g: GroupElement, h: GroupElement) -> int:
        return self.carrier.index((g, h))


def build_sc_pair(g: FinAbGroup, h: FinAbGroup, *, bound: int | None = None) -> ScPair:
    """Z = union over h of G, X = union over g of H, on the carrier G x H."""
    limit = FREL_CARRIER_BOUND if bound is None else bound
    size = g.order * h.order
    if size > limit:
        raise ResourceBoundError(f"carrier {g} x {h} has {size} points", bound=limit, requested=size)
    gs = list(enumerate_elements(g))
    hs = list(enumerate_elements(h))
    carrier = tuple((a, b) for a in gs for b in hs)
    index = {pt: n for n, pt in enumerate(carrier)}

    z_mult = np.zeros((size, size * size), dtype=bool)
    x_mult = np.zeros((size, size * size), dtype=bool)
    for (g1, h1), (g2, h2) in itertools.product(carrier, repeat=2):
        col = index[(g1, h1)] * size + index[(g2, h2)]
        if h1 == h2:
            z_mult[index[(g1 + g2, h1)], col] = True
        if g1 == g2:
            x_mult[index[(g1, h1 + h2)], col] = True
    z_unit = Relation.state(size, [index[(g.zero, b)] for b in hs])
    x_unit = Relation.state(size, [index[(a, h.zero)] for a in gs])
    pair = ScPair(
        g,
        h,
        carrier,
        GroupoidAlgebra("Z", Relation(size, 2, 1, z_mult), z_unit),
        GroupoidAlgebra("X", Relation(size, 2, 1, x_mult), x_unit),
    )
    logger.debug("built groupoid pair on %s x %s", g, h)
    return pair


@dataclass(frozen=True)
class FrelLawReport:
    frobenius_ok: bool
    quasi_special_ok: bool
    bialgebra_ok: bool
    coherence_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.frobenius_ok and self.quasi_special_ok and self.bialgebra_ok and self.coherence_ok

    def to_dict(self) -> dict:
        return {
            "frobenius_ok": self.frobenius_ok,
            "quasi_special_ok": self.quasi_special_ok,
            "quasi_special_scalar": 1 if self.quasi_special_ok else None,
            "bialgebra_ok": self.bialgebra_ok,
            "coherence_ok": self.coherence_ok,
        }


def _frobenius(alg: GroupoidAlgebra) -> bool:
    ident = Relation.identity(alg.size)
    middle = [[alg.mult], [alg.comult]]
    left = [[alg.comult, ident], [ident, alg.mult]]
    right = [[ident, alg.comult], [alg.mult, ident]]
    return same_diagram(left, middle, alg.size, 2) and same_diagram(right, middle, alg.size, 2)


def _special(alg: GroupoidAlgebra) -> bool:
    return same_diagram([[alg.comult], [alg.mult]], [[Relation.identity(alg.size)]], alg.size, 1)


def _bialgebra(copy: GroupoidAlgebra, merge: GroupoidAlgebra) -> bool:
    ident = Relation.identity(copy.size)
    lhs = [[merge.mult], [copy.comult]]
    rhs = [[copy.comult, copy.comult], [ident, Relation.swap(copy.size), ident], [merge.mult, merge.mult]]
    return same_diagram(lhs, rhs, copy.size, 2)


def _coherence(a: GroupoidAlgebra, b: GroupoidAlgebra) -> bool:
    """epsilon_a mu_b == epsilon_a (x) epsilon_a, delta_a eta_b == eta_b (x) eta_b, epsilon_a eta_b == 1."""
    size = a.size
    counit_ok = same_diagram([[b.mult], [a.counit]], [[a.counit, a.counit]], size, 2)
    unit_ok = (a.comult @ b.unit) == b.unit.tensor(b.unit)
    scalar_ok = bool((a.counit @ b.unit).matrix[0, 0])
    return counit_ok and unit_ok and scalar_ok


def verify_frel_laws(pair: ScPair) -> FrelLawReport:
    """Frobenius, special (scalar 1), bialgebra and coherence laws as relational identities."""
    report = FrelLawReport(
        frobenius_ok=_frobenius(pair.z) and _frobenius(pair.x),
        quasi_special_ok=_special(pair.z) and _special(pair.x),
        bialgebra_ok=_bialgebra(pair.z, pair.x) and _bialgebra(pair.x, pair.z),
        coherence_ok=_coherence(pair.z, pair.x) and _coherence(pair.x, pair.z),
    )
    logger.info("relational laws on %s x %s: %s", pair.g, pair.h, report.to_dict())
    return report


# --- phases -----------------------------------------------------------------


@dataclass(frozen=True)
class RelPhaseGroup:
    """Z-phases of the pair as vectors in G^H; the classical ones are constant."""

    pair: ScPair
    phases: tuple[GroupElement, ...]
    classical: tuple[GroupElement, ...]
    group: FinAbGroup
    classical_subgroup: Subgroup

    def to_dict(self) -> dict:
        return {
            "G": self.pair.g.to_dict(),
            "H": self.pair.h.to_dict(),
            "phases": len(self.phases),
            "classical": len(self.classical),
            "phase_group": self.group.to_dict(),
        }


def _inverse_state(pair: ScPair, points: Iterable[int]) -> Relation:
    return Relation.state(pair.size, [pair.index(-pair.carrier[p][0], pair.carrier[p][1]) for p in points])


def is_rel_phase(pair: ScPair, state: Relation) -> bool:
    """mu_Z(psi (x) psi^-1) == eta_Z, with psi^-1 the pointwise groupoid inverse."""
    inverse = _inverse_state(pair, state.points())
    return (pair.z.mult @ state.tensor(inverse)) == pair.z.unit


def is_x_copyable(pair: ScPair, state: Relation) -> bool:
    return (pair.x.comult @ state) == state.tensor(state)


def rel_phases(pair: ScPair, *, bound: int | None = None) -> RelPhaseGroup:
    """Enumerate phase states among |H|-point subsets of the carrier.

    A phase state meets every component (its product with its inverse holds each
    unit (0, h)) and cannot hold two points of one component (their difference
    would be a non-zero element), so only |H|-point subsets are candidates.
    """
    limit = ENUMERATION_BOUND if bound is None else bound
    components = pair.h.order
    candidates = math.comb(pair.size, components)
    if candidates > limit:
        raise ResourceBoundError(f"{candidates} candidate phase states", bound=limit, requested=candidates)
    hs = list(enumerate_elements(pair.h))
    group = direct_power(pair.g, len(hs))
    phases: list[GroupElement] = []
    classical: list[GroupElement] = []
    for subset in itertools.combinations(range(pair.size), components):
        state = Relation.state(pair.size, subset)
        if not is_rel_phase(pair, state):
            continue
        by_h = {pair.carrier[p][1]: pair.carrier[p][0] for p in subset}
        vector = group.element([c for h in hs for c in by_h[h].coords])
        phases.append(vector)
        if is_x_copyable(pair, state):
            classical.append(vector)
    rank = pair.g.rank
    diagonal = Subgroup(
        group, tuple(group.element([1 if i % rank == r else 0 for i in range(rank * len(hs))]) for r in range(rank))
    )
    logger.debug("%d phases, %d classical on %s x %s", len(phases), len(classical), pair.g, pair.h)
    return RelPhaseGroup(pair, tuple(phases), tuple(classical), group, diagonal)


def phases_closed(phases: RelPhaseGroup) -> bool:
    """The phases are closed under mu_Z, i.e. pointwise G-addition."""
    members = set(phases.phases)
    return all((a + b) in members for a in phases.phases for b in phases.phases)


def frel_locality_check(g: FinAbGroup, h: FinAbGroup, *, bound: int | None = None) -> ExtensionVerdict:
    """Extension verdict for the constant vectors inside G^H."""
    pair = build_sc_pair(g, h, bound=bound)
    phases = rel_phases(pair)
    return is_trivial_extension(phases.group, phases.classical_subgroup, bound=bound)

"""Qudit Z-phases as exact rational turns.

A Z-phase on a D-level system is diag(1, e^{2 pi i t_1}, ..., e^{2 pi i t_{D-1}})
with each t_j a rational number of turns in [0, 1). Phases add componentwise
mod 1. The X-classical points are the phases t_j = g*j/D for g in Z_D.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from utils.helpers import format_turn, parse_turns
from .abgroup import FinAbGroup, GroupElement, Subgroup
from .errors import DomainError, InvalidInputError


@dataclass(frozen=True)
class PhasePoint:
    dim: int
    turns: tuple[Fraction, ...]

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError(f"qudit dimension must be at least 2, got {self.dim}")
        turns = tuple(Fraction(t) % 1 for t in self.turns)
        if len(turns) != self.dim - 1:
            raise InvalidInputError(
                f"a Z-phase for D={self.dim} has {self.dim - 1} angles, got {len(turns)}", turns=[str(t) for t in turns]
            )
        object.__setattr__(self, "turns", turns)

    @classmethod
    def zero(cls, dim: int) -> "PhasePoint":
        return cls(dim, (Fraction(0),) * (dim - 1))

    @classmethod
    def classical(cls, dim: int, g: int) -> "PhasePoint":
        """The Z-phase of the X-classical point g in Z_D."""
        return cls(dim, tuple(Fraction((g * j) % dim, dim) for j in range(1, dim)))

    @classmethod
    def parse(cls, dim: int, text: str) -> "PhasePoint":
        """Comma separated turns, e.g. "1/9,-1/9"; a bare "0" is the zero phase."""
        turns = parse_turns(text)
        if turns == [Fraction(0)] and dim > 2:
            return cls.zero(dim)
        return cls(dim, tuple(turns))

    def _check(self, other: "PhasePoint") -> None:
        if other.dim != self.dim:
            raise DomainError(f"cannot add phases of dimensions {self.dim} and {other.dim}")

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        self._check(other)
        return PhasePoint(self.dim, tuple(a + b for a, b in zip(self.turns, other.turns)))

    def __sub__(self, other: "PhasePoint") -> "PhasePoint":
        self._check(other)
        return PhasePoint(self.dim, tuple(a - b for a, b in zip(self.turns, other.turns)))

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(self.dim, tuple(-a for a in self.turns))

    def __rmul__(self, n: int) -> "PhasePoint":
        return PhasePoint(self.dim, tuple(int(n) * a for a in self.turns))

    __mul__ = __rmul__

    @property
    def is_zero(self) -> bool:
        return not any(self.turns)

    @property
    def classical_value(self) -> int | None:
        """g with self == classical(D, g), or None when not classical."""
        if not self.turns:
            return 0
        first = self.turns[0] * self.dim
        if first.denominator != 1:
            return None
        g = int(first) % self.dim
        return g if self == PhasePoint.classical(self.dim, g) else None

    @property
    def is_classical(self) -> bool:
        return self.classical_value is not None

    @property
    def denominator(self) -> int:
        return math.lcm(*(t.denominator for t in self.turns)) if self.turns else 1

    def diagonal(self) -> np.ndarray:
        """(1, e^{2 pi i t_1}, ..., e^{2 pi i t_{D-1}})."""
        angles = np.array([0.0] + [float(t) for t in self.turns])
        return np.exp(2j * np.pi * angles)

    def to_json(self) -> list[list[int]]:
        return [[t.numerator, t.denominator] for t in self.turns]

    @classmethod
    def from_json(cls, dim: int, data: Sequence[Sequence[int]]) -> "PhasePoint":
        return cls(dim, tuple(Fraction(int(n), int(d)) for n, d in data))

    def __str__(self) -> str:
        return ",".join(format_turn(t) for t in self.turns)


def phase_sum(points: Iterable[PhasePoint], dim: int) -> PhasePoint:
    total = PhasePoint.zero(dim)
    for p in points:
        total = total + p
    return total


@dataclass(frozen=True)
class PhaseGroupEmbedding:
    """Finite slice Z_L^{D-1} of the qudit phase torus containing a set of rational phases.

    Every phase whose denominators divide L embeds exactly; the X-classical points
    form the subgroup generated by (L/D * j mod L)_j.
    """

    dim: int
    modulus: int
    group: FinAbGroup
    classical: Subgroup

    def embed(self, point: PhasePoint) -> GroupElement:
        if point.dim != self.dim:
            raise DomainError(f"phase of dimension {point.dim} in a D={self.dim} phase group")
        coords = []
        for t in point.turns:
            scaled = t * self.modulus
            if scaled.denominator != 1:
                raise DomainError(f"phase {point} does not lie on the 1/{self.modulus} grid")
            coords.append(int(scaled))
        return self.group.element(coords)

    def lift(self, element: GroupElement) -> PhasePoint:
        return PhasePoint(self.dim, tuple(Fraction(c, self.modulus) for c in element.coords))


def phase_group(dim: int, points: Iterable[PhasePoint] = ()) -> PhaseGroupEmbedding:
    """Smallest Z_L^{D-1} (with D | L) holding ``points`` and the classical points."""
    modulus = math.lcm(dim, *(p.denominator for p in points))
    group = FinAbGroup((modulus,) * (dim - 1))
    step = modulus // dim
    classical = Subgroup(group, (group.element([step * j for j in range(1, dim)]),))
    return PhaseGroupEmbedding(dim, modulus, group, classical)

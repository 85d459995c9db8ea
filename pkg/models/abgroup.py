"""Finite abelian groups, integer-linear systems over them, and algebraic extensions.

Groups are kept as raw cyclic-factor lists Z_{d_1} x ... x Z_{d_k}. Systems of
equations sum_j n_j x_j = h are solved exactly through the Smith normal form of
the integer coefficient matrix; subgroup-restricted systems are lifted to
integer lattices first.

Triviality of an extension H <= G is decided with the divisor criterion

    G is a trivial extension of H  iff  H cap dG == dH  for every d | exp(G)

which turns the quantification over all finite systems into a finite check. The
criterion is a reduction of our own, validated against ``oracle_verdict`` (an
exhaustive search over small systems) on every group of order at most 16.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from utils.constants import ENUMERATION_BOUND, MEMBERSHIP_ENUMERATION_BELOW
from .errors import DomainError, InvalidRetractionError, MalformedSystemError, ResourceBoundError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FinAbGroup:
    """Z_{d_1} x ... x Z_{d_k}; the empty factor list is the trivial group."""

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(d) for d in self.factors)
        if any(d < 1 for d in factors):
            raise DomainError(f"cyclic factors must be positive, got {list(factors)}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def cyclic(cls, d: int) -> "FinAbGroup":
        return cls((d,))

    @classmethod
    def of(cls, *factors: int) -> "FinAbGroup":
        return cls(tuple(factors))

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.factors) if self.factors else 1

    @property
    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def element(self, coords: Sequence[int]) -> "GroupElement":
        return GroupElement(self, tuple(coords))

    def unit_vectors(self) -> list["GroupElement"]:
        return [self.element([1 if i == j else 0 for i in range(self.rank)]) for j in range(self.rank)]

    def elements(self, bound: int | None = None) -> Iterator["GroupElement"]:
        return enumerate_elements(self, bound=bound)

    def invariant_factors(self) -> "FinAbGroup":
        """Isomorphic group in invariant-factor form d_1 | d_2 | ... (trivial factors dropped)."""
        if not self.factors:
            return self
        diag, _, _ = smith_decomposition([[d if i == j else 0 for j in range(self.rank)] for i, d in enumerate(self.factors)])
        return FinAbGroup(tuple(sorted(abs(s) for s in diag if abs(s) > 1)))

    def to_dict(self) -> dict:
        return {"factors": list(self.factors)}

    @classmethod
    def from_dict(cls, data: dict) -> "FinAbGroup":
        return cls(tuple(data["factors"]))

    def __str__(self) -> str:
        return " x ".join(f"Z{d}" for d in self.factors) if self.factors else "Z1"


@dataclass(frozen=True)
class GroupElement:
    """A residue vector; coordinates are reduced on construction."""

    group: FinAbGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if len(coords) != self.group.rank:
            raise DomainError(
                f"element {list(coords)} has {len(coords)} coordinates, group {self.group} has {self.group.rank}"
            )
        object.__setattr__(self, "coords", tuple(c % d for c, d in zip(coords, self.group.factors)))

    def _check(self, other: "GroupElement") -> None:
        if other.group != self.group:
            raise DomainError(f"cannot combine elements of {self.group} and {other.group}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.group, tuple(-a for a in self.coords))

    def __rmul__(self, n: int) -> "GroupElement":
        return GroupElement(self.group, tuple(int(n) * a for a in self.coords))

    __mul__ = __rmul__

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_list(self) -> list[int]:
        return list(self.coords)

    def __str__(self) -> str:
        if self.group.rank == 1:
            return str(self.coords[0])
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def enumerate_elements(group: FinAbGroup, bound: int | None = None) -> Iterator[GroupElement]:
    """All elements in lexicographic coordinate order."""
    limit = ENUMERATION_BOUND if bound is None else bound
    if group.order > limit:
        raise ResourceBoundError(
            f"refusing to enumerate {group} of order {group.order}", bound=limit, requested=group.order
        )
    for coords in itertools.product(*(range(d) for d in group.factors)):
        yield GroupElement(group, coords)


def product_group(left: FinAbGroup, right: FinAbGroup) -> FinAbGroup:
    return FinAbGroup(left.factors + right.factors)


def direct_power(group: FinAbGroup, n: int) -> FinAbGroup:
    """group^n, with the copies laid out consecutively."""
    return FinAbGroup(group.factors * n)


def exponent(group: FinAbGroup) -> int:
    return group.exponent


def quotient_projection(group: FinAbGroup, keep: Sequence[int]) -> tuple[FinAbGroup, Callable[[GroupElement], GroupElement]]:
    """Projection onto the kept cyclic factors, i.e. the quotient by the dropped ones."""
    keep = list(keep)
    if any(i < 0 or i >= group.rank for i in keep):
        raise DomainError(f"factor indices {keep} out of range for {group}")
    target = FinAbGroup(tuple(group.factors[i] for i in keep))

    def project(g: GroupElement) -> GroupElement:
        if g.group != group:
            raise DomainError(f"{g} is not an element of {group}")
        return GroupElement(target, tuple(g.coords[i] for i in keep))

    return target, project


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _invariant_chains(n: int, base: int) -> Iterator[tuple[int, ...]]:
    if n == 1:
        yield ()
        return
    for d in divisors(n):
        if d > 1 and d % base == 0:
            for tail in _invariant_chains(n // d, d):
                yield (d,) + tail


def abelian_groups(max_order: int) -> Iterator[FinAbGroup]:
    """One group per isomorphism class of order at most ``max_order``, as d_1 | d_2 | ..."""
    for n in range(1, max_order + 1):
        for chain in _invariant_chains(n, 1):
            yield FinAbGroup(chain)


def cyclic_subgroups(group: FinAbGroup, *, bound: int | None = None) -> list["Subgroup"]:
    """Distinct subgroups generated by a single element."""
    seen: dict[tuple, Subgroup] = {}
    for g in enumerate_elements(group, bound=bound):
        sub = Subgroup(group, (g,))
        seen.setdefault(sub.membership_basis, sub)
    return list(seen.values())


# --- integer linear algebra -------------------------------------------------


def smith_decomposition(rows: Sequence[Sequence[int]]) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Return (diag, U, V) with U * A * V = diag(diag) for a non-empty integer matrix A.

    ``diag`` has min(m, n) entries; U (m x m) and V (n x n) are unimodular.
    """
    m, n = len(rows), len(rows[0])
    matrix = DomainMatrix([[ZZ(int(v)) for v in row] for row in rows], (m, n), ZZ)
    smf, s, t = smith_normal_decomp(matrix)
    smf_rows = smf.to_Matrix().tolist()
    diag = [int(smf_rows[k][k]) for k in range(min(m, n))]
    u = [[int(v) for v in row] for row in s.to_Matrix().tolist()]
    v = [[int(x) for x in row] for row in t.to_Matrix().tolist()]
    return diag, u, v


def _matvec(matrix: Sequence[Sequence[int]], vector: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, vector)) for row in matrix]


@dataclass(frozen=True)
class EmptinessCertificate:
    """Proof that a system has no solution.

    ``modulus > 0``: the combination sum_p multipliers[p] * (equation p), read in
    cyclic factor ``factor``, has every coefficient divisible by ``modulus`` but
    evaluates to ``value`` != 0 (mod modulus). ``modulus == 0``: the lifted integer
    system contains the row ``divisor * z = value`` with divisor not dividing value.
    """

    multipliers: tuple[int, ...]
    modulus: int
    value: int
    factor: int | None = None
    divisor: int | None = None

    def describe(self) -> str:
        combo = " + ".join(f"{y}*eq{p}" for p, y in enumerate(self.multipliers) if y) or "0"
        if self.modulus:
            where = "" if self.factor is None else f" in factor {self.factor}"
            return f"{combo}{where}: 0 ≡ {self.value} (mod {self.modulus})"
        return f"{combo}: {self.divisor}*z = {self.value} has no integer solution"

    def to_dict(self) -> dict:
        return {
            "multipliers": list(self.multipliers),
            "modulus": self.modulus,
            "value": self.value,
            "factor": self.factor,
            "divisor": self.divisor,
            "text": self.describe(),
        }


def solve_integer_system(
    rows: Sequence[Sequence[int]], rhs: Sequence[int]
) -> tuple[list[int] | None, EmptinessCertificate | None]:
    """Solve A z = b exactly over the integers."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    if m == 0:
        return [0] * n, None
    if n == 0:
        for p, b in enumerate(rhs):
            if b != 0:
                mult = tuple(1 if q == p else 0 for q in range(m))
                return None, EmptinessCertificate(mult, 0, int(b), divisor=0)
        return [], None
    diag, u, v = smith_decomposition(rows)
    r = _matvec(u, rhs)
    z = [0] * n
    for k in range(m):
        s = diag[k] if k < len(diag) else 0
        if s == 0:
            if r[k] != 0:
                return None, EmptinessCertificate(tuple(u[k]), 0, r[k], divisor=0)
            continue
        if r[k] % s:
            return None, EmptinessCertificate(tuple(u[k]), 0, r[k], divisor=s)
        z[k] = r[k] // s
    return _matvec(v, z), None


# --- subgroups --------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    """The subgroup of ``ambient`` generated by ``generators``."""

    ambient: FinAbGroup
    generators: tuple[GroupElement, ...]

    def __post_init__(self):
        gens = tuple(
            g if isinstance(g, GroupElement) else GroupElement(self.ambient, tuple(g)) for g in self.generators
        )
        for g in gens:
            if g.group != self.ambient:
                raise DomainError(f"generator {g} is not an element of {self.ambient}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def whole(cls, group: FinAbGroup) -> "Subgroup":
        return cls(group, tuple(group.unit_vectors()))

    @classmethod
    def trivial(cls, group: FinAbGroup) -> "Subgroup":
        return cls(group, ())

    @classmethod
    def generated(cls, group: FinAbGroup, coords: Sequence[Sequence[int]]) -> "Subgroup":
        return cls(group, tuple(group.element(c) for c in coords))

    def _lattice_columns(self) -> list[list[int]]:
        cols = [list(g.coords) for g in self.generators]
        cols += [[d if i == j else 0 for i in range(self.ambient.rank)] for j, d in enumerate(self.ambient.factors)]
        return cols

    @cached_property
    def membership_basis(self) -> tuple[tuple[int, ...], ...]:
        """Hermite normal form of the lattice spanned by the generators and d_i e_i.

        The lattice is the preimage of the subgroup in Z^k, so two subgroups of the
        same ambient group are equal iff their bases agree.
        """
        if self.ambient.rank == 0:
            return ()
        cols = self._lattice_columns()
        matrix = Matrix([[c[i] for c in cols] for i in range(self.ambient.rank)])
        return tuple(tuple(int(x) for x in row) for row in hermite_normal_form(matrix).tolist())

    @cached_property
    def order(self) -> int:
        if self.ambient.order < MEMBERSHIP_ENUMERATION_BELOW:
            return len(self.elements())
        index = math.prod(abs(self.membership_basis[i][i]) for i in range(self.ambient.rank))
        return self.ambient.order // index

    def elements(self, bound: int | None = None) -> frozenset[GroupElement]:
        limit = ENUMERATION_BOUND if bound is None else bound
        cached = self.__dict__.get("_elements")
        if cached is not None:
            return cached
        seen = {self.ambient.zero}
        frontier = [self.ambient.zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = x + g
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > limit:
                            raise ResourceBoundError(
                                f"subgroup of {self.ambient} exceeds the enumeration bound", bound=limit
                            )
            frontier = nxt
        result = frozenset(seen)
        self.__dict__["_elements"] = result
        return result

    def contains(self, x: GroupElement) -> bool:
        if x.group != self.ambient:
            return False
        if self.ambient.order < MEMBERSHIP_ENUMERATION_BELOW:
            return x in self.elements()
        cols = self._lattice_columns()
        rows = [[c[i] for c in cols] for i in range(self.ambient.rank)]
        solution, _ = solve_integer_system(rows, list(x.coords))
        return solution is not None

    __contains__ = contains

    def scaled(self, d: int) -> "Subgroup":
        """dH, generated by d times the generators."""
        return Subgroup(self.ambient, tuple(d * g for g in self.generators))

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return other.ambient == self.ambient and all(g in other for g in self.generators)

    def same_as(self, other: "Subgroup") -> bool:
        return self.ambient == other.ambient and self.membership_basis == other.membership_basis

    def to_dict(self) -> dict:
        return {"generators": [g.to_list() for g in self.generators]}

    @classmethod
    def from_dict(cls, group: FinAbGroup, data: dict) -> "Subgroup":
        return cls.generated(group, data.get("generators", []))


# --- systems ----------------------------------------------------------------


@dataclass(frozen=True)
class EqSystem:
    """Equations sum_j coeffs[p][j] * x_j = rhs[p]."""

    coeffs: tuple[tuple[int, ...], ...]
    rhs: tuple[GroupElement, ...]

    def __post_init__(self):
        coeffs = tuple(tuple(int(n) for n in row) for row in self.coeffs)
        rhs = tuple(self.rhs)
        if len(coeffs) != len(rhs):
            raise MalformedSystemError(
                f"{len(coeffs)} coefficient rows but {len(rhs)} right-hand sides", rows=len(coeffs), rhs=len(rhs)
            )
        widths = {len(row) for row in coeffs}
        if len(widths) > 1:
            raise MalformedSystemError(f"ragged coefficient matrix with row widths {sorted(widths)}")
        groups = {h.group for h in rhs}
        if len(groups) > 1:
            raise MalformedSystemError("right-hand sides live in different groups")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "rhs", rhs)

    @property
    def num_equations(self) -> int:
        return len(self.coeffs)

    @property
    def num_unknowns(self) -> int:
        return len(self.coeffs[0]) if self.coeffs else 0

    @property
    def group(self) -> FinAbGroup | None:
        return self.rhs[0].group if self.rhs else None

    def evaluate(self, solution: Sequence[GroupElement]) -> list[GroupElement]:
        if len(solution) != self.num_unknowns:
            raise MalformedSystemError(f"expected {self.num_unknowns} values, got {len(solution)}")
        out = []
        for row, h in zip(self.coeffs, self.rhs):
            acc = h.group.zero
            for n, x in zip(row, solution):
                acc = acc + n * x
            out.append(acc)
        return out

    def is_solution(self, solution: Sequence[GroupElement]) -> bool:
        return self.evaluate(solution) == list(self.rhs)

    def format(self) -> str:
        lines = []
        single = self.num_unknowns == 1
        for row, h in zip(self.coeffs, self.rhs):
            terms = []
            for j, n in enumerate(row):
                if n == 0:
                    continue
                var = "x" if single else f"x{j + 1}"
                terms.append(var if n == 1 else f"{n}{var}")
            lines.append(f"{' + '.join(terms) or '0'}={h}")
        return "; ".join(lines)

    def to_dict(self) -> dict:
        return {"coeffs": [list(r) for r in self.coeffs], "rhs": [h.to_list() for h in self.rhs]}

    @classmethod
    def from_dict(cls, group: FinAbGroup, data: dict) -> "EqSystem":
        return cls(tuple(tuple(r) for r in data["coeffs"]), tuple(group.element(h) for h in data["rhs"]))


@dataclass(frozen=True)
class SolutionSet:
    """Outcome of ``solve_system``: a witness assignment or a certificate of emptiness.

    ``kernel_order`` is the number of solutions of the homogeneous system in the
    domain (hence the number of solutions when solvable); None when it was not
    computed within the enumeration bound.
    """

    solution: tuple[GroupElement, ...] | None
    certificate: EmptinessCertificate | None
    kernel_order: int | None

    @property
    def solvable(self) -> bool:
        return self.solution is not None

    def to_dict(self) -> dict:
        return {
            "solvable": self.solvable,
            "solution": None if self.solution is None else [x.to_list() for x in self.solution],
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "kernel_order": self.kernel_order,
        }


def solve_system(
    group: FinAbGroup,
    system: EqSystem,
    domain: Subgroup | None = None,
    *,
    bound: int | None = None,
) -> SolutionSet:
    """Find x_j (in ``domain``, default the whole group) solving every equation."""
    if system.group is not None and system.group != group:
        raise MalformedSystemError(f"system right-hand sides live in {system.group}, not {group}")
    if domain is not None and domain.ambient != group:
        raise DomainError(f"domain is a subgroup of {domain.ambient}, not {group}")
    if domain is None:
        result = _solve_in_whole_group(group, system)
    else:
        result = _solve_in_subgroup(group, system, domain, bound=bound)
    if result.solution is not None and not system.is_solution(result.solution):
        raise MalformedSystemError("internal solver produced an assignment that fails substitution")
    return result


def _solve_in_whole_group(group: FinAbGroup, system: EqSystem) -> SolutionSet:
    p_count, l_count = system.num_equations, system.num_unknowns
    if p_count == 0:
        return SolutionSet(tuple(group.zero for _ in range(l_count)), None, group.order**l_count)
    if l_count == 0:
        for i, d in enumerate(group.factors):
            for p, h in enumerate(system.rhs):
                if h.coords[i] % d:
                    mult = tuple(1 if q == p else 0 for q in range(p_count))
                    return SolutionSet(None, EmptinessCertificate(mult, d, h.coords[i], factor=i), 1)
        return SolutionSet((), None, 1)

    diag, u, v = smith_decomposition(system.coeffs)
    values = [[0] * group.rank for _ in range(l_count)]
    kernel = 1
    for i, d in enumerate(group.factors):
        r = _matvec(u, [h.coords[i] for h in system.rhs])
        for k in range(l_count):
            s = diag[k] if k < len(diag) else 0
            kernel *= math.gcd(s, d)
        z = [0] * l_count
        for k in range(p_count):
            s = diag[k] if k < len(diag) else 0
            g = math.gcd(s, d)
            if r[k] % g:
                scale = d // g
                mult = tuple((scale * x) % d for x in u[k])
                cert = EmptinessCertificate(mult, d, (scale * r[k]) % d, factor=i)
                return SolutionSet(None, cert, None)
            if k < len(diag) and s != 0:
                reduced = d // g
                z[k] = (r[k] // g) * pow((s // g) % reduced, -1, reduced) % reduced if reduced > 1 else 0
        y = _matvec(v, z)
        for j in range(l_count):
            values[j][i] = y[j]
    solution = tuple(group.element(vals) for vals in values)
    return SolutionSet(solution, None, kernel)


def _solve_in_subgroup(group: FinAbGroup, system: EqSystem, domain: Subgroup, *, bound: int | None) -> SolutionSet:
    p_count, l_count, k = system.num_equations, system.num_unknowns, group.rank
    gens = domain.generators
    m = len(gens)
    rows: list[list[int]] = []
    rhs: list[int] = []
    for p in range(p_count):
        for i in range(k):
            row = [0] * (l_count * m + p_count * k)
            for j in range(l_count):
                for g_idx, g in enumerate(gens):
                    row[j * m + g_idx] = system.coeffs[p][j] * g.coords[i]
            row[l_count * m + p * k + i] = group.factors[i]
            rows.append(row)
            rhs.append(system.rhs[p].coords[i])
    lifted, cert = solve_integer_system(rows, rhs)
    kernel = _subgroup_kernel_order(system, domain, bound=bound)
    if lifted is None:
        return SolutionSet(None, cert, kernel)
    solution = []
    for j in range(l_count):
        x = group.zero
        for g_idx, g in enumerate(gens):
            x = x + lifted[j * m + g_idx] * g
        solution.append(x)
    return SolutionSet(tuple(solution), None, kernel)


def _subgroup_kernel_order(system: EqSystem, domain: Subgroup, *, bound: int | None) -> int | None:
    limit = ENUMERATION_BOUND if bound is None else bound
    l_count = system.num_unknowns
    if domain.ambient.order >= MEMBERSHIP_ENUMERATION_BELOW:
        return None
    elements = sorted(domain.elements(), key=lambda e: e.coords)
    if len(elements) ** l_count > limit:
        return None
    zero = domain.ambient.zero
    count = 0
    for xs in itertools.product(elements, repeat=l_count):
        acc_ok = True
        for row in system.coeffs:
            acc = zero
            for n, x in zip(row, xs):
                acc = acc + n * x
            if not acc.is_zero:
                acc_ok = False
                break
        count += acc_ok
    return count


# --- extensions -------------------------------------------------------------


@dataclass(frozen=True)
class ExtensionWitness:
    system: EqSystem
    solution: tuple[GroupElement, ...]

    def to_dict(self) -> dict:
        return {**self.system.to_dict(), "solution": [x.to_list() for x in self.solution]}


@dataclass(frozen=True)
class ExtensionVerdict:
    group: FinAbGroup
    subgroup: Subgroup
    trivial: bool
    witness: ExtensionWitness | None
    checked_divisors: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "group": self.group.to_dict(),
            "subgroup": self.subgroup.to_dict(),
            "trivial": self.trivial,
            "witness": None if self.witness is None else self.witness.system.format(),
            "witness_system": None if self.witness is None else self.witness.to_dict(),
            "checked_divisors": list(self.checked_divisors),
        }


def is_trivial_extension(group: FinAbGroup, subgroup: Subgroup, *, bound: int | None = None) -> ExtensionVerdict:
    """Decide whether every system with right-hand sides in H solvable in G is solvable in H."""
    if subgroup.ambient != group:
        raise DomainError(f"subgroup lives in {subgroup.ambient}, not in {group}")
    checked: list[int] = []
    h_elements = sorted(subgroup.elements(bound), key=lambda e: e.coords)
    for d in divisors(group.exponent):
        if d == 1:
            continue
        checked.append(d)
        d_h = subgroup.scaled(d)
        steps = [math.gcd(d, di) for di in group.factors]
        for h in h_elements:
            in_dg = all(c % s == 0 for c, s in zip(h.coords, steps))
            if in_dg and h not in d_h:
                system = EqSystem(((d,),), (h,))
                solved = solve_system(group, system)
                logger.info("non-trivial extension of %s in %s: %s", subgroup.to_dict(), group, system.format())
                return ExtensionVerdict(group, subgroup, False, ExtensionWitness(system, solved.solution), tuple(checked))
    logger.info("trivial extension of %s in %s (divisors %s)", subgroup.to_dict(), group, checked)
    return ExtensionVerdict(group, subgroup, True, None, tuple(checked))


def retraction_implies_trivial(
    group: FinAbGroup,
    subgroup: Subgroup,
    phi: Callable[[GroupElement], GroupElement],
    *,
    bound: int | None = None,
) -> bool:
    """True iff phi: G -> H is a homomorphism fixing H pointwise.

    Such a retraction carries every G-solution of a system with right-hand
    sides in H to an H-solution, so the extension is trivial.
    """
    images = {}
    for g in enumerate_elements(group, bound=bound):
        img = phi(g)
        if not isinstance(img, GroupElement) or img.group != group or img not in subgroup:
            raise InvalidRetractionError(f"phi({g}) = {img} is not in the subgroup", element=g.to_list())
        images[g] = img
    units = group.unit_vectors()
    for e, d in zip(units, group.factors):
        if not (d * images[e]).is_zero:
            return False
    for g, img in images.items():
        expected = group.zero
        for c, e in zip(g.coords, units):
            expected = expected + c * images[e]
        if expected != img:
            return False
    return all(images[h] == h for h in subgroup.generators)


# --- brute-force oracle -----------------------------------------------------


def _image_set(columns_images: Sequence[frozenset], moduli: tuple[int, ...]) -> frozenset:
    acc = frozenset({(0,) * len(moduli)})
    for img in columns_images:
        acc = _sum_sets(acc, img, moduli)
    return acc


def _sum_sets(left: frozenset, right: frozenset, moduli: tuple[int, ...]) -> frozenset:
    return frozenset(tuple((a + b) % m for a, b, m in zip(x, y, moduli)) for x in left for y in right)


def oracle_verdict(
    group: FinAbGroup,
    subgroup: Subgroup,
    *,
    max_equations: int = 2,
    max_unknowns: int = 3,
    bound: int | None = None,
) -> ExtensionVerdict:
    """Exhaustive search for a system solvable in G but not in H.

    Covers every system with at most ``max_equations`` equations, ``max_unknowns``
    unknowns and coefficients in [-exp(G), exp(G)] (coefficients only act through
    their residue mod exp(G)). Systems are compared through the pair of images
    (solvable right-hand sides over G, over H), which are sums of per-column
    images, so equal pairs are explored once.
    """
    if subgroup.ambient != group:
        raise DomainError(f"subgroup lives in {subgroup.ambient}, not in {group}")
    g_elements = list(enumerate_elements(group, bound=bound))
    h_elements = sorted(subgroup.elements(bound), key=lambda e: e.coords)
    h_set = set(subgroup.elements(bound))
    e = group.exponent
    k = group.rank

    for p in range(1, max_equations + 1):
        moduli = group.factors * p
        columns: dict[tuple[frozenset, frozenset], tuple[int, ...]] = {}
        for col in itertools.product(range(e), repeat=p):
            img_g = frozenset(sum(((n * x).coords for n in col), ()) for x in g_elements)
            img_h = frozenset(sum(((n * x).coords for n in col), ()) for x in h_elements)
            columns.setdefault((img_g, img_h), col)
        level: dict[tuple[frozenset, frozenset], tuple[tuple[int, ...], ...]] = {
            key: (col,) for key, col in columns.items()
        }
        for unknowns in range(1, max_unknowns + 1):
            for (img_g, img_h), cols in level.items():
                for target in sorted(img_g):
                    if target in img_h:
                        continue
                    parts = [group.element(target[q * k:(q + 1) * k]) for q in range(p)]
                    if all(x in h_set for x in parts):
                        coeffs = tuple(tuple(col[q] for col in cols) for q in range(p))
                        system = EqSystem(coeffs, tuple(parts))
                        solved = solve_system(group, system)
                        return ExtensionVerdict(group, subgroup, False, ExtensionWitness(system, solved.solution), ())
            if unknowns == max_unknowns:
                break
            nxt: dict[tuple[frozenset, frozenset], tuple[tuple[int, ...], ...]] = {}
            for (img_g, img_h), cols in level.items():
                for (col_g, col_h), col in columns.items():
                    key = (_sum_sets(img_g, col_g, moduli), _sum_sets(img_h, col_h, moduli))
                    nxt.setdefault(key, cols + (col,))
            level = nxt
    return ExtensionVerdict(group, subgroup, True, None, ())

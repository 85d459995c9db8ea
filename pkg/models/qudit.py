"""Dense state-vector engine for D-level systems and the Z/X observable pair.

Conventions:
- the Z structure copies the computational basis, delta_Z|j> = |jj>;
- the X structure is the group algebra of Z_D, mu_X|a>|b> = |a+b>, with the
  Fourier vectors f_k = D^{-1/2} sum_j w^{jk}|j> as its classical points;
- measuring "with Z-phase alpha" applies diag(alpha) and then reads the
  system in the X basis, i.e. applies F^dagger and takes |amplitude|^2.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from utils.constants import DEFAULT_TOLERANCE, MAX_AMPLITUDES
from utils.helpers import format_tuple
from .errors import ArityError, BasisError, DomainError, ResourceBoundError
from .phases import PhasePoint, phase_sum

logger = logging.getLogger(__name__)


def check_amplitudes(dim: int, num_systems: int, bound: int | None = None) -> int:
    limit = MAX_AMPLITUDES if bound is None else bound
    size = dim**num_systems
    if size > limit:
        raise ResourceBoundError(
            f"{num_systems} systems of dimension {dim} need {size} amplitudes", bound=limit, requested=size
        )
    return size


@dataclass(frozen=True)
class StateVector:
    dim: int
    num_systems: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.dim**self.num_systems:
            raise DomainError(f"expected {self.dim ** self.num_systems} amplitudes, got {amps.size}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        return abs(self.norm - 1.0) <= tol

    def tensor(self, other: "StateVector") -> "StateVector":
        if other.dim != self.dim:
            raise DomainError("tensor product of systems with different dimensions")
        return StateVector(self.dim, self.num_systems + other.num_systems, np.kron(self.amplitudes, other.amplitudes))

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.dim,) * self.num_systems)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.as_tensor()) ** 2

    def to_dict(self) -> dict:
        return {
            "D": self.dim,
            "systems": self.num_systems,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }


@dataclass(frozen=True)
class LinOperator:
    """Matrix from `inputs` systems to `outputs` systems of dimension `dim`."""

    dim: int
    inputs: int
    outputs: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim**self.outputs, self.dim**self.inputs):
            raise DomainError(f"operator shape {m.shape} does not match {self.inputs} -> {self.outputs} systems")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, dim: int, systems: int = 1) -> "LinOperator":
        return cls(dim, systems, systems, np.eye(dim**systems))

    def __matmul__(self, other: "LinOperator") -> "LinOperator":
        if other.outputs != self.inputs or other.dim != self.dim:
            raise ArityError(f"cannot compose {self.inputs}-input operator after {other.outputs}-output operator")
        return LinOperator(self.dim, other.inputs, self.outputs, self.matrix @ other.matrix)

    def tensor(self, other: "LinOperator") -> "LinOperator":
        return LinOperator(
            self.dim, self.inputs + other.inputs, self.outputs + other.outputs, np.kron(self.matrix, other.matrix)
        )

    @property
    def dagger(self) -> "LinOperator":
        return LinOperator(self.dim, self.outputs, self.inputs, self.matrix.conj().T)

    def apply(self, state: StateVector) -> StateVector:
        if state.num_systems != self.inputs:
            raise ArityError(f"operator takes {self.inputs} systems, state has {state.num_systems}")
        return StateVector(self.dim, self.outputs, self.matrix @ state.amplitudes)

    def is_unitary(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        if self.inputs != self.outputs:
            return False
        return np.allclose(self.matrix.conj().T @ self.matrix, np.eye(self.matrix.shape[1]), atol=tol, rtol=0)

    def close_to(self, other: "LinOperator", tol: float = DEFAULT_TOLERANCE) -> bool:
        return self.matrix.shape == other.matrix.shape and np.allclose(self.matrix, other.matrix, atol=tol, rtol=0)

    def to_dict(self) -> dict:
        return {
            "D": self.dim,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "matrix": [[[float(a.real), float(a.imag)] for a in row] for row in self.matrix],
        }


def omega(dim: int) -> complex:
    return complex(np.exp(2j * np.pi / dim))


def ghz_state(dim: int, num_systems: int, *, bound: int | None = None) -> StateVector:
    """(1/sqrt D) sum_j |j...j>."""
    if dim < 2 or num_systems < 1:
        raise DomainError(f"GHZ state needs D >= 2 and N >= 1, got D={dim}, N={num_systems}")
    size = check_amplitudes(dim, num_systems, bound)
    amps = np.zeros(size, dtype=complex)
    stride = sum(dim**k for k in range(num_systems))
    amps[np.arange(dim) * stride] = 1 / np.sqrt(dim)
    return StateVector(dim, num_systems, amps)


def _as_phase(phase: PhasePoint | Sequence[Fraction | float], dim: int | None = None) -> np.ndarray:
    if isinstance(phase, PhasePoint):
        return phase.diagonal()
    turns = [float(t) for t in phase]
    if dim is not None and len(turns) != dim - 1:
        raise ArityError(f"a Z-phase for D={dim} has {dim - 1} angles, got {len(turns)}")
    return np.exp(2j * np.pi * np.array([0.0] + turns))


def z_phase_gate(phase: PhasePoint | Sequence[Fraction | float], dim: int | None = None) -> LinOperator:
    """diag(1, e^{2 pi i t_1}, ..., e^{2 pi i t_{D-1}}) from turns t_j."""
    diag = _as_phase(phase, dim)
    return LinOperator(len(diag), 1, 1, np.diag(diag))


def fourier_basis(dim: int) -> np.ndarray:
    """Columns are the X-classical points f_k."""
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return np.exp(2j * np.pi * j * k / dim) / np.sqrt(dim)


def phased_basis(phase: PhasePoint | Sequence[Fraction | float], dim: int | None = None) -> np.ndarray:
    """Eigenbasis of the observable 'X with Z-phase b', as the columns of U(b) F."""
    diag = _as_phase(phase, dim)
    return np.diag(diag) @ fourier_basis(len(diag))


def antipode(dim: int) -> LinOperator:
    """|j> -> |-j mod D>."""
    if dim < 2:
        raise DomainError(f"dimension must be at least 2, got {dim}")
    m = np.zeros((dim, dim))
    for j in range(dim):
        m[(-j) % dim, j] = 1
    return LinOperator(dim, 1, 1, m)


def _apply_on_axis(tensor: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    moved = np.tensordot(matrix, tensor, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


def mermin_outcome_distribution(
    dim: int,
    num_systems: int,
    phases: Sequence[PhasePoint | Sequence[Fraction | float]],
    *,
    bound: int | None = None,
) -> np.ndarray:
    """Born probabilities of X-measuring the phased GHZ state; shape (D,)*N.

    Full pipeline: prepare the GHZ state, apply each party's phase gate, then
    F^dagger on every system.
    """
    if len(phases) != num_systems:
        raise ArityError(f"{num_systems} parties but {len(phases)} phases", parties=num_systems, phases=len(phases))
    state = ghz_state(dim, num_systems, bound=bound).as_tensor()
    f_dag = fourier_basis(dim).conj().T
    for axis, phase in enumerate(phases):
        diag = _as_phase(phase, dim)
        shape = [1] * num_systems
        shape[axis] = dim
        state = state * diag.reshape(shape)
    for axis in range(num_systems):
        state = _apply_on_axis(state, f_dag, axis)
    return np.abs(state) ** 2


def simplified_outcome_distribution(
    dim: int,
    num_systems: int,
    phases: Sequence[PhasePoint],
    *,
    bound: int | None = None,
) -> np.ndarray:
    """Same distribution via the summed phase acting on one system.

    p(k) = D^{-(N+1)} |sum_j e^{i theta_j} w^{-j s}|^2 with s = sum(k) mod D and
    theta the group sum of all phases.
    """
    if len(phases) != num_systems:
        raise ArityError(f"{num_systems} parties but {len(phases)} phases", parties=num_systems, phases=len(phases))
    check_amplitudes(dim, num_systems, bound)
    total = phase_sum(phases, dim).diagonal()
    j = np.arange(dim)
    per_sum = np.array([abs(np.sum(total * np.exp(-2j * np.pi * j * s / dim))) ** 2 for s in range(dim)])
    per_sum /= dim ** (num_systems + 1)
    grids = np.indices((dim,) * num_systems).sum(axis=0) % dim
    return per_sum[grids]


def outcome_support(distribution: np.ndarray, threshold: float) -> frozenset[tuple[int, ...]]:
    return frozenset(tuple(int(v) for v in idx) for idx in zip(*np.nonzero(distribution > threshold)))


def sample_outcomes(distribution: np.ndarray, rounds: int, rng: np.random.Generator) -> np.ndarray:
    """Draw outcome tuples; returns an int array of shape (rounds, N)."""
    flat = distribution.reshape(-1)
    flat = flat / flat.sum()
    idx = rng.choice(flat.size, size=rounds, p=flat)
    return np.stack(np.unravel_index(idx, distribution.shape), axis=1)


def distribution_csv_rows(distribution: np.ndarray, threshold: float = 0.0) -> list[tuple[str, float]]:
    rows = []
    for idx in np.ndindex(distribution.shape):
        p = float(distribution[idx])
        if p > threshold:
            rows.append((format_tuple(idx), p))
    return rows


# --- structures and their laws ---------------------------------------------


@dataclass(frozen=True)
class ObservablePair:
    """Copy/merge maps of the Z and X structures on one D-level system."""

    dim: int
    z_copy: LinOperator
    z_merge: LinOperator
    z_unit: LinOperator
    x_merge: LinOperator
    x_unit: LinOperator

    @property
    def omega(self) -> complex:
        return omega(self.dim)

    @property
    def z_counit(self) -> LinOperator:
        return self.z_unit.dagger

    @property
    def x_copy(self) -> LinOperator:
        return self.x_merge.dagger

    @property
    def x_counit(self) -> LinOperator:
        return self.x_unit.dagger


def canonical_pair(dim: int, *, corrupt: bool = False) -> ObservablePair:
    """Computational and Fourier structures; ``corrupt`` doubles delta_Z|0> only."""
    copy = np.zeros((dim * dim, dim))
    for j in range(dim):
        copy[j * dim + j, j] = 1
    z_merge = LinOperator(dim, 2, 1, copy.T.copy())
    if corrupt:
        copy[0, 0] = 2
    merge = np.zeros((dim, dim * dim))
    for a in range(dim):
        for b in range(dim):
            merge[(a + b) % dim, a * dim + b] = 1
    x_unit = np.zeros((dim, 1))
    x_unit[0, 0] = 1
    return ObservablePair(
        dim,
        z_copy=LinOperator(dim, 1, 2, copy),
        z_merge=z_merge,
        z_unit=LinOperator(dim, 0, 1, np.ones((dim, 1))),
        x_merge=LinOperator(dim, 2, 1, merge),
        x_unit=LinOperator(dim, 0, 1, x_unit),
    )


def swap(dim: int) -> LinOperator:
    m = np.zeros((dim * dim, dim * dim))
    for a in range(dim):
        for b in range(dim):
            m[b * dim + a, a * dim + b] = 1
    return LinOperator(dim, 2, 2, m)


@dataclass(frozen=True)
class LawReport:
    dim: int
    frobenius_ok: bool
    quasi_special_ok: bool
    quasi_special_scalar: complex | None
    bialgebra_ok: bool
    coherence_ok: bool
    hopf_ok: bool
    copyables: tuple[np.ndarray, ...] = field(repr=False)
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def all_ok(self) -> bool:
        return self.frobenius_ok and self.quasi_special_ok and self.bialgebra_ok and self.coherence_ok

    def to_dict(self) -> dict:
        scalar = self.quasi_special_scalar
        return {
            "D": self.dim,
            "frobenius_ok": self.frobenius_ok,
            "quasi_special_ok": self.quasi_special_ok,
            "quasi_special_scalar": None if scalar is None else [float(scalar.real), float(scalar.imag)],
            "bialgebra_ok": self.bialgebra_ok,
            "coherence_ok": self.coherence_ok,
            "hopf_ok": self.hopf_ok,
            "copyables": len(self.copyables),
            "tolerance": self.tolerance,
        }


def _frobenius(mult: LinOperator, comult: LinOperator, tol: float) -> bool:
    ident = LinOperator.identity(mult.dim)
    middle = comult @ mult
    left = ident.tensor(mult) @ comult.tensor(ident)
    right = mult.tensor(ident) @ ident.tensor(comult)
    dagger_ok = comult.close_to(mult.dagger, tol)
    return dagger_ok and left.close_to(middle, tol) and right.close_to(middle, tol)


def _special_scalar(mult: LinOperator, comult: LinOperator, tol: float) -> complex | None:
    loop = (mult @ comult).matrix
    scalar = complex(np.trace(loop) / loop.shape[0])
    if abs(scalar) <= tol or not np.allclose(loop, scalar * np.eye(loop.shape[0]), atol=tol, rtol=0):
        return None
    return scalar


def x_copyables(pair: ObservablePair, tol: float = DEFAULT_TOLERANCE) -> list[np.ndarray]:
    """States u with delta_X u = u (x) u among the unnormalized characters sum_j w^{jk}|j>."""
    found = []
    basis = fourier_basis(pair.dim) * np.sqrt(pair.dim)
    for k in range(pair.dim):
        u = basis[:, k]
        if np.allclose(pair.x_copy.matrix @ u, np.kron(u, u), atol=tol, rtol=0):
            found.append(u)
    return found


def verify_laws(dim: int, *, tol: float = DEFAULT_TOLERANCE, corrupt: bool = False) -> LawReport:
    """Check the Frobenius, quasi-special, bialgebra, coherence and Hopf laws numerically."""
    pair = canonical_pair(dim, corrupt=corrupt)
    ident = LinOperator.identity(dim)

    frobenius_ok = _frobenius(pair.z_merge, pair.z_copy, tol) and _frobenius(pair.x_merge, pair.x_copy, tol)
    z_scalar = _special_scalar(pair.z_merge, pair.z_copy, tol)
    x_scalar = _special_scalar(pair.x_merge, pair.x_copy, tol)
    quasi_special_ok = z_scalar is not None and x_scalar is not None

    middle = ident.tensor(swap(dim)).tensor(ident)
    bialgebra_ok = (pair.z_copy @ pair.x_merge).close_to(
        pair.x_merge.tensor(pair.x_merge) @ middle @ pair.z_copy.tensor(pair.z_copy), tol
    ) and (pair.x_copy @ pair.z_merge).close_to(
        pair.z_merge.tensor(pair.z_merge) @ middle @ pair.x_copy.tensor(pair.x_copy), tol
    )

    coherence_ok = all(
        (
            (pair.z_counit @ pair.x_merge).close_to(pair.z_counit.tensor(pair.z_counit), tol),
            (pair.z_copy @ pair.x_unit).close_to(pair.x_unit.tensor(pair.x_unit), tol),
            (pair.x_counit @ pair.z_merge).close_to(pair.x_counit.tensor(pair.x_counit), tol),
            (pair.x_copy @ pair.z_unit).close_to(pair.z_unit.tensor(pair.z_unit), tol),
            abs(complex((pair.z_counit @ pair.x_unit).matrix[0, 0]) - 1) <= tol,
        )
    )

    hopf_ok = hopf_law_holds(pair, tol=tol)
    copyables = tuple(x_copyables(pair, tol))
    report = LawReport(dim, frobenius_ok, quasi_special_ok, x_scalar, bialgebra_ok, coherence_ok, hopf_ok, copyables, tol)
    logger.debug("law report for D=%d: %s", dim, report.to_dict())
    return report


def hopf_law_holds(pair: ObservablePair, *, tol: float = DEFAULT_TOLERANCE) -> bool:
    """mu_X (1 (x) s) delta_Z == eta_X epsilon_Z."""
    ident = LinOperator.identity(pair.dim)
    lhs = pair.x_merge @ ident.tensor(antipode(pair.dim)) @ pair.z_copy
    return lhs.close_to(pair.x_unit @ pair.z_counit, tol)


def is_z_phase(op: LinOperator, *, tol: float = DEFAULT_TOLERANCE) -> bool:
    """op == mu_Z (alpha (x) 1) for a phase state alpha = op eta_Z with mu_Z(conj(alpha) (x) alpha) == eta_Z."""
    if op.inputs != 1 or op.outputs != 1:
        return False
    pair = canonical_pair(op.dim)
    alpha = op @ pair.z_unit
    rebuilt = pair.z_merge @ alpha.tensor(LinOperator.identity(op.dim))
    conj = LinOperator(op.dim, 0, 1, alpha.matrix.conj())
    unitary_phase = (pair.z_merge @ conj.tensor(alpha)).close_to(pair.z_unit, tol)
    return rebuilt.close_to(op, tol) and unitary_phase


@dataclass(frozen=True)
class ComplementarityReport:
    overlaps: np.ndarray = field(repr=False)
    mutually_unbiased: bool
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "overlaps": self.overlaps.round(12).tolist(),
            "mutually_unbiased": self.mutually_unbiased,
            "tolerance": self.tolerance,
        }


def complementarity_report(a: np.ndarray, b: np.ndarray, *, tol: float = DEFAULT_TOLERANCE) -> ComplementarityReport:
    """Squared overlaps |<a_i|b_j>|^2 between two bases given as matrix columns."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise BasisError(f"bases of shapes {a.shape} and {b.shape} are not comparable")
    dim = a.shape[0]
    for name, m in (("first", a), ("second", b)):
        if not np.allclose(m.conj().T @ m, np.eye(dim), atol=tol, rtol=0):
            raise BasisError(f"{name} basis is not orthonormal")
    overlaps = np.abs(a.conj().T @ b) ** 2
    return ComplementarityReport(overlaps, bool(np.allclose(overlaps, 1 / dim, atol=tol, rtol=0)), tol)

"""Monte Carlo simulation of (N, N) secret sharing over a phased GHZ state.

Party 0 is the dealer, parties 1..N are players. Each round:

1. a joint phase vector is drawn whose sum is an X-classical point a;
2. every party measures its system with its phase; the dealer adds its
   outcome k_0 to the secret, c = s + k_0 in Z_D, and broadcasts c;
3. the players pool their outcomes and recover s = c + sum_i k_i - a, since the
   outcomes of all N+1 parties always sum to a.

Three attack models are simulated: pre-phase substitution of the shared state,
post-phase deterministic devices, and a withholding player.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from utils.constants import (
    DEFAULT_TOLERANCE,
    LHV_SEARCH_BOUND,
    QSS_BATCH_SIZE,
    QSS_MIN_ROUNDS,
    TV_THRESHOLD,
)
from .errors import ConfigError, InvalidInputError, ResourceBoundError
from .lhv import build_trivial_lhv, classical_substitution, quantum_table
from .phases import PhasePoint, phase_sum
from .qudit import check_amplitudes, complementarity_report, fourier_basis, mermin_outcome_distribution, phased_basis
from .scenario import MerminScenario

logger = logging.getLogger(__name__)

ATTACK_VARIANTS = ("none", "pre_phase_substitution", "post_phase_deterministic")


@dataclass(frozen=True)
class QssConfig:
    players: int
    dim: int
    alphabets: tuple[tuple[PhasePoint, ...], ...]
    weights: tuple[float, ...] | None = None
    seed: int = 0
    rounds: int = 1000

    def __post_init__(self):
        alphabets = tuple(tuple(a) for a in self.alphabets)
        if self.players < 1:
            raise ConfigError(f"need at least one player, got {self.players}")
        if len(alphabets) != self.players + 1:
            raise ConfigError(f"{len(alphabets)} alphabets for a dealer and {self.players} players")
        if any(not a for a in alphabets):
            raise ConfigError("every party needs at least one phase")
        if any(p.dim != self.dim for a in alphabets for p in a):
            raise ConfigError(f"alphabet phases must all have dimension {self.dim}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be positive, got {self.rounds}")
        object.__setattr__(self, "alphabets", alphabets)
        if not self.joint_vectors:
            raise ConfigError("no choice of phases from the alphabets sums to an X-classical point")
        if self.weights is not None and len(self.weights) != len(self.joint_vectors):
            raise ConfigError(f"{len(self.weights)} weights for {len(self.joint_vectors)} admissible phase vectors")

    @classmethod
    def uniform(cls, players: int, dim: int, alphabet: Sequence[PhasePoint], **kwargs) -> "QssConfig":
        return cls(players, dim, tuple(tuple(alphabet) for _ in range(players + 1)), **kwargs)

    @property
    def parties(self) -> int:
        return self.players + 1

    @cached_property
    def joint_vectors(self) -> tuple[tuple[int, ...], ...]:
        """Admissible phase vectors as per-party alphabet indices."""
        out = []
        for choice in itertools.product(*(range(len(a)) for a in self.alphabets)):
            if self.vector_sum(choice).is_classical:
                out.append(choice)
        return tuple(out)

    def phases_of(self, choice: Sequence[int]) -> tuple[PhasePoint, ...]:
        return tuple(self.alphabets[i][c] for i, c in enumerate(choice))

    def vector_sum(self, choice: Sequence[int]) -> PhasePoint:
        return phase_sum(self.phases_of(choice), self.dim)

    @cached_property
    def probabilities(self) -> np.ndarray:
        if self.weights is None:
            return np.full(len(self.joint_vectors), 1 / len(self.joint_vectors))
        w = np.asarray(self.weights, dtype=float)
        if (w < 0).any() or w.sum() <= 0:
            raise ConfigError("phase weights must be non-negative with a positive sum")
        return w / w.sum()

    @property
    def p_max(self) -> float:
        return float(self.probabilities.max())

    @property
    def modal_vector(self) -> tuple[int, ...]:
        return self.joint_vectors[int(np.argmax(self.probabilities))]

    def to_dict(self) -> dict:
        return {
            "players": self.players,
            "D": self.dim,
            "alphabets": [[p.to_json() for p in a] for a in self.alphabets],
            "weights": None if self.weights is None else list(self.weights),
            "seed": self.seed,
            "rounds": self.rounds,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QssConfig":
        dim = int(data["D"])
        return cls(
            int(data["players"]),
            dim,
            tuple(tuple(PhasePoint.from_json(dim, p) for p in a) for a in data["alphabets"]),
            None if data.get("weights") is None else tuple(float(w) for w in data["weights"]),
            int(data.get("seed", 0)),
            int(data.get("rounds", 1000)),
        )


@dataclass(frozen=True)
class AttackModel:
    """``table[i][a]`` is party i's fixed outcome for its a-th alphabet phase."""

    variant: str = "none"
    target: tuple[int, ...] | None = None
    table: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if self.variant not in ATTACK_VARIANTS:
            raise InvalidInputError(f"unknown attack {self.variant!r}", variants=list(ATTACK_VARIANTS))
        if self.variant == "post_phase_deterministic" and self.table is None:
            raise InvalidInputError("a deterministic attack needs an outcome table")


@dataclass(frozen=True)
class RoundTranscript:
    index: int
    phases: tuple[str, ...]
    classical_point: int
    dealer_outcome: int
    ciphertext: int
    player_outcomes: tuple[int, ...]
    secret: int
    decoded: int
    attack: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "round": self.index,
                "phases": list(self.phases),
                "a": self.classical_point,
                "dealer": self.dealer_outcome,
                "ciphertext": self.ciphertext,
                "players": list(self.player_outcomes),
                "secret": self.secret,
                "decoded": self.decoded,
                "attack": self.attack,
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class RoundBatch:
    """Column arrays for a simulated run."""

    vectors: np.ndarray
    outcomes: np.ndarray
    points: np.ndarray
    secrets: np.ndarray
    ciphertexts: np.ndarray
    decoded: np.ndarray
    guesses: np.ndarray | None = None


@dataclass(frozen=True)
class ProtocolRun:
    config: QssConfig
    attack: str
    batch: RoundBatch = field(repr=False)

    @property
    def rounds(self) -> int:
        return int(self.batch.decoded.size)

    @property
    def accuracy(self) -> float:
        return float(np.mean(self.batch.decoded == self.batch.secrets))

    @property
    def failure_rate(self) -> float:
        return 1.0 - self.accuracy

    @property
    def tv_distance(self) -> float:
        """Total variation between the decoded values and the uniform distribution."""
        return tv_from_uniform(self.batch.decoded, self.config.dim)

    def transcripts(self) -> Iterator[RoundTranscript]:
        cfg = self.config
        for r in range(self.rounds):
            choice = cfg.joint_vectors[int(self.batch.vectors[r])]
            outcomes = self.batch.outcomes[r]
            yield RoundTranscript(
                r,
                tuple(str(p) for p in cfg.phases_of(choice)),
                int(self.batch.points[r]),
                int(outcomes[0]),
                int(self.batch.ciphertexts[r]),
                tuple(int(k) for k in outcomes[1:]),
                int(self.batch.secrets[r]),
                int(self.batch.decoded[r]),
                self.attack,
            )

    def summary(self) -> dict:
        return {
            "rounds": self.rounds,
            "accuracy": self.accuracy,
            "failure_rate": self.failure_rate,
            "tv_distance": self.tv_distance,
            "p_max": self.config.p_max,
            "attack": self.attack,
        }

    def csv_row(self) -> str:
        return f"{self.rounds},{self.accuracy},{self.failure_rate},{self.tv_distance}"


def tv_from_uniform(values: np.ndarray, dim: int) -> float:
    counts = np.bincount(np.asarray(values, dtype=int), minlength=dim)[:dim]
    return float(0.5 * np.abs(counts / max(counts.sum(), 1) - 1 / dim).sum())


def mutual_information(xs: np.ndarray, ys: np.ndarray, dim: int) -> float:
    """Plug-in estimate in k-its (log base D)."""
    joint = np.zeros((dim, dim))
    np.add.at(joint, (np.asarray(xs, dtype=int), np.asarray(ys, dtype=int)), 1)
    joint /= joint.sum()
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    return float(np.sum(joint[mask] * np.log(joint[mask] / (px @ py)[mask])) / math.log(dim))


def _batch_generators(seed: int, rounds: int) -> Iterator[tuple[np.random.Generator, int]]:
    """Independent generators for consecutive round batches, derived from one seed."""
    batches = max(1, math.ceil(rounds / QSS_BATCH_SIZE))
    for n, child in enumerate(np.random.SeedSequence(seed).spawn(batches)):
        yield np.random.default_rng(child), min(QSS_BATCH_SIZE, rounds - n * QSS_BATCH_SIZE)


def _transition(a: PhasePoint, prepared: PhasePoint) -> np.ndarray:
    """T[t, k] = |<f_k| U(a) U(prepared)^dagger |f_t>|^2."""
    f = fourier_basis(a.dim)
    m = f.conj().T @ np.diag(a.diagonal() * prepared.diagonal().conj()) @ f
    return (np.abs(m) ** 2).T


def _sample_rows(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    cum = np.cumsum(probs, axis=1)
    u = rng.random(probs.shape[0]) * cum[:, -1]
    return np.minimum((cum < u[:, None]).sum(axis=1), probs.shape[1] - 1)


def _simulate(
    cfg: QssConfig,
    attack: AttackModel,
    *,
    secret: int | None,
    rounds: int | None = None,
    seed: int | None = None,
    bound: int | None = None,
) -> RoundBatch:
    dim, parties = cfg.dim, cfg.parties
    check_amplitudes(dim, parties, bound)
    total = cfg.rounds if rounds is None else rounds
    points = np.array([cfg.vector_sum(v).classical_value for v in cfg.joint_vectors])
    dists: dict[int, np.ndarray] = {}

    if attack.variant == "pre_phase_substitution":
        target = tuple(attack.target or cfg.modal_vector)
        if target not in cfg.joint_vectors:
            raise InvalidInputError(f"target {list(target)} is not an admissible phase vector")
        target_phases = cfg.phases_of(target)
        target_point = cfg.vector_sum(target).classical_value
        if target_point is None:
            raise InvalidInputError("the attacker's target vector does not sum to a classical point")
        transitions = [
            [_transition(a, target_phases[i]) for a in cfg.alphabets[i]] for i in range(parties)
        ]

    chunks = []
    for rng, size in _batch_generators(cfg.seed if seed is None else seed, total):
        vec = rng.choice(len(cfg.joint_vectors), size=size, p=cfg.probabilities)
        secrets = rng.integers(0, dim, size=size) if secret is None else np.full(size, secret)
        outcomes = np.zeros((size, parties), dtype=int)
        guesses = None
        prepared = None
        if attack.variant == "none":
            for v in np.unique(vec):
                rows = np.flatnonzero(vec == v)
                if v not in dists:
                    dists[v] = mermin_outcome_distribution(dim, parties, cfg.phases_of(cfg.joint_vectors[v])).reshape(-1)
                flat = rng.choice(dists[v].size, size=rows.size, p=dists[v] / dists[v].sum())
                outcomes[rows] = np.stack(np.unravel_index(flat, (dim,) * parties), axis=1)
        elif attack.variant == "pre_phase_substitution":
            prepared = rng.integers(0, dim, size=(size, parties))
            prepared[:, -1] = (target_point - prepared[:, :-1].sum(axis=1)) % dim
            choices = np.array(cfg.joint_vectors)[vec]
            for i in range(parties):
                for a in range(len(cfg.alphabets[i])):
                    rows = np.flatnonzero(choices[:, i] == a)
                    if rows.size:
                        outcomes[rows, i] = _sample_rows(transitions[i][a][prepared[rows, i]], rng)
        else:
            choices = np.array(cfg.joint_vectors)[vec]
            for i in range(parties):
                outcomes[:, i] = [attack.table[i][a] for a in choices[:, i]]

        g = points[vec]
        cipher = (secrets + outcomes[:, 0]) % dim
        decoded = (cipher + outcomes[:, 1:].sum(axis=1) - g) % dim
        if prepared is not None:
            guesses = (cipher - prepared[:, 0]) % dim
        chunks.append((vec, outcomes, g, secrets, cipher, decoded, guesses))

    def cat(k: int) -> np.ndarray:
        return np.concatenate([c[k] for c in chunks])

    return RoundBatch(
        cat(0), cat(1), cat(2), cat(3), cat(4), cat(5), cat(6) if attack.variant == "pre_phase_substitution" else None
    )


def run_protocol(
    cfg: QssConfig, secret: int, attack: AttackModel | None = None, *, bound: int | None = None
) -> ProtocolRun:
    """Simulate ``cfg.rounds`` rounds sharing ``secret`` in Z_D."""
    if not 0 <= secret < cfg.dim:
        raise InvalidInputError(f"secret must lie in Z_{cfg.dim}, got {secret}")
    attack = attack or AttackModel()
    batch = _simulate(cfg, attack, secret=secret, bound=bound)
    run = ProtocolRun(cfg, attack.variant, batch)
    logger.info("protocol run: %s", run.summary())
    return run


@dataclass(frozen=True)
class LeakageReport:
    withheld: int
    rounds: int
    mutual_information: float
    tv_distance: float

    def to_dict(self) -> dict:
        return {
            "withheld": self.withheld,
            "rounds": self.rounds,
            "mutual_information": self.mutual_information,
            "tv_distance": self.tv_distance,
        }


def withholding_leakage(cfg: QssConfig, withheld: int, *, rounds: int | None = None, bound: int | None = None) -> LeakageReport:
    """What the remaining players learn about a uniform secret when player ``withheld`` stays silent."""
    if not 1 <= withheld <= cfg.players:
        raise InvalidInputError(f"player index must lie in 1..{cfg.players}, got {withheld}")
    batch = _simulate(cfg, AttackModel(), secret=None, rounds=rounds, bound=bound)
    others = np.delete(batch.outcomes[:, 1:], withheld - 1, axis=1).sum(axis=1)
    partial = (batch.ciphertexts + others - batch.points) % cfg.dim
    report = LeakageReport(
        withheld,
        int(partial.size),
        mutual_information(batch.secrets, partial, cfg.dim),
        tv_from_uniform(partial, cfg.dim),
    )
    logger.info("withholding leakage: %s", report.to_dict())
    return report


@dataclass(frozen=True)
class PrePhaseReport:
    rounds: int
    failure_rate: float
    expected_failure: float
    formula_applicable: bool
    guess_accuracy: float
    full_knowledge_rate: float
    p_max: float

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "failure_rate": self.failure_rate,
            "expected_failure": self.expected_failure,
            "formula_applicable": self.formula_applicable,
            "attacker_guess_accuracy": self.guess_accuracy,
            "full_knowledge_rate": self.full_knowledge_rate,
            "p_max": self.p_max,
        }


def alphabet_is_unbiased(cfg: QssConfig, *, tol: float = DEFAULT_TOLERANCE) -> bool:
    """Every two distinct phases of a party measure mutually unbiased bases."""
    for alphabet in cfg.alphabets:
        for a, b in itertools.combinations(alphabet, 2):
            if not complementarity_report(phased_basis(a), phased_basis(b), tol=tol).mutually_unbiased:
                return False
    return True


def simulate_pre_phase_attack(
    cfg: QssConfig,
    target: tuple[int, ...] | None = None,
    *,
    secret: int = 0,
    rounds: int | None = None,
    bound: int | None = None,
) -> PrePhaseReport:
    """Attacker replaces the shared state by the product state tuned to one phase vector.

    The state is the tensor product of U(alpha*_i)^dagger f_{t_i} for the target
    vector alpha* (default the most probable one) with t uniform subject to
    sum t_i = a*. Rounds that draw the target reveal every outcome to the
    attacker; other rounds randomise the decoded value.
    """
    attack = AttackModel("pre_phase_substitution", target=target)
    batch = _simulate(cfg, attack, secret=secret, rounds=rounds, bound=bound)
    target_index = cfg.joint_vectors.index(tuple(target or cfg.modal_vector))
    applicable = alphabet_is_unbiased(cfg)
    if not applicable:
        logger.warning("alphabet measurements are not mutually unbiased: failure formula not applicable")
    report = PrePhaseReport(
        rounds=int(batch.decoded.size),
        failure_rate=float(np.mean(batch.decoded != batch.secrets)),
        expected_failure=(1 - cfg.p_max) * (1 - 1 / cfg.dim),
        formula_applicable=applicable,
        guess_accuracy=float(np.mean(batch.guesses == batch.secrets)),
        full_knowledge_rate=float(np.mean(batch.vectors == target_index)),
        p_max=cfg.p_max,
    )
    logger.info("pre-phase attack: %s", report.to_dict())
    return report


@dataclass(frozen=True)
class DeviceIndependentReport:
    nontrivial: bool
    tables_checked: int
    tables_detected: int
    mixture_tv: float | None
    mixture_impossible: bool | None
    rounds: int
    verdict: str

    def to_dict(self) -> dict:
        return {
            "nontrivial": self.nontrivial,
            "tables_checked": self.tables_checked,
            "tables_detected": self.tables_detected,
            "mixture_tv": self.mixture_tv,
            "mixture_impossible": self.mixture_impossible,
            "rounds": self.rounds,
            "verdict": self.verdict,
            "tv_threshold": TV_THRESHOLD,
        }


def context_scenario(cfg: QssConfig) -> MerminScenario:
    """Every admissible phase vector as a measurement row."""
    return MerminScenario(cfg.dim, tuple(cfg.phases_of(v) for v in cfg.joint_vectors))


def all_tables(cfg: QssConfig, *, bound: int | None = None) -> Iterator[tuple[tuple[int, ...], ...]]:
    limit = LHV_SEARCH_BOUND if bound is None else bound
    sizes = [len(a) for a in cfg.alphabets]
    total = cfg.dim ** sum(sizes)
    if total > limit:
        raise ResourceBoundError(f"{total} deterministic tables", bound=limit, requested=total)
    for flat in itertools.product(range(cfg.dim), repeat=sum(sizes)):
        table, pos = [], 0
        for s in sizes:
            table.append(tuple(flat[pos:pos + s]))
            pos += s
        yield tuple(table)


def simulate_device_independent_attack(
    cfg: QssConfig,
    tables: Sequence[tuple[tuple[int, ...], ...]] | None = None,
    *,
    rounds: int | None = None,
    min_rounds: int = QSS_MIN_ROUNDS,
    bound: int | None = None,
) -> DeviceIndependentReport:
    """Can devices with outcomes fixed per (party, phase) pass the players' checks?

    Each table is tested against the possible outcomes of every admissible
    context. When the alphabet admits a classical substitution, the local
    mixture built from it is also run for ``rounds`` rounds and compared to the
    honest statistics by total variation.
    """
    total = cfg.rounds if rounds is None else rounds
    scenario = context_scenario(cfg)
    table = quantum_table(scenario, bound=bound)
    substitution = classical_substitution(scenario)
    nontrivial = substitution is None

    checked = detected = 0
    for t in tables if tables is not None else all_tables(cfg, bound=bound):
        checked += 1
        for s, choice in enumerate(cfg.joint_vectors):
            predicted = tuple(t[i][a] for i, a in enumerate(choice))
            if predicted not in table.supports[s]:
                detected += 1
                break

    mixture_tv = None
    mixture_impossible = None
    if substitution is not None:
        model = build_trivial_lhv(scenario, substitution, bound=bound)
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
        ctx = rng.choice(len(cfg.joint_vectors), size=total, p=cfg.probabilities)
        pick = rng.integers(0, len(model.assignments), size=total)
        tv_sum = 0.0
        mixture_impossible = False
        for s in np.unique(ctx):
            rows = np.flatnonzero(ctx == s)
            counts: dict[tuple[int, ...], int] = {}
            for r in rows:
                o = model.assignments[int(pick[r])].predict(scenario.rows[s])
                counts[o] = counts.get(o, 0) + 1
            if any(o not in table.supports[s] for o in counts):
                mixture_impossible = True
            reference = table.distributions[s]
            empirical = np.zeros_like(reference)
            for o, c in counts.items():
                empirical[o] = c / rows.size
            tv_sum += rows.size * 0.5 * float(np.abs(empirical - reference).sum())
        mixture_tv = tv_sum / total

    if total < min_rounds:
        verdict = "inconclusive"
    elif checked and detected == checked and nontrivial:
        verdict = "secure"
    elif mixture_tv is not None and not mixture_impossible and mixture_tv < TV_THRESHOLD:
        verdict = "insecure"
    else:
        verdict = "inconclusive"
    report = DeviceIndependentReport(nontrivial, checked, detected, mixture_tv, mixture_impossible, total, verdict)
    logger.info("device-independent attack: %s", report.to_dict())
    return report

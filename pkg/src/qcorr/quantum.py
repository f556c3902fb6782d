"""Pure qubit states, two-outcome spin measurements and Born-rule statistics.

Qubit 0 is the most significant bit of a basis index, so the amplitude of
``|01>`` sits at index 1.  Outcome 0 is "up" (eigenvalue +1 of d.sigma),
outcome 1 is "down".
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

NORM_TOL = 1e-12
INPUT_NORM_TOL = 1e-6
PROB_TOL = 1e-9

UP, DOWN = 0, 1
OUTCOME_NAMES = ("up", "down")

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
IDENTITY = np.eye(2, dtype=complex)


class QuantumError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector with a qubit -> player ownership map."""

    amplitudes: np.ndarray
    owners: tuple[int, ...]

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = len(self.owners)
        if amp.size != 2 ** n:
            raise QuantumError(f"{amp.size} amplitudes do not describe {n} qubits")
        norm = float(np.vdot(amp, amp).real)
        if abs(norm - 1) > NORM_TOL:
            raise QuantumError(f"state has squared norm {norm!r}, expected 1")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "owners", tuple(int(o) for o in self.owners))

    @classmethod
    def normalized(cls, amplitudes, owners) -> "PureState":
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise QuantumError("zero vector is not a state")
        return cls(amp / norm, tuple(owners))

    @property
    def num_qubits(self) -> int:
        return len(self.owners)

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[int(bits, 2)])

    def qubits_of(self, player: int) -> list[int]:
        return [q for q, o in enumerate(self.owners) if o == player]


def singlet() -> PureState:
    """(|01> - |10>)/sqrt(2); qubit 0 belongs to player 0, qubit 1 to player 1."""
    s = 1 / math.sqrt(2)
    return PureState(np.array([0, s, -s, 0], dtype=complex), (0, 1))


@dataclass(frozen=True)
class MeasurementDirection:
    """Spin measurement along a Bloch direction on one qubit."""

    direction: tuple[float, float, float]
    qubit: int
    label: str = ""

    def __post_init__(self):
        d = tuple(float(x) for x in self.direction)
        if len(d) != 3:
            raise QuantumError("a Bloch direction has three components")
        norm = math.sqrt(sum(x * x for x in d))
        if abs(norm - 1) > NORM_TOL:
            raise QuantumError(f"direction {d} has norm {norm!r}, expected 1")
        object.__setattr__(self, "direction", d)

    @classmethod
    def from_input(cls, direction: Sequence[float], qubit: int, label: str = "") -> "MeasurementDirection":
        """Accept user input, renormalizing anything within 1e-6 of unit length."""
        d = [float(x) for x in direction]
        if len(d) != 3:
            raise QuantumError("a Bloch direction has three components")
        norm = math.sqrt(sum(x * x for x in d))
        if abs(norm - 1) > INPUT_NORM_TOL:
            raise QuantumError(f"direction {tuple(d)} is not a unit vector (norm {norm:.9g})")
        if abs(norm - 1) > NORM_TOL:
            d = [x / norm for x in d]
        return cls(tuple(d), qubit, label)

    def observable(self) -> np.ndarray:
        return sum(c * p for c, p in zip(self.direction, PAULI))

    def projector(self, outcome: int) -> np.ndarray:
        sign = 1 if outcome == UP else -1
        return (IDENTITY + sign * self.observable()) / 2

    def dot(self, other: "MeasurementDirection") -> float:
        return sum(a * b for a, b in zip(self.direction, other.direction))


def trine_menu(qubit: int) -> tuple[MeasurementDirection, ...]:
    """Three coplanar directions pairwise 120 degrees apart, labelled x, y, z."""
    h = math.sqrt(3) / 2
    return (
        MeasurementDirection((1.0, 0.0, 0.0), qubit, "x"),
        MeasurementDirection((-0.5, h, 0.0), qubit, "y"),
        MeasurementDirection((-0.5, -h, 0.0), qubit, "z"),
    )


def orthogonal_menu(qubit: int) -> tuple[MeasurementDirection, ...]:
    """The coordinate axes; with the singlet these give agreement 1/2, not 3/4."""
    return (
        MeasurementDirection((1.0, 0.0, 0.0), qubit, "x"),
        MeasurementDirection((0.0, 1.0, 0.0), qubit, "y"),
        MeasurementDirection((0.0, 0.0, 1.0), qubit, "z"),
    )


@dataclass(frozen=True)
class OutcomeDistribution:
    """Joint outcome tuple (one 0/1 per measured qubit) -> probability."""

    probs: Mapping[tuple[int, ...], float]

    def __post_init__(self):
        probs = {}
        for k, p in self.probs.items():
            p = float(p)
            if p < -NORM_TOL:
                raise QuantumError(f"negative probability {p!r} for outcome {k}")
            probs[tuple(k)] = max(p, 0.0)
        total = sum(probs.values())
        if abs(total - 1) > PROB_TOL:
            raise QuantumError(f"outcome probabilities sum to {total!r}")
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, outcome) -> float:
        return self.probs.get(tuple(outcome), 0.0)

    def marginal(self, position: int) -> dict[int, float]:
        out = {UP: 0.0, DOWN: 0.0}
        for k, p in self.probs.items():
            out[k[position]] += p
        return out

    def prob_equal(self) -> float:
        return sum(p for k, p in self.probs.items() if len(set(k)) == 1)


def born_joint_distribution(state: PureState, directions: Sequence[MeasurementDirection]) -> OutcomeDistribution:
    """Joint outcome statistics of measuring each listed qubit along its direction."""
    qubits = [d.qubit for d in directions]
    if len(set(qubits)) != len(qubits):
        raise QuantumError("each qubit can be measured at most once")
    n = state.num_qubits
    if any(not 0 <= q < n for q in qubits):
        raise QuantumError(f"measurement targets a qubit outside 0..{n - 1}")
    psi = state.amplitudes.reshape((2,) * n)
    probs = {}
    for outcome in itertools.product((UP, DOWN), repeat=len(directions)):
        phi = psi
        for d, o in zip(directions, outcome):
            phi = np.moveaxis(np.tensordot(d.projector(o), phi, axes=([1], [d.qubit])), 0, d.qubit)
        probs[outcome] = float(np.vdot(phi, phi).real)
    return OutcomeDistribution(probs)


def _two_qubit(state: PureState) -> None:
    if state.num_qubits != 2:
        raise QuantumError(f"need a two-qubit state, got {state.num_qubits} qubits")


def agreement_probability(state: PureState, d1: MeasurementDirection, d2: MeasurementDirection) -> float:
    """P(both outcomes equal) for a two-qubit state."""
    _two_qubit(state)
    return born_joint_distribution(state, (d1, d2)).prob_equal()


def correlation_value(state: PureState, d1: MeasurementDirection, d2: MeasurementDirection) -> float:
    """E[o1 * o2] with outcomes valued +1 (up) / -1 (down)."""
    p = agreement_probability(state, d1, d2)
    return p - (1 - p)


def rotation(axis: Sequence[float], angle: float) -> np.ndarray:
    """3x3 rotation matrix (Rodrigues)."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * K @ K


def rotated(d: MeasurementDirection, R: np.ndarray) -> MeasurementDirection:
    v = R @ np.asarray(d.direction)
    v = v / np.linalg.norm(v)
    return MeasurementDirection(tuple(v), d.qubit, d.label)

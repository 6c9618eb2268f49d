"""Exact complex-amplitude simulation of small qubit registers.

States are value-semantic: every operation returns a fresh ``QuantumState``
and never mutates its input. Gates are applied with stride-pair updates on
the amplitude array, so no 2^n x 2^n matrix is ever materialised.

Bit convention: qubit 0 is the MOST significant bit of the basis index,
i.e. for two qubits |10> (qubit 0 set) is amplitude index 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_QUBITS = 20  # 2^20 complex amplitudes = 16 MiB; larger registers need explicit opt-in

_NORM_TOL = 1e-10
_SQRT2_INV = 1.0 / math.sqrt(2.0)

ROTATION_KINDS = ("rx", "ry", "rz")
GATE_KINDS = ROTATION_KINDS + ("h", "x", "cnot")


@dataclass(frozen=True)
class Gate:
    """A unitary operation on one qubit (or two, for cnot).

    ``target`` is the acted-on qubit; ``control`` is set only for cnot;
    ``angle`` (radians) is set only for the rotation kinds.
    """

    kind: str
    target: int
    control: int | None = None
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in ROTATION_KINDS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} requires a finite rotation angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")
        if self.kind == "cnot":
            if self.control is None:
                raise ValueError("cnot requires a control qubit")
            if self.control == self.target:
                raise ValueError("cnot control and target must differ")
        elif self.control is not None:
            raise ValueError(f"{self.kind} takes no control qubit")

    def matrix(self) -> np.ndarray:
        """Dense matrix: 2x2 for single-qubit kinds, 4x4 for cnot.

        The cnot matrix is written in the |control, target> basis.
        """
        if self.kind == "rx":
            c, s = math.cos(self.angle / 2), math.sin(self.angle / 2)
            return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
        if self.kind == "ry":
            c, s = math.cos(self.angle / 2), math.sin(self.angle / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if self.kind == "rz":
            p = np.exp(-0.5j * self.angle)
            return np.array([[p, 0], [0, np.conj(p)]], dtype=complex)
        if self.kind == "h":
            return np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
        if self.kind == "x":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        # cnot
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )


def rx(theta: float, qubit: int) -> Gate:
    return Gate("rx", qubit, angle=theta)


def ry(theta: float, qubit: int) -> Gate:
    return Gate("ry", qubit, angle=theta)


def rz(theta: float, qubit: int) -> Gate:
    return Gate("rz", qubit, angle=theta)


def h(qubit: int) -> Gate:
    return Gate("h", qubit)


def x(qubit: int) -> Gate:
    return Gate("x", qubit)


def cnot(control: int, target: int) -> Gate:
    return Gate("cnot", target, control=control)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalized complex amplitude vector over the 2^n computational basis."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] != 1 << self.num_qubits:
            raise ValueError(
                f"expected 2^{self.num_qubits} amplitudes, got shape {amps.shape}"
            )
        if abs(np.sum(np.abs(amps) ** 2) - 1.0) > _NORM_TOL:
            raise ValueError("state is not normalized")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits


@lru_cache(maxsize=None)
def _pair_indices(num_qubits: int, qubit: int) -> tuple[np.ndarray, np.ndarray]:
    """Basis-index pairs (bit clear, bit set) for ``qubit``, aligned element-wise."""
    stride = 1 << (num_qubits - 1 - qubit)
    idx = np.arange(1 << num_qubits)
    i0 = idx[(idx >> (num_qubits - 1 - qubit)) & 1 == 0]
    return i0, i0 | stride


@lru_cache(maxsize=None)
def _cnot_indices(num_qubits: int, control: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs swapped by cnot: control bit set, target bit clear/set."""
    t_stride = 1 << (num_qubits - 1 - target)
    idx = np.arange(1 << num_qubits)
    c_bit = (idx >> (num_qubits - 1 - control)) & 1
    t_bit = (idx >> (num_qubits - 1 - target)) & 1
    a = idx[(c_bit == 1) & (t_bit == 0)]
    return a, a | t_stride


def zero_state(num_qubits: int) -> QuantumState:
    """The all-zeros register |0...0>."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(
            f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}"
        )
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[0] = 1.0
    return QuantumState(num_qubits, amps)


def _check_qubit(state: QuantumState, qubit: int) -> None:
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(
            f"qubit index {qubit} out of range for {state.num_qubits}-qubit state"
        )


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    """Return U|psi> for the given gate; the input state is left untouched."""
    n = state.num_qubits
    _check_qubit(state, gate.target)
    amps = state.amplitudes.copy()

    if gate.kind == "cnot":
        _check_qubit(state, gate.control)
        a, b = _cnot_indices(n, gate.control, gate.target)
        amps[a], amps[b] = amps[b].copy(), amps[a].copy()
        return QuantumState(n, amps)

    u = gate.matrix()
    i0, i1 = _pair_indices(n, gate.target)
    a0 = amps[i0].copy()
    a1 = amps[i1].copy()
    amps[i0] = u[0, 0] * a0 + u[0, 1] * a1
    amps[i1] = u[1, 0] * a0 + u[1, 1] * a1
    return QuantumState(n, amps)


def apply_circuit(state: QuantumState, gates) -> QuantumState:
    """Apply a gate sequence left to right."""
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def probabilities(state: QuantumState) -> np.ndarray:
    """Measurement probability of every basis state: entry i is |amplitude_i|^2."""
    return np.abs(state.amplitudes) ** 2


def expectation_z(state: QuantumState, qubit: int) -> float:
    """<Z> on one qubit: P(bit = 0) - P(bit = 1), always in [-1, 1]."""
    _check_qubit(state, qubit)
    bit = (np.arange(state.dim) >> (state.num_qubits - 1 - qubit)) & 1
    return float(np.sum(probabilities(state) * (1 - 2 * bit)))


BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")


def bell_state(which: str) -> QuantumState:
    """One of the four maximally entangled two-qubit states.

    phi+/- = (|00> +/- |11>)/sqrt(2), psi+/- = (|01> +/- |10>)/sqrt(2).
    Built by circuit: an X on qubit 0 ahead of the Hadamard supplies the
    minus sign, an X on qubit 1 turns phi into psi. This yields the exact
    textbook amplitudes with no stray global phase.
    """
    if which not in BELL_LABELS:
        raise ValueError(f"unknown Bell state {which!r}; expected one of {BELL_LABELS}")
    circuit = []
    if which.endswith("-"):
        circuit.append(x(0))
    if which.startswith("psi"):
        circuit.append(x(1))
    circuit += [h(0), cnot(0, 1)]
    return apply_circuit(zero_state(2), circuit)

"""Dense statevector simulation for the compiled measurement circuits.

The state of q qubits is a complex vector of 2^q amplitudes with qubit 0
as the least significant index bit.  Single-qubit gates contract a 2x2
matrix against one tensor axis; CNOT permutes amplitude slices in place.
Verification applies Alice's and Bob's circuits to the shared prepared
state and reads the correlation <Z_first(A) Z_first(B)> — the X-basis
readout's final H is already part of each measurement gate list, so a
Z expectation afterwards equals the intended X-basis correlation.

A strategy check passes when every simulated correlation matches the
hyperbit inner product x_s . y_t and every default column reproduces its
fixed sign, within tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .circuits import CircuitSpec, Gate, qubits_for_dimension
from .errors import DimensionMismatchError, InvalidConfigError
from .hyperbit import HyperbitStrategy

MAX_QUBITS = 24
_NORM_TOL = 1e-10

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_GATE_MATRICES = {
    "H": np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "S_dagger": np.array([[1, 0], [0, -1j]], dtype=complex),
}

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


# ─── Statevector core ────────────────────────────────────────────────────────


def zero_state(num_qubits: int) -> np.ndarray:
    """|0...0> on num_qubits qubits."""
    if num_qubits < 1 or num_qubits > MAX_QUBITS:
        raise InvalidConfigError(
            f"qubit count must be in [1, {MAX_QUBITS}], got {num_qubits}",
            num_qubits=num_qubits,
        )
    state = np.zeros(2**num_qubits, dtype=complex)
    state[0] = 1.0
    return state


def _num_qubits(state: np.ndarray) -> int:
    n = state.size
    q = n.bit_length() - 1
    if 2**q != n:
        raise DimensionMismatchError(
            f"state length {n} is not a power of two", length=n
        )
    return q


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    """Return the state after one gate; the input array is not modified."""
    q = _num_qubits(state)
    for target in gate.qubits:
        if not 0 <= target < q:
            raise DimensionMismatchError(
                f"gate touches qubit {target} outside register of {q}",
                qubit=target,
                num_qubits=q,
            )
    tensor = state.reshape((2,) * q)
    if gate.kind == "CNOT":
        control, target = gate.qubits
        # Axis k of the tensor is qubit q-1-k (row-major, qubit 0 = LSB).
        c_ax = q - 1 - control
        t_ax = q - 1 - target
        out = tensor.copy()
        idx_on = [slice(None)] * q
        idx_on[c_ax] = 1
        flipped = np.flip(tensor[tuple(idx_on)], axis=t_ax if t_ax < c_ax else t_ax - 1)
        out[tuple(idx_on)] = flipped
        return out.reshape(-1)
    if gate.kind == "RZ":
        mat = np.array(
            [
                [np.exp(-0.5j * gate.angle), 0],
                [0, np.exp(0.5j * gate.angle)],
            ],
            dtype=complex,
        )
    else:
        mat = _GATE_MATRICES[gate.kind]
    axis = q - 1 - gate.qubits[0]
    moved = np.tensordot(mat, tensor, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis).reshape(-1)


def apply_circuit(state: np.ndarray, gates: tuple[Gate, ...]) -> np.ndarray:
    """Apply gates in order; checks the norm survived to within 1e-10."""
    for gate in gates:
        state = apply_gate(state, gate)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > _NORM_TOL:
        raise DimensionMismatchError(
            f"state norm drifted to {norm}", norm=float(norm)
        )
    return state


# ─── Operator helpers ────────────────────────────────────────────────────────


def pauli_string(labels: str) -> np.ndarray:
    """Dense matrix of a Pauli word; labels[i] acts on qubit i (LSB first)."""
    mat = np.array([[1.0 + 0j]])
    for label in labels:
        mat = np.kron(_PAULI[label], mat)
    return mat


def tsirelson_operators(num_qubits: int) -> list[np.ndarray]:
    """The 2L anticommuting words T_{2i-1} = X_i Z_{<i}, T_{2i} = Y_i Z_{<i}."""
    ops: list[np.ndarray] = []
    for i in range(num_qubits):
        prefix = "Z" * i
        suffix = "I" * (num_qubits - i - 1)
        ops.append(pauli_string(prefix + "X" + suffix))
        ops.append(pauli_string(prefix + "Y" + suffix))
    return ops


def coefficient_operator(c: np.ndarray) -> np.ndarray:
    """Dense observable sum_j c_j T_j on L = len(c)/2 qubits."""
    c = np.asarray(c, dtype=float)
    ops = tsirelson_operators(qubits_for_dimension(c.size))
    total = np.zeros_like(ops[0])
    for coeff, op in zip(c, ops):
        total = total + coeff * op
    return total


def prepared_state(qubits_per_player: int) -> np.ndarray:
    """The maximally entangled state 2^{-L/2} sum_i |i>|i> on 2L qubits.

    Alice's register holds the low L qubits, so the component |i>_B |i>_A
    sits at amplitude index i * 2^L + i.
    """
    dim = 2**qubits_per_player
    state = np.zeros(dim * dim, dtype=complex)
    for i in range(dim):
        state[i * dim + i] = 1.0
    return state / math.sqrt(dim)


def expectation_zz(state: np.ndarray, qubit_a: int, qubit_b: int) -> float:
    """<Z_a Z_b> of a statevector, computed from amplitude parities."""
    q = _num_qubits(state)
    idx = np.arange(state.size)
    signs = 1.0 - 2.0 * (((idx >> qubit_a) ^ (idx >> qubit_b)) & 1)
    del q
    return float(np.real(np.sum(signs * np.abs(state) ** 2)))


# ─── Strategy verification ───────────────────────────────────────────────────


@dataclass(frozen=True)
class VerificationEntry:
    """One checked matrix entry: correlation from circuits or a default."""

    row: str
    col: str
    kind: str
    expected: float
    simulated: float

    @property
    def deviation(self) -> float:
        return abs(self.expected - self.simulated)

    def to_json(self) -> dict:
        return {
            "row": self.row,
            "col": self.col,
            "kind": self.kind,
            "expected": self.expected,
            "simulated": self.simulated,
            "deviation": self.deviation,
        }


@dataclass(frozen=True)
class VerificationReport:
    """All entry checks for one compiled strategy."""

    entries: tuple[VerificationEntry, ...]
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return max((e.deviation for e in self.entries), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "entries": [e.to_json() for e in self.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def verify_strategy(
    strategy: HyperbitStrategy,
    circuit: CircuitSpec,
    tolerance: float = 1e-9,
) -> VerificationReport:
    """Check that simulating the circuit reproduces the strategy matrix.

    Quantum entries compare <Z_0 Z_L> after prep + Alice(s) + Bob(t)
    against x_s . y_t; default columns compare the stored sign against
    gamma_t.  Row/column order follows the circuit's label lists.
    """
    rows = list(circuit.alice.keys())
    quantum_cols = list(circuit.bob.keys())
    entries: list[VerificationEntry] = []
    if circuit.qubits_per_player > 0:
        if 2 * circuit.qubits_per_player > MAX_QUBITS:
            raise InvalidConfigError(
                "circuit too wide for dense simulation",
                qubits=2 * circuit.qubits_per_player,
                limit=MAX_QUBITS,
            )
        base = apply_circuit(
            zero_state(2 * circuit.qubits_per_player), circuit.prep
        )
        expected_prep = prepared_state(circuit.qubits_per_player)
        drift = float(np.max(np.abs(base - expected_prep)))
        if drift > 1e-9:
            raise InvalidConfigError(
                "prep gates do not produce the entangled state",
                deviation=drift,
            )
        after_alice = {
            label: apply_circuit(base, gates)
            for label, gates in circuit.alice.items()
        }
        for s, row in enumerate(rows):
            for col in quantum_cols:
                t = _column_index(strategy, circuit, col)
                final = apply_circuit(after_alice[row], circuit.bob[col])
                simulated = expectation_zz(final, 0, circuit.qubits_per_player)
                expected = float(strategy.x[s] @ strategy.y[t])
                entries.append(
                    VerificationEntry(row, col, "correlation", expected, simulated)
                )
    for col, sign in circuit.defaults.items():
        t = _column_index(strategy, circuit, col)
        entries.append(
            VerificationEntry(
                "*", col, "default", float(strategy.gamma[t]), float(sign)
            )
        )
    return VerificationReport(tuple(entries), tolerance)


def _column_index(
    strategy: HyperbitStrategy, circuit: CircuitSpec, label: str
) -> int:
    """Map a circuit column label back to the strategy's column index."""
    ordered = list(circuit.bob.keys())
    quantum_positions = [t for t, g in enumerate(strategy.gamma) if g == 0]
    if label in circuit.bob:
        return quantum_positions[ordered.index(label)]
    default_positions = [t for t, g in enumerate(strategy.gamma) if g != 0]
    default_labels = list(circuit.defaults.keys())
    return default_positions[default_labels.index(label)]


def sample_correlation(
    strategy: HyperbitStrategy,
    circuit: CircuitSpec,
    row: str,
    col: str,
    shots: int,
    seed: int = 0,
) -> float:
    """Estimate one correlation by sampling joint Z_0, Z_L outcomes."""
    if shots < 1:
        raise InvalidConfigError(f"shots must be positive, got {shots}")
    state = apply_circuit(zero_state(2 * circuit.qubits_per_player), circuit.prep)
    state = apply_circuit(state, circuit.alice[row])
    state = apply_circuit(state, circuit.bob[col])
    probs = np.abs(state) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    outcomes = rng.choice(probs.size, size=shots, p=probs)
    bits_a = (outcomes >> 0) & 1
    bits_b = (outcomes >> circuit.qubits_per_player) & 1
    products = 1.0 - 2.0 * ((bits_a ^ bits_b) & 1)
    return float(np.mean(products))

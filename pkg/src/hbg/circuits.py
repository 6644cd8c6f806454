"""Compile hyperbit strategies into measurement circuits.

Construction (one register of L = ceil(d/2) qubits per player, prepared
in the maximally entangled state 2^{-L/2} sum_i |i>|i>):

* The 2L operators T_1 = X_1, T_2 = Y_1, T_3 = X_2 Z_1, T_4 = Y_2 Z_1, ...
  (T_{2i-1} = X_i prod_{j<i} Z_j, T_{2i} = Y_i prod_{j<i} Z_j) pairwise
  anticommute and square to the identity, so A = sum_j c_j T_j with a
  unit coefficient vector is a +-1-valued observable and

      <Psi| A(x) (x) B(y) |Psi> = x . y

  when Alice uses coefficients c = x and Bob uses y with every even
  component negated (the transpose flips Y_i).

* Measuring A reduces to a rotation network followed by an X-basis
  readout of qubit 1.  With theta_j = atan2(c_2j, c_{2j-1}), conjugating
  by prod_j exp(i theta_j Z_j / 2) merges each Y into its X partner.
  Then for j = L..2 the two-qubit rotation exp(i phi_j A_j / 2) with
  A_j = -X_j Y_{j-1} and

      phi_j = atan2(sqrt(sum_{k>=j} c'_k^2), c'_{j-1}),  c'_k = hypot(c_{2k-1}, c_{2k})

  folds the qubit-j string into qubit j-1, leaving ||c|| X_1.  Each
  two-qubit rotation expands over {H, S, S_dagger, CNOT, RZ} via
  A_j = U Z_j U^dagger with U = S_{j-1}^dagger CNOT_{j,j-1} H_j.

Serialized circuits index qubits globally: Alice owns 0..L-1, Bob owns
L..2L-1, and qubit 0 is the least significant amplitude index bit.  RZ
follows the convention RZ(a) = diag(exp(-ia/2), exp(+ia/2)), so the
state rotation exp(i theta Z / 2) is emitted as RZ(-theta).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfigError
from .hyperbit import HyperbitStrategy

GATE_KINDS = ("H", "X", "S", "S_dagger", "CNOT", "RZ")


@dataclass(frozen=True)
class Gate:
    """One gate application: kind, target qubits, and an angle for RZ."""

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise InvalidConfigError(
                f"unknown gate kind {self.kind!r}", allowed=list(GATE_KINDS)
            )
        arity = 2 if self.kind == "CNOT" else 1
        if len(self.qubits) != arity:
            raise InvalidConfigError(
                f"{self.kind} takes {arity} qubit(s), got {len(self.qubits)}",
                qubits=list(self.qubits),
            )
        if (self.kind == "RZ") != (self.angle is not None):
            raise InvalidConfigError(
                "angle is required for RZ and forbidden otherwise",
                kind=self.kind,
            )

    def to_json(self) -> dict:
        out: dict = {"g": self.kind, "q": list(self.qubits)}
        if self.angle is not None:
            out["angle"] = self.angle
        return out

    @staticmethod
    def from_json(obj: dict) -> "Gate":
        return Gate(obj["g"], tuple(int(q) for q in obj["q"]), obj.get("angle"))


@dataclass(frozen=True)
class CircuitSpec:
    """Preparation plus per-card measurement circuits for both players.

    qubits_per_player -- L; the joint register holds 2L qubits
    prep              -- gates preparing 2^{-L/2} sum |i>|i> from |0...0>
    alice, bob        -- measurement gate lists keyed by card label,
                         ending in the H of an X-basis readout of the
                         player's first qubit (0 for Alice, L for Bob)
    defaults          -- Bob's fixed answers on columns with gamma_t != 0
    """

    qubits_per_player: int
    prep: tuple[Gate, ...]
    alice: dict[str, tuple[Gate, ...]]
    bob: dict[str, tuple[Gate, ...]]
    defaults: dict[str, int]

    def to_json(self) -> dict:
        return {
            "qubits_per_player": self.qubits_per_player,
            "prep": [g.to_json() for g in self.prep],
            "alice": {k: [g.to_json() for g in v] for k, v in self.alice.items()},
            "bob": {k: [g.to_json() for g in v] for k, v in self.bob.items()},
            "defaults": dict(self.defaults),
        }

    @staticmethod
    def from_json(obj: dict) -> "CircuitSpec":
        return CircuitSpec(
            qubits_per_player=int(obj["qubits_per_player"]),
            prep=tuple(Gate.from_json(g) for g in obj["prep"]),
            alice={
                k: tuple(Gate.from_json(g) for g in v)
                for k, v in obj["alice"].items()
            },
            bob={
                k: tuple(Gate.from_json(g) for g in v)
                for k, v in obj["bob"].items()
            },
            defaults={k: int(v) for k, v in obj["defaults"].items()},
        )

    @staticmethod
    def loads(text: str) -> "CircuitSpec":
        return CircuitSpec.from_json(json.loads(text))


def qubits_for_dimension(d: int) -> int:
    """L = ceil(d/2) qubits per player carry d anticommuting directions."""
    return (d + 1) // 2


def measurement_coefficients(
    strategy: HyperbitStrategy,
) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient vectors (padded to 2L) for Alice's and Bob's observables.

    Alice row s uses x_s directly.  Bob row t uses y_t with every even
    component (1-based: c_2, c_4, ...) negated, compensating the
    transpose in <Psi| A (x) B |Psi> = tr(A B^T) / 2^L.
    """
    d = strategy.d
    width = 2 * qubits_for_dimension(d)
    alice = np.zeros((strategy.x.shape[0], width))
    alice[:, :d] = strategy.x
    bob = np.zeros((strategy.y.shape[0], width))
    bob[:, :d] = strategy.y
    bob[:, 1::2] *= -1.0
    return alice, bob


def rotation_angles(c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Step-1 angles theta_j and step-2 angles phi_j for a coefficient vector.

    c must have even length 2L.  Returns (thetas, phis) with thetas[j-1]
    = theta_j for j = 1..L and phis[j-2] = phi_j for j = 2..L.  atan2
    conventions pin every branch: atan2(0, 0) = 0, and phi_j lies in
    [0, pi/2] because both its arguments are nonnegative.
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 1 or c.size % 2 != 0:
        raise InvalidConfigError(
            f"coefficient vector must have even length, got {c.shape}",
            length=int(c.size),
        )
    pairs = c.reshape(-1, 2)
    thetas = np.arctan2(pairs[:, 1], pairs[:, 0])
    merged = np.hypot(pairs[:, 0], pairs[:, 1])  # c'_j >= 0
    squares = merged**2
    length = merged.size
    phis = np.zeros(max(length - 1, 0))
    tail = 0.0
    for j in range(length, 1, -1):  # descending, matching emission order
        tail += squares[j - 1]
        phis[j - 2] = math.atan2(math.sqrt(tail), merged[j - 2])
    return thetas, phis


def measurement_gates(c: np.ndarray, offset: int) -> tuple[Gate, ...]:
    """Gate list measuring sum_j c_j T_j on a register starting at offset.

    Emission order: step-1 RZ(-theta_j) on every qubit, step-2 blocks for
    j = L..2 (each S_dagger on j-1, CNOT j->j-1, H, RZ(phi_j), H, CNOT,
    S on j-1), then the H of the X-basis readout of the first qubit.
    """
    thetas, phis = rotation_angles(c)
    length = thetas.size
    gates: list[Gate] = []
    for j in range(length):
        gates.append(Gate("RZ", (offset + j,), -float(thetas[j])))
    for j in range(length, 1, -1):  # 1-based qubit pair (j, j-1)
        hi = offset + j - 1
        lo = offset + j - 2
        gates.extend(
            [
                Gate("S_dagger", (lo,)),
                Gate("CNOT", (hi, lo)),
                Gate("H", (hi,)),
                Gate("RZ", (hi,), float(phis[j - 2])),
                Gate("H", (hi,)),
                Gate("CNOT", (hi, lo)),
                Gate("S", (lo,)),
            ]
        )
    gates.append(Gate("H", (offset,)))
    return tuple(gates)


def prep_gates(qubits_per_player: int) -> tuple[Gate, ...]:
    """Prepare 2^{-L/2} sum_i |i>|i>: H on each Alice qubit, CNOT across."""
    gates: list[Gate] = []
    for i in range(qubits_per_player):
        gates.append(Gate("H", (i,)))
    for i in range(qubits_per_player):
        gates.append(Gate("CNOT", (i, qubits_per_player + i)))
    return tuple(gates)


def build_circuit(
    strategy: HyperbitStrategy,
    row_labels: tuple[str, ...] | None = None,
    col_labels: tuple[str, ...] | None = None,
) -> CircuitSpec:
    """Compile a hyperbit strategy into per-card measurement circuits.

    Bob's default columns (gamma_t != 0) get no circuit, only an entry in
    defaults.  A strategy with d = 0 yields defaults alone.
    """
    m = strategy.x.shape[0]
    n = strategy.y.shape[0]
    rows = tuple(row_labels) if row_labels else tuple(f"s{i}" for i in range(m))
    cols = tuple(col_labels) if col_labels else tuple(f"t{i}" for i in range(n))
    if len(rows) != m or len(cols) != n:
        raise InvalidConfigError(
            "label counts do not match strategy dimensions",
            rows=len(rows),
            cols=len(cols),
            m=m,
            n=n,
        )
    defaults = {
        cols[t]: int(g) for t, g in enumerate(strategy.gamma) if g != 0
    }
    if strategy.d == 0:
        return CircuitSpec(0, (), {}, {}, defaults)
    qubits = qubits_for_dimension(strategy.d)
    alice_c, bob_c = measurement_coefficients(strategy)
    alice = {rows[s]: measurement_gates(alice_c[s], 0) for s in range(m)}
    bob = {
        cols[t]: measurement_gates(bob_c[t], qubits)
        for t, g in enumerate(strategy.gamma)
        if g == 0
    }
    return CircuitSpec(qubits, prep_gates(qubits), alice, bob, defaults)

"""Tests for hbg.sim — statevector engine and strategy verification.

Operator ground truth: the 2L words T_1 = X_1, T_2 = Y_1, T_3 = X_2 Z_1,
T_4 = Y_2 Z_1, ... pairwise anticommute and square to the identity, so
for any unit coefficient vector c the observable A = sum c_j T_j also
squares to the identity.  The compiled measurement network G must satisfy
G^dagger Z_first G = A, which is checked densely for d <= 6 (L <= 3).

Correlation ground truth: on the shared state 2^{-L/2} sum |i>|i>,
measuring A(x) on Alice and B(y) on Bob (even components of y negated)
multiplies out to exactly x . y.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from hbg.analytic32 import optimal_vectors
from hbg.circuits import (
    Gate,
    build_circuit,
    measurement_gates,
    prep_gates,
    qubits_for_dimension,
)
from hbg.errors import DimensionMismatchError, InvalidConfigError
from hbg.game import GameMatrix
from hbg.hyperbit import HyperbitStrategy, solve_hyperbit, strategy_from_solution
from hbg.sim import (
    MAX_QUBITS,
    apply_circuit,
    apply_gate,
    coefficient_operator,
    expectation_zz,
    pauli_string,
    prepared_state,
    sample_correlation,
    tsirelson_operators,
    verify_strategy,
    zero_state,
)

CANONICAL_UNIT = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]])


def _dense_unitary(gates: tuple[Gate, ...], num_qubits: int) -> np.ndarray:
    """Build the matrix of a gate list column by column."""
    dim = 2**num_qubits
    u = np.zeros((dim, dim), dtype=complex)
    for basis in range(dim):
        state = np.zeros(dim, dtype=complex)
        state[basis] = 1.0
        for gate in gates:
            state = apply_gate(state, gate)
        u[:, basis] = state
    return u


# ─── Gate application ─────────────────────────────────────────────────────────


class TestApplyGate:
    def test_hadamard_on_zero(self):
        state = apply_gate(zero_state(1), Gate("H", (0,)))
        assert np.allclose(state, [1 / math.sqrt(2)] * 2)

    def test_x_flips(self):
        state = apply_gate(zero_state(1), Gate("X", (0,)))
        assert state.tolist() == [0.0, 1.0]

    def test_cnot_entangles_lsb_control(self):
        # |10> (qubit 0 = 0, qubit 1 = 1) with control 1 -> target 0 flips.
        state = np.zeros(4, dtype=complex)
        state[2] = 1.0  # binary 10
        out = apply_gate(state, Gate("CNOT", (1, 0)))
        assert out[3] == 1.0 and np.count_nonzero(out) == 1

    def test_cnot_idle_when_control_clear(self):
        state = np.zeros(4, dtype=complex)
        state[1] = 1.0  # binary 01: qubit 0 set, qubit 1 clear
        out = apply_gate(state, Gate("CNOT", (1, 0)))
        assert np.array_equal(out, state)

    def test_rz_phases(self):
        plus = apply_gate(zero_state(1), Gate("H", (0,)))
        rotated = apply_gate(plus, Gate("RZ", (0,), math.pi))
        # diag(e^{-i pi/2}, e^{i pi/2}) |+> = (-i|0> + i|1>)/sqrt 2
        assert np.allclose(rotated, np.array([-1j, 1j]) / math.sqrt(2))

    def test_s_gates_are_inverses(self):
        state = apply_gate(zero_state(2), Gate("H", (1,)))
        back = apply_gate(apply_gate(state, Gate("S", (1,))), Gate("S_dagger", (1,)))
        assert np.allclose(back, state, atol=1e-15)

    def test_out_of_range_qubit_rejected(self):
        with pytest.raises(DimensionMismatchError):
            apply_gate(zero_state(1), Gate("H", (1,)))

    def test_input_state_not_modified(self):
        state = zero_state(1)
        apply_gate(state, Gate("X", (0,)))
        assert state.tolist() == [1.0, 0.0]

    def test_zero_state_bounds(self):
        with pytest.raises(InvalidConfigError):
            zero_state(0)
        with pytest.raises(InvalidConfigError):
            zero_state(MAX_QUBITS + 1)

    def test_norm_drift_detected(self):
        squashed = zero_state(1) * 0.5
        with pytest.raises(DimensionMismatchError):
            apply_circuit(squashed, (Gate("H", (0,)),))


# ─── Pauli words and anticommutation ──────────────────────────────────────────


class TestOperators:
    def test_pauli_string_qubit_order(self):
        # labels[i] acts on qubit i (LSB): "XI" is X on qubit 0.
        x0 = pauli_string("XI")
        state = np.zeros(4, dtype=complex)
        state[0] = 1.0
        assert np.allclose(x0 @ state, np.eye(4)[1])

    def test_tsirelson_count_and_involution(self):
        for num_qubits in (1, 2, 3):
            ops = tsirelson_operators(num_qubits)
            assert len(ops) == 2 * num_qubits
            dim = 2**num_qubits
            for op in ops:
                assert np.allclose(op @ op, np.eye(dim), atol=1e-14)
                assert np.allclose(op, op.conj().T, atol=1e-14)

    def test_tsirelson_pairwise_anticommute(self):
        ops = tsirelson_operators(3)
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                anti = ops[i] @ ops[j] + ops[j] @ ops[i]
                assert np.allclose(anti, 0.0, atol=1e-14), (
                    f"T_{i+1} and T_{j+1} fail to anticommute"
                )

    def test_unit_coefficient_operator_squares_to_identity(self):
        rng = np.random.default_rng(61)
        for width in (2, 4, 6):
            c = rng.normal(size=width)
            c /= np.linalg.norm(c)
            a = coefficient_operator(c)
            dim = a.shape[0]
            assert np.allclose(a @ a, np.eye(dim), atol=1e-12)

    def test_measurement_network_measures_the_operator(self):
        """G^dagger Z_first G must equal sum c_j T_j for random unit c."""
        rng = np.random.default_rng(67)
        for width in (2, 4, 6):
            num_qubits = qubits_for_dimension(width)
            z_first = pauli_string("Z" + "I" * (num_qubits - 1))
            for _ in range(5):
                c = rng.normal(size=width)
                c /= np.linalg.norm(c)
                u = _dense_unitary(measurement_gates(c, 0), num_qubits)
                conjugated = u.conj().T @ z_first @ u
                target = coefficient_operator(c)
                err = float(np.max(np.abs(conjugated - target)))
                assert err <= 1e-9, (
                    f"width {width}: network deviates from operator by {err:.2e}"
                )


# ─── Prepared state and correlations ──────────────────────────────────────────


class TestPreparedState:
    def test_amplitudes(self):
        state = prepared_state(2)
        expected = np.zeros(16, dtype=complex)
        for i in range(4):
            expected[i * 4 + i] = 0.5
        assert np.allclose(state, expected)

    def test_prep_gates_reach_it(self):
        for num_qubits in (1, 2, 3):
            state = apply_circuit(zero_state(2 * num_qubits), prep_gates(num_qubits))
            assert np.allclose(state, prepared_state(num_qubits), atol=1e-12)

    def test_expectation_zz_on_product_states(self):
        state = np.zeros(4, dtype=complex)
        state[0] = 1.0  # |00>
        assert expectation_zz(state, 0, 1) == 1.0
        state = np.zeros(4, dtype=complex)
        state[1] = 1.0  # |01>: qubits disagree
        assert expectation_zz(state, 0, 1) == -1.0

    def test_correlation_equals_inner_product(self):
        """Analytic vectors at overlap z* = 3/5 must reproduce S = x . y
        through the full prep/measure pipeline."""
        game = GameMatrix(CANONICAL_UNIT)
        x, y = optimal_vectors(game, 0.6)
        strategy = HyperbitStrategy(gamma=(0, 0), x=x, y=y, d=2)
        report = verify_strategy(strategy, build_circuit(strategy), tolerance=1e-9)
        assert report.passed, f"max deviation {report.max_deviation:.2e}"
        assert len(report.entries) == 6
        for entry in report.entries:
            assert entry.kind == "correlation"


# ─── Strategy verification ────────────────────────────────────────────────────


class TestVerifyStrategy:
    def test_solved_canonical_game_verifies(self):
        sol = solve_hyperbit(GameMatrix(CANONICAL_UNIT), seed=0)
        strategy = strategy_from_solution(sol)
        report = verify_strategy(strategy, build_circuit(strategy))
        assert report.passed
        assert report.max_deviation <= 1e-9

    def test_default_entries_reported(self):
        sol = solve_hyperbit(GameMatrix(np.array([[5.0, 1.0], [5.0, -1.0]])), seed=0)
        strategy = strategy_from_solution(sol)
        report = verify_strategy(strategy, build_circuit(strategy))
        assert report.passed
        kinds = sorted(e.kind for e in report.entries)
        assert kinds == ["correlation", "correlation", "default"]
        default = next(e for e in report.entries if e.kind == "default")
        assert default.row == "*"
        assert default.expected == 1.0 and default.simulated == 1.0

    def test_defaults_only_strategy(self):
        strategy = HyperbitStrategy(
            gamma=(1, -1), x=np.zeros((2, 0)), y=np.zeros((2, 0)), d=0
        )
        report = verify_strategy(strategy, build_circuit(strategy))
        assert report.passed
        assert [e.kind for e in report.entries] == ["default", "default"]

    def test_too_wide_circuit_rejected(self):
        from hbg.circuits import CircuitSpec

        wide = CircuitSpec(13, (), {}, {}, {})
        strategy = HyperbitStrategy(
            gamma=(), x=np.zeros((0, 26)), y=np.zeros((0, 26)), d=26
        )
        with pytest.raises(InvalidConfigError):
            verify_strategy(strategy, wide)

    def test_report_json_shape(self):
        sol = solve_hyperbit(GameMatrix(CANONICAL_UNIT), seed=0)
        strategy = strategy_from_solution(sol)
        payload = verify_strategy(strategy, build_circuit(strategy)).to_json()
        assert payload["passed"] is True
        assert payload["tolerance"] == 1e-9
        assert len(payload["entries"]) == 6
        assert {"row", "col", "kind", "expected", "simulated", "deviation"} <= set(
            payload["entries"][0]
        )


# ─── Sampling ─────────────────────────────────────────────────────────────────


class TestSampleCorrelation:
    def test_estimate_within_five_sigma(self):
        game = GameMatrix(CANONICAL_UNIT)
        sol = solve_hyperbit(game, seed=0)
        strategy = strategy_from_solution(sol)
        circuit = build_circuit(strategy)
        shots = 20_000
        exact = float(strategy.x[0] @ strategy.y[0])
        estimate = sample_correlation(strategy, circuit, "s0", "t0", shots, seed=1)
        sigma = math.sqrt(max(1.0 - exact * exact, 1e-12) / shots)
        assert abs(estimate - exact) <= 5.0 * sigma + 1e-12, (
            f"estimate {estimate} vs exact {exact} (sigma {sigma:.4f})"
        )

    def test_seeded_estimates_reproduce(self):
        game = GameMatrix(CANONICAL_UNIT)
        strategy = strategy_from_solution(solve_hyperbit(game, seed=0))
        circuit = build_circuit(strategy)
        a = sample_correlation(strategy, circuit, "s1", "t1", 500, seed=9)
        b = sample_correlation(strategy, circuit, "s1", "t1", 500, seed=9)
        assert a == b

    def test_positive_shots_required(self):
        game = GameMatrix(CANONICAL_UNIT)
        strategy = strategy_from_solution(solve_hyperbit(game, seed=0))
        circuit = build_circuit(strategy)
        with pytest.raises(InvalidConfigError):
            sample_correlation(strategy, circuit, "s0", "t0", 0)

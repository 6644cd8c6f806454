"""Hyperbit games: solvers, circuits, and a cooperative blackjack model.

A two-player eavesdropping game is a coefficient matrix C; the value of
a strategy matrix S with entries in [-1, 1] is the inner product
<C, S>.  This package solves such games under three resource regimes
(unlimited communication, one classical bit, one hyperbit — a bit plus
shared entanglement), compiles optimal hyperbit strategies into
simulable quantum circuits, builds the game matrices arising from a
cooperative blackjack round, and searches shoe configurations for
entanglement advantages.
"""

from __future__ import annotations

from .analytic32 import ThreeTwoAnalysis, f_and_derivative, optimal_vectors, solve_3x2
from .blackjack import (
    CARD_PROB,
    CARD_TYPES,
    HandState,
    PayoffTable,
    RoundConfig,
    build_game,
    continuation_action,
    continuation_value,
    dealer_distribution,
    hand_from,
    round_payoffs,
    stand_value,
)
from .circuits import CircuitSpec, Gate, build_circuit, measurement_gates
from .classical import solve_classical, solve_unlimited
from .errors import (
    CatalogError,
    DimensionMismatchError,
    EnumerationCapError,
    ExtractionError,
    HbgError,
    InvalidConfigError,
    InvalidGameError,
    NotCanonicalizableError,
    TrivialGameError,
)
from .explore import (
    AdvantageCatalog,
    AdvantageRecord,
    Boundary,
    RegimeValues,
    SweepPoint,
    SweepSpec,
    detect_boundaries,
    expected_advantage,
    search_shoes,
    shoe_weight,
    sweep,
    three_regime_values,
)
from .game import (
    GameMatrix,
    GameTransform,
    canonicalize_3x2,
    distinct_sign_rows,
    game_value,
    reduce_homogeneous_columns,
    unlimited_value,
)
from .hyperbit import (
    HyperbitStrategy,
    extract_vectors,
    pivoted_cholesky,
    solve_hyperbit,
    solve_subproblem,
    strategy_from_solution,
)
from .sim import (
    VerificationReport,
    apply_circuit,
    apply_gate,
    prepared_state,
    sample_correlation,
    verify_strategy,
    zero_state,
)
from .solutions import StrategySolution

__version__ = "0.1.0"

__all__ = [
    "AdvantageCatalog",
    "AdvantageRecord",
    "Boundary",
    "CARD_PROB",
    "CARD_TYPES",
    "CatalogError",
    "CircuitSpec",
    "DimensionMismatchError",
    "EnumerationCapError",
    "ExtractionError",
    "Gate",
    "GameMatrix",
    "GameTransform",
    "HandState",
    "HbgError",
    "HyperbitStrategy",
    "InvalidConfigError",
    "InvalidGameError",
    "NotCanonicalizableError",
    "PayoffTable",
    "RegimeValues",
    "RoundConfig",
    "StrategySolution",
    "SweepPoint",
    "SweepSpec",
    "ThreeTwoAnalysis",
    "TrivialGameError",
    "VerificationReport",
    "apply_circuit",
    "apply_gate",
    "build_circuit",
    "build_game",
    "canonicalize_3x2",
    "continuation_action",
    "continuation_value",
    "dealer_distribution",
    "detect_boundaries",
    "distinct_sign_rows",
    "expected_advantage",
    "extract_vectors",
    "f_and_derivative",
    "game_value",
    "hand_from",
    "measurement_gates",
    "optimal_vectors",
    "pivoted_cholesky",
    "prepared_state",
    "reduce_homogeneous_columns",
    "round_payoffs",
    "sample_correlation",
    "search_shoes",
    "shoe_weight",
    "solve_3x2",
    "solve_classical",
    "solve_hyperbit",
    "solve_subproblem",
    "solve_unlimited",
    "stand_value",
    "strategy_from_solution",
    "sweep",
    "three_regime_values",
    "unlimited_value",
    "verify_strategy",
    "zero_state",
]

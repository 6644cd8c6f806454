"""Shared corpus builders and the acceptance-line reporter.

All randomness is seeded through np.random.default_rng so every corpus
is reproducible; tests state their seed at the call site.
"""

from __future__ import annotations

import sys

import numpy as np

from hbg.game import CANONICAL_SIGNS, GameMatrix


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one [PASS]/[FAIL] line per acceptance criterion after the run."""
    module = sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

# ─── Corpus builders ──────────────────────────────────────────────────────────


def dyadic_game(rng: np.random.Generator, m: int, n: int) -> GameMatrix:
    """Random game with entries on the grid Z/1024 in [-1, 1].

    Dyadic entries with at most ten fraction bits make every candidate
    strategy value exactly representable in float64 (sums of at most a
    few dozen terms never need more than 53 mantissa bits), so exact
    equality between two differently-ordered computations of the same
    optimum is meaningful.  Zero entries stay possible, exercising the
    sgn(0) -> +1 convention.
    """
    return GameMatrix(rng.integers(-1024, 1025, size=(m, n)) / 1024.0)


def random_canonical_3x2(rng: np.random.Generator) -> GameMatrix:
    """Random canonical 3x2 game: magnitudes in [0.05, 4], fixed sign pattern.

    The magnitude floor keeps entries safely nonzero so the game stays
    canonical under float arithmetic.
    """
    magnitudes = rng.uniform(0.05, 4.0, size=(3, 2))
    return GameMatrix(magnitudes * CANONICAL_SIGNS)

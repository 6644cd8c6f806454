"""Coefficient-matrix games for two cooperating parties.

A game is an M x N real matrix C.  Row s is the card/state seen by the
first party (Alice), column t the one seen by the second (Bob).  A joint
strategy is summarised by a matrix S with entries in [-1, 1], and the
figure of merit is the bilinear value

    I(S) = sum_st C[s, t] * S[s, t].

This module owns the matrix types, the value functional and the two
structural transforms used by every solver:

* dropping sign-homogeneous columns (Bob answers them with a fixed
  default, contributing sum_s |C[s, t]| regardless of regime), and
* permuting/negating a 3x2 game into the canonical sign pattern
  [[+, +], [+, -], [-, -]] used by the closed-form analysis.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidGameError,
    NotCanonicalizableError,
    TrivialGameError,
)

# Sign pattern every canonical 3x2 game must match.
CANONICAL_SIGNS = np.array([[1, 1], [1, -1], [-1, -1]], dtype=int)


def _default_labels(prefix: str, count: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(count))


@dataclass(frozen=True)
class GameMatrix:
    """Coefficient matrix C plus row/column labels.

    c           -- float64 array of shape (M, N), all entries finite
    row_labels  -- one label per row (Alice's possible cards/states)
    col_labels  -- one label per column (Bob's possible cards/states)
    """

    c: np.ndarray
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 2:
            raise InvalidGameError(
                f"game matrix must be 2-D, got {c.ndim}-D", shape=list(c.shape)
            )
        if not np.all(np.isfinite(c)):
            raise InvalidGameError("game matrix entries must be finite")
        object.__setattr__(self, "c", c)
        m, n = c.shape
        rows = tuple(self.row_labels) or _default_labels("s", m)
        cols = tuple(self.col_labels) or _default_labels("t", n)
        if len(rows) != m or len(cols) != n:
            raise InvalidGameError(
                "label counts must match matrix shape",
                shape=[m, n],
                row_labels=len(rows),
                col_labels=len(cols),
            )
        object.__setattr__(self, "row_labels", rows)
        object.__setattr__(self, "col_labels", cols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.c.shape  # type: ignore[return-value]

    def sign_matrix(self) -> np.ndarray:
        """Entrywise sign in {-1, 0, +1} as an integer matrix."""
        return np.sign(self.c).astype(int)

    def to_json(self) -> dict:
        return {
            "C": self.c.tolist(),
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
        }

    @staticmethod
    def from_json(obj: dict) -> "GameMatrix":
        if "C" not in obj:
            raise InvalidGameError("game JSON must contain key 'C'")
        rows = obj.get("row_labels") or ()
        cols = obj.get("col_labels") or ()
        c = obj["C"]
        lengths = {len(r) for r in c} if isinstance(c, list) else set()
        if isinstance(c, list) and len(lengths) > 1:
            raise InvalidGameError(
                "game matrix rows have unequal lengths", lengths=sorted(lengths)
            )
        return GameMatrix(np.asarray(c, dtype=float), tuple(rows), tuple(cols))

    @staticmethod
    def loads(text: str) -> "GameMatrix":
        return GameMatrix.from_json(json.loads(text))


def as_strategy(s: "np.ndarray | Sequence", shape: tuple[int, int] | None = None) -> np.ndarray:
    """Validate a strategy matrix: entries in [-1, 1] (1e-9 slack, then clipped)."""
    arr = np.asarray(s, dtype=float)
    if shape is not None and arr.shape != shape:
        raise DimensionMismatchError(
            f"strategy shape {arr.shape} does not match game shape {shape}",
            strategy_shape=list(arr.shape),
            game_shape=list(shape),
        )
    if arr.size and np.max(np.abs(arr)) > 1.0 + 1e-9:
        raise InvalidGameError(
            "strategy entries must lie in [-1, 1]",
            max_abs=float(np.max(np.abs(arr))),
        )
    return np.clip(arr, -1.0, 1.0)


def game_value(game: GameMatrix, s: "np.ndarray | Sequence") -> float:
    """I(S) = <C, S>, the expected payoff up to the model's fixed scaling."""
    arr = as_strategy(s, game.shape)
    return float(np.sum(game.c * arr))


def unlimited_value(game: GameMatrix) -> float:
    """sum |C|, attained by S = sgn(C) when communication is unrestricted."""
    return float(np.sum(np.abs(game.c)))


# ─── Structural transforms ──────────────────────────────────────────────────


@dataclass(frozen=True)
class DroppedColumn:
    """A sign-homogeneous column removed from the game.

    index        -- column position in the original game
    default_sign -- the fixed answer (+1/-1) Bob gives for it
    contribution -- sum_s |C[s, index]|, added back to any regime's value
    """

    index: int
    default_sign: int
    contribution: float
    label: str = ""


@dataclass(frozen=True)
class GameTransform:
    """Row/column permutation, column negations and dropped columns.

    Maps an original game onto a transformed one via
        C'[i, j] = col_negations[j] * C[row_permutation[i], col_permutation[j]]
    where col_permutation indexes the *kept* columns of the original game.
    """

    row_permutation: tuple[int, ...]
    col_permutation: tuple[int, ...]
    col_negations: tuple[int, ...]
    dropped_columns: tuple[DroppedColumn, ...] = ()
    original_shape: tuple[int, int] = (0, 0)

    @property
    def dropped_contribution(self) -> float:
        return float(sum(d.contribution for d in self.dropped_columns))

    def apply_to_matrix(self, arr: np.ndarray) -> np.ndarray:
        """Forward map original -> transformed (restricting to kept columns)."""
        arr = np.asarray(arr, dtype=float)
        if arr.shape != self.original_shape:
            raise DimensionMismatchError(
                f"matrix shape {arr.shape} does not match transform domain {self.original_shape}",
                matrix_shape=list(arr.shape),
                domain_shape=list(self.original_shape),
            )
        out = arr[np.ix_(self.row_permutation, self.col_permutation)]
        return out * np.asarray(self.col_negations, dtype=float)

    def invert_matrix(self, arr: np.ndarray) -> np.ndarray:
        """Inverse of apply_to_matrix on the kept columns; dropped columns zero."""
        arr = np.asarray(arr, dtype=float)
        m, n = self.original_shape
        out = np.zeros((m, n))
        undone = arr * np.asarray(self.col_negations, dtype=float)
        for i, si in enumerate(self.row_permutation):
            for j, tj in enumerate(self.col_permutation):
                out[si, tj] = undone[i, j]
        return out

    def embed_strategy(self, s_transformed: np.ndarray) -> np.ndarray:
        """Map a strategy on the transformed game back onto the original game.

        Dropped columns are filled with their recorded default sign.
        """
        out = self.invert_matrix(s_transformed)
        for d in self.dropped_columns:
            out[:, d.index] = float(d.default_sign)
        return out

    def reconstituted_value(self, transformed_value: float) -> float:
        """Full-game value = transformed-game value + dropped contributions."""
        return float(transformed_value) + self.dropped_contribution


def _identity_transform(game: GameMatrix) -> GameTransform:
    m, n = game.shape
    return GameTransform(
        row_permutation=tuple(range(m)),
        col_permutation=tuple(range(n)),
        col_negations=(1,) * n,
        dropped_columns=(),
        original_shape=(m, n),
    )


def reduce_homogeneous_columns(game: GameMatrix) -> tuple[GameMatrix, GameTransform]:
    """Split off columns whose nonzero entries all share one sign.

    On such a column Bob's best answer is that shared sign regardless of
    regime or of Alice's card, so the column contributes sum_s |C[s, t]|
    to every regime's optimal value.  The returned transform records the
    dropped columns (with their default sign and contribution) so values
    and strategies on the reduced game can be reconstituted.
    """
    c = game.c
    m, n = c.shape
    kept: list[int] = []
    dropped: list[DroppedColumn] = []
    for t in range(n):
        col = c[:, t]
        has_pos = bool(np.any(col > 0))
        has_neg = bool(np.any(col < 0))
        if has_pos and has_neg:
            kept.append(t)
        else:
            # All-zero column defaults to +1 (contributes nothing).
            sign = 1 if has_pos or not has_neg else -1
            dropped.append(
                DroppedColumn(
                    index=t,
                    default_sign=sign,
                    contribution=float(np.sum(np.abs(col))),
                    label=game.col_labels[t],
                )
            )
    reduced = GameMatrix(
        c[:, kept].copy(),
        game.row_labels,
        tuple(game.col_labels[t] for t in kept),
    )
    transform = GameTransform(
        row_permutation=tuple(range(m)),
        col_permutation=tuple(kept),
        col_negations=(1,) * len(kept),
        dropped_columns=tuple(dropped),
        original_shape=(m, n),
    )
    return reduced, transform


def canonicalize_3x2(game: GameMatrix) -> tuple[GameMatrix, GameTransform]:
    """Permute rows/columns and negate columns to the canonical sign pattern.

    The target pattern is [[+, +], [+, -], [-, -]].  Search order is fixed
    (row permutations lexicographically, then column permutations, then
    column negations) and the first match wins, so the transform is
    deterministic.  Raises TrivialGameError when the sign matrix has fewer
    than three distinct rows (classical already matches unlimited there),
    and NotCanonicalizableError when zero entries block the pattern.
    """
    m, n = game.shape
    if (m, n) != (3, 2):
        raise InvalidGameError(
            f"canonicalization expects a 3x2 game, got {m}x{n}", shape=[m, n]
        )
    signs = game.sign_matrix()
    if np.any(signs == 0):
        zero_at = np.argwhere(signs == 0)[0]
        raise NotCanonicalizableError(
            "zero entry blocks canonical sign pattern",
            row=int(zero_at[0]),
            col=int(zero_at[1]),
        )
    if len({tuple(row) for row in signs}) < 3:
        raise TrivialGameError(
            "fewer than three distinct sign rows: classical matches unlimited"
        )
    for row_perm in itertools.permutations(range(3)):
        for col_perm in itertools.permutations(range(2)):
            for negs in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                candidate = signs[np.ix_(row_perm, col_perm)] * np.array(negs)
                if np.array_equal(candidate, CANONICAL_SIGNS):
                    transform = GameTransform(
                        row_permutation=row_perm,
                        col_permutation=col_perm,
                        col_negations=negs,
                        dropped_columns=(),
                        original_shape=(3, 2),
                    )
                    canonical = GameMatrix(
                        transform.apply_to_matrix(game.c),
                        tuple(game.row_labels[i] for i in row_perm),
                        tuple(game.col_labels[j] for j in col_perm),
                    )
                    return canonical, transform
    # Three distinct zero-free sign rows are always canonicalizable; reaching
    # this point means the pattern repeats a row under negation.
    raise NotCanonicalizableError(
        "sign pattern not reachable from the canonical form",
        signs=signs.tolist(),
    )


def distinct_sign_rows(game: GameMatrix) -> int:
    """Number of distinct rows of the sign matrix (zeros counted as written)."""
    return len({tuple(row) for row in game.sign_matrix()})

"""Tests for hbg.game — matrices, the value functional, and transforms.

Ground truth used throughout: for the canonical-sign 3x2 game with unit
magnitudes C = [[1,1],[1,-1],[-1,-1]], sum|C| = 6 and the sign matrix has
three distinct rows.  Transform correctness is checked by the invariant

    game_value(original, embed_strategy(S')) ==
        value'(transformed game, S') + dropped contributions

on random strategies, which exercises permutations, negations and
dropped-column defaults together.
"""

from __future__ import annotations

import numpy as np
import pytest

from hbg.errors import (
    DimensionMismatchError,
    InvalidGameError,
    NotCanonicalizableError,
    TrivialGameError,
)
from hbg.game import (
    CANONICAL_SIGNS,
    GameMatrix,
    as_strategy,
    canonicalize_3x2,
    distinct_sign_rows,
    game_value,
    reduce_homogeneous_columns,
    unlimited_value,
)

# ─── GameMatrix construction and serialization ───────────────────────────────


class TestGameMatrix:
    def test_default_labels(self):
        g = GameMatrix(np.zeros((2, 3)))
        assert g.row_labels == ("s0", "s1")
        assert g.col_labels == ("t0", "t1", "t2")

    def test_explicit_labels_kept(self):
        g = GameMatrix(np.zeros((2, 2)), ("A", "T"), ("A", "T"))
        assert g.row_labels == ("A", "T")
        assert g.shape == (2, 2)

    def test_rejects_non_2d(self):
        with pytest.raises(InvalidGameError):
            GameMatrix(np.zeros(3))

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidGameError):
            GameMatrix(np.array([[1.0, np.nan]]))
        with pytest.raises(InvalidGameError):
            GameMatrix(np.array([[1.0, np.inf]]))

    def test_rejects_label_count_mismatch(self):
        with pytest.raises(InvalidGameError):
            GameMatrix(np.zeros((2, 2)), row_labels=("only-one",))

    def test_sign_matrix_zero_stays_zero(self):
        g = GameMatrix(np.array([[2.5, 0.0], [-0.1, 7.0]]))
        assert g.sign_matrix().tolist() == [[1, 0], [-1, 1]]

    def test_json_round_trip(self):
        g = GameMatrix(np.array([[1.0, -0.5]]), ("A",), ("2", "T"))
        again = GameMatrix.from_json(g.to_json())
        assert np.array_equal(again.c, g.c)
        assert again.row_labels == g.row_labels
        assert again.col_labels == g.col_labels

    def test_loads_parses_text(self):
        g = GameMatrix.loads('{"C": [[1, 2], [3, 4]]}')
        assert g.c.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_from_json_requires_c(self):
        with pytest.raises(InvalidGameError):
            GameMatrix.from_json({"rows": 2})

    def test_from_json_rejects_ragged_rows(self):
        with pytest.raises(InvalidGameError):
            GameMatrix.from_json({"C": [[1, 2], [3]]})


# ─── Strategies and the value functional ─────────────────────────────────────


class TestValueFunctional:
    def test_as_strategy_accepts_boundary(self):
        s = as_strategy([[1.0, -1.0]])
        assert s.tolist() == [[1.0, -1.0]]

    def test_as_strategy_clips_roundoff(self):
        s = as_strategy([[1.0 + 1e-12]])
        assert s[0, 0] == 1.0

    def test_as_strategy_rejects_out_of_range(self):
        with pytest.raises(InvalidGameError):
            as_strategy([[1.5]])

    def test_as_strategy_rejects_wrong_shape(self):
        with pytest.raises(DimensionMismatchError):
            as_strategy([[1.0]], shape=(2, 2))

    def test_game_value_is_entrywise_dot(self):
        g = GameMatrix(np.array([[1.0, 2.0], [3.0, 4.0]]))
        s = [[1.0, -1.0], [0.5, 0.0]]
        assert game_value(g, s) == 1.0 - 2.0 + 1.5

    def test_unlimited_value_is_abs_sum(self):
        g = GameMatrix(np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]]))
        assert unlimited_value(g) == 6.0

    def test_unlimited_value_bounds_every_strategy(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            g = GameMatrix(rng.normal(size=(3, 4)))
            s = rng.uniform(-1.0, 1.0, size=(3, 4))
            assert game_value(g, s) <= unlimited_value(g) + 1e-12, (
                f"I(S) = {game_value(g, s)} exceeded sum|C| = {unlimited_value(g)}"
            )


# ─── Homogeneous-column reduction ─────────────────────────────────────────────


class TestReduceHomogeneousColumns:
    """C = [[ 2, -1, 1, 0], [ 1, 3, -1, 0]]: column 0 is all-positive
    (dropped, default +1, contribution 3), column 3 is all-zero (dropped,
    default +1, contribution 0), columns 1 and 2 are mixed (kept)."""

    def setup_method(self):
        self.game = GameMatrix(
            np.array([[2.0, -1.0, 1.0, 0.0], [1.0, 3.0, -1.0, 0.0]]),
            ("a", "b"),
            ("w", "x", "y", "z"),
        )
        self.reduced, self.transform = reduce_homogeneous_columns(self.game)

    def test_kept_columns(self):
        assert self.reduced.c.tolist() == [[-1.0, 1.0], [3.0, -1.0]]
        assert self.reduced.col_labels == ("x", "y")

    def test_dropped_columns(self):
        dropped = {d.index: d for d in self.transform.dropped_columns}
        assert set(dropped) == {0, 3}
        assert dropped[0].default_sign == 1
        assert dropped[0].contribution == 3.0
        assert dropped[0].label == "w"
        assert dropped[3].default_sign == 1  # all-zero column defaults to +1
        assert dropped[3].contribution == 0.0

    def test_negative_column_default(self):
        g = GameMatrix(np.array([[-1.0, 1.0], [-2.0, -1.0]]))
        _, tr = reduce_homogeneous_columns(g)
        assert tr.dropped_columns[0].default_sign == -1
        assert tr.dropped_columns[0].contribution == 3.0

    def test_reconstituted_value(self):
        assert self.transform.reconstituted_value(10.0) == 13.0

    def test_embed_strategy_fills_defaults(self):
        s_reduced = np.array([[0.5, -0.5], [1.0, 0.0]])
        full = self.transform.embed_strategy(s_reduced)
        assert full[:, 0].tolist() == [1.0, 1.0]
        assert full[:, 3].tolist() == [1.0, 1.0]
        assert full[:, 1].tolist() == [0.5, 1.0]
        assert full[:, 2].tolist() == [-0.5, 0.0]

    def test_value_identity_on_random_strategies(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            s_reduced = rng.uniform(-1.0, 1.0, size=self.reduced.shape)
            lhs = game_value(self.game, self.transform.embed_strategy(s_reduced))
            rhs = self.transform.reconstituted_value(
                game_value(self.reduced, s_reduced)
            )
            assert abs(lhs - rhs) < 1e-12, f"embedding broke the value: {lhs} vs {rhs}"

    def test_all_mixed_game_unchanged(self):
        g = GameMatrix(np.array([[1.0, -1.0], [-1.0, 1.0]]))
        reduced, tr = reduce_homogeneous_columns(g)
        assert reduced.shape == (2, 2)
        assert tr.dropped_columns == ()


# ─── 3x2 canonicalization ─────────────────────────────────────────────────────


class TestCanonicalize3x2:
    def test_canonical_game_maps_to_itself(self):
        g = GameMatrix(np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]]))
        canonical, tr = canonicalize_3x2(g)
        assert np.array_equal(canonical.sign_matrix(), CANONICAL_SIGNS)
        assert np.array_equal(canonical.c, g.c)
        assert tr.row_permutation == (0, 1, 2)
        assert tr.col_permutation == (0, 1)
        assert tr.col_negations == (1, 1)

    def test_wrong_shape_rejected(self):
        with pytest.raises(InvalidGameError):
            canonicalize_3x2(GameMatrix(np.ones((2, 2))))

    def test_zero_entry_rejected(self):
        g = GameMatrix(np.array([[1.0, 0.0], [1.0, -1.0], [-1.0, -1.0]]))
        with pytest.raises(NotCanonicalizableError):
            canonicalize_3x2(g)

    def test_two_distinct_rows_is_trivial(self):
        g = GameMatrix(np.array([[1.0, 1.0], [1.0, 1.0], [-1.0, -1.0]]))
        with pytest.raises(TrivialGameError):
            canonicalize_3x2(g)

    def test_every_three_row_pattern_canonicalizes(self):
        """Any zero-free 3x2 sign pattern with 3 distinct rows either
        canonicalizes or (when two rows are negations living in a 2-row
        orbit) raises NotCanonicalizableError; exercised exhaustively."""
        outcomes = {"canonical": 0, "not_canonicalizable": 0}
        for bits in range(64):
            signs = np.array(
                [1 - 2 * ((bits >> i) & 1) for i in range(6)]
            ).reshape(3, 2)
            g = GameMatrix(signs.astype(float))
            if distinct_sign_rows(g) < 3:
                continue
            try:
                canonical, tr = canonicalize_3x2(g)
            except NotCanonicalizableError:
                outcomes["not_canonicalizable"] += 1
                continue
            outcomes["canonical"] += 1
            assert np.array_equal(canonical.sign_matrix(), CANONICAL_SIGNS)
        # 3 distinct rows over {-1, +1}^2 = choosing 3 of 4 patterns
        # (4 ways) x row orders (6) = 24 sign matrices; all must
        # canonicalize because any 3 of the 4 patterns contain a pair
        # {v, -v} to pin the outer rows plus a mixed row in between.
        assert outcomes == {"canonical": 24, "not_canonicalizable": 0}, (
            f"unexpected canonicalization census: {outcomes}"
        )

    def test_value_preserved_through_transform(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            magnitudes = rng.uniform(0.1, 3.0, size=(3, 2))
            perm = rng.permutation(3)
            negs = rng.choice([-1.0, 1.0], size=2)
            c = (magnitudes * CANONICAL_SIGNS)[perm] * negs
            g = GameMatrix(c)
            canonical, tr = canonicalize_3x2(g)
            s_canon = rng.uniform(-1.0, 1.0, size=(3, 2))
            lhs = game_value(g, tr.embed_strategy(s_canon))
            rhs = game_value(canonical, s_canon)
            assert abs(lhs - rhs) < 1e-12, (
                f"canonicalization changed the value: {lhs} vs {rhs}"
            )

    def test_transform_is_deterministic(self):
        g = GameMatrix(np.array([[-2.0, 3.0], [1.0, 1.5], [0.5, -1.0]]))
        first = canonicalize_3x2(g)[1]
        second = canonicalize_3x2(g)[1]
        assert first == second


# ─── Sign-row census ──────────────────────────────────────────────────────────


class TestDistinctSignRows:
    def test_counts_distinct_rows(self):
        g = GameMatrix(np.array([[1.0, 1.0], [1.0, 1.0], [-1.0, 1.0]]))
        assert distinct_sign_rows(g) == 2

    def test_zero_rows_counted_as_written(self):
        g = GameMatrix(np.array([[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]]))
        assert distinct_sign_rows(g) == 2

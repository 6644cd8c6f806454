"""Optimal strategies in the hyperbit (shared entanglement) regime.

A hyperbit strategy has the form

    S[s, t] = gamma_t + x_s . y_t,      |gamma_t| + ||y_t|| <= 1, ||x_s|| <= 1

where gamma_t is Bob's state-independent default for column t.  At an
optimum each gamma_t is either 0 or sgn(sum_s C[s, t]) with ||y_t||
saturating the rest of the budget, so the solver enumerates all 2^N
default patterns and, for the columns left to the vectors, maximizes

    sum_st C'[s, t] x_s . y_t     over unit vectors x_s, y_t.

That inner problem is solved as a low-rank Gram program by block
coordinate ascent: with one family fixed, each vector of the other
family has the closed-form optimum x_s = unit(sum_t C'[s, t] y_t), so
alternating updates increase the objective monotonically.  Rank
min(m, n) suffices for the exact optimum; seeded random restarts guard
against nonglobal fixed points.  Vectors are recovered from the winning
Gram matrix by pivoted Cholesky factorization of the smaller diagonal
block plus the closed-form update for the opposite family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, EnumerationCapError, ExtractionError
from .game import GameMatrix
from .solutions import StrategySolution

# Hard cap on exact default-pattern enumeration (2^20 branches).
MAX_BOB_CARDS = 20

DEFAULT_RESTARTS = 32
DEFAULT_TOL = 1e-10
MAX_ITERATIONS = 10_000
# Extra stationarity requirement at convergence so extracted vectors
# reproduce the Gram matrix well inside the 1e-8 budget.
_MOVE_TOL = 1e-9
_GRAM_ERROR_LIMIT = 1e-8
NEAR_OPTIMAL_TOL = 1e-9


@dataclass(frozen=True)
class GramSolution:
    """Result of one inner vector problem.

    g          -- (m+n) x (m+n) Gram matrix of [x_1..x_m, y_1..y_n]
    objective  -- sum C'[s, t] * x_s . y_t at the solution
    m, n       -- block split of g
    iterations -- sweeps used by the winning restart
    restart    -- index of the winning restart
    zero_directions -- ("x", i) / ("y", j) entries that had a vanishing
                  update direction and were pinned to the first basis vector
    objective_trace -- per-sweep objectives of the winning restart, or None
    """

    g: np.ndarray
    objective: float
    m: int
    n: int
    iterations: int
    restart: int
    zero_directions: tuple[tuple[str, int], ...] = ()
    objective_trace: tuple[float, ...] | None = None


@dataclass(frozen=True)
class HyperbitStrategy:
    """Concrete hyperbit strategy: defaults plus unit vectors.

    gamma -- Bob's defaults, one per column (0 or +-1)
    x     -- Alice's unit vectors as rows, shape (M, d)
    y     -- Bob's vectors as rows, shape (N, d); zero rows on default columns
    d     -- vector dimension, min(M, count of zero entries of gamma)
    """

    gamma: tuple[int, ...]
    x: np.ndarray
    y: np.ndarray
    d: int
    max_gram_error: float = 0.0
    zero_directions: tuple[tuple[str, int], ...] = ()

    def induced_strategy(self) -> np.ndarray:
        """S[s, t] = gamma_t + x_s . y_t, clipped to [-1, 1] against roundoff."""
        s = self.x @ self.y.T + np.asarray(self.gamma, dtype=float)[None, :]
        return np.clip(s, -1.0, 1.0)


def _sign_plus(v: float) -> int:
    return -1 if v < 0 else 1


def enumerate_gammas(game: GameMatrix) -> list[tuple[int, ...]]:
    """All 2^N default patterns: each gamma_t is 0 or sgn(sum_s C[s, t]).

    Zero column sums take default +1.  Patterns are ordered with column 0
    as the most significant digit and 0 before the nonzero value.
    """
    n = game.shape[1]
    if n > MAX_BOB_CARDS:
        raise EnumerationCapError(
            f"default enumeration capped at {MAX_BOB_CARDS} columns, got {n}",
            cols=n,
            cap=MAX_BOB_CARDS,
        )
    signs = [_sign_plus(v) for v in game.c.sum(axis=0)]
    out: list[tuple[int, ...]] = []
    for mask in range(1 << n):
        out.append(
            tuple(
                signs[t] if (mask >> (n - 1 - t)) & 1 else 0
                for t in range(n)
            )
        )
    return out


def _unit_columns(rng: np.random.Generator, d: int, count: int) -> np.ndarray:
    v = rng.standard_normal((d, count))
    norms = np.linalg.norm(v, axis=0)
    norms[norms == 0.0] = 1.0
    return v / norms


def solve_subproblem(
    c_prime: np.ndarray,
    rank_cap: int | None = None,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_iterations: int = MAX_ITERATIONS,
    spawn_prefix: tuple[int, ...] = (),
    record_trace: bool = False,
) -> GramSolution:
    """Maximize sum C'[s, t] x_s . y_t over unit vectors by seeded ascent.

    Restart r draws its start uniformly from the sphere via the stream
    SeedSequence(seed, spawn_key=spawn_prefix + (r,)); sweeps alternate
    the closed-form column updates until the objective gain drops below
    tol and the vectors stop moving.  The best restart's Gram matrix wins;
    ties keep the lowest restart index.

    The returned pair is synchronized for extraction: the family whose
    Gram block is NOT factorized (y when m <= n, x otherwise) is exactly
    the closed-form update of the other, so Cholesky extraction
    reproduces the Gram entries to machine precision even when the
    ascent stopped on the iteration cap.  Updates never decrease the
    objective, so synchronization is free.
    """
    c_prime = np.asarray(c_prime, dtype=float)
    m, n = c_prime.shape
    d = min(m, n)
    if rank_cap is not None:
        if rank_cap < d:
            raise DimensionMismatchError(
                f"rank_cap {rank_cap} below min(m, n) = {d}", rank_cap=rank_cap, need=d
            )
        d = rank_cap
    if m == 0 or n == 0:
        size = m + n
        return GramSolution(np.eye(size), 0.0, m, n, 0, 0)

    best: GramSolution | None = None
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=spawn_prefix + (r,)))
        x = _unit_columns(rng, d, m)
        y = _unit_columns(rng, d, n)
        zero_dirs: list[tuple[str, int]] = []
        trace: list[float] = []
        prev_obj = -math.inf
        iterations = 0
        for iterations in range(1, max_iterations + 1):
            x_old, y_old = x, y
            zero_dirs = []
            v = y @ c_prime.T
            norms = np.linalg.norm(v, axis=0)
            for i in np.flatnonzero(norms == 0.0):
                v[0, i] = 1.0
                zero_dirs.append(("x", int(i)))
            norms[norms == 0.0] = 1.0
            x = v / norms
            w = x @ c_prime
            norms = np.linalg.norm(w, axis=0)
            for j in np.flatnonzero(norms == 0.0):
                w[0, j] = 1.0
                zero_dirs.append(("y", int(j)))
            norms[norms == 0.0] = 1.0
            y = w / norms
            obj = float(np.sum(c_prime * (x.T @ y)))
            if record_trace:
                trace.append(obj)
            moved = max(
                float(np.max(np.abs(x - x_old))) if iterations > 1 else math.inf,
                float(np.max(np.abs(y - y_old))) if iterations > 1 else math.inf,
            )
            if obj - prev_obj < tol and moved < _MOVE_TOL:
                break
            prev_obj = obj
        if m > n:
            # Extraction will factor the Y block and rebuild x from it;
            # make x exactly the update of the final y.
            v = y @ c_prime.T
            norms = np.linalg.norm(v, axis=0)
            for i in np.flatnonzero(norms == 0.0):
                v[0, i] = 1.0
            norms[norms == 0.0] = 1.0
            x = v / norms
        z = np.hstack([x, y])
        candidate = GramSolution(
            g=z.T @ z,
            objective=float(np.sum(c_prime * (x.T @ y))),
            m=m,
            n=n,
            iterations=iterations,
            restart=r,
            zero_directions=tuple(zero_dirs),
            objective_trace=tuple(trace) if record_trace else None,
        )
        if best is None or candidate.objective > best.objective:
            best = candidate
    assert best is not None
    return best


def pivoted_cholesky(a: np.ndarray, pivot_tol: float = 1e-10) -> tuple[np.ndarray, int]:
    """Factor a PSD matrix as A = W W^T with rows of W as vectors.

    Diagonal pivoting; pivots at or below pivot_tol end the factorization,
    so the returned rank can be below the matrix size.  Columns of W past
    the rank are zero.
    """
    a = np.array(a, dtype=float)
    size = a.shape[0]
    perm = list(range(size))
    low = np.zeros((size, size))
    rank = 0
    for k in range(size):
        j = k + int(np.argmax(np.diag(a)[k:]))
        if a[j, j] <= pivot_tol:
            break
        if j != k:
            a[[k, j], :] = a[[j, k], :]
            a[:, [k, j]] = a[:, [j, k]]
            low[[k, j], :k] = low[[j, k], :k]
            perm[k], perm[j] = perm[j], perm[k]
        low[k, k] = math.sqrt(a[k, k])
        if k + 1 < size:
            low[k + 1 :, k] = a[k + 1 :, k] / low[k, k]
            a[k + 1 :, k + 1 :] -= np.outer(low[k + 1 :, k], low[k + 1 :, k])
        rank += 1
    w = np.zeros((size, size))
    for i, pi in enumerate(perm):
        w[pi] = low[i]
    return w, rank


def extract_vectors(
    gram: GramSolution, gamma: tuple[int, ...], game: GameMatrix
) -> HyperbitStrategy:
    """Recover unit vectors of dimension min(m, n) from a Gram solution.

    The smaller diagonal block is factorized by pivoted Cholesky; the
    opposite family is recomputed from the closed-form column update, so
    the pair is exactly stationary.  Rows/columns of the branch matrix
    that are entirely zero leave their vectors unconstrained: those are
    pinned to the first basis vector, flagged, and excluded from the
    reproduction check (their Gram entries are pure gauge).  Raises
    ExtractionError when the remaining vectors fail to reproduce the
    Gram entries to 1e-8.
    """
    c = game.c
    m_full, n_full = c.shape
    kept = [t for t in range(n_full) if gamma[t] == 0]
    if len(gamma) != n_full or gram.m != m_full or gram.n != len(kept):
        raise DimensionMismatchError(
            "gamma/Gram blocks do not match the game",
            game_shape=[m_full, n_full],
            gram_blocks=[gram.m, gram.n],
            zero_gammas=len(kept),
        )
    m, n = gram.m, gram.n
    d = min(m, n)
    branch = c[:, kept] if kept else np.zeros((m, 0))
    pinned_x = [s for s in range(m) if not branch[s].any()]
    pinned_y = [j for j in range(n) if not branch[:, j].any()]
    zero_dirs = [("x", s) for s in pinned_x] + [("y", j) for j in pinned_y]
    pin = np.zeros(d)
    pin[0] = 1.0

    if m <= n:
        w, _ = pivoted_cholesky(gram.g[:m, :m])
        x = w[:, :d]
        for s in pinned_x:
            x[s] = pin
        y_kept = np.zeros((n, d))
        for j, t in enumerate(kept):
            if j in pinned_y:
                y_kept[j] = pin
                continue
            v = c[:, t] @ x
            norm = float(np.linalg.norm(v))
            if norm == 0.0:
                raise ExtractionError(
                    "column update vanished on a nonzero column",
                    column=t,
                )
            y_kept[j] = v / norm
    else:
        w, _ = pivoted_cholesky(gram.g[m:, m:])
        y_kept = w[:, :d]
        for j in pinned_y:
            y_kept[j] = pin
        x = np.zeros((m, d))
        for s in range(m):
            if s in pinned_x:
                x[s] = pin
                continue
            v = c[s, kept] @ y_kept
            norm = float(np.linalg.norm(v))
            if norm == 0.0:
                raise ExtractionError(
                    "row update vanished on a nonzero row",
                    row=s,
                )
            x[s] = v / norm

    rebuilt = np.vstack([x, y_kept])
    if rebuilt.size:
        deviation = np.abs(rebuilt @ rebuilt.T - gram.g)
        gauge = [s for s in pinned_x] + [m + j for j in pinned_y]
        deviation[gauge, :] = 0.0
        deviation[:, gauge] = 0.0
        err = float(np.max(deviation))
    else:
        err = 0.0
    if err > _GRAM_ERROR_LIMIT:
        raise ExtractionError(
            f"extracted vectors reproduce the Gram matrix to {err:.3e} only",
            max_error=err,
            limit=_GRAM_ERROR_LIMIT,
        )
    y = np.zeros((n_full, d))
    for j, t in enumerate(kept):
        y[t] = y_kept[j]
    return HyperbitStrategy(
        gamma=tuple(gamma),
        x=x,
        y=y,
        d=d,
        max_gram_error=err,
        zero_directions=tuple(zero_dirs),
    )


def solve_hyperbit(
    game: GameMatrix,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
) -> StrategySolution:
    """Best hyperbit strategy over all 2^N default patterns.

    Each pattern's inner vector problem gets its own seeded subproblem
    (spawn key = pattern index), so results are reproducible and
    independent of evaluation order.  Ties within exact equality keep the
    lexicographically smallest gamma; patterns within 1e-9 of the winner
    are reported as near-optimal.
    """
    c = game.c
    m, n = c.shape
    col_sums = c.sum(axis=0)
    col_l1 = np.abs(c).sum(axis=0)

    # A kept column contributes at most its L1 norm (unit vectors, per-column
    # Cauchy-Schwarz), a defaulted one exactly |column sum|, so each pattern
    # has a cheap upper bound.  Patterns are solved in descending-bound order
    # and skipped once the bound falls more than the near-optimal tolerance
    # below the running best: such a pattern can neither win nor appear in
    # the near-optimal list, so the reported solution is unchanged.
    branches = []
    for index, gamma in enumerate(enumerate_gammas(game)):
        bound = float(
            sum(col_l1[t] if gamma[t] == 0 else abs(col_sums[t]) for t in range(n))
        )
        branches.append((index, gamma, bound))
    branches.sort(key=lambda item: (-item[2], item[0]))

    results: list[tuple[float, tuple[int, ...], GramSolution | None]] = []
    running_best = -np.inf
    for index, gamma, bound in branches:
        if bound < running_best - NEAR_OPTIMAL_TOL:
            continue
        kept = [t for t in range(n) if gamma[t] == 0]
        value = float(sum(abs(col_sums[t]) for t in range(n) if gamma[t] != 0))
        gram: GramSolution | None = None
        if kept:
            gram = solve_subproblem(
                c[:, kept],
                restarts=restarts,
                seed=seed,
                tol=tol,
                spawn_prefix=(index,),
            )
            value += gram.objective
        results.append((value, gamma, gram))
        running_best = max(running_best, value)

    best_value, best_gamma, best_gram = results[0]
    for value, gamma, gram in results[1:]:
        if value > best_value or (value == best_value and gamma < best_gamma):
            best_value, best_gamma, best_gram = value, gamma, gram

    near = tuple(
        gamma
        for value, gamma, _ in results
        if gamma != best_gamma and best_value - value <= NEAR_OPTIMAL_TOL
    )

    if best_gram is not None:
        strategy = extract_vectors(best_gram, best_gamma, game)
    else:
        strategy = HyperbitStrategy(
            gamma=best_gamma,
            x=np.zeros((m, 0)),
            y=np.zeros((n, 0)),
            d=0,
        )
    return StrategySolution(
        regime="hyperbit",
        value=best_value,
        s=strategy.induced_strategy(),
        gamma=best_gamma,
        x=strategy.x,
        y=strategy.y,
        d=strategy.d,
        seed=seed,
        restarts=restarts,
        near_optimal_gammas=near,
    )


def strategy_from_solution(solution: StrategySolution) -> HyperbitStrategy:
    """Rebuild the vector form from a deserialized hyperbit solution."""
    if solution.regime != "hyperbit":
        raise DimensionMismatchError(
            f"expected a hyperbit solution, got {solution.regime!r}",
            regime=solution.regime,
        )
    return HyperbitStrategy(
        gamma=tuple(solution.gamma or ()),
        x=np.asarray(solution.x, dtype=float),
        y=np.asarray(solution.y, dtype=float),
        d=int(solution.d or 0),
    )

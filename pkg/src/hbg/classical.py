"""Exact solvers for the unlimited and classical single-bit regimes.

Unlimited communication: S = sgn(C) is feasible, so the optimum is
sum |C|.  With a single classical bit, Alice sends p_s in {0, 1} and Bob
answers alpha_t on bit 1, beta_t on bit 0, giving

    S[s, t] = p_s * alpha_t + (1 - p_s) * beta_t.

For a fixed assignment p the best answers are alpha_t = sgn(r_t) and
beta_t = sgn(q_t) with r_t = sum_s C[s, t] p_s and q_t the complementary
sum, so the optimum over the regime is found by enumerating all 2^M
assignments exactly.  The extremal corners suffice: the value is affine
in each p_s and in each of Bob's responses separately.
"""

from __future__ import annotations

import numpy as np

from .errors import EnumerationCapError
from .game import GameMatrix
from .solutions import StrategySolution

# Hard cap on exact enumeration (2^20 assignments).
MAX_ALICE_CARDS = 20

_CHUNK = 1 << 16


def solve_unlimited(game: GameMatrix) -> StrategySolution:
    """Optimal strategy without communication limits: S = sgn(C), value sum|C|."""
    s = np.sign(game.c)
    s[s == 0] = 1.0
    return StrategySolution(
        regime="unlimited",
        value=float(np.sum(np.abs(game.c))),
        s=s,
    )


def _sign_plus(v: np.ndarray) -> np.ndarray:
    """sgn with the 0 -> +1 convention, as integers."""
    out = np.where(v > 0, 1, -1)
    out[v == 0] = 1
    return out.astype(int)


def solve_classical(game: GameMatrix) -> StrategySolution:
    """Exact single-bit optimum by enumerating all 2^M Alice assignments.

    Assignments are iterated as an M-bit counter with p_0 as the most
    significant bit, so ties resolve to the lexicographically smallest
    optimal p.  Raises EnumerationCapError above M = 20 rows.
    """
    c = game.c
    m, n = c.shape
    if m > MAX_ALICE_CARDS:
        raise EnumerationCapError(
            f"classical enumeration capped at {MAX_ALICE_CARDS} rows, got {m}",
            rows=m,
            cap=MAX_ALICE_CARDS,
        )
    col_sums = c.sum(axis=0)
    shifts = np.arange(m - 1, -1, -1, dtype=np.uint64)  # p_0 = most significant

    best_value = -np.inf
    best_k = 0
    total = 1 << m
    for start in range(0, total, _CHUNK):
        ks = np.arange(start, min(start + _CHUNK, total), dtype=np.uint64)
        bits = ((ks[:, None] >> shifts[None, :]) & 1).astype(float)
        r = bits @ c
        values = np.abs(r).sum(axis=1) + np.abs(col_sums[None, :] - r).sum(axis=1)
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_value = float(values[i])
            best_k = start + i

    p = tuple(int((best_k >> int(sh)) & 1) for sh in shifts)
    p_arr = np.array(p, dtype=float)
    r = p_arr @ c
    q = col_sums - r
    alpha = _sign_plus(r)
    beta = _sign_plus(q)
    s = np.outer(p_arr, alpha) + np.outer(1.0 - p_arr, beta)
    value = float(np.abs(r).sum() + np.abs(q).sum())
    return StrategySolution(
        regime="classical",
        value=value,
        s=s,
        p=p,
        alpha=tuple(int(a) for a in alpha),
        beta=tuple(int(b) for b in beta),
    )

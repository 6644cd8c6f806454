"""Closed-form treatment of canonical 3x2 games.

For a game whose sign matrix is [[+, +], [+, -], [-, -]] the classical
single-bit optimum always loses exactly twice the cheapest "sacrifice"
delta* to the unlimited value, where delta* is the smallest of five
candidates (the entries a corner strategy must concede):

    delta_1 = |C12|   delta_2 = |C21|   delta_3 = |C22|
    delta_4 = |C31|   delta_5 = |C11| + |C32|

The entangled (hyperbit) regime reduces to a one-parameter problem in
z = y_1 . y_2, the overlap of Bob's two answer vectors:

    f(z) = sum_s sqrt(C[s,0]^2 + C[s,1]^2 + 2 C[s,0] C[s,1] z)

f is concave, so the optimizer z* is -1, +1, or the unique interior root
of f'.  Columns on which Bob answers a fixed default reproduce classical
play, so the regime's value is max(f(z*), classical).  A strict quantum
advantage requires an interior z*; it is guaranteed when one of the
candidate indices {2, 3, 5} attains delta* (the matching endpoint value
then equals the classical optimum, and strict concavity lifts f(z*)
above it) and otherwise decided by comparing f(z*) with the classical
value directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGameError
from .game import CANONICAL_SIGNS, GameMatrix

_BISECT_WIDTH = 1e-12


@dataclass(frozen=True)
class ThreeTwoAnalysis:
    """Everything the closed form knows about one canonical 3x2 game."""

    deltas: tuple[float, float, float, float, float]
    delta_star: float
    delta_index: int  # 1-based index into deltas; smallest index on ties
    unlimited_value: float
    classical_value: float
    z_star: float
    case: str  # "boundary_minus" | "interior" | "boundary_plus"
    f_at_z_star: float
    hyperbit_value: float
    has_quantum_advantage: bool

    @property
    def advantage(self) -> float:
        return self.hyperbit_value - self.classical_value

    def to_json(self) -> dict:
        return {
            "deltas": list(self.deltas),
            "delta_star": self.delta_star,
            "delta_index": self.delta_index,
            "unlimited_value": self.unlimited_value,
            "classical_value": self.classical_value,
            "z_star": self.z_star,
            "case": self.case,
            "f_at_z_star": self.f_at_z_star,
            "hyperbit_value": self.hyperbit_value,
            "has_quantum_advantage": self.has_quantum_advantage,
            "advantage": self.advantage,
        }


def f_and_derivative(game: GameMatrix, z: float) -> tuple[float, float]:
    """Evaluate f(z) and f'(z) for a 3x2 game (canonical or not).

    At an endpoint where a row's radicand vanishes with a nonzero
    coefficient product the one-sided derivative diverges; it is reported
    as a signed infinity carrying the product's sign.
    """
    c = game.c
    if c.shape[1] != 2:
        raise InvalidGameError(
            f"f(z) is defined for two-column games, got {c.shape[1]} columns",
            shape=list(c.shape),
        )
    if not -1.0 <= z <= 1.0:
        raise InvalidGameError(f"z must lie in [-1, 1], got {z}", z=z)
    f = 0.0
    fprime = 0.0
    for a, b in c:
        prod = a * b
        radicand = a * a + b * b + 2.0 * prod * z
        radicand = max(radicand, 0.0)  # clamp roundoff at the endpoints
        root = math.sqrt(radicand)
        f += root
        if prod == 0.0:
            continue
        if root == 0.0:
            fprime += math.inf if prod > 0 else -math.inf
        else:
            fprime += prod / root
    return f, fprime


def _candidate_deltas(c: np.ndarray) -> tuple[float, float, float, float, float]:
    return (
        abs(c[0, 1]),
        abs(c[1, 0]),
        abs(c[1, 1]),
        abs(c[2, 0]),
        abs(c[0, 0]) + abs(c[2, 1]),
    )


def solve_3x2(game: GameMatrix) -> ThreeTwoAnalysis:
    """Closed-form three-regime analysis of a canonical 3x2 game."""
    if game.shape != (3, 2):
        raise InvalidGameError(
            f"expected a 3x2 game, got {game.shape[0]}x{game.shape[1]}",
            shape=list(game.shape),
        )
    if not np.array_equal(game.sign_matrix(), CANONICAL_SIGNS):
        raise InvalidGameError(
            "game is not in canonical sign form [[+,+],[+,-],[-,-]]",
            signs=game.sign_matrix().tolist(),
        )
    c = game.c
    unlimited = float(np.sum(np.abs(c)))
    deltas = _candidate_deltas(c)
    delta_star = min(deltas)
    delta_index = deltas.index(delta_star) + 1
    classical = unlimited - 2.0 * delta_star

    _, d_minus = f_and_derivative(game, -1.0)
    _, d_plus = f_and_derivative(game, 1.0)
    if d_minus < 0.0:
        z_star, case = -1.0, "boundary_minus"
    elif d_plus > 0.0:
        z_star, case = 1.0, "boundary_plus"
    else:
        lo, hi = -1.0, 1.0  # f' decreasing: f'(lo) >= 0 >= f'(hi)
        while hi - lo > _BISECT_WIDTH:
            mid = 0.5 * (lo + hi)
            _, d_mid = f_and_derivative(game, mid)
            if d_mid > 0.0:
                lo = mid
            else:
                hi = mid
        z_star, case = 0.5 * (lo + hi), "interior"

    f_star, _ = f_and_derivative(game, z_star)
    hyperbit = max(f_star, classical)
    # Advantage flag.  f(+1) = I_U - 2 min(delta_2, delta_3) and
    # f(-1) = I_U - 2 (min|C_1.| + min|C_3.|) >= I_U - 2 delta_5 are both
    # classically attainable, so a boundary optimum never beats classical.
    # When the optimum is interior and delta* is attained at index 2, 3 or
    # 5, strict concavity pushes f(z*) strictly above the matching endpoint
    # value, which equals the classical optimum: a guaranteed advantage
    # without comparing nearly-equal floats (that exact tie is what makes a
    # plain value-gap test flicker near onset/offset boundaries).  When
    # delta* is attained only at index 1 or 4 both endpoints sit strictly
    # below classical, the gap crosses zero transversally, and the direct
    # comparison is reliable.
    attained = {i + 1 for i, d in enumerate(deltas) if d == delta_star}
    if case != "interior":
        has_advantage = False
    elif attained & {2, 3, 5}:
        has_advantage = True
    else:
        has_advantage = f_star > classical
    return ThreeTwoAnalysis(
        deltas=deltas,
        delta_star=delta_star,
        delta_index=delta_index,
        unlimited_value=unlimited,
        classical_value=classical,
        z_star=z_star,
        case=case,
        f_at_z_star=f_star,
        hyperbit_value=hyperbit,
        has_quantum_advantage=has_advantage,
    )


def optimal_vectors(game: GameMatrix, z: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors realizing overlap z: rows are x_s (3 x 2) and y_t (2 x 2).

    Bob's vectors are y_1 = (1, 0) and y_2 = (z, sqrt(1 - z^2)); Alice's
    are the normalized combinations x_s = unit(C[s,0] y_1 + C[s,1] y_2),
    which align S[s, t] = x_s . y_t with the sign structure at overlap z.
    """
    c = game.c
    if c.shape[1] != 2:
        raise InvalidGameError(
            f"vector construction is for two-column games, got {c.shape[1]} columns",
            shape=list(c.shape),
        )
    y = np.array([[1.0, 0.0], [z, math.sqrt(max(0.0, 1.0 - z * z))]])
    x = np.zeros((c.shape[0], 2))
    for s in range(c.shape[0]):
        v = c[s, 0] * y[0] + c[s, 1] * y[1]
        norm = float(np.linalg.norm(v))
        x[s] = v / norm if norm > 0 else np.array([1.0, 0.0])
    return x, y

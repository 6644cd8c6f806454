"""Regime-tagged strategy solutions and their JSON round-trips."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InvalidGameError

REGIMES = ("unlimited", "classical", "hyperbit")


@dataclass(frozen=True)
class StrategySolution:
    """An optimal (or best-found) strategy for one communication regime.

    regime  -- "unlimited", "classical" or "hyperbit"
    value   -- achieved I(S)
    s       -- the strategy matrix S (M x N, entries in [-1, 1])

    Classical solutions carry Alice's bit assignment p and Bob's answer
    vectors alpha/beta.  Hyperbit solutions carry the default vector gamma,
    the unit vectors x_s / y_t (rows of x and y), their dimension d and
    the seed/restarts that produced them.
    """

    regime: str
    value: float
    s: np.ndarray
    p: tuple[int, ...] | None = None
    alpha: tuple[int, ...] | None = None
    beta: tuple[int, ...] | None = None
    gamma: tuple[int, ...] | None = None
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    d: int | None = None
    seed: int | None = None
    restarts: int | None = None
    near_optimal_gammas: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise InvalidGameError(
                f"unknown regime {self.regime!r}", allowed=list(REGIMES)
            )
        object.__setattr__(self, "s", np.asarray(self.s, dtype=float))

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "regime": self.regime,
            "value": self.value,
            "S": self.s.tolist(),
        }
        if self.regime == "classical":
            out["p"] = list(self.p or ())
            out["alpha"] = list(self.alpha or ())
            out["beta"] = list(self.beta or ())
        if self.regime == "hyperbit":
            out["gamma"] = list(self.gamma or ())
            out["x"] = self.x.tolist() if self.x is not None else []
            out["y"] = self.y.tolist() if self.y is not None else []
            out["d"] = self.d
            out["seed"] = self.seed
            out["restarts"] = self.restarts
            if self.near_optimal_gammas:
                out["near_optimal_gammas"] = [
                    list(g) for g in self.near_optimal_gammas
                ]
        return out

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "StrategySolution":
        regime = obj.get("regime")
        if regime not in REGIMES:
            raise InvalidGameError(
                f"unknown regime {regime!r}", allowed=list(REGIMES)
            )
        kwargs: dict[str, Any] = {}
        if regime == "classical":
            kwargs = {
                "p": tuple(int(v) for v in obj["p"]),
                "alpha": tuple(int(v) for v in obj["alpha"]),
                "beta": tuple(int(v) for v in obj["beta"]),
            }
        if regime == "hyperbit":
            kwargs = {
                "gamma": tuple(int(v) for v in obj["gamma"]),
                "x": np.asarray(obj["x"], dtype=float),
                "y": np.asarray(obj["y"], dtype=float),
                "d": int(obj["d"]),
                "seed": obj.get("seed"),
                "restarts": obj.get("restarts"),
                "near_optimal_gammas": tuple(
                    tuple(int(v) for v in g)
                    for g in obj.get("near_optimal_gammas", [])
                ),
            }
        return StrategySolution(
            regime=regime,
            value=float(obj["value"]),
            s=np.asarray(obj["S"], dtype=float),
            **kwargs,
        )

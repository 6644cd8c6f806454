"""Parameter sweeps, boundary detection, and exhaustive shoe searches.

The sweep walks a one-parameter family C(t) = A + B t, solving every
grid point in all three regimes.  Cheap exact routes are tried first —
drop homogeneous-sign columns, stop if at most two distinct sign rows
remain (no strategy restriction binds), use the closed-form 3x2 solver
when the reduction is canonicalizable — and the block-coordinate ascent
solver handles the rest.

Boundary detection bisects changes of a per-point indicator (entrywise
sign pattern, smallest-delta index, derivative case, advantage flag)
down to a width far below the reporting tolerance, then classifies each
located point by probing both sides: an indicator sign change outranks
a smallest-entry switch, which outranks advantage onset/offset.

The shoe search enumerates all card-type multisets of a given size,
crosses them with face-up card choices, solves every resulting game,
and catalogs configurations whose hyperbit value exceeds the classical
value by more than a threshold.  Searches checkpoint per multiset into
an append-only JSON-lines file and replay idempotently on resume.
"""

from __future__ import annotations

import itertools
import json
import math
import multiprocessing
import os
import warnings
from dataclasses import dataclass
from io import StringIO

import numpy as np

from .analytic32 import solve_3x2
from .blackjack import CARD_PROB, CARD_TYPES, RoundConfig, build_game
from .classical import solve_classical
from .errors import CatalogError, InvalidConfigError, NotCanonicalizableError
from .game import (
    GameMatrix,
    canonicalize_3x2,
    distinct_sign_rows,
    reduce_homogeneous_columns,
    unlimited_value,
)
from .hyperbit import DEFAULT_RESTARTS, solve_hyperbit

_RANK_INDEX = {card: i for i, card in enumerate(CARD_TYPES)}
_EQUAL_TOL = 1e-12
CHECKPOINT_VERSION = 1


# ─── Three-regime evaluation ─────────────────────────────────────────────────


@dataclass(frozen=True)
class RegimeValues:
    """Optimal values of one game under the three strategy regimes.

    route records how the hyperbit value was obtained: "trivial" (at
    most two distinct sign rows after reduction force all regimes
    equal), "squeeze" (classical already attains the unlimited value),
    "analytic" (closed-form 3x2), or "ascent" (block-coordinate ascent).
    """

    unlimited: float
    classical: float
    hyperbit: float
    route: str

    @property
    def advantage(self) -> float:
        return self.hyperbit - self.classical


def three_regime_values(
    game: GameMatrix,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
) -> RegimeValues:
    """Solve one game in all three regimes, cheapest exact route first.

    The hyperbit value is reported as max(route value, classical value):
    every classical strategy is also a hyperbit strategy, so the
    classical optimum is always a valid hyperbit lower bound.
    """
    iu = unlimited_value(game)
    reduced, transform = reduce_homogeneous_columns(game)
    if distinct_sign_rows(reduced) <= 2:
        return RegimeValues(iu, iu, iu, "trivial")
    ic = solve_classical(game).value
    if ic >= iu - _EQUAL_TOL:
        return RegimeValues(iu, ic, ic, "squeeze")
    dropped = transform.dropped_contribution
    if reduced.shape == (3, 2):
        try:
            canonical, _ = canonicalize_3x2(reduced)
        except NotCanonicalizableError:
            pass
        else:
            analysis = solve_3x2(canonical)
            ih = dropped + analysis.hyperbit_value
            return RegimeValues(iu, ic, max(ih, ic), "analytic")
    solution = solve_hyperbit(reduced, seed=seed, restarts=restarts)
    ih = dropped + solution.value
    return RegimeValues(iu, ic, max(ih, ic), "ascent")


# ─── Parameter sweep ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SweepSpec:
    """A one-parameter matrix family C(t) = A + B t on a regular grid."""

    a: tuple[tuple[float, ...], ...]
    b: tuple[tuple[float, ...], ...]
    t_min: float
    t_max: float
    step: float

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", tuple(tuple(row) for row in a))
        object.__setattr__(self, "b", tuple(tuple(row) for row in b))
        if a.ndim != 2 or a.shape != b.shape:
            raise InvalidConfigError(
                "A and B must be matrices of equal shape",
                a_shape=list(a.shape),
                b_shape=list(b.shape),
            )
        if not (self.step > 0):
            raise InvalidConfigError(f"step must be positive, got {self.step}")
        if self.t_max < self.t_min:
            raise InvalidConfigError(
                "t_max must not precede t_min",
                t_min=self.t_min,
                t_max=self.t_max,
            )

    def matrix_at(self, t: float) -> GameMatrix:
        c = np.asarray(self.a) + np.asarray(self.b) * t
        return GameMatrix(c)

    def grid(self) -> np.ndarray:
        count = int(math.floor((self.t_max - self.t_min) / self.step + 1e-9)) + 1
        return self.t_min + self.step * np.arange(count)

    def to_json(self) -> dict:
        return {
            "A": [list(row) for row in self.a],
            "B": [list(row) for row in self.b],
            "t_min": self.t_min,
            "t_max": self.t_max,
            "step": self.step,
        }

    @staticmethod
    def from_json(obj: dict) -> "SweepSpec":
        return SweepSpec(
            a=tuple(tuple(float(v) for v in row) for row in obj["A"]),
            b=tuple(tuple(float(v) for v in row) for row in obj["B"]),
            t_min=float(obj["t_min"]),
            t_max=float(obj["t_max"]),
            step=float(obj["step"]),
        )

    @staticmethod
    def loads(text: str) -> "SweepSpec":
        return SweepSpec.from_json(json.loads(text))


@dataclass(frozen=True)
class SweepPoint:
    """All three regime values at one grid point (error recorded inline)."""

    t: float
    unlimited: float
    classical: float
    hyperbit: float
    route: str
    error: str | None = None

    def to_json(self) -> dict:
        out = {
            "t": self.t,
            "I_U": self.unlimited,
            "I_C": self.classical,
            "I_H": self.hyperbit,
            "route": self.route,
        }
        if self.error is not None:
            out["error"] = self.error
        return out


def sweep(
    spec: SweepSpec,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
) -> tuple[SweepPoint, ...]:
    """Solve C(t) on the grid; per-point failures become inline records."""
    points: list[SweepPoint] = []
    for t in spec.grid():
        t = float(t)
        try:
            values = three_regime_values(spec.matrix_at(t), seed, restarts)
        except Exception as exc:  # recorded, never raised past the sweep
            points.append(SweepPoint(t, math.nan, math.nan, math.nan, "error", str(exc)))
            continue
        points.append(
            SweepPoint(
                t, values.unlimited, values.classical, values.hyperbit, values.route
            )
        )
    return tuple(points)


# ─── Boundary detection ──────────────────────────────────────────────────────

BOUNDARY_KINDS = (
    "sign-flip",
    "smallest-entry-switch",
    "hyperbit-onset",
    "hyperbit-offset",
)

_BISECT_WIDTH = 1e-7
_CLUSTER_TOL = 1e-6


@dataclass(frozen=True)
class Boundary:
    """A located regime boundary: parameter value and transition kind."""

    t: float
    kind: str

    def to_json(self) -> dict:
        return {"t": self.t, "kind": self.kind}


@dataclass(frozen=True)
class _Indicator:
    """Discrete per-point classification used to bracket boundaries.

    Derivative-sign cases are deliberately excluded: f'(+-1) can cross
    zero inside a region without any regime equality changing, and only
    changes that move the minimal delta or the structural advantage
    criterion demarcate regions.
    """

    signs: tuple[int, ...]
    delta_index: int | None
    advantage: bool


def _indicator(spec: SweepSpec, t: float) -> _Indicator:
    game = spec.matrix_at(t)
    signs = tuple(int(v) for v in np.sign(np.asarray(game.c)).ravel())
    reduced, _ = reduce_homogeneous_columns(game)
    if distinct_sign_rows(reduced) <= 2 or reduced.shape != (3, 2):
        return _Indicator(signs, None, False)
    try:
        canonical, _ = canonicalize_3x2(reduced)
    except NotCanonicalizableError:
        return _Indicator(signs, None, False)
    analysis = solve_3x2(canonical)
    return _Indicator(signs, analysis.delta_index, analysis.has_quantum_advantage)


def _classify(left: _Indicator, right: _Indicator) -> str | None:
    """Transition kind between two indicator states, by priority."""
    if left.signs != right.signs:
        return "sign-flip"
    if left.delta_index != right.delta_index:
        return "smallest-entry-switch"
    if left.advantage != right.advantage:
        return "hyperbit-onset" if right.advantage else "hyperbit-offset"
    return None


def detect_boundaries(spec: SweepSpec) -> tuple[Boundary, ...]:
    """Locate every indicator transition on the grid by bisection.

    Each bracketing grid interval is narrowed to width 1e-7; nearby
    results merge (cluster tolerance 1e-6) and each merged location is
    classified from probes just outside the cluster.
    """
    grid = [float(t) for t in spec.grid()]
    if len(grid) < 2:
        return ()
    indicators = [_indicator(spec, t) for t in grid]
    located: list[float] = []
    for (t_lo, ind_lo), (t_hi, ind_hi) in zip(
        zip(grid, indicators), zip(grid[1:], indicators[1:])
    ):
        if ind_lo == ind_hi:
            continue
        lo, hi = t_lo, t_hi
        ilo = ind_lo
        while hi - lo > _BISECT_WIDTH:
            mid = 0.5 * (lo + hi)
            imid = _indicator(spec, mid)
            if imid == ilo:
                lo = mid
                ilo = imid
            else:
                hi = mid
        located.append(0.5 * (lo + hi))
    located.sort()
    boundaries: list[Boundary] = []
    i = 0
    while i < len(located):
        j = i
        while j + 1 < len(located) and located[j + 1] - located[j] <= _CLUSTER_TOL:
            j += 1
        center = located[(i + j) // 2] if (j - i) % 2 == 0 else 0.5 * (
            located[(i + j) // 2] + located[(i + j) // 2 + 1]
        )
        probe = max(10 * _BISECT_WIDTH, 0.5 * (located[j] - located[i]) + _BISECT_WIDTH)
        kind = _classify(
            _indicator(spec, center - probe), _indicator(spec, center + probe)
        )
        if kind is not None:
            boundaries.append(Boundary(center, kind))
        i = j + 1
    return tuple(boundaries)


# ─── Shoe search ─────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class AdvantageRecord:
    """One configuration whose hyperbit value beats its classical value."""

    config: RoundConfig
    values: tuple[float, float, float]
    advantage: float
    game_shape: tuple[int, int]
    shoe_weight: float

    def sort_key(self) -> tuple:
        return (
            -self.advantage,
            tuple(_RANK_INDEX[c] for c in self.config.shoe),
            _RANK_INDEX[self.config.bob_upcard],
            _RANK_INDEX[self.config.dealer_upcard],
        )

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "values": list(self.values),
            "advantage": self.advantage,
            "game_shape": list(self.game_shape),
            "shoe_weight": self.shoe_weight,
        }

    @staticmethod
    def from_json(obj: dict) -> "AdvantageRecord":
        return AdvantageRecord(
            config=RoundConfig.from_json(obj["config"]),
            values=tuple(float(v) for v in obj["values"]),
            advantage=float(obj["advantage"]),
            game_shape=tuple(int(v) for v in obj["game_shape"]),
            shoe_weight=float(obj["shoe_weight"]),
        )


@dataclass(frozen=True)
class CatalogParams:
    """Search parameters stamped into checkpoints and catalogs."""

    shoe_size: int
    bob_upcards: tuple[str, ...]
    dealer_upcards: tuple[str, ...]
    threshold: float
    seed: int
    restarts: int

    def to_json(self) -> dict:
        return {
            "shoe_size": self.shoe_size,
            "bob_upcards": list(self.bob_upcards),
            "dealer_upcards": list(self.dealer_upcards),
            "threshold": self.threshold,
            "seed": self.seed,
            "restarts": self.restarts,
        }

    @staticmethod
    def from_json(obj: dict) -> "CatalogParams":
        return CatalogParams(
            shoe_size=int(obj["shoe_size"]),
            bob_upcards=tuple(obj["bob_upcards"]),
            dealer_upcards=tuple(obj["dealer_upcards"]),
            threshold=float(obj["threshold"]),
            seed=int(obj["seed"]),
            restarts=int(obj["restarts"]),
        )


CSV_COLUMNS = (
    "shoe_size",
    "bob_upcard",
    "dealer_upcard",
    "shoe",
    "M",
    "N",
    "I_U",
    "I_C",
    "I_H",
    "advantage",
    "shoe_weight",
)


@dataclass(frozen=True)
class AdvantageCatalog:
    """Every above-threshold configuration found by one complete search."""

    params: CatalogParams
    records: tuple[AdvantageRecord, ...]

    def to_csv(self) -> str:
        out = StringIO()
        out.write(",".join(CSV_COLUMNS) + "\n")
        for rec in self.records:
            iu, ic, ih = rec.values
            row = (
                str(len(rec.config.shoe)),
                rec.config.bob_upcard,
                rec.config.dealer_upcard,
                rec.config.shoe_string,
                str(rec.game_shape[0]),
                str(rec.game_shape[1]),
                f"{iu:.17g}",
                f"{ic:.17g}",
                f"{ih:.17g}",
                f"{rec.advantage:.17g}",
                f"{rec.shoe_weight:.17g}",
            )
            out.write(",".join(row) + "\n")
        return out.getvalue()

    @staticmethod
    def from_csv(text: str, params: CatalogParams) -> "AdvantageCatalog":
        lines = [ln for ln in text.splitlines() if ln]
        if not lines or lines[0] != ",".join(CSV_COLUMNS):
            raise CatalogError(
                "catalog CSV must start with the canonical header",
                expected=",".join(CSV_COLUMNS),
            )
        records = []
        for line in lines[1:]:
            parts = line.split(",")
            if len(parts) != len(CSV_COLUMNS):
                raise CatalogError(
                    f"catalog row has {len(parts)} fields, expected {len(CSV_COLUMNS)}",
                    row=line,
                )
            cfg = RoundConfig(parts[1], parts[2], tuple(parts[3]))
            records.append(
                AdvantageRecord(
                    config=cfg,
                    values=(float(parts[6]), float(parts[7]), float(parts[8])),
                    advantage=float(parts[9]),
                    game_shape=(int(parts[4]), int(parts[5])),
                    shoe_weight=float(parts[10]),
                )
            )
        return AdvantageCatalog(params, tuple(records))


def shoe_weight(shoe: tuple[str, ...]) -> float:
    """Multinomial probability of the shoe multiset under infinite-deck draws."""
    counts: dict[str, int] = {}
    for card in shoe:
        counts[card] = counts.get(card, 0) + 1
    weight = math.factorial(len(shoe))
    for card, count in counts.items():
        weight = weight / math.factorial(count) * CARD_PROB[card] ** count
    return float(weight)


def _solve_config(
    cfg: RoundConfig, threshold: float, seed: int, restarts: int
) -> AdvantageRecord | None:
    game = build_game(cfg)
    values = three_regime_values(game, seed=seed, restarts=restarts)
    if values.advantage <= threshold:
        return None
    return AdvantageRecord(
        config=cfg,
        values=(values.unlimited, values.classical, values.hyperbit),
        advantage=values.advantage,
        game_shape=game.shape,
        shoe_weight=shoe_weight(cfg.shoe),
    )


def _search_multiset(
    args: tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...], float, int, int],
) -> tuple[str, list[dict]]:
    shoe, bob_upcards, dealer_upcards, threshold, seed, restarts = args
    records = []
    for bob in bob_upcards:
        for dealer in dealer_upcards:
            record = _solve_config(
                RoundConfig(bob, dealer, shoe), threshold, seed, restarts
            )
            if record is not None:
                records.append(record.to_json())
    return "".join(shoe), records


def _load_checkpoint(
    path: str, params: CatalogParams
) -> tuple[set[str], list[AdvantageRecord]]:
    done: set[str] = set()
    records: list[AdvantageRecord] = []
    if not os.path.exists(path):
        return done, records
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        return done, records
    header = json.loads(lines[0])
    if header.get("kind") != "header" or header.get("version") != CHECKPOINT_VERSION:
        raise CatalogError(
            "checkpoint file lacks a valid header line", path=path
        )
    stamped = CatalogParams.from_json(header["params"])
    if stamped != params:
        raise CatalogError(
            "checkpoint was written for different search parameters",
            path=path,
            checkpoint=stamped.to_json(),
            requested=params.to_json(),
        )
    for line in lines[1:]:
        entry = json.loads(line)
        if entry.get("kind") != "done":
            raise CatalogError("unrecognized checkpoint line", line=line)
        done.add(entry["shoe"])
        records.extend(AdvantageRecord.from_json(r) for r in entry["records"])
    return done, records


def search_shoes(
    shoe_size: int,
    bob_upcards: tuple[str, ...] | None = None,
    dealer_upcards: tuple[str, ...] | None = None,
    threshold: float = 1e-6,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    checkpoint_path: str | None = None,
    workers: int = 1,
) -> AdvantageCatalog:
    """Exhaustively search all size-k shoes crossed with face-up choices.

    Returns the catalog of configurations with advantage > threshold,
    sorted by descending advantage, then shoe, then upcards (rank
    order).  The result is a deterministic function of the parameters;
    worker count never changes the output.
    """
    if shoe_size < 3:
        raise InvalidConfigError(
            f"shoe must hold at least 3 cards, got {shoe_size}"
        )
    if shoe_size > 8:
        warnings.warn(
            f"shoe size {shoe_size} exceeds the validated range 3-8",
            stacklevel=2,
        )
    bob_upcards = _normalized_upcards(bob_upcards)
    dealer_upcards = _normalized_upcards(dealer_upcards)
    params = CatalogParams(
        shoe_size, bob_upcards, dealer_upcards, threshold, seed, restarts
    )
    done: set[str] = set()
    records: list[AdvantageRecord] = []
    checkpoint = None
    if checkpoint_path:
        done, records = _load_checkpoint(checkpoint_path, params)
        checkpoint = open(checkpoint_path, "a", encoding="utf-8")
        if not done and not records and os.path.getsize(checkpoint_path) == 0:
            checkpoint.write(
                json.dumps(
                    {
                        "kind": "header",
                        "version": CHECKPOINT_VERSION,
                        "params": params.to_json(),
                    },
                    sort_keys=True,
                )
                + "\n"
            )
            checkpoint.flush()
    try:
        pending = [
            (shoe, bob_upcards, dealer_upcards, threshold, seed, restarts)
            for shoe in itertools.combinations_with_replacement(CARD_TYPES, shoe_size)
            if "".join(shoe) not in done
        ]
        if workers > 1:
            with multiprocessing.Pool(workers) as pool:
                results = pool.imap(_search_multiset, pending, chunksize=8)
                for key, found in results:
                    records.extend(AdvantageRecord.from_json(r) for r in found)
                    _checkpoint_done(checkpoint, key, found)
        else:
            for task in pending:
                key, found = _search_multiset(task)
                records.extend(AdvantageRecord.from_json(r) for r in found)
                _checkpoint_done(checkpoint, key, found)
    finally:
        if checkpoint is not None:
            checkpoint.close()
    records.sort(key=AdvantageRecord.sort_key)
    return AdvantageCatalog(params, tuple(records))


def _checkpoint_done(checkpoint, key: str, found: list[dict]) -> None:
    if checkpoint is None:
        return
    checkpoint.write(
        json.dumps({"kind": "done", "shoe": key, "records": found}, sort_keys=True)
        + "\n"
    )
    checkpoint.flush()


def _normalized_upcards(cards: tuple[str, ...] | None) -> tuple[str, ...]:
    from .blackjack import normalize_card

    if cards is None:
        return CARD_TYPES
    seen = {normalize_card(c) for c in cards}
    if not seen:
        raise InvalidConfigError("upcard set must not be empty")
    return tuple(c for c in CARD_TYPES if c in seen)


def expected_advantage(shoe_size: int, catalog: AdvantageCatalog) -> float:
    """Mean advantage when shoe and both face-up cards are dealt from an
    infinite shoe: sum of shoe_weight x upcard prior x advantage.

    Requires a catalog that searched the requested size over every
    face-up pair; anything narrower raises with the missing strata.
    """
    if catalog.params.shoe_size != shoe_size:
        raise CatalogError(
            "catalog covers a different shoe size",
            requested=shoe_size,
            catalog=catalog.params.shoe_size,
        )
    missing_bob = [c for c in CARD_TYPES if c not in catalog.params.bob_upcards]
    missing_dealer = [
        c for c in CARD_TYPES if c not in catalog.params.dealer_upcards
    ]
    if missing_bob or missing_dealer:
        raise CatalogError(
            "catalog is incomplete for the full face-up prior",
            missing_bob_upcards=missing_bob,
            missing_dealer_upcards=missing_dealer,
        )
    total = 0.0
    for rec in catalog.records:
        prior = (
            CARD_PROB[rec.config.bob_upcard] * CARD_PROB[rec.config.dealer_upcard]
        )
        total += rec.shoe_weight * prior * rec.advantage
    return total

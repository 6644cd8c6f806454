"""Modified blackjack round model and its coefficient-matrix games.

Ruleset (two cooperating players, Alice and Bob, against the house):

* Ten card types A, 2..9, T, where T aggregates 10/J/Q/K.  An infinite
  deck draws A..9 with probability 1/13 each and T with 4/13.
* Bob bets 1, Alice bets 0.  Payoffs are +1 / 0 / -1 per round with no
  blackjack bonus; a busted player loses even if the dealer busts.
* The dealer shows one face-up card and draws after the players until
  reaching hard 17+ or soft 18+ (i.e. the dealer hits soft 17).
* Alice and Bob each hold a face-up card plus a face-down card drawn
  without replacement from the known shoe.  Alice may hit at most once;
  her only useful act is the single classical bit she signals to Bob.
* After Bob's first action the shoe is reshuffled into the infinite
  deck, so only his first hit card comes from the finite shoe.  His
  play from then on follows the infinite-deck optimal hit/stand policy
  computed here by dynamic programming on public information only.

The game Bob and Alice play against the house reduces to the matrix

    C[s, t] = pi(s, t) * (V_plus(s, t) - V_minus(t))

where s, t are the face-down cards of Alice and Bob, pi is the
without-replacement draw probability, V_minus the stand value of Bob's
hand and V_plus his value after hitting once from the residual shoe and
continuing optimally.  Alice's bit steers Bob between hit and stand, so
optimizing sum C[s,t] * S[s,t] over strategies S is exactly the problem
the solver modules handle.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError
from .game import GameMatrix

# ─── Cards ───────────────────────────────────────────────────────────────────

CARD_TYPES: tuple[str, ...] = ("A", "2", "3", "4", "5", "6", "7", "8", "9", "T")
CARD_VALUE: dict[str, int] = {
    "A": 1, "2": 2, "3": 3, "4": 4, "5": 5,
    "6": 6, "7": 7, "8": 8, "9": 9, "T": 10,
}
# Infinite-deck draw probabilities (T aggregates four ranks).
CARD_PROB: dict[str, float] = {c: (4.0 if c == "T" else 1.0) / 13.0 for c in CARD_TYPES}

_ALIASES = {"10": "T", "J": "T", "Q": "T", "K": "T"}


def normalize_card(symbol: str) -> str:
    """Map a rank symbol to its card type; 10/J/Q/K all count as T."""
    s = str(symbol).strip().upper()
    s = _ALIASES.get(s, s)
    if s not in CARD_VALUE:
        raise InvalidConfigError(f"unknown card symbol {symbol!r}", symbol=str(symbol))
    return s


# ─── Hands ───────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class HandState:
    """Blackjack hand total with soft-ace tracking.

    total -- best total <= 21 when possible (an ace counts 11 iff soft)
    soft  -- True when one ace is currently counted as 11
    """

    total: int
    soft: bool

    def __post_init__(self) -> None:
        if not 2 <= self.total <= 31:
            raise InvalidConfigError(
                f"hand total out of range: {self.total}", total=self.total
            )
        if self.soft and not 12 <= self.total <= 21:
            raise InvalidConfigError(
                f"soft hand must total 12..21, got {self.total}", total=self.total
            )

    @property
    def bust(self) -> bool:
        return self.total > 21

    def hit(self, card: str) -> "HandState":
        """Add one card, demoting a soft ace if the hand would bust."""
        total, soft = _hit(self.total, self.soft, normalize_card(card))
        return HandState(total, soft)


def _hit(total: int, soft: bool, card: str) -> tuple[int, bool]:
    """Raw (total, soft) transition; also used for one-card dealer states."""
    if card == "A":
        if not soft and total + 11 <= 21:
            return total + 11, True
        total += 1
    else:
        total += CARD_VALUE[card]
    if total > 21 and soft:
        return total - 10, False
    return total, soft


def hand_from(cards: "list[str] | tuple[str, ...]") -> HandState:
    """Build a hand from two or more card symbols."""
    if len(cards) < 2:
        raise InvalidConfigError(
            f"a hand needs at least two cards, got {len(cards)}", cards=list(cards)
        )
    total, soft = 0, False
    for card in cards:
        total, soft = _hit(total, soft, normalize_card(card))
    return HandState(total, soft)


# ─── Dealer ──────────────────────────────────────────────────────────────────

BUST = "bust"
DEALER_FINALS: tuple[object, ...] = (17, 18, 19, 20, 21, BUST)


def _dealer_stands(total: int, soft: bool) -> bool:
    # Hard 17+ stands; soft hands stand only from 18 (dealer hits soft 17).
    return total >= 18 if soft else total >= 17


_DEALER_CACHE: dict[tuple[int, bool], tuple[float, ...]] = {}
_CONTINUATION_CACHE: dict[tuple[int, bool, str], tuple[float, str]] = {}


def _dealer_dist(total: int, soft: bool) -> tuple[float, ...]:
    """Final-total distribution (17, 18, 19, 20, 21, bust) from a dealer state."""
    key = (total, soft)
    hit = _DEALER_CACHE.get(key)
    if hit is not None:
        return hit
    if total > 21:
        result: tuple[float, ...] = (0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
    elif _dealer_stands(total, soft):
        out = [0.0] * 6
        out[total - 17] = 1.0
        result = tuple(out)
    else:
        acc = [0.0] * 6
        for card in CARD_TYPES:
            p = CARD_PROB[card]
            sub = _dealer_dist(*_hit(total, soft, card))
            for i in range(6):
                acc[i] += p * sub[i]
        result = tuple(acc)
    _DEALER_CACHE[key] = result
    return result


def dealer_distribution(upcard: str) -> dict[object, float]:
    """Infinite-deck distribution of the dealer's final total from an upcard."""
    card = normalize_card(upcard)
    start = (11, True) if card == "A" else (CARD_VALUE[card], False)
    dist = _dealer_dist(*start)
    return dict(zip(DEALER_FINALS, dist))


# ─── Bob's values ────────────────────────────────────────────────────────────


def stand_value(hand: HandState, dealer_upcard: str) -> float:
    """Expected payoff for standing: beat the dealer's final total or bust."""
    if hand.bust:
        return -1.0
    dist = dealer_distribution(dealer_upcard)
    value = dist[BUST]
    for final in (17, 18, 19, 20, 21):
        if hand.total > final:
            value += dist[final]
        elif hand.total < final:
            value -= dist[final]
    return value


def _continuation(total: int, soft: bool, dealer: str) -> tuple[float, str]:
    """Optimal infinite-deck value and action ("stand"/"hit") for Bob's hand."""
    key = (total, soft, dealer)
    cached = _CONTINUATION_CACHE.get(key)
    if cached is not None:
        return cached
    if total > 21:
        result = (-1.0, "stand")
    else:
        stand = stand_value(HandState(total, soft), dealer)
        hit = 0.0
        for card in CARD_TYPES:
            hit += CARD_PROB[card] * _continuation(*_hit(total, soft, card), dealer)[0]
        result = (hit, "hit") if hit > stand else (stand, "stand")
    _CONTINUATION_CACHE[key] = result
    return result


def continuation_value(hand: HandState, dealer_upcard: str) -> float:
    """Bob's optimal expected payoff from this hand under the infinite deck."""
    if hand.bust:
        return -1.0
    return _continuation(hand.total, hand.soft, normalize_card(dealer_upcard))[0]


def continuation_action(hand: HandState, dealer_upcard: str) -> str:
    if hand.bust:
        return "stand"
    return _continuation(hand.total, hand.soft, normalize_card(dealer_upcard))[1]


# ─── Cache persistence ───────────────────────────────────────────────────────


def clear_caches() -> None:
    """Drop all memoized dealer and continuation tables."""
    _DEALER_CACHE.clear()
    _CONTINUATION_CACHE.clear()


def dump_caches() -> dict:
    """JSON-ready snapshot of the memoized tables (keys serialized)."""
    return {
        "dealer": {
            f"{total},{int(soft)}": list(dist)
            for (total, soft), dist in sorted(_DEALER_CACHE.items())
        },
        "continuation": {
            f"{total},{int(soft)},{dealer}": [value, action]
            for (total, soft, dealer), (value, action) in sorted(
                _CONTINUATION_CACHE.items()
            )
        },
    }


def load_caches(obj: dict) -> None:
    """Pre-populate the memo tables from a dump_caches() snapshot.

    Entries are values the recursion would recompute bit-for-bit, so a
    warm cache never changes results.  Malformed snapshots are rejected
    wholesale rather than partially applied.
    """
    dealer: dict[tuple[int, bool], tuple[float, ...]] = {}
    continuation: dict[tuple[int, bool, str], tuple[float, str]] = {}
    for key, dist in obj.get("dealer", {}).items():
        total_text, soft_text = key.split(",")
        if len(dist) != len(DEALER_FINALS):
            raise InvalidConfigError(
                "dealer cache rows must have six probabilities", key=key
            )
        dealer[(int(total_text), bool(int(soft_text)))] = tuple(
            float(p) for p in dist
        )
    for key, pair in obj.get("continuation", {}).items():
        total_text, soft_text, upcard = key.split(",")
        value, action = pair
        if action not in ("stand", "hit"):
            raise InvalidConfigError(
                "continuation cache actions must be stand/hit", key=key
            )
        continuation[(int(total_text), bool(int(soft_text)), normalize_card(upcard))] = (
            float(value),
            str(action),
        )
    _DEALER_CACHE.update(dealer)
    _CONTINUATION_CACHE.update(continuation)


# ─── Round configuration and game construction ──────────────────────────────


@dataclass(frozen=True)
class RoundConfig:
    """One blackjack round: both face-up cards plus the known residual shoe.

    The shoe lists the cards remaining after the face-up deal; Alice's and
    Bob's face-down cards and Bob's first hit card are drawn from it
    without replacement.  At least three cards are required.
    """

    bob_upcard: str
    dealer_upcard: str
    shoe: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bob_upcard", normalize_card(self.bob_upcard))
        object.__setattr__(self, "dealer_upcard", normalize_card(self.dealer_upcard))
        cards = tuple(normalize_card(c) for c in self.shoe)
        order = {c: i for i, c in enumerate(CARD_TYPES)}
        object.__setattr__(self, "shoe", tuple(sorted(cards, key=order.__getitem__)))
        if len(cards) < 3:
            raise InvalidConfigError(
                f"shoe must hold at least 3 cards, got {len(cards)}",
                shoe_size=len(cards),
            )

    @property
    def shoe_string(self) -> str:
        return "".join(self.shoe)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.shoe:
            out[c] = out.get(c, 0) + 1
        return out

    def to_json(self) -> dict:
        return {
            "bob_upcard": self.bob_upcard,
            "dealer_upcard": self.dealer_upcard,
            "shoe": list(self.shoe),
        }

    @staticmethod
    def from_json(obj: dict) -> "RoundConfig":
        missing = {"bob_upcard", "dealer_upcard", "shoe"} - set(obj)
        if missing:
            raise InvalidConfigError(
                f"round JSON missing keys: {sorted(missing)}", missing=sorted(missing)
            )
        return RoundConfig(obj["bob_upcard"], obj["dealer_upcard"], tuple(obj["shoe"]))

    @staticmethod
    def loads(text: str) -> "RoundConfig":
        return RoundConfig.from_json(json.loads(text))


@dataclass(frozen=True)
class PayoffTable:
    """Per-(s, t) draw probabilities and hit/stand values for one round.

    labels  -- distinct card types present in the shoe, rank order
    pi      -- pi[s, t]: both face-down draws, without replacement
    v_plus  -- Bob hits once from shoe minus {s, t}, then plays optimally
    v_minus -- Bob stands on his initial hand (independent of s)
    """

    labels: tuple[str, ...]
    pi: np.ndarray
    v_plus: np.ndarray
    v_minus: np.ndarray


def round_payoffs(cfg: RoundConfig) -> PayoffTable:
    """Compute the draw distribution and both action values for a round."""
    counts = cfg.counts()
    labels = tuple(c for c in CARD_TYPES if counts.get(c, 0) > 0)
    k = len(cfg.shoe)
    idx = {c: i for i, c in enumerate(labels)}
    n_labels = len(labels)

    pi = np.zeros((n_labels, n_labels))
    v_plus = np.zeros((n_labels, n_labels))
    v_minus = np.zeros(n_labels)

    for t in labels:
        hand = hand_from([cfg.bob_upcard, t])
        v_minus[idx[t]] = stand_value(hand, cfg.dealer_upcard)

    for s in labels:
        for t in labels:
            n_t = counts[t] - (1 if s == t else 0)
            pi[idx[s], idx[t]] = counts[s] / k * n_t / (k - 1)
            if n_t <= 0:
                continue  # impossible draw; v_plus row entry stays 0
            hand = hand_from([cfg.bob_upcard, t])
            pool_total = k - 2
            value = 0.0
            for c in labels:
                n_c = counts[c] - (1 if c == s else 0) - (1 if c == t else 0)
                if n_c <= 0:
                    continue
                value += (
                    n_c
                    / pool_total
                    * continuation_value(hand.hit(c), cfg.dealer_upcard)
                )
            v_plus[idx[s], idx[t]] = value
    return PayoffTable(labels, pi, v_plus, v_minus)


def build_game(cfg: RoundConfig) -> GameMatrix:
    """Coefficient matrix C[s, t] = pi(s, t) * (V_plus(s, t) - V_minus(t))."""
    table = round_payoffs(cfg)
    c = table.pi * (table.v_plus - table.v_minus[None, :])
    return GameMatrix(c, table.labels, table.labels)

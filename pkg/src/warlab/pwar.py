"""Random-draw war engine.

Each round both players play a uniformly random card from their hands and
the winning rule decides, with probability p_{a,b}(S), whether the pair goes
to the first or the second player. Hand size therefore moves by exactly one
card per round and the game absorbs when a hand empties.

Determinism contract: hands are kept in ascending-id order and each round
consumes exactly three uniform draws in fixed order (index into A's hand,
index into B's hand, outcome), with index = floor(U * hand_size). Running a
game with :func:`pwar_run` is byte-for-byte the same as iterating
:func:`pwar_step` on the same stream.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass, field
from typing import Optional

from .core import Deck, GameState, RngStream, WinningRule

#: Cap on rounds per game; arbitrary rules need not terminate.
DEFAULT_MAX_ROUNDS = 10_000_000

WINNER_A = "A"
WINNER_B = "B"
DRAW = "Draw"
TRUNCATED = "Truncated"

_EMPTY: frozenset = frozenset()


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one game: absorption time, winner, optional |A_t| path."""

    tau: int
    winner: str
    a_trajectory: Optional[tuple] = None
    metadata: dict = field(default_factory=dict)


def pwar_step(
    state: GameState, rule: WinningRule, deck: Deck, rng: RngStream
) -> GameState:
    """Advance one round from a non-absorbing unordered state."""
    if state.is_absorbing:
        raise ValueError("cannot step an absorbing state")
    if state.ordered:
        raise ValueError("random-draw war uses unordered (set) hands")
    ha = sorted(state.hand_a)
    hb = sorted(state.hand_b)
    ia = int(rng.random() * len(ha))
    ib = int(rng.random() * len(hb))
    a_id, b_id = ha[ia], hb[ib]
    cards = deck.cards
    if rule.uses_hand:
        s = frozenset(x for x in ha if x != a_id)
    else:
        s = _EMPTY
    p = rule.eval(cards[a_id], cards[b_id], s, deck)
    if rng.random() <= p:
        new_a = state.hand_a | {b_id}
        new_b = state.hand_b - {b_id}
    else:
        new_a = state.hand_a - {a_id}
        new_b = state.hand_b | {a_id}
    return GameState(hand_a=new_a, hand_b=new_b, round=state.round + 1)


def pwar_run(
    init: GameState,
    rule: WinningRule,
    deck: Deck,
    rng: RngStream,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    record_trajectory: bool = False,
) -> TrialRecord:
    """Play from ``init`` until absorption or the round cap.

    Returns winner ``"Truncated"`` if the cap was hit. When
    ``record_trajectory`` is set, the record carries |A_t| for t = 0..tau.
    """
    if init.ordered:
        raise ValueError("random-draw war uses unordered (set) hands")
    ha = sorted(init.hand_a)
    hb = sorted(init.hand_b)
    size = deck.size
    cards = deck.cards
    ev = rule.eval
    uses_hand = rule.uses_hand
    rand = rng.random
    traj = [len(ha)] if record_trajectory else None
    rounds = 0
    while ha and hb:
        if rounds >= max_rounds:
            break
        la = len(ha)
        lb = len(hb)
        ia = int(rand() * la)
        ib = int(rand() * lb)
        a_id = ha[ia]
        b_id = hb[ib]
        if uses_hand:
            s = frozenset(x for x in ha if x != a_id)
        else:
            s = _EMPTY
        p = ev(cards[a_id], cards[b_id], s, deck)
        if rand() <= p:
            hb.pop(ib)
            insort(ha, b_id)
        else:
            ha.pop(ia)
            insort(hb, a_id)
        rounds += 1
        if traj is not None:
            traj.append(len(ha))
        if __debug__:
            assert len(ha) + len(hb) == size, "card count not conserved"
    if __debug__:
        assert sorted(ha + hb) == list(range(size)), "cards not conserved"
    if ha and hb:
        winner = TRUNCATED
    else:
        winner = WINNER_A if ha else WINNER_B
    return TrialRecord(
        tau=rounds,
        winner=winner,
        a_trajectory=tuple(traj) if traj is not None else None,
        metadata={
            "game": "pwar",
            "rule": rule.name,
            "deck": deck.describe(),
            "seed": rng.seed,
            "stream_id": rng.stream_id,
        },
    )


@dataclass(frozen=True)
class PwarConfig:
    """Picklable trial recipe for the Monte Carlo harness.

    ``deck`` is an ``(n_ranks, copies)`` pair or explicit rank tuple;
    ``rule`` a built-in rule name, with ``strength``/``strength_param``
    forwarded when the rule is Bradley-Terry. ``size_a`` defaults to half
    the deck.
    """

    deck: tuple
    rule: str = "coin"
    size_a: Optional[int] = None
    strength: Optional[str] = None
    strength_param: Optional[float] = None
    max_rounds: int = DEFAULT_MAX_ROUNDS
    record_trajectory: bool = False

    def build(self):
        from . import rules as _rules
        from .core import build_deck

        deck = build_deck(self.deck)
        strength = None
        if self.strength is not None:
            kw = {}
            if self.strength == "shifted":
                kw["shift"] = (
                    int(self.strength_param)
                    if self.strength_param is not None
                    else deck.max_rank
                )
            elif self.strength == "exponential":
                kw["lam"] = self.strength_param
            strength = _rules.strength_builtin(self.strength, **kw)
        rule = _rules.rule_by_name(self.rule, strength)
        return deck, rule

    def run_trial(self, seed: int, stream_id: int) -> TrialRecord:
        from .core import deal_uniform

        deck, rule = self.build()
        rng = RngStream(seed, stream_id)
        size_a = self.size_a if self.size_a is not None else deck.size // 2
        state = deal_uniform(deck, size_a, rng, ordered=False)
        return pwar_run(
            state,
            rule,
            deck,
            rng,
            max_rounds=self.max_rounds,
            record_trajectory=self.record_trajectory,
        )

"""Classic war engine: top-card play with war rounds or coin-flip ties.

Round anatomy: both players reveal their top card; the higher rank takes the
table pile. Equal ranks trigger the tie policy. Under ``war_round`` each
player stakes ``face_down`` cards unseen plus one face-up card and the new
face-up cards are compared, iterating on further ties; the entire
accumulated pile goes to the ultimate winner. Under ``coin_flip`` a fair
coin assigns the two table cards. The winner's pile is shuffled uniformly
before being appended to the bottom of their hand, and one whole
tie-resolution sequence counts as a single round.

Runouts: a player who cannot stake ``face_down + 1`` cards mid-war loses
immediately (the opponent collects everything); if both are short
simultaneously the game is a Draw and the staked cards return to their
contributors so the final state still conserves cards.

``min_hand`` is a round-start playability threshold. The default 1 plays
until a hand is empty. Setting it to ``face_down + 1`` makes a player
forfeit whenever they could not fund a full war stake; that convention is
what the published simulation tables this package reproduces turn out to
use, and the reproduction paths run with ``min_hand=2``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .core import Deck, GameState, RngStream, build_deck

DEFAULT_MAX_ROUNDS = 10_000_000

WINNER_A = "A"
WINNER_B = "B"
DRAW = "Draw"
TRUNCATED = "Truncated"


@dataclass(frozen=True)
class TiePolicy:
    """How equal top cards are resolved.

    ``kind`` is ``"war_round"`` or ``"coin_flip"``; ``face_down`` is the
    number of unseen cards staked per war escalation. A player who cannot
    stake mid-war always loses immediately (``runout``).
    """

    kind: str = "war_round"
    face_down: int = 1
    runout: str = "immediate_loss"

    def __post_init__(self):
        if self.kind not in ("war_round", "coin_flip"):
            raise ValueError(
                f"tie policy must be 'war_round' or 'coin_flip', "
                f"got {self.kind!r}"
            )
        if self.face_down < 0:
            raise ValueError("face_down must be non-negative")
        if self.runout != "immediate_loss":
            raise ValueError("only immediate_loss runout is supported")


@dataclass(frozen=True)
class ClassicTrialRecord:
    """One game's outcome; ``cards_won_by_round`` (optional) holds the
    signed pile size per round, positive when A collected it."""

    tau: int
    winner: str
    cards_won_by_round: Optional[tuple] = None
    metadata: dict = field(default_factory=dict)


def _play_round(a, b, ranks, tie: TiePolicy, rng: RngStream):
    """Play one complete round (including any war sequence) in place.

    Returns ``(outcome, signed_pile)`` where outcome is None while the
    game continues, or "A"/"B"/"Draw" when a runout ended it mid-war.
    ``signed_pile`` is the number of cards the pile's winner collected,
    negated when B collected (0 on a Draw).
    """
    war = tie.kind == "war_round"
    ca = a.popleft()
    cb = b.popleft()
    pile = [ca, cb]
    while True:
        ra = ranks[ca]
        rb = ranks[cb]
        if ra != rb:
            a_won = ra > rb
            break
        if not war:
            a_won = rng.random() <= 0.5
            break
        need = tie.face_down + 1
        a_ok = len(a) >= need
        b_ok = len(b) >= need
        if not a_ok and not b_ok:
            # Simultaneous runout: annul the war so the terminal state
            # still conserves cards (stakes go back to their owners).
            a.extend(pile[0::2])
            b.extend(pile[1::2])
            return DRAW, 0
        if not a_ok:
            b.extend(pile)
            b.extend(a)
            a.clear()
            return WINNER_B, 0
        if not b_ok:
            a.extend(pile)
            a.extend(b)
            b.clear()
            return WINNER_A, 0
        for _ in range(tie.face_down):
            pile.append(a.popleft())
            pile.append(b.popleft())
        ca = a.popleft()
        cb = b.popleft()
        pile.append(ca)
        pile.append(cb)
    rng.shuffle(pile)
    if a_won:
        a.extend(pile)
        return None, len(pile)
    b.extend(pile)
    return None, -len(pile)


def classic_step(
    state: GameState,
    tie: TiePolicy,
    deck: Deck,
    rng: RngStream,
    min_hand: int = 1,
) -> tuple[GameState, Optional[str]]:
    """Advance one round from an ordered, non-absorbing state.

    Returns ``(new_state, outcome)``: outcome is None while play
    continues, otherwise "A", "B" or "Draw" for a game that ended this
    round (runout, forfeit below ``min_hand``, or emptied hand). A
    forfeit consumes no randomness and leaves the hands untouched.
    """
    if state.is_absorbing:
        raise ValueError("cannot step an absorbing state")
    if not state.ordered:
        raise ValueError("classic war uses ordered (tuple) hands")
    la, lb = len(state.hand_a), len(state.hand_b)
    if la < min_hand and lb < min_hand:
        return state, DRAW
    if la < min_hand:
        return state, WINNER_B
    if lb < min_hand:
        return state, WINNER_A
    a = deque(state.hand_a)
    b = deque(state.hand_b)
    outcome, _ = _play_round(a, b, deck.ranks, tie, rng)
    new_state = GameState(
        hand_a=tuple(a), hand_b=tuple(b), round=state.round + 1
    )
    if outcome is None and new_state.is_absorbing:
        outcome = WINNER_A if a else WINNER_B
    return new_state, outcome


def classic_run(
    init: GameState,
    tie: TiePolicy,
    deck: Deck,
    rng: RngStream,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    min_hand: int = 1,
    record_pile_sizes: bool = False,
) -> ClassicTrialRecord:
    """Play from ``init`` until the game ends or the round cap is hit."""
    if not init.ordered:
        raise ValueError("classic war uses ordered (tuple) hands")
    a = deque(init.hand_a)
    b = deque(init.hand_b)
    ranks = deck.ranks
    size = deck.size
    piles = [] if record_pile_sizes else None
    rounds = 0
    winner = None
    while True:
        la, lb = len(a), len(b)
        if la < min_hand and lb < min_hand:
            winner = DRAW
            break
        if la < min_hand:
            winner = WINNER_B
            break
        if lb < min_hand:
            winner = WINNER_A
            break
        if rounds >= max_rounds:
            winner = TRUNCATED
            break
        outcome, signed = _play_round(a, b, ranks, tie, rng)
        rounds += 1
        if piles is not None:
            piles.append(signed)
        if __debug__ and outcome != DRAW:
            assert len(a) + len(b) == size, "card count not conserved"
        if outcome is not None:
            winner = outcome
            break
    if __debug__:
        assert sorted(list(a) + list(b)) == list(range(size)), (
            "cards not conserved at game end"
        )
    return ClassicTrialRecord(
        tau=rounds,
        winner=winner,
        cards_won_by_round=tuple(piles) if piles is not None else None,
        metadata={
            "game": "classic",
            "tie": tie.kind,
            "face_down": tie.face_down,
            "min_hand": min_hand,
            "deck": deck.describe(),
            "seed": rng.seed,
            "stream_id": rng.stream_id,
        },
    )


# ---------------------------------------------------------------------------
# Deals and trial recipe
# ---------------------------------------------------------------------------


def deal_top_rank_conditioned(
    deck: Deck, k: int, rng: RngStream
) -> GameState:
    """Deal hands of deck.size/2 with the first player holding exactly
    ``k`` cards of the strongest rank; the remaining cards fill both hands
    uniformly and each hand is uniformly shuffled."""
    top = deck.max_rank
    top_ids = [c.id for c in deck.cards if c.rank == top]
    others = [c.id for c in deck.cards if c.rank != top]
    if not 0 <= k <= len(top_ids):
        raise ValueError(
            f"k must lie in [0, {len(top_ids)}], got {k}"
        )
    half = deck.size // 2
    if half < k or len(others) < half - k:
        raise ValueError("deck too small for the requested conditioning")
    rng.shuffle(others)
    a = top_ids[:k] + others[: half - k]
    b = top_ids[k:] + others[half - k:]
    rng.shuffle(a)
    rng.shuffle(b)
    return GameState(hand_a=tuple(a), hand_b=tuple(b), round=0)


@dataclass(frozen=True)
class ClassicConfig:
    """Picklable trial recipe for the Monte Carlo harness.

    ``top_rank_count`` switches the deal from a uniform split to the
    conditioned deal of :func:`deal_top_rank_conditioned`.
    """

    deck: tuple = (13, 4)
    tie: str = "war_round"
    face_down: int = 1
    min_hand: int = 1
    top_rank_count: Optional[int] = None
    max_rounds: int = DEFAULT_MAX_ROUNDS
    record_pile_sizes: bool = False

    def run_trial(self, seed: int, stream_id: int) -> ClassicTrialRecord:
        from .core import deal_uniform

        deck = build_deck(self.deck)
        tie = TiePolicy(kind=self.tie, face_down=self.face_down)
        rng = RngStream(seed, stream_id)
        if self.top_rank_count is None:
            state = deal_uniform(deck, deck.size // 2, rng, ordered=True)
        else:
            state = deal_top_rank_conditioned(
                deck, self.top_rank_count, rng
            )
        record = classic_run(
            state,
            tie,
            deck,
            rng,
            max_rounds=self.max_rounds,
            min_hand=self.min_hand,
            record_pile_sizes=self.record_pile_sizes,
        )
        if self.top_rank_count is not None and self.tie == "coin_flip":
            copies = sum(
                1 for c in deck.cards if c.rank == deck.max_rank
            )
            _check_top_rank_monotonicity(
                self.top_rank_count, copies, record.winner
            )
        return record


def _check_top_rank_monotonicity(k: int, copies: int, winner: str) -> None:
    """Structural facts under coin-flip ties: a top-rank card can only
    change hands through a top-vs-top tie, so with none of them the first
    player can never win and with all of them can never lose. Checked on
    every simulated game; a violation is an engine bug, not noise. (War
    rounds move unseen cards, so the claim does not apply there.)"""
    if k == 0 and winner == WINNER_A:
        raise RuntimeError(
            "invariant violated: player with zero top-rank cards won"
        )
    if k == copies and winner == WINNER_B:
        raise RuntimeError(
            "invariant violated: player holding every top-rank card lost"
        )


def aces_win_table(
    deck: Deck,
    tie: TiePolicy,
    trials_per_cell: int,
    seed: int,
    min_hand: int = 2,
    workers: int = 1,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> list[dict]:
    """Estimated win probability conditioned on the number of strongest-
    rank cards dealt to the first player (hand sizes equalized).

    Returns one row per count k = 0..copies with an exact (Clopper-
    Pearson) 95% interval; draws and truncated games are excluded from
    the denominator and reported. Cell k uses stream ids starting at
    ``k * trials_per_cell`` so all cells are independent under one seed.
    """
    from .stats import run_trials

    if trials_per_cell < 1:
        raise ValueError("trials_per_cell must be at least 1")
    if deck.spec is None:
        raise ValueError("the conditioned table needs an n_ranks x copies deck")
    copies = deck.spec.copies
    rows = []
    for k in range(copies + 1):
        cfg = ClassicConfig(
            deck=(deck.spec.n_ranks, copies),
            tie=tie.kind,
            face_down=tie.face_down,
            min_hand=min_hand,
            top_rank_count=k,
            max_rounds=max_rounds,
        )
        records = run_trials(
            cfg,
            trials_per_cell,
            seed,
            workers=workers,
            stream_base=k * trials_per_cell,
        )
        wins = sum(1 for r in records if r.winner == WINNER_A)
        draws = sum(1 for r in records if r.winner == DRAW)
        truncated = sum(1 for r in records if r.winner == TRUNCATED)
        decided = trials_per_cell - draws - truncated
        p = wins / decided if decided else float("nan")
        lo, hi = _clopper_pearson(wins, decided)
        rows.append(
            {
                "k": k,
                "trials": trials_per_cell,
                "decided": decided,
                "wins": wins,
                "draws": draws,
                "truncated": truncated,
                "p_win": p,
                "ci_lo": lo,
                "ci_hi": hi,
            }
        )
    return rows


def _clopper_pearson(
    wins: int, n: int, alpha: float = 0.05
) -> tuple[float, float]:
    """Exact binomial confidence interval."""
    from scipy.stats import beta

    if n == 0:
        return 0.0, 1.0
    lo = 0.0 if wins == 0 else float(beta.ppf(alpha / 2, wins, n - wins + 1))
    hi = (
        1.0
        if wins == n
        else float(beta.ppf(1 - alpha / 2, wins + 1, n - wins))
    )
    return lo, hi

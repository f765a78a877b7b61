"""Exact analysis on small decks.

Full state-space enumeration for both engines, the standard first-step
linear systems for absorption probability and expected absorption time
(direct sparse LU, residual-checked), a simple-random-walk oracle, one-step
uniformity preservation for symmetric rules, the exact-rational counting
identity behind it, and zero-drift verification of the strength martingales.

State indexing is canonical so results reproduce across runs and platforms:
random-draw states are the bitmask of the first player's card ids (the mask
is the index); top-card states are the lexicographically sorted list of
ordered hand pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import comb, factorial
from typing import Iterator

import numpy as np
from scipy.sparse import csc_matrix, identity
from scipy.sparse.linalg import splu

from .core import Deck, StrengthFunction, WinningRule

#: Enumeration limits; both spaces grow superexponentially.
MAX_PWAR_CARDS = 14
MAX_FWAR_N = 7

#: Non-absorbing transition rows must sum to 1 within this.
ROW_SUM_TOL = 1e-12
#: Linear solves are rejected if the residual exceeds this.
RESIDUAL_TOL = 1e-9

_EMPTY: frozenset = frozenset()


class AbsorptionError(ValueError):
    """Raised when absorption is not almost sure from every state.

    ``witness`` holds labels of states that cannot reach absorption (a
    recurrent class under the given rule).
    """

    def __init__(self, message: str, witness: list):
        super().__init__(message)
        self.witness = witness


@dataclass
class StateSpace:
    """Enumerated chain: states, sparse transitions, absorption labels.

    ``trans_rows/cols/probs`` are aligned triplet arrays; ``absorbing``
    flags absorbing states and ``absorbing_win`` is 1.0 where the first
    player has won. ``states`` holds bitmask ints (random-draw flavor) or
    ``(hand_a, hand_b)`` tuple pairs (top-card flavor).
    """

    flavor: str
    states: list
    trans_rows: np.ndarray
    trans_cols: np.ndarray
    trans_probs: np.ndarray
    absorbing: np.ndarray
    absorbing_win: np.ndarray
    n_cards: int

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def transitions(self) -> Iterator[tuple]:
        """Sparse (state_index, next_state_index, probability) triplets."""
        return zip(
            self.trans_rows.tolist(),
            self.trans_cols.tolist(),
            self.trans_probs.tolist(),
        )

    def state_label(self, i: int) -> str:
        if self.flavor == "pwar_subsets":
            return str(self.states[i])
        a, b = self.states[i]
        return "a:" + ",".join(map(str, a)) + ";b:" + ",".join(map(str, b))


@dataclass
class SolveResult:
    """Per-state win probability for the first player and expected
    rounds to absorption; zero/one consistent at absorbing states."""

    win_prob_a: np.ndarray
    expected_tau: np.ndarray


def _check_row_sums(space: StateSpace) -> None:
    sums = np.zeros(space.n_states)
    np.add.at(sums, space.trans_rows, space.trans_probs)
    bad = np.flatnonzero(
        ~space.absorbing & (np.abs(sums - 1.0) > ROW_SUM_TOL)
    )
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"transition probabilities from state {space.state_label(i)} "
            f"sum to {sums[i]!r}, not 1"
        )


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def enumerate_pwar(deck: Deck, rule: WinningRule) -> StateSpace:
    """Enumerate the 2^size random-draw states and their transitions.

    From a non-absorbing state each of the |A||B| card pairs is drawn with
    probability 1/(|A||B|), then resolved by the rule.
    """
    d = deck.size
    if d > MAX_PWAR_CARDS:
        raise ValueError(
            f"{d}-card deck exceeds the {MAX_PWAR_CARDS}-card "
            f"enumeration limit (2^size states)"
        )
    cards = deck.cards
    full = (1 << d) - 1
    uses_hand = rule.uses_hand
    ev = rule.eval
    n_states = 1 << d
    absorbing = np.zeros(n_states, dtype=bool)
    absorbing[0] = absorbing[full] = True
    win = np.zeros(n_states)
    win[full] = 1.0
    rows: list[int] = []
    cols: list[int] = []
    probs: list[float] = []
    for mask in range(n_states):
        if mask == 0 or mask == full:
            continue
        a_ids = [i for i in range(d) if mask >> i & 1]
        b_ids = [i for i in range(d) if not mask >> i & 1]
        base = 1.0 / (len(a_ids) * len(b_ids))
        out: dict[int, float] = {}
        for a_id in a_ids:
            if uses_hand:
                s = frozenset(x for x in a_ids if x != a_id)
            else:
                s = _EMPTY
            a = cards[a_id]
            lose_mask = mask & ~(1 << a_id)
            for b_id in b_ids:
                p = ev(a, cards[b_id], s, deck)
                win_mask = mask | (1 << b_id)
                out[win_mask] = out.get(win_mask, 0.0) + base * p
                out[lose_mask] = out.get(lose_mask, 0.0) + base * (1.0 - p)
        for nxt, pr in out.items():
            rows.append(mask)
            cols.append(nxt)
            probs.append(pr)
    space = StateSpace(
        flavor="pwar_subsets",
        states=list(range(n_states)),
        trans_rows=np.asarray(rows, dtype=np.int64),
        trans_cols=np.asarray(cols, dtype=np.int64),
        trans_probs=np.asarray(probs, dtype=np.float64),
        absorbing=absorbing,
        absorbing_win=win,
        n_cards=d,
    )
    _check_row_sums(space)
    return space


def enumerate_fwar(n: int, strength: StrengthFunction) -> StateSpace:
    """Enumerate all (n+1)! ordered-hand top-card states.

    Each non-absorbing state branches four ways: winner (Bradley-Terry on
    the front cards) times the two bottom-return orders at probability 1/2
    each.
    """
    if n > MAX_FWAR_N:
        raise ValueError(
            f"n={n} exceeds the n<={MAX_FWAR_N} enumeration limit "
            f"((n+1)! states)"
        )
    if n < 1:
        raise ValueError("n must be positive")
    fs = strength.table(n)
    ids = list(range(n))
    states: list[tuple[tuple, tuple]] = []
    for k in range(n + 1):
        for a_set in combinations(ids, k):
            b_set = tuple(i for i in ids if i not in a_set)
            for a_perm in permutations(a_set):
                for b_perm in permutations(b_set):
                    states.append((a_perm, b_perm))
    states.sort()
    index = {s: i for i, s in enumerate(states)}
    n_states = len(states)
    absorbing = np.zeros(n_states, dtype=bool)
    win = np.zeros(n_states)
    rows: list[int] = []
    cols: list[int] = []
    probs: list[float] = []
    for i, (a, b) in enumerate(states):
        if not a or not b:
            absorbing[i] = True
            if not b:
                win[i] = 1.0
            continue
        fa = fs[a[0]]
        fb = fs[b[0]]
        p = fa / (fa + fb)
        a_tail, b_tail = a[1:], b[1:]
        successors = (
            (index[(a_tail + (a[0], b[0]), b_tail)], p * 0.5),
            (index[(a_tail + (b[0], a[0]), b_tail)], p * 0.5),
            (index[(a_tail, b_tail + (b[0], a[0]))], (1 - p) * 0.5),
            (index[(a_tail, b_tail + (a[0], b[0]))], (1 - p) * 0.5),
        )
        for j, pr in successors:
            rows.append(i)
            cols.append(j)
            probs.append(pr)
    space = StateSpace(
        flavor="fwar_ordered",
        states=states,
        trans_rows=np.asarray(rows, dtype=np.int64),
        trans_cols=np.asarray(cols, dtype=np.int64),
        trans_probs=np.asarray(probs, dtype=np.float64),
        absorbing=absorbing,
        absorbing_win=win,
        n_cards=n,
    )
    _check_row_sums(space)
    return space


# ---------------------------------------------------------------------------
# Absorption solve
# ---------------------------------------------------------------------------


def _unreachable_states(space: StateSpace) -> list[int]:
    """States that cannot reach absorption with positive probability."""
    n = space.n_states
    incoming: list[list[int]] = [[] for _ in range(n)]
    for r, c, p in zip(
        space.trans_rows, space.trans_cols, space.trans_probs
    ):
        if p > 0.0:
            incoming[c].append(r)
    seen = space.absorbing.copy()
    stack = list(np.flatnonzero(space.absorbing))
    while stack:
        j = stack.pop()
        for i in incoming[j]:
            if not seen[i]:
                seen[i] = True
                stack.append(i)
    return [int(i) for i in np.flatnonzero(~seen)]


def absorption_solve(space: StateSpace) -> SolveResult:
    """Solve the first-step equations for win probability and E[rounds].

    win[i] = sum_j P(i, j) win[j] with boundary 1/0 at the absorbing
    states, and tau[i] = 1 + sum_j P(i, j) tau[j] with tau = 0 there.
    Direct sparse LU; residuals above ``RESIDUAL_TOL`` raise. States from
    which absorption is not almost sure raise ``AbsorptionError`` with a
    recurrent-class witness.
    """
    bad = _unreachable_states(space)
    if bad:
        labels = [space.state_label(i) for i in bad[:8]]
        raise AbsorptionError(
            f"{len(bad)} state(s) cannot reach absorption, e.g. "
            f"{labels}",
            witness=bad,
        )
    n = space.n_states
    transient = np.flatnonzero(~space.absorbing)
    n_t = transient.size
    win = space.absorbing_win.copy()
    tau = np.zeros(n)
    if n_t:
        t_index = -np.ones(n, dtype=np.int64)
        t_index[transient] = np.arange(n_t)
        rows = t_index[space.trans_rows]
        keep = rows >= 0
        rows = rows[keep]
        cols_full = space.trans_cols[keep]
        probs = space.trans_probs[keep]
        to_transient = ~space.absorbing[cols_full]
        q = csc_matrix(
            (
                probs[to_transient],
                (rows[to_transient], t_index[cols_full[to_transient]]),
            ),
            shape=(n_t, n_t),
        )
        b_win = np.zeros(n_t)
        to_abs = ~to_transient
        np.add.at(
            b_win,
            rows[to_abs],
            probs[to_abs] * space.absorbing_win[cols_full[to_abs]],
        )
        a_mat = (identity(n_t, format="csc") - q).tocsc()
        lu = splu(a_mat)
        x_win = lu.solve(b_win)
        ones = np.ones(n_t)
        x_tau = lu.solve(ones)
        res_win = np.max(np.abs(a_mat @ x_win - b_win), initial=0.0)
        res_tau = np.max(np.abs(a_mat @ x_tau - ones), initial=0.0)
        if max(res_win, res_tau) > RESIDUAL_TOL:
            raise ValueError(
                f"solver residual {max(res_win, res_tau):.3e} exceeds "
                f"{RESIDUAL_TOL}"
            )
        win[transient] = x_win
        tau[transient] = x_tau
    return SolveResult(win_prob_a=win, expected_tau=tau)


def solve_rows(space: StateSpace, result: SolveResult) -> Iterator[dict]:
    """Per-state export rows: index, canonical label, win prob, E[tau]."""
    for i in range(space.n_states):
        yield {
            "state_index": i,
            "state": space.state_label(i),
            "win_prob_a": float(result.win_prob_a[i]),
            "expected_tau": float(result.expected_tau[i]),
        }


# ---------------------------------------------------------------------------
# Oracles and identity checks
# ---------------------------------------------------------------------------


def srw_oracle(total: int, a0: int) -> tuple[float, float]:
    """Gambler's-ruin closed forms for a fair walk on [0, total]:
    expected absorption time a0 (total - a0) and win probability
    a0 / total."""
    if total < 1:
        raise ValueError("total must be positive")
    if not 0 <= a0 <= total:
        raise ValueError(f"a0 must lie in [0, {total}], got {a0}")
    return float(a0 * (total - a0)), a0 / total


def average_uniform_hands(
    space: StateSpace, result: SolveResult, k: int
) -> tuple[float, float]:
    """Mean (E[tau], win prob) over the uniform distribution on size-k
    first-player hands of a random-draw space."""
    if space.flavor != "pwar_subsets":
        raise ValueError("uniform-hand averaging needs a random-draw space")
    masks = [m for m in space.states if bin(m).count("1") == k]
    if not masks:
        raise ValueError(f"no states of hand size {k}")
    w = 1.0 / len(masks)
    mean_tau = sum(result.expected_tau[m] for m in masks) * w
    mean_win = sum(result.win_prob_a[m] for m in masks) * w
    return float(mean_tau), float(mean_win)


def verify_uniform_preservation(
    rule: WinningRule, deck: Deck, k: int
) -> float:
    """Max deviation of one exact step from the uniform mixture.

    Starting from the uniform distribution over size-k first-player
    hands, one transition step of a symmetric rule must land on the
    half/half mixture of the uniform distributions over sizes k-1 and
    k+1. Returns the largest absolute per-state deviation; symmetric
    rules sit at rounding level, non-symmetric rules visibly break it.
    """
    d = deck.size
    if d > 12:
        raise ValueError("uniformity check is limited to 12-card decks")
    if not 1 <= k <= d - 1:
        raise ValueError(f"k must be a non-absorbing size in [1, {d - 1}]")
    space = enumerate_pwar(deck, rule)
    pi0 = np.zeros(space.n_states)
    start = [m for m in space.states if bin(m).count("1") == k]
    pi0[start] = 1.0 / len(start)
    pi1 = np.zeros(space.n_states)
    np.add.at(
        pi1,
        space.trans_cols,
        space.trans_probs * pi0[space.trans_rows],
    )
    target = np.zeros(space.n_states)
    lo = [m for m in space.states if bin(m).count("1") == k - 1]
    hi = [m for m in space.states if bin(m).count("1") == k + 1]
    target[lo] = 0.5 / len(lo)
    target[hi] = 0.5 / len(hi)
    return float(np.max(np.abs(pi1 - target)))


def counting_identity(n: int, k: int) -> bool:
    """Exact-rational equality of the two factorizations of a uniform
    round outcome at hand size k on a 2n-card deck:

    1/C(2n, k-1) * 1/C(2n-k+1, 2) * 1/2  ==  1/C(2n, k) * 1/k * 1/(2n-k)
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not 1 <= k <= 2 * n - 1:
        raise ValueError(f"k must lie in [1, {2 * n - 1}], got {k}")
    lhs = (
        Fraction(1, comb(2 * n, k - 1))
        * Fraction(1, comb(2 * n - k + 1, 2))
        * Fraction(1, 2)
    )
    rhs = (
        Fraction(1, comb(2 * n, k))
        * Fraction(1, k)
        * Fraction(1, 2 * n - k)
    )
    return lhs == rhs


def verify_martingales(
    space: StateSpace, strength: StrengthFunction
) -> tuple[float, float]:
    """Exact one-step drifts of the strength martingales.

    For every non-absorbing top-card state, the conditional expectation
    of the change in M (total first-player strength) must be 0, and the
    change in M^2 minus the round product f(a) f(b) must be 0. Returns
    the maximum absolute deviations (drift_m, drift_q).
    """
    if space.flavor != "fwar_ordered":
        raise ValueError("martingale drifts need a top-card space")
    fs = strength.table(space.n_cards)
    drift_m = 0.0
    drift_q = 0.0
    for i, (a, b) in enumerate(space.states):
        if space.absorbing[i]:
            continue
        fa = fs[a[0]]
        fb = fs[b[0]]
        m = sum(fs[x] for x in a)
        p = fa / (fa + fb)
        e_dm = p * fb - (1.0 - p) * fa
        e_dm2 = p * (m + fb) ** 2 + (1.0 - p) * (m - fa) ** 2 - m * m
        drift_m = max(drift_m, abs(e_dm))
        drift_q = max(drift_q, abs(e_dm2 - fa * fb))
    return drift_m, drift_q


def strongest_deal_exact_win_prob(
    n: int, strength: StrengthFunction
) -> float:
    """Exact win probability under the strongest-card deal, by weighting
    the solved per-state probabilities with the deal's law: the strongest
    card is in the first hand, every other card by a fair coin, and both
    hands uniformly permuted."""
    space = enumerate_fwar(n, strength)
    result = absorption_solve(space)
    strongest = n - 1
    base = 0.5 ** (n - 1)
    total = 0.0
    for i, (a, b) in enumerate(space.states):
        if strongest not in a:
            continue
        weight = base / (factorial(len(a)) * factorial(len(b)))
        total += weight * float(result.win_prob_a[i])
    return total


def iid_deal_exact_win_prob(n: int, strength: StrengthFunction) -> float:
    """Exact win probability under the iid fair-coin deal (hands then
    uniformly permuted); by player exchangeability this equals 1/2."""
    space = enumerate_fwar(n, strength)
    result = absorption_solve(space)
    base = 0.5**n
    total = 0.0
    for i, (a, b) in enumerate(space.states):
        weight = base / (factorial(len(a)) * factorial(len(b)))
        total += weight * float(result.win_prob_a[i])
    return total

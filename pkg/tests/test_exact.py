"""Tests for enumeration, the absorption solver, oracles and identities."""

import itertools
import math
from collections import defaultdict
from fractions import Fraction

import numpy as np
import pytest

from warlab.core import WinningRule, build_deck
from warlab.exact import (
    AbsorptionError,
    absorption_solve,
    average_uniform_hands,
    counting_identity,
    enumerate_fwar,
    enumerate_pwar,
    iid_deal_exact_win_prob,
    solve_rows,
    srw_oracle,
    strongest_deal_exact_win_prob,
    verify_martingales,
    verify_uniform_preservation,
)
from warlab.fwar import strongest_deal_win_prob
from warlab.rules import (
    rule_by_name,
    rule_coin,
    rule_greater_tiecoin,
    rule_max_holder,
    rule_powered,
    strength_builtin,
)

EXACT_TOL = 1e-9


def _mask(deck, ranks):
    """Bitmask of the hand holding the given ranks (distinct-rank decks)."""
    by_rank = {c.rank: c.id for c in deck.cards}
    mask = 0
    for r in ranks:
        mask |= 1 << by_rank[r]
    return mask


class TestEnumeratePwar:
    def test_two_card_deck(self):
        """Deck of 2: 4 subsets as states, 2 of them absorbing."""
        space = enumerate_pwar(build_deck((2, 1)), rule_coin())
        assert space.n_states == 4
        assert int(space.absorbing.sum()) == 2
        assert space.absorbing_win[3] == 1.0
        assert space.absorbing_win[0] == 0.0

    def test_coin_rule_transition(self):
        """From hand {1,2} of a 4-card deck, P(next size 3) = 1/2."""
        deck = build_deck((4, 1))
        space = enumerate_pwar(deck, rule_coin())
        mask = _mask(deck, {1, 2})
        up = sum(
            p
            for i, j, p in space.transitions
            if i == mask and bin(j).count("1") == 3
        )
        assert up == pytest.approx(0.5, abs=1e-15)

    def test_row_sums_all_rules(self):
        """Outgoing probabilities sum to 1 for every built-in on deck 6."""
        deck = build_deck((6, 1))
        for name in ("coin", "greater-tiecoin", "powered", "bradley-terry",
                     "max-holder"):
            space = enumerate_pwar(deck, rule_by_name(name))
            sums = np.zeros(space.n_states)
            np.add.at(sums, space.trans_rows, space.trans_probs)
            transient = ~space.absorbing
            assert np.max(np.abs(sums[transient] - 1.0)) <= 1e-12

    def test_rejects_large_deck(self):
        with pytest.raises(ValueError):
            enumerate_pwar(build_deck((15, 1)), rule_coin())


class TestEnumerateFwar:
    def test_n1_both_states_absorbing(self):
        """n=1: the two one-card states are absorbing; the game is decided
        at the deal."""
        space = enumerate_fwar(1, strength_builtin("identity"))
        assert space.n_states == 2
        assert space.absorbing.all()

    def test_state_count_is_factorial(self):
        """(n+1)! ordered states; 120 at n=4."""
        for n in (2, 3, 4):
            space = enumerate_fwar(n, strength_builtin("identity"))
            assert space.n_states == math.factorial(n + 1)

    def test_single_pair_absorption_probability(self):
        """n=2, hands (2) vs (1), identity strengths: P(absorb to A) =
        2/3 on the next step."""
        space = enumerate_fwar(2, strength_builtin("identity"))
        idx = space.states.index(((1,), (0,)))
        win_mass = sum(
            p
            for i, j, p in space.transitions
            if i == idx and not space.states[j][1]
        )
        assert win_mass == pytest.approx(2 / 3, abs=1e-15)

    def test_rejects_large_n(self):
        with pytest.raises(ValueError):
            enumerate_fwar(8, strength_builtin("identity"))


class TestAbsorptionSolve:
    def test_uniform_hands_match_walk_values(self):
        """Uniform size-2 hands on deck 4 under the coin rule:
        E[tau] = 4, P(A wins) = 1/2."""
        deck = build_deck((4, 1))
        space = enumerate_pwar(deck, rule_coin())
        result = absorption_solve(space)
        mean_tau, mean_win = average_uniform_hands(space, result, 2)
        assert mean_tau == pytest.approx(4.0, abs=EXACT_TOL)
        assert mean_win == pytest.approx(0.5, abs=EXACT_TOL)

    def test_dominant_hand(self):
        """Hand {3,4} on deck 4 under higher-card-wins: the max card never
        leaves the hand, so P(A wins) = 1. The first capture adds a weak
        card that can lose later rounds, and the first-step recursion
        T = 1 + (1/2)(1 + T/3) + 1/2 gives E[tau] = 12/5."""
        deck = build_deck((4, 1))
        space = enumerate_pwar(deck, rule_greater_tiecoin())
        result = absorption_solve(space)
        mask = _mask(deck, {3, 4})
        assert result.expected_tau[mask] == pytest.approx(
            12 / 5, abs=EXACT_TOL
        )
        assert result.win_prob_a[mask] == pytest.approx(1.0, abs=EXACT_TOL)

    def test_absorbing_states_zero_consistent(self):
        deck = build_deck((4, 1))
        space = enumerate_pwar(deck, rule_coin())
        result = absorption_solve(space)
        assert result.expected_tau[0] == 0.0
        assert result.expected_tau[15] == 0.0
        assert result.win_prob_a[0] == 0.0
        assert result.win_prob_a[15] == 1.0

    def test_results_in_range(self):
        deck = build_deck((6, 1))
        space = enumerate_pwar(deck, rule_powered())
        result = absorption_solve(space)
        assert np.all(result.win_prob_a >= -1e-12)
        assert np.all(result.win_prob_a <= 1 + 1e-12)
        assert np.all(result.expected_tau >= -1e-12)

    def test_recurrent_class_reported(self):
        """A valid but oscillating rule never absorbs: the solver refuses
        with a witness instead of returning garbage."""

        def ev(a, b, s, deck):
            half = deck.size // 2
            if len(s) < half - 1:
                return 1.0
            if len(s) > half - 1:
                return 0.0
            return 0.5

        oscillator = WinningRule(name="oscillator", eval=ev, uses_hand=True)
        space = enumerate_pwar(build_deck((4, 1)), oscillator)
        with pytest.raises(AbsorptionError) as err:
            absorption_solve(space)
        assert len(err.value.witness) > 0

    def test_solve_rows_export(self):
        deck = build_deck((2, 1))
        space = enumerate_pwar(deck, rule_coin())
        rows = list(solve_rows(space, absorption_solve(space)))
        assert len(rows) == 4
        assert rows[3]["win_prob_a"] == 1.0
        assert {r["state"] for r in rows} == {"0", "1", "2", "3"}


class TestSrwOracle:
    def test_reference_values(self):
        assert srw_oracle(52, 26) == (676.0, 0.5)
        assert srw_oracle(8, 0) == (0.0, 0.0)
        assert srw_oracle(8, 3) == (15.0, 0.375)

    def test_cross_check_against_solver(self):
        """(8,3) agrees with the exact solve of the coin rule on deck 8."""
        deck = build_deck((8, 1))
        space = enumerate_pwar(deck, rule_coin())
        result = absorption_solve(space)
        mean_tau, mean_win = average_uniform_hands(space, result, 3)
        assert mean_tau == pytest.approx(15.0, abs=EXACT_TOL)
        assert mean_win == pytest.approx(0.375, abs=EXACT_TOL)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            srw_oracle(8, 9)


def _one_step_distribution_oracle(deck, rule, k):
    """Independent brute-force: distribution of the hand after one round
    from the uniform distribution over size-k hands, via direct summation
    over (hand, a, b) triples (no transition matrices)."""
    ids = list(range(deck.size))
    hands = list(itertools.combinations(ids, k))
    w0 = 1.0 / len(hands)
    dist = defaultdict(float)
    for hand in hands:
        hand_set = set(hand)
        others = [i for i in ids if i not in hand_set]
        pair_w = w0 / (len(hand) * len(others))
        for a_id in hand:
            s = frozenset(hand_set - {a_id})
            for b_id in others:
                p = rule.eval(deck.cards[a_id], deck.cards[b_id], s, deck)
                dist[frozenset(hand_set | {b_id})] += pair_w * p
                dist[s] += pair_w * (1.0 - p)
    return dist


class TestUniformPreservation:
    def test_symmetric_rules_preserve(self):
        deck = build_deck((6, 1))
        for name in ("coin", "greater-tiecoin", "powered"):
            dev = verify_uniform_preservation(rule_by_name(name), deck, 3)
            assert dev <= 1e-12, f"{name}: {dev}"

    def test_coin_rule_any_size(self):
        deck = build_deck((4, 2))
        for k in range(1, 8):
            assert verify_uniform_preservation(rule_coin(), deck, k) <= 1e-12

    def test_max_holder_breaks_uniformity(self):
        """Non-symmetric rule: the one-step distribution visibly deviates
        from the half/half uniform mixture, and the deviation agrees with
        an independent brute-force computation."""
        deck = build_deck((6, 1))
        dev = verify_uniform_preservation(rule_max_holder(), deck, 3)
        assert dev > 0.01
        dist = _one_step_distribution_oracle(deck, rule_max_holder(), 3)
        n_lo = math.comb(6, 2)
        n_hi = math.comb(6, 4)
        oracle_dev = 0.0
        for hand, mass in dist.items():
            target = 0.5 / (n_lo if len(hand) == 2 else n_hi)
            oracle_dev = max(oracle_dev, abs(mass - target))
        assert dev == pytest.approx(oracle_dev, abs=1e-12)

    def test_oracle_agrees_for_symmetric_rule(self):
        deck = build_deck((6, 1))
        dist = _one_step_distribution_oracle(deck, rule_greater_tiecoin(), 2)
        n_lo = math.comb(6, 1)
        n_hi = math.comb(6, 3)
        for hand, mass in dist.items():
            target = 0.5 / (n_lo if len(hand) == 1 else n_hi)
            assert mass == pytest.approx(target, abs=1e-12)

    def test_rejects_absorbing_k(self):
        deck = build_deck((4, 1))
        with pytest.raises(ValueError):
            verify_uniform_preservation(rule_coin(), deck, 0)


class TestCountingIdentity:
    def test_small_cases(self):
        assert counting_identity(1, 1)
        assert counting_identity(3, 2)

    def test_both_sides_value(self):
        """n=3, k=2: both factorizations equal 1/120 exactly."""
        lhs = (
            Fraction(1, math.comb(6, 1))
            * Fraction(1, math.comb(5, 2))
            * Fraction(1, 2)
        )
        assert lhs == Fraction(1, 120)
        rhs = Fraction(1, math.comb(6, 2)) * Fraction(1, 2) * Fraction(1, 4)
        assert rhs == Fraction(1, 120)
        assert counting_identity(3, 2)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            counting_identity(3, 0)
        with pytest.raises(ValueError):
            counting_identity(3, 6)


class TestMartingaleDrifts:
    def test_identity_n4(self):
        space = enumerate_fwar(4, strength_builtin("identity"))
        dm, dq = verify_martingales(space, strength_builtin("identity"))
        assert dm <= 1e-10
        assert dq <= 1e-10

    def test_constant_is_walk_compensator(self):
        """Constant strengths: the compensator increment is exactly 1, the
        discrete analogue of a unit-variance fair step."""
        f = strength_builtin("constant")
        space = enumerate_fwar(4, f)
        dm, dq = verify_martingales(space, f)
        assert dm <= 1e-12
        assert dq <= 1e-12

    def test_exponential_n5(self):
        f = strength_builtin("exponential", lam=1.0)
        space = enumerate_fwar(5, f)
        dm, dq = verify_martingales(space, f)
        assert max(dm, dq) <= 1e-9

    def test_flavor_check(self):
        space = enumerate_pwar(build_deck((4, 1)), rule_coin())
        with pytest.raises(ValueError):
            verify_martingales(space, strength_builtin("identity"))


class TestStrongestDealExact:
    def test_identity_n3(self):
        """Exact chain solve matches the closed form 3/4 within 1e-9."""
        f = strength_builtin("identity")
        assert strongest_deal_exact_win_prob(3, f) == pytest.approx(
            0.75, abs=EXACT_TOL
        )

    @pytest.mark.parametrize("kind,lam", [
        ("identity", None), ("constant", None), ("exponential", 1.0),
    ])
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_matches_closed_form(self, kind, lam, n):
        kw = {"lam": lam} if lam is not None else {}
        f = strength_builtin(kind, **kw)
        exact_p = strongest_deal_exact_win_prob(n, f)
        assert exact_p == pytest.approx(
            strongest_deal_win_prob(f, n), abs=EXACT_TOL
        )

    def test_iid_deal_is_fair(self):
        """Exchangeable players: iid fair-coin deal gives P(A wins)=1/2."""
        f = strength_builtin("identity")
        assert iid_deal_exact_win_prob(4, f) == pytest.approx(
            0.5, abs=EXACT_TOL
        )


class TestMonteCarloAgreesWithExact:
    def test_pwar_small_instance(self):
        """Simulation matches the exact solve within 3 sigma on a small
        instance (powered rule, deck 6, uniform size-3 hands)."""
        from warlab.pwar import PwarConfig
        from warlab.stats import run_trials

        deck = build_deck((6, 1))
        space = enumerate_pwar(deck, rule_powered())
        result = absorption_solve(space)
        exact_tau, exact_win = average_uniform_hands(space, result, 3)
        n = 20000
        records = run_trials(PwarConfig(deck=(6, 1), rule="powered"), n, 61)
        taus = [r.tau for r in records]
        mean = sum(taus) / n
        sem = np.std(taus, ddof=1) / math.sqrt(n)
        assert abs(mean - exact_tau) <= 3 * sem
        freq = sum(r.winner == "A" for r in records) / n
        assert abs(freq - exact_win) <= 3 * math.sqrt(0.25 / n)

    def test_fwar_small_instance(self):
        """Top-card simulation matches its exact solve (identity, n=4,
        uniform 2-2 ordered split)."""
        from warlab.fwar import FwarConfig
        from warlab.stats import run_trials

        f = strength_builtin("identity")
        space = enumerate_fwar(4, f)
        result = absorption_solve(space)
        starts = [
            i for i, (a, b) in enumerate(space.states)
            if len(a) == 2 and len(b) == 2
        ]
        exact_win = float(np.mean([result.win_prob_a[i] for i in starts]))
        exact_tau = float(np.mean([result.expected_tau[i] for i in starts]))
        n = 20000
        records = run_trials(FwarConfig(n=4, strength="identity"), n, 62)
        freq = sum(r.winner == "A" for r in records) / n
        taus = [r.tau for r in records]
        mean = sum(taus) / n
        sem = np.std(taus, ddof=1) / math.sqrt(n)
        assert abs(freq - exact_win) <= 3 * math.sqrt(0.25 / n)
        assert abs(mean - exact_tau) <= 3 * sem

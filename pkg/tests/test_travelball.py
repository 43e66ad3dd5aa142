"""Traveling-ballot protocol and its two attacks."""

from itertools import permutations, product

import numpy as np
import pytest

from qevote.errors import ParameterError, ProtocolOrderError
from qevote.harness import (
    ExperimentConfig,
    HonestStrategy,
    estimate_advantage,
    run_integrity_experiment,
    run_privacy_experiment,
)
from qevote.qcore import basis_state
from qevote.rng import Rng
from qevote.travelball import (
    BINDING,
    DoubleVoteStrategy,
    SandwichStrategy,
    attack_collude_sandwich,
    attack_double_vote,
    cast,
    measure_ballot,
    setup,
    tally,
)


def run_votes(votes, dim=None, seed=1):
    ts = setup(len(votes), dim)
    for v in votes:
        ts = cast(ts, v)
    return tally(ts, Rng(seed))


class TestHonestRuns:
    def test_two_voters_give_a_bell_pair(self):
        ts = setup(2, 2)
        bell = (basis_state([2, 2], (0, 0)).amps + basis_state([2, 2], (1, 1)).amps) / np.sqrt(2)
        assert abs(np.vdot(bell, ts.state.amps)) ** 2 == pytest.approx(1.0)

    def test_fresh_state_measures_equal_on_both_qudits(self):
        for seed in range(20):
            ts = setup(3)
            rng = Rng(seed)
            from qevote.qcore import measure_computational

            first = measure_computational(ts.state, 0, rng)
            second = measure_computational(first.state, 1, rng)
            assert first.outcome == second.outcome

    def test_no_votes_tally_zero(self):
        assert run_votes([0, 0, 0]) == 0

    def test_three_voters_two_yes(self):
        assert run_votes([1, 1, 0]) == 2

    def test_votes_101_dim_4_every_seed(self):
        for seed in range(10):
            assert run_votes([1, 0, 1], dim=4, seed=seed) == 2

    def test_all_yes_wraps_to_zero_when_dim_equals_voters(self):
        assert run_votes([1, 1, 1], dim=3) == 0

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_honest_correctness_exhaustive(self, n):
        for votes in product((0, 1), repeat=n):
            assert run_votes(list(votes)) == sum(votes)

    def test_casting_order_does_not_matter(self):
        # cast operations commute; exhaust all orders for n <= 3
        for n in (2, 3):
            for votes in product((0, 1), repeat=n):
                expected = sum(votes)
                for order in permutations(votes):
                    assert run_votes(list(order)) == expected

    def test_outcomes_always_differ_by_the_yes_count(self):
        from qevote.qcore import measure_computational

        for seed in range(25):
            ts = setup(3)
            for v in (1, 0, 1):
                ts = cast(ts, v)
            rng = Rng(seed)
            a = measure_computational(ts.state, 0, rng)
            b = measure_computational(a.state, 1, rng)
            assert (a.outcome - b.outcome) % ts.dim == 2


class TestGuards:
    def test_dimension_below_voter_count_rejected(self):
        with pytest.raises(ParameterError):
            setup(4, 3)

    def test_vote_must_be_binary(self):
        with pytest.raises(ParameterError):
            cast(setup(2), 2)

    def test_casting_past_the_last_position(self):
        ts = setup(2)
        ts = cast(ts, 0)
        ts = cast(ts, 1)
        with pytest.raises(ProtocolOrderError):
            cast(ts, 0)

    def test_tally_before_all_cast(self):
        ts = cast(setup(2), 1)
        with pytest.raises(ProtocolOrderError):
            tally(ts, Rng(0))

    def test_double_vote_needs_open_position(self):
        ts = cast(cast(setup(2), 0), 0)
        with pytest.raises(ProtocolOrderError):
            attack_double_vote(ts, 1)


class TestSandwichAttack:
    def test_victim_voting_no_recovered_exactly(self):
        for seed in range(10):
            res = attack_collude_sandwich(setup(4), [0, 0, 0, 0], 2, Rng(seed))
            assert res.recovered == 0

    def test_hundred_seeded_trials_recover_at_rate_one(self):
        hits = 0
        for seed in range(100):
            rng = Rng(seed)
            victim_vote = rng.bit()
            votes = [0, victim_vote, 0, rng.bit()]
            res = attack_collude_sandwich(setup(4), votes, 2, rng)
            hits += res.recovered == victim_vote
        assert hits == 100

    def test_tally_still_matches_the_votes_actually_cast(self):
        # colluders cast nothing, so the tally sums the other positions
        for seed in range(20):
            rng = Rng(seed)
            votes = [rng.bit() for _ in range(5)]
            res = attack_collude_sandwich(setup(5), votes, 3, rng)
            cast_positions = [0, 4]  # positions 2 and 4 measure, position 3 is the victim
            expected = votes[2] + sum(votes[i] for i in cast_positions)
            assert res.tally == expected % 6

    def test_wider_gap_reveals_only_the_span_total(self):
        for seed in range(20):
            rng = Rng(seed)
            votes = [0, rng.bit(), rng.bit(), 0, 0]
            res = attack_collude_sandwich(setup(5), votes, 2, rng, span=2)
            assert res.recovered == (votes[1] + votes[2]) % 6

    def test_victim_position_needs_room_for_both_colluders(self):
        with pytest.raises(ParameterError):
            attack_collude_sandwich(setup(3), [0, 0, 0], 3, Rng(0))

    def test_measure_ballot_consumes_the_position(self):
        outcome, ts = measure_ballot(setup(2), Rng(0))
        assert 0 <= outcome < ts.dim
        assert ts.position == 2


class TestHarnessRuns:
    def test_honest_integrity_never_wins(self):
        cfg = ExperimentConfig(protocol="travelball", n_voters=3, votes=[1, 0, 1])
        rep = run_integrity_experiment(cfg, BINDING, HonestStrategy(), trials=50, seed=3)
        assert rep.win_rate() == 0.0

    def test_double_vote_wins_integrity_every_trial(self):
        cfg = ExperimentConfig(
            protocol="travelball", n_voters=3, corruption_budget=0.34, votes=[0, 0, 0]
        )
        rep = run_integrity_experiment(cfg, BINDING, DoubleVoteStrategy(extra=1), trials=100, seed=3)
        assert rep.win_rate() == 1.0

    def test_declared_yes_applied_twice_also_wins(self):
        cfg = ExperimentConfig(
            protocol="travelball", n_voters=3, corruption_budget=0.34, votes=[1, 1, 0]
        )
        rep = run_integrity_experiment(cfg, BINDING, DoubleVoteStrategy(extra=1), trials=100, seed=3)
        assert rep.win_rate() == 1.0

    def test_sandwich_wins_privacy_with_fixed_order(self):
        cfg = ExperimentConfig(
            protocol="travelball",
            n_voters=4,
            corruption_budget=0.5,
            votes=[0, 0, 0, 1],
            casting_order=[0, 1, 2, 3],
            vote_permutation="flip",
        )
        rep = run_privacy_experiment(cfg, BINDING, SandwichStrategy(victim=2), trials=200, seed=9)
        assert rep.excluded == 0
        assert rep.win_rate() == 1.0
        assert estimate_advantage(rep).advantage == pytest.approx(0.5)

    def test_sandwich_with_random_order_wins_every_scored_trial(self):
        cfg = ExperimentConfig(
            protocol="travelball",
            n_voters=4,
            corruption_budget=0.5,
            votes=[0, 0, 0, 1],
            vote_permutation="flip",
        )
        rep = run_privacy_experiment(cfg, BINDING, SandwichStrategy(victim=2), trials=300, seed=9)
        assert rep.scored > 0
        assert rep.win_rate() == 1.0

"""Dual-basis referendum: states, verification, tally, and attacks."""

import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from qevote.analysis import untested_probability
from qevote.dualbasis import (
    BINDING,
    AbortProbeStrategy,
    CorruptSetupStrategy,
    DualBasisParams,
    _outcome_probs,
    attack_abort_deanonymize,
    attack_corrupt_setup,
    attack_extract_votes,
    attack_extract_votes_via_sk,
    cast,
    cut_and_choose,
    make_d1_state,
    make_d2_state,
    measure_blank_ballots,
    row_sum,
    run_honest_election,
    sample_copy_fast,
    sample_copy_sv,
    setup_honest,
    untested_event,
)
from qevote.errors import (
    CapacityError,
    DomainError,
    ParameterError,
    ProtocolAbort,
)
from qevote.harness import (
    ExperimentConfig,
    HonestStrategy,
    run_integrity_experiment,
    run_privacy_experiment,
)
from qevote.rng import Rng


def chi_square_ok(counts, probs, alpha=0.01):
    total = sum(counts)
    expected = [p * total for p in probs]
    _, pvalue = stats.chisquare(counts, expected)
    return pvalue > alpha


class TestStates:
    def test_d1_amplitudes_three_qubits(self):
        st = make_d1_state(3, 2)
        want = np.zeros(8)
        for idx in (0b000, 0b011, 0b101, 0b110):
            want[idx] = 0.5
        assert np.allclose(st.amps, want)

    def test_d2_amplitudes_two_voters(self):
        st = make_d2_state(2)
        want = np.zeros(4)
        want[1] = want[2] = 1 / math.sqrt(2)
        assert np.allclose(st.amps, want)

    def test_d1_fourier_law_is_uniform_all_equal(self):
        for n, c in ((3, 2), (3, 3), (4, 2)):
            probs = _outcome_probs("d1", n, c, "fourier")
            dims = (c,) * n
            for flat in np.flatnonzero(probs > 1e-12):
                digits = np.unravel_index(flat, dims)
                assert len(set(map(int, digits))) == 1
            support = probs[probs > 1e-12]
            assert len(support) == c
            assert np.allclose(support, 1 / c)

    def test_d2_fourier_law_sums_to_zero_but_is_not_flat(self):
        probs = _outcome_probs("d2", 3, 3, "fourier")
        dims = (3, 3, 3)
        support = [np.unravel_index(i, dims) for i in np.flatnonzero(probs > 1e-12)]
        assert all(sum(map(int, t)) % 3 == 0 for t in support)
        # outcomes need not agree, and the law is visibly non-uniform
        assert any(len(set(map(int, t))) > 1 for t in support)
        vals = probs[probs > 1e-12]
        assert vals.max() / vals.min() > 1.5

    def test_fast_sampler_matches_amplitude_law(self):
        cases = [("d1", 3, 3, "computational"), ("d1", 3, 3, "fourier"), ("d2", 3, 3, "computational")]
        rng = Rng(101)
        for kind, n, c, basis in cases:
            probs = _outcome_probs(kind, n, c, basis)
            dim = c if kind == "d1" else n
            dims = (dim,) * n
            support = list(np.flatnonzero(probs > 1e-12))
            index = {flat: i for i, flat in enumerate(support)}
            counts = [0] * len(support)
            for _ in range(3000):
                out = sample_copy_fast(kind, n, c, basis, rng)
                counts[index[int(np.ravel_multi_index(out, dims))]] += 1
            assert chi_square_ok(counts, [probs[f] for f in support])

    def test_sv_sampler_matches_amplitude_law(self):
        rng = Rng(202)
        probs = _outcome_probs("d1", 3, 2, "computational")
        support = list(np.flatnonzero(probs > 1e-12))
        index = {flat: i for i, flat in enumerate(support)}
        counts = [0] * len(support)
        for _ in range(2000):
            out = sample_copy_sv("d1", 3, 2, "computational", rng)
            counts[index[int(np.ravel_multi_index(out, (2, 2, 2)))]] += 1
        assert chi_square_ok(counts, [probs[f] for f in support])


class TestParamsAndVerification:
    def test_copy_counts(self):
        p = DualBasisParams(4, 2, 2)
        assert p.d1_count == 4 + 4 * 4
        assert p.d2_count == 1 + 4 * 4

    def test_guards(self):
        with pytest.raises(ParameterError):
            DualBasisParams(1, 2, 1)
        with pytest.raises(ParameterError):
            DualBasisParams(3, 1, 1)
        with pytest.raises(ParameterError):
            DualBasisParams(3, 2, -1)
        with pytest.raises(CapacityError):
            DualBasisParams(9, 2, 1)  # 9 nine-level qudits overflow the budget

    def test_honest_verification_always_accepts(self):
        for seed in range(20):
            params = DualBasisParams(4, 2, 2)
            ss = setup_honest(params)
            rep = cut_and_choose(ss, list(range(4)), Rng(seed))
            assert rep.accepted and rep.failure is None
            assert len(rep.surviving_d1) == 4
            assert len(rep.surviving_d2) == 1
            assert len(rep.tested_d1) == 4 * 4
            assert len(rep.tested_d2) == 4 * 4

    def test_exhausted_pool_aborts(self):
        params = DualBasisParams(2, 2, 1)
        ss = setup_honest(params)
        # the lone extra d2 copy cannot feed a third verification round
        with pytest.raises(ProtocolAbort):
            cut_and_choose(ss, [0, 1, 0], Rng(0))

    def test_explicit_picks_are_honored_and_validated(self):
        params = DualBasisParams(2, 2, 1)
        ss = setup_honest(params)
        picks = [
            {"d1": [0, 1], "d2": [0, 1]},
            {"d1": [2, 3], "d2": [2, 3]},
        ]
        rep = cut_and_choose(ss, [0, 1], Rng(0), picks=picks)
        assert rep.tested_d1 == (0, 1, 2, 3)
        assert rep.surviving_d1 == (4, 5)
        bad = [{"d1": [0, 0], "d2": [0, 1]}, {"d1": [2, 3], "d2": [2, 3]}]
        with pytest.raises(ParameterError):
            cut_and_choose(ss, [0, 1], Rng(0), picks=bad)

    def test_planted_copies_measure_their_digits(self):
        params = DualBasisParams(3, 3, 1)
        setup = attack_corrupt_setup(params, Rng(5), target="d1")
        for cid, digits in setup.corrupt_d1.items():
            got = setup.stateset.sample(setup.stateset.d1[cid], "computational", Rng(1))
            assert got == digits
            assert sum(digits) % 3 == 0

    def test_plant_survival_rate_matches_closed_form(self):
        p = float(untested_probability(4, 2, 2))
        rng = Rng(11)
        trials, survived, clean = 2500, 0, 0
        for _ in range(trials):
            params = DualBasisParams(4, 2, 2)
            setup = attack_corrupt_setup(params, rng, target="d1")
            rep = cut_and_choose(setup.stateset, [2, 3, 0, 1], rng, avoid_for={0, 1})
            if rep.corrupt_tested == 0:
                survived += 1
                clean += sorted(rep.surviving_d1) == sorted(setup.corrupt_d1)
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(survived / trials - p) <= 4 * sigma
        assert clean == survived  # untested plants are exactly the survivors

    def test_untested_event_monte_carlo(self):
        assert untested_probability(4, 2, 2) == Fraction(33, 323)
        p = float(Fraction(33, 323))
        rng = Rng(42)
        trials = 20000
        hits = sum(untested_event(4, 2, 2, rng) for _ in range(trials))
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(hits / trials - p) <= 4 * sigma

    def test_untested_event_guards(self):
        with pytest.raises(ParameterError):
            untested_event(4, 5, 1, Rng(0))


class TestBallotsAndTally:
    def test_blank_ballots_shape(self):
        params = DualBasisParams(4, 2, 2)
        ss = setup_honest(params)
        rep = cut_and_choose(ss, list(range(4)), Rng(3))
        bs = measure_blank_ballots(ss, rep.surviving_d1, rep.surviving_d2, Rng(4))
        assert sorted(b.sk for b in bs.ballots) == [1, 2, 3, 4]
        for j in range(4):  # each pre-vote row still sums to zero
            assert row_sum(bs.pre_columns, j, 2) == 0

    def test_cast_touches_only_the_secret_row(self):
        params = DualBasisParams(3, 3, 1)
        ss = setup_honest(params)
        rep = cut_and_choose(ss, list(range(3)), Rng(9))
        bs = measure_blank_ballots(ss, rep.surviving_d1, rep.surviving_d2, Rng(10))
        b = bs.ballots[0]
        col = cast(b, 2, 3)
        diffs = [j for j in range(3) if col[j] != b.column[j]]
        assert diffs == [b.sk - 1] or col[b.sk - 1] == b.column[b.sk - 1]  # vote 2 may wrap to same digit only if c | 2
        assert col[b.sk - 1] == (b.column[b.sk - 1] + 2) % 3
        with pytest.raises(DomainError):
            cast(b, 3, 3)
        with pytest.raises(DomainError):
            cast(b, -1, 3)

    def test_honest_elections_tally_the_votes(self):
        for seed in range(30):
            run = run_honest_election(DualBasisParams(4, 2, 2), [0, 1, 1, 0], Rng(seed))
            assert run.accepted and run.aborted_by is None
            assert Counter(run.tallies) == Counter([0, 1, 1, 0])
        for seed in range(15):
            run = run_honest_election(DualBasisParams(3, 3, 1), [2, 0, 1], Rng(seed))
            assert run.accepted and run.aborted_by is None
            assert Counter(run.tallies) == Counter([2, 0, 1])

    def test_honest_election_on_state_vector_path(self):
        run = run_honest_election(DualBasisParams(3, 2, 1), [1, 0, 1], Rng(7), use_sv=True)
        assert run.accepted and Counter(run.tallies) == Counter([1, 0, 1])

    def test_vote_count_mismatch_rejected(self):
        with pytest.raises(ParameterError):
            run_honest_election(DualBasisParams(3, 2, 1), [0, 1], Rng(0))


class TestAttacks:
    def test_extraction_is_exact_when_plants_survive(self):
        rng = Rng(3)
        params = DualBasisParams(4, 3, 2)
        survived = 0
        for _ in range(200):
            setup = attack_corrupt_setup(params, rng, target="d1")
            rep = cut_and_choose(setup.stateset, [2, 3, 0, 1], rng, avoid_for={0, 1})
            if not (rep.accepted and rep.corrupt_tested == 0):
                continue
            survived += 1
            bs = measure_blank_ballots(setup.stateset, rep.surviving_d1, rep.surviving_d2, rng)
            votes = [int(rng.integer(3)) for _ in range(4)]
            post = [cast(bs.ballots[k], votes[k], 3) for k in range(4)]
            pre = [tuple(setup.corrupt_d1[cid][k] for cid in rep.surviving_d1) for k in range(4)]
            assert attack_extract_votes(pre, post, 3) == votes
        assert survived >= 5

    def test_extraction_via_secret_rows(self):
        rng = Rng(17)
        params = DualBasisParams(3, 2, 1)
        survived = 0
        for _ in range(100):
            setup = attack_corrupt_setup(params, rng, target="d2")
            rep = cut_and_choose(setup.stateset, [1, 2, 0], rng, avoid_for={0})
            if not (rep.accepted and rep.corrupt_tested == 0):
                continue
            survived += 1
            (plant_id,) = setup.corrupt_d2
            assert rep.surviving_d2 == (plant_id,)
            perm = setup.corrupt_d2[plant_id]
            bs = measure_blank_ballots(setup.stateset, rep.surviving_d1, rep.surviving_d2, rng)
            assert tuple(b.sk - 1 for b in bs.ballots) == perm
            votes = [int(rng.integer(2)) for _ in range(3)]
            post = [cast(bs.ballots[k], votes[k], 2) for k in range(3)]
            assert attack_extract_votes_via_sk(perm, post, 2) == votes
        assert survived >= 10

    def test_extraction_guards(self):
        with pytest.raises(ParameterError):
            attack_extract_votes([(0, 0)], [(0, 0), (1, 1)], 2)
        with pytest.raises(ParameterError):
            attack_corrupt_setup(DualBasisParams(3, 2, 1), Rng(0), target="d3")

    def test_abort_attack_fires_at_one_minus_inverse_c(self):
        rng = Rng(5)
        fired = correct = 0
        trials = 400
        for _ in range(trials):
            res = attack_abort_deanonymize(DualBasisParams(4, 2, 1), [1, 0, 1, 0], 0, rng)
            if res.fired:
                fired += 1
                correct += res.recovered_vote == res.victim_vote
                assert res.aborting_voter is not None
            else:
                assert res.aborting_voter is None and res.recovered_vote is None
        p = 1 - 1 / 2
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(fired / trials - p) <= 4 * sigma
        assert correct == fired

    def test_abort_attack_three_candidates(self):
        rng = Rng(6)
        trials = 300
        fired = sum(
            attack_abort_deanonymize(DualBasisParams(3, 3, 1), [2, 1, 0], 1, rng).fired
            for _ in range(trials)
        )
        p = 1 - 1 / 3
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(fired / trials - p) <= 4 * sigma

    def test_abort_attack_guards(self):
        with pytest.raises(ParameterError):
            attack_abort_deanonymize(DualBasisParams(3, 2, 1), [0, 0, 0], 5, Rng(0))
        with pytest.raises(ParameterError):
            attack_abort_deanonymize(DualBasisParams(3, 2, 1), [0, 0, 0], 0, Rng(0), target_row=3)


class TestHarnessRuns:
    def test_integrity_honest_never_wins(self):
        cfg = ExperimentConfig(protocol="dualbasis", n_voters=4, security_param=2, votes=[0, 1, 1, 0])
        rep = run_integrity_experiment(cfg, BINDING, HonestStrategy(), trials=60, seed=1)
        assert rep.win_rate() == 0.0

    def test_privacy_corrupt_setup_hits_untested_bound(self):
        cfg = ExperimentConfig(
            protocol="dualbasis",
            n_voters=4,
            corruption_budget=0.5,
            security_param=2,
            votes=[0, 0, 0, 1],
            vote_permutation="flip",
        )
        rep = run_privacy_experiment(
            cfg, BINDING, CorruptSetupStrategy(corrupt_voters=[0, 1]), trials=4000, seed=9
        )
        want = 0.5 + float(untested_probability(4, 2, 2)) / 2
        sigma = math.sqrt(want * (1 - want) / rep.scored)
        assert rep.excluded == 0
        assert abs(rep.win_rate() - want) <= 3 * sigma

    def test_privacy_corrupt_setup_d2_target(self):
        cfg = ExperimentConfig(
            protocol="dualbasis",
            n_voters=3,
            corruption_budget=0.34,
            security_param=1,
            votes=[0, 0, 1],
            vote_permutation="flip",
        )
        rep = run_privacy_experiment(
            cfg, BINDING, CorruptSetupStrategy(corrupt_voters=[0], target="d2"), trials=2500, seed=13
        )
        # one plant among 1 + 3*2 copies; two honest verifiers burn 4:
        # survival (7-4)/7 gives the win rate 1/2 + (3/7)/2
        want = 0.5 + (3 / 7) / 2
        sigma = math.sqrt(want * (1 - want) / rep.scored)
        assert abs(rep.win_rate() - want) <= 3 * sigma

    def test_privacy_abort_probe_deanonymizes(self):
        cfg = ExperimentConfig(
            protocol="dualbasis",
            n_voters=4,
            corruption_budget=0.25,
            security_param=1,
            votes=[0, 0, 1, 2],
            vote_permutation="flip",
            protocol_params={"candidates": 3},
        )
        rep = run_privacy_experiment(cfg, BINDING, AbortProbeStrategy(corrupt_voter=0), trials=800, seed=21)
        assert rep.excluded == 0
        assert rep.win_rate() == 1.0

    def test_integrity_abort_probe_never_wins(self):
        cfg = ExperimentConfig(
            protocol="dualbasis",
            n_voters=4,
            corruption_budget=0.25,
            security_param=1,
            votes=[0, 0, 1, 2],
            protocol_params={"candidates": 3},
        )
        rep = run_integrity_experiment(cfg, BINDING, AbortProbeStrategy(corrupt_voter=0), trials=150, seed=22)
        assert rep.win_rate() == 0.0

    def test_corruption_budget_enforced_even_across_aborts(self):
        from qevote.errors import ConfigError

        cfg = ExperimentConfig(
            protocol="dualbasis",
            n_voters=4,
            corruption_budget=0.25,  # one voter, strategy wants two
            security_param=1,
            votes=[0, 0, 0, 1],
            vote_permutation="flip",
        )
        with pytest.raises(ConfigError):
            run_privacy_experiment(
                cfg, BINDING, CorruptSetupStrategy(corrupt_voters=[0, 1]), trials=40, seed=2
            )

    def test_strategy_guards(self):
        with pytest.raises(ParameterError):
            CorruptSetupStrategy(corrupt_voters=[])
        with pytest.raises(ParameterError):
            CorruptSetupStrategy(corrupt_voters=[0], target="both")

    def test_reproducible_across_seeds(self):
        cfg = ExperimentConfig(
            protocol="dualbasis",
            n_voters=3,
            corruption_budget=0.34,
            security_param=1,
            votes=[0, 0, 1],
            vote_permutation="flip",
        )
        strat = lambda: CorruptSetupStrategy(corrupt_voters=[0])
        r1 = run_privacy_experiment(cfg, BINDING, strat(), trials=80, seed=5)
        r2 = run_privacy_experiment(cfg, BINDING, strat(), trials=80, seed=5)
        r3 = run_privacy_experiment(cfg, BINDING, strat(), trials=80, seed=6)
        assert r1.outcomes == r2.outcomes
        assert r1.outcomes != r3.outcomes

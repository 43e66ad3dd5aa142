"""State-vector core: constructors, gates, measurements, random streams."""

import numpy as np
import pytest

from qevote.errors import CapacityError, ParameterError, UnitarityError
from qevote.qcore import (
    AMPLITUDE_BUDGET,
    PureState,
    apply_unitary,
    basis_state,
    bitflip_matrix,
    fourier_matrix,
    ghz_phase_state,
    measure_computational,
    measure_difference,
    measure_fourier,
    phase_matrix,
    product_state,
    shift_matrix,
    y_flip_matrix,
)
from qevote.rng import Rng


def random_state(dims, seed):
    """Haar-ish test fixture: normalized complex gaussian amplitudes."""
    gen = np.random.Generator(np.random.PCG64(seed))
    size = int(np.prod(dims))
    amps = gen.normal(size=size) + 1j * gen.normal(size=size)
    return PureState(dims, amps / np.linalg.norm(amps))


class TestPureState:
    def test_rejects_dimension_below_two(self):
        with pytest.raises(ParameterError, match="dimension"):
            PureState((2, 1), [1, 0])

    def test_rejects_empty_register(self):
        with pytest.raises(ParameterError):
            PureState((), [1.0])

    def test_rejects_wrong_amplitude_length(self):
        with pytest.raises(ParameterError, match="length"):
            PureState((2, 2), [1, 0, 0])

    def test_rejects_unnormalized(self):
        with pytest.raises(ParameterError, match="norm"):
            PureState((2,), [1, 1])

    def test_capacity_ceiling(self):
        assert AMPLITUDE_BUDGET == 1 << 22
        with pytest.raises(CapacityError):
            PureState((2,) * 23, np.zeros(1 << 23))

    def test_tensor_shape_and_count(self):
        s = random_state((2, 3, 4), seed=1)
        assert s.n_qudits == 3
        assert s.tensor().shape == (2, 3, 4)
        assert np.array_equal(s.tensor().reshape(-1), s.amps)

    def test_probabilities_are_marginals(self):
        s = random_state((2, 3), seed=2)
        joint = np.abs(s.tensor()) ** 2
        assert np.allclose(s.probabilities(0), joint.sum(axis=1))
        assert np.allclose(s.probabilities(1), joint.sum(axis=0))
        assert np.isclose(s.probabilities(0).sum(), 1.0)

    def test_probabilities_single_qudit(self):
        s = PureState((4,), [0.5, 0.5, 0.5, 0.5])
        assert np.allclose(s.probabilities(0), [0.25] * 4)

    def test_fidelity(self):
        a = basis_state((2, 2), (0, 1))
        assert a.fidelity(a) == pytest.approx(1.0)
        assert a.fidelity(basis_state((2, 2), (1, 0))) == pytest.approx(0.0)
        plus = PureState((2,), np.array([1, 1]) / np.sqrt(2))
        assert plus.fidelity(basis_state((2,), 0)) == pytest.approx(0.5)

    def test_fidelity_requires_matching_shape(self):
        with pytest.raises(ParameterError, match="shape"):
            basis_state((2, 2), 0).fidelity(basis_state((4,), 0))


class TestConstructors:
    def test_basis_state_digit_and_flat_agree(self):
        by_digits = basis_state((2, 3), (1, 2))
        by_flat = basis_state((2, 3), 5)
        assert np.array_equal(by_digits.amps, by_flat.amps)
        assert by_digits.amps[5] == 1.0

    def test_basis_state_digit_out_of_range(self):
        with pytest.raises(IndexError):
            basis_state((2, 3), (1, 3))

    def test_basis_state_flat_out_of_range(self):
        with pytest.raises(IndexError):
            basis_state((2, 2), 4)

    def test_basis_state_digit_length_mismatch(self):
        with pytest.raises(ParameterError):
            basis_state((2, 3), (1,))

    def test_product_state_is_kron_in_order(self):
        a = PureState((2,), np.array([1, 1j]) / np.sqrt(2))
        b = basis_state((3,), 2)
        ab = product_state([a, b])
        assert ab.dims == (2, 3)
        assert np.allclose(ab.amps, np.kron(a.amps, b.amps))
        ba = product_state([b, a])
        assert ba.dims == (3, 2)
        assert not np.allclose(ab.amps, ba.amps)

    def test_product_of_nothing_rejected(self):
        with pytest.raises(ParameterError):
            product_state([])

    def test_ghz_two_qubits_is_bell_pair(self):
        s = ghz_phase_state(2, 2)
        expect = np.zeros(4)
        expect[[0, 3]] = 1 / np.sqrt(2)
        assert np.allclose(s.amps, expect)

    def test_ghz_phases_land_on_diagonal(self):
        theta = 0.77
        s = ghz_phase_state(3, 4, phases=lambda j: j * theta)
        tensor = s.tensor()
        for j in range(4):
            assert tensor[j, j, j] == pytest.approx(np.exp(1j * j * theta) / 2.0)
        # everything off the |j,j,j> diagonal is empty
        diag_mass = sum(abs(tensor[j, j, j]) ** 2 for j in range(4))
        assert diag_mass == pytest.approx(1.0)

    def test_ghz_phase_vector_matches_callable(self):
        theta = np.array([0.0, 0.3, 0.6])
        by_array = ghz_phase_state(2, 3, phases=theta)
        by_call = ghz_phase_state(2, 3, phases=lambda j: 0.3 * j)
        assert np.allclose(by_array.amps, by_call.amps)
        assert by_array.fidelity(ghz_phase_state(2, 3)) < 1.0

    def test_ghz_phase_vector_length_checked(self):
        with pytest.raises(ParameterError, match="length"):
            ghz_phase_state(2, 3, phases=[0.0, 0.1])

    def test_ghz_parameter_floors(self):
        with pytest.raises(ParameterError):
            ghz_phase_state(0, 2)
        with pytest.raises(ParameterError):
            ghz_phase_state(2, 1)

    def test_ghz_capacity(self):
        with pytest.raises(CapacityError):
            ghz_phase_state(23, 2)


class TestGates:
    def test_fourier_qubit_is_hadamard(self):
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        assert np.allclose(fourier_matrix(2), h)

    @pytest.mark.parametrize("dim", range(2, 9))
    def test_fourier_unitary(self, dim):
        f = fourier_matrix(dim)
        assert np.allclose(f @ f.conj().T, np.eye(dim), atol=1e-12)

    def test_fourier_column_phases(self):
        f = fourier_matrix(5)
        j, k = 2, 3
        assert f[k, j] == pytest.approx(np.exp(2j * np.pi * j * k / 5) / np.sqrt(5))

    @pytest.mark.parametrize("dim", [2, 3, 5, 8])
    def test_shift_cycles(self, dim):
        u = shift_matrix(dim)
        for j in range(dim):
            e = np.zeros(dim)
            e[j] = 1.0
            assert np.allclose(u @ e, np.eye(dim)[(j + 1) % dim])
        assert np.allclose(np.linalg.matrix_power(u, dim), np.eye(dim))

    def test_shift_amount(self):
        u = shift_matrix(5, amount=3)
        e0 = np.zeros(5)
        e0[0] = 1.0
        out = u @ e0
        assert out[3] == 1.0
        assert np.allclose(shift_matrix(5, amount=-1), np.linalg.matrix_power(shift_matrix(5), 4))

    def test_phase_matrix(self):
        alpha = 0.4
        m = phase_matrix(3, alpha)
        assert np.allclose(m, np.diag([1.0, np.exp(1j * alpha), np.exp(2j * alpha)]))

    def test_flip_matrices(self):
        assert np.array_equal(bitflip_matrix(), [[0, 1], [1, 0]])
        assert np.array_equal(y_flip_matrix(), [[0, -1], [1, 0]])

    def test_y_flip_in_both_bases(self):
        y = y_flip_matrix()
        zero = np.array([1.0, 0.0])
        one = np.array([0.0, 1.0])
        plus = (zero + one) / np.sqrt(2)
        minus = (zero - one) / np.sqrt(2)
        assert np.allclose(y @ zero, one)
        assert np.allclose(y @ one, -zero)
        assert np.allclose(y @ plus, -minus)
        assert np.allclose(y @ minus, plus)


class TestApplyUnitary:
    def test_identity_is_noop(self):
        s = random_state((2, 3), seed=3)
        out = apply_unitary(s, np.eye(3), 1)
        assert np.allclose(out.amps, s.amps)
        assert out is not s

    def test_single_qubit_flip(self):
        s = PureState((2,), np.array([0.6, 0.8]))
        out = apply_unitary(s, bitflip_matrix(), 0)
        assert np.allclose(out.amps, [0.8, 0.6])

    def test_acts_only_on_target(self):
        s = basis_state((2, 2), (0, 1))
        out = apply_unitary(s, bitflip_matrix(), 0)
        assert out.fidelity(basis_state((2, 2), (1, 1))) == pytest.approx(1.0)

    def test_rejects_non_unitary(self):
        with pytest.raises(UnitarityError):
            apply_unitary(basis_state((2,), 0), [[1, 0], [1, 1]], 0)

    def test_rejects_bad_targets(self):
        s = basis_state((2, 2), 0)
        with pytest.raises(IndexError):
            apply_unitary(s, bitflip_matrix(), 2)
        with pytest.raises(IndexError, match="duplicate"):
            apply_unitary(s, np.eye(4), (0, 0))

    def test_rejects_block_shape_mismatch(self):
        with pytest.raises(ParameterError, match="shape"):
            apply_unitary(basis_state((2, 3), 0), np.eye(4), (0, 1))

    def test_two_qudit_target_order(self):
        # CNOT with the control listed first: flips only when the first
        # listed target is |1>.
        cnot = np.eye(4)[:, [0, 1, 3, 2]]
        s = basis_state((2, 2), (1, 0))
        assert apply_unitary(s, cnot, (0, 1)).fidelity(basis_state((2, 2), (1, 1))) == pytest.approx(1.0)
        assert apply_unitary(s, cnot, (1, 0)).fidelity(s) == pytest.approx(1.0)

    def test_mixed_dimension_register(self):
        s = basis_state((2, 3), (0, 1))
        out = apply_unitary(s, shift_matrix(3), 1)
        assert out.fidelity(basis_state((2, 3), (0, 2))) == pytest.approx(1.0)


class TestMeasureComputational:
    def test_definite_outcome(self):
        rec = measure_computational(basis_state((2,), 1), 0, Rng(0))
        assert rec.outcome == 1
        assert rec.basis == "computational"
        assert np.allclose(rec.probabilities, [0.0, 1.0])
        assert rec.state.fidelity(basis_state((2,), 1)) == pytest.approx(1.0)

    def test_bell_pair_collapses_jointly(self):
        bell = ghz_phase_state(2, 2)
        seen = set()
        for k in range(40):
            rec = measure_computational(bell, 0, Rng(100 + k))
            assert np.allclose(rec.probabilities, [0.5, 0.5])
            target = basis_state((2, 2), (rec.outcome, rec.outcome))
            assert rec.state.fidelity(target) == pytest.approx(1.0)
            seen.add(rec.outcome)
        assert seen == {0, 1}

    def test_outcome_frequencies(self):
        s = PureState((2,), [np.sqrt(0.3), np.sqrt(0.7)])
        rng = Rng(41)
        n = 20000
        ones = sum(measure_computational(s, 0, rng).outcome for _ in range(n))
        sigma = np.sqrt(0.3 * 0.7 / n)
        assert abs(ones / n - 0.7) < 4 * sigma

    def test_born_rule_on_mixed_dims(self):
        s = random_state((2, 3, 4), seed=7)
        expect = s.probabilities(1)
        rng = Rng(42)
        n = 20000
        counts = np.zeros(3)
        for _ in range(n):
            counts[measure_computational(s, 1, rng).outcome] += 1
        for j in range(3):
            sigma = np.sqrt(expect[j] * (1 - expect[j]) / n)
            assert abs(counts[j] / n - expect[j]) < 4 * sigma + 1e-12

    def test_repeated_measurement_is_stable(self):
        s = random_state((2, 3), seed=8)
        first = measure_computational(s, 1, Rng(9))
        again = measure_computational(first.state, 1, Rng(10))
        assert again.outcome == first.outcome
        assert again.probabilities[first.outcome] == pytest.approx(1.0)


class TestMeasureFourier:
    def test_uniform_state_reads_zero(self):
        d = 5
        s = PureState((d,), np.ones(d) / np.sqrt(d))
        rec = measure_fourier(s, 0, Rng(1))
        assert rec.outcome == 0
        assert rec.basis == "fourier"
        assert rec.probabilities[0] == pytest.approx(1.0)

    def test_fourier_basis_alignment(self):
        # F|j> must read back j with certainty.
        d = 3
        for j in range(d):
            s = apply_unitary(basis_state((d,), j), fourier_matrix(d), 0)
            rec = measure_fourier(s, 0, Rng(j))
            assert rec.outcome == j
            assert rec.state.fidelity(s) == pytest.approx(1.0)

    def test_even_parity_state(self):
        # (1/2) * sum over even-weight bitstrings equals
        # (|+++> + |--->)/sqrt(2): computational parity is always even
        # and the three Fourier outcomes always agree.
        amps = np.zeros(8)
        amps[[0, 3, 5, 6]] = 0.5
        s = PureState((2, 2, 2), amps)

        for k in range(30):
            rng = Rng(300 + k)
            state, bits = s, []
            for q in range(3):
                rec = measure_computational(state, q, rng)
                state, _ = rec.state, bits.append(rec.outcome)
            assert sum(bits) % 2 == 0

        branches = set()
        for k in range(30):
            rng = Rng(600 + k)
            state, outs = s, []
            for q in range(3):
                rec = measure_fourier(state, q, rng)
                state, _ = rec.state, outs.append(rec.outcome)
            assert len(set(outs)) == 1
            branches.add(outs[0])
        assert branches == {0, 1}


class TestMeasureDifference:
    def test_ghz_has_difference_zero(self):
        s = ghz_phase_state(2, 5)
        rec = measure_difference(s, 0, 1, Rng(2))
        assert rec.outcome == 0
        assert rec.basis == "pair-difference"
        assert rec.probabilities[0] == pytest.approx(1.0)
        # the whole state lives in the r=0 subspace, so nothing collapses
        assert rec.state.fidelity(s) == pytest.approx(1.0)

    def test_ghz_superposition_survives_many_copies(self):
        s = ghz_phase_state(3, 3, phases=lambda j: 0.9 * j)
        rec = measure_difference(s, 0, 2, Rng(3))
        assert rec.outcome == 0
        assert rec.state.fidelity(s) == pytest.approx(1.0)

    def test_product_state_difference(self):
        s = product_state([basis_state((4,), 2), basis_state((4,), 0)])
        rec = measure_difference(s, 0, 1, Rng(4))
        assert rec.outcome == 2

    def test_difference_is_cyclic(self):
        s = product_state([basis_state((4,), 0), basis_state((4,), 3)])
        assert measure_difference(s, 0, 1, Rng(5)).outcome == 1

    def test_partial_collapse_keeps_branch(self):
        amps = np.zeros(4)
        amps[[0, 3, 1]] = 1 / np.sqrt(3)  # |00> + |11> + |01>
        s = PureState((2, 2), amps)
        probs = measure_difference(s, 0, 1, Rng(6)).probabilities
        assert np.allclose(probs, [2 / 3, 1 / 3])
        for k in range(20):
            rec = measure_difference(s, 0, 1, Rng(700 + k))
            if rec.outcome == 0:
                assert rec.state.fidelity(ghz_phase_state(2, 2)) == pytest.approx(1.0)
            else:
                assert rec.state.fidelity(basis_state((2, 2), (0, 1))) == pytest.approx(1.0)

    def test_guards(self):
        with pytest.raises(ParameterError, match="equal"):
            measure_difference(basis_state((2, 3), 0), 0, 1, Rng(0))
        with pytest.raises(IndexError, match="distinct"):
            measure_difference(basis_state((2, 2), 0), 1, 1, Rng(0))


class TestRng:
    def test_same_seed_same_stream(self):
        assert np.array_equal(Rng(5).random(10), Rng(5).random(10))
        assert Rng(5).permutation(20) == Rng(5).permutation(20)

    def test_children_are_position_independent(self):
        root = Rng(9)
        a = root.child(1)
        root.random(1000)  # consuming the parent must not move children
        b = root.child(2)
        fresh = Rng(9)
        assert np.array_equal(a.random(5), fresh.child(1).random(5))
        assert np.array_equal(b.random(5), fresh.child(2).random(5))
        assert not np.array_equal(fresh.child(1).random(5), fresh.child(2).random(5))

    def test_nested_children(self):
        assert np.array_equal(Rng(9).child(3).child(4).random(3), Rng(9).child(3, 4).random(3))

    def test_seed_guards(self):
        with pytest.raises(ParameterError):
            Rng("7")
        with pytest.raises(ParameterError):
            Rng(-1)
        with pytest.raises(ParameterError):
            Rng(1 << 64)

    def test_draw_shapes(self):
        r = Rng(11)
        assert isinstance(r.random(), float)
        assert r.random(4).shape == (4,)
        assert r.bit() in (0, 1)
        assert 0 <= r.integer(10) < 10
        assert 3 <= r.integer(3, 6) < 6
        assert sorted(r.permutation(8)) == list(range(8))
        assert sorted(r.shuffled(["a", "b", "c"])) == ["a", "b", "c"]

    def test_choice_index_consumes_one_uniform(self):
        a, b = Rng(13), Rng(13)
        picked = a.choice_index([0.2, 0.5, 0.3])
        assert 0 <= picked < 3
        b.random()  # discard the one float choice_index used
        assert np.array_equal(a.random(6), b.random(6))

    def test_choice_index_normalizes(self):
        r = Rng(14)
        counts = np.zeros(2)
        for _ in range(4000):
            counts[r.choice_index([2.0, 6.0])] += 1
        assert abs(counts[1] / 4000 - 0.75) < 4 * np.sqrt(0.75 * 0.25 / 4000)

    def test_choice_index_mass_guards(self):
        r = Rng(15)
        with pytest.raises(ParameterError):
            r.choice_index([0.0, 0.0])
        with pytest.raises(ParameterError):
            r.choice_index([np.nan, 1.0])

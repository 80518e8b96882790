import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qclocksync.qsim import (
    RY_PI,
    StateVector,
    apply_diagonal_evolution,
    apply_phase_rotation,
    apply_ry_pi,
    compose,
    is_unitary,
    ry_pi_unitary,
    unitary_fidelity_up_to_global_phase,
    z_signs,
)

from oracles import PLUS, ry_pi_dense


def random_state(seed, n):
    r = np.random.default_rng(seed)
    v = r.normal(size=2**n) + 1j * r.normal(size=2**n)
    return StateVector(v / np.linalg.norm(v))


states = st.builds(random_state, st.integers(0, 2**32 - 1), st.integers(1, 5))


class TestStateVector:
    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            StateVector(np.ones(3) / np.sqrt(3))

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            StateVector(np.ones(4))

    def test_immutable(self):
        s = StateVector.basis(2, 1)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 1

    def test_label_ordering(self):
        # qubit 0 is the most significant bit
        assert StateVector.from_label("10").allclose(StateVector.basis(2, 0b10))

    def test_z_signs(self):
        np.testing.assert_array_equal(z_signs(2), [[1, 1, -1, -1], [1, -1, 1, -1]])


class TestRyPi:
    def test_zero_to_one(self):
        assert apply_ry_pi(StateVector.basis(1, 0), 0).allclose(StateVector.basis(1, 1))

    def test_one_to_minus_zero(self):
        out = apply_ry_pi(StateVector.basis(1, 1), 0)
        np.testing.assert_allclose(out.amplitudes, [-1, 0], atol=1e-15)

    def test_matrix_matches_exponential(self):
        np.testing.assert_allclose(ry_pi_dense(1, {0}), RY_PI, atol=1e-14)

    @given(states, st.data())
    @settings(max_examples=50, deadline=None)
    def test_twice_is_minus_identity(self, state, data):
        q = data.draw(st.integers(0, state.num_qubits - 1))
        out = apply_ry_pi(apply_ry_pi(state, q), q)
        np.testing.assert_allclose(out.amplitudes, -state.amplitudes, atol=1e-12)

    def test_matches_dense_on_random_state(self):
        s = random_state(3, 3)
        dense = ry_pi_dense(3, {1}) @ s.amplitudes
        np.testing.assert_allclose(apply_ry_pi(s, 1).amplitudes, dense, atol=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            apply_ry_pi(StateVector.basis(2, 0), 2)


class TestPhaseRotation:
    def test_pi_on_plus(self):
        out = apply_phase_rotation(StateVector.from_label("+"), 0, np.pi)
        np.testing.assert_allclose(out.amplitudes, np.array([-1j, 1j]) / np.sqrt(2), atol=1e-15)

    def test_zero_angle(self):
        s = random_state(1, 3)
        assert apply_phase_rotation(s, 2, 0.0).allclose(s, atol=0.0)

    @pytest.mark.parametrize("phase", [0.0, 0.3, np.pi / 2, 2.0, np.pi, 5.5])
    def test_pos_probability(self, phase):
        out = apply_phase_rotation(StateVector.from_label("+"), 0, phase)
        p = abs(np.vdot(PLUS, out.amplitudes)) ** 2
        assert p == pytest.approx((1 + np.cos(phase)) / 2, abs=1e-14)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            apply_phase_rotation(StateVector.from_label("+"), 0, np.inf)

    @given(states, st.data(), st.floats(-50, 50))
    @settings(max_examples=50, deadline=None)
    def test_equals_diagonal_evolution(self, state, data, angle):
        q = data.draw(st.integers(0, state.num_qubits - 1))
        energies = 0.5 * angle * z_signs(state.num_qubits)[q]
        a = apply_phase_rotation(state, q, angle)
        b = apply_diagonal_evolution(state, energies, 1.0)
        np.testing.assert_allclose(a.amplitudes, b.amplitudes, rtol=0, atol=1e-15)


class TestDiagonalEvolution:
    def test_t_zero(self):
        s = random_state(2, 2)
        assert apply_diagonal_evolution(s, [1.0, 2.0, 3.0, 4.0], 0.0).allclose(s, atol=0.0)

    def test_global_phase(self):
        s = random_state(4, 2)
        out = apply_diagonal_evolution(s, np.full(4, 7.0), 0.3)
        np.testing.assert_allclose(out.amplitudes, np.exp(-2.1j) * s.amplitudes, atol=1e-14)
        np.testing.assert_allclose(out.probabilities(), s.probabilities(), atol=1e-15)

    def test_single_qubit_clock(self):
        omega, delta = 2 * np.pi * 250, 0.37e-3
        energies = 0.5 * omega * np.array([1.0, -1.0])
        out = apply_diagonal_evolution(StateVector.from_label("+"), energies, delta)
        p = abs(np.vdot(PLUS, out.amplitudes)) ** 2
        assert p == pytest.approx((1 + np.cos(omega * delta)) / 2, abs=1e-14)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            apply_diagonal_evolution(StateVector.basis(2, 0), [1.0, 2.0], 1.0)

    @given(states, st.integers(0, 2**32 - 1), st.floats(0, 3), st.floats(0, 3))
    @settings(max_examples=50, deadline=None)
    def test_commute_and_preserve_norm(self, state, seed, t1, t2):
        r = np.random.default_rng(seed)
        e1, e2 = r.normal(size=(2, state.dim)) * 10
        ab = apply_diagonal_evolution(apply_diagonal_evolution(state, e1, t1), e2, t2)
        ba = apply_diagonal_evolution(apply_diagonal_evolution(state, e2, t2), e1, t1)
        np.testing.assert_allclose(ab.amplitudes, ba.amplitudes, atol=1e-12)
        assert abs(ab.norm() - 1) < 1e-12

    def test_deterministic(self):
        s = random_state(9, 4)
        e = np.linspace(-3, 3, 16)
        a = apply_diagonal_evolution(s, e, 0.77).amplitudes
        b = apply_diagonal_evolution(s, e, 0.77).amplitudes
        assert a.tobytes() == b.tobytes()


class TestDense:
    def test_fidelity_identical(self):
        u = ry_pi_unitary(2, [0])
        assert unitary_fidelity_up_to_global_phase(u, u) == pytest.approx(1.0)

    def test_fidelity_global_phase(self):
        u = ry_pi_unitary(2, [1])
        assert unitary_fidelity_up_to_global_phase(u, -u) == pytest.approx(1.0)

    def test_fidelity_orthogonal(self):
        assert unitary_fidelity_up_to_global_phase(np.eye(2), np.diag([1, -1])) == 0.0

    def test_fidelity_dimension_mismatch(self):
        with pytest.raises(ValueError):
            unitary_fidelity_up_to_global_phase(np.eye(2), np.eye(4))

    def test_compose_single(self):
        u = ry_pi_unitary(2, [0, 1])
        np.testing.assert_array_equal(compose([u]), u)

    def test_compose_inverse(self):
        u = ry_pi_unitary(3, [0, 2])
        np.testing.assert_allclose(compose([u, u.conj().T]), np.eye(8), atol=1e-12)

    def test_compose_ry_twice(self):
        u = ry_pi_unitary(2, [1])
        # explicit matrix product as oracle
        np.testing.assert_allclose(compose([u, u]), u @ u, atol=0)
        np.testing.assert_allclose(compose([u, u]), -np.eye(4), atol=1e-15)

    def test_compose_order(self):
        a = ry_pi_unitary(2, [0])
        b = np.diag(np.exp(1j * np.arange(4)))
        np.testing.assert_allclose(compose([a, b]), a @ b)

    def test_compose_mismatch(self):
        with pytest.raises(ValueError):
            compose([np.eye(2), np.eye(4)])

    def test_is_unitary(self):
        assert is_unitary(ry_pi_unitary(3, [1]))
        assert not is_unitary(2 * np.eye(2))

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qram_bounds import gates
from qram_bounds.gates import (BeamSplitter, ControlledSwap, GateError,
                               ModeRegister, Swap, apply_gate, bs_unitary,
                               cswap_composite, cswap_duration, cswap_exact,
                               cz_unitary, gauge_equivalent, swap_unitary,
                               t_beamsplitter, t_cphase, t_swap)

RNG = np.random.default_rng(11)


def random_unitary(dim, rng=RNG):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# basis order on two modes: |00>, |01>, |10>, |11>
class TestBeamSplitter:
    def test_identity_at_zero(self):
        np.testing.assert_allclose(bs_unitary(1.0, 0.0), np.eye(4), atol=1e-14)

    def test_full_transfer_at_t_swap(self):
        g1 = 1.7
        U = bs_unitary(g1, t_swap(g1))
        assert abs(U[1, 2]) ** 2 == pytest.approx(1.0, abs=1e-12)
        assert abs(U[2, 1]) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_half_transfer_at_t_bs(self):
        g1 = 0.9
        U = bs_unitary(g1, t_beamsplitter(g1))
        assert abs(U[1, 2]) ** 2 == pytest.approx(0.5, abs=1e-12)
        assert abs(U[1, 1]) ** 2 == pytest.approx(0.5, abs=1e-12)

    def test_transfer_probability_law(self):
        g1 = 1.3
        for t in np.linspace(0.0, 2.0 * math.pi / g1, 20):
            U = bs_unitary(g1, float(t))
            assert abs(U[1, 2]) ** 2 == pytest.approx(
                math.sin(g1 * t) ** 2, abs=1e-9)

    def test_duration_additivity(self):
        g1 = 2.1
        U = bs_unitary(g1, 0.31) @ bs_unitary(g1, 0.47)
        np.testing.assert_allclose(U, bs_unitary(g1, 0.78), atol=1e-10)

    def test_vacuum_and_doubly_occupied_fixed(self):
        U = bs_unitary(1.0, 0.7)
        assert U[0, 0] == pytest.approx(1.0)
        assert U[3, 3] == pytest.approx(1.0)

    @given(g1=st.floats(0.1, 10.0), t=st.floats(0.0, 10.0))
    @settings(max_examples=50, deadline=None)
    def test_unitary_property(self, g1, t):
        U = bs_unitary(g1, t)
        assert np.abs(U.conj().T @ U - np.eye(4)).max() < 1e-10

    def test_rejects_nonpositive_coupling(self):
        with pytest.raises(GateError, match="nonpositive coupling"):
            bs_unitary(0.0, 1.0)


class TestControlledPhase:
    def test_pi_phase_on_doubly_occupied(self):
        g2 = 0.8
        U = cz_unitary(g2, t_cphase(g2))
        np.testing.assert_allclose(np.diag(U), [1, 1, 1, -1], atol=1e-10)

    def test_identity_at_zero(self):
        np.testing.assert_allclose(cz_unitary(1.0, 0.0), np.eye(4), atol=1e-14)

    def test_half_duration_quarter_phase(self):
        g2 = 1.1
        U = cz_unitary(g2, t_cphase(g2) / 2.0)
        assert U[3, 3] == pytest.approx(-1j, abs=1e-12)


class TestControlledSwapComposite:
    def test_control_one_swaps_populations(self):
        # ctrl=|1>, (a,b)=|10>  ->  |1>|01> with probability 1
        U = cswap_composite(1.3, 0.7)
        out = U @ np.eye(8)[:, 0b110]
        probs = np.abs(out) ** 2
        assert probs[0b101] == pytest.approx(1.0, abs=1e-12)

    def test_control_zero_is_identity_on_populations(self):
        U = cswap_composite(1.3, 0.7)
        out = U @ np.eye(8)[:, 0b010]
        assert abs(out[0b010]) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_superposed_control_fredkin_fidelity(self):
        g1, g2 = 1.3, 0.7
        res = gauge_equivalent(cswap_composite(g1, g2), cswap_exact())
        assert res.equivalent
        assert res.fidelity >= 1.0 - 1e-9
        # and the specific interferometer input stays normalized/entangled
        psi = np.zeros(8, dtype=complex)
        psi[0b010] = psi[0b110] = 1.0 / math.sqrt(2.0)
        out = cswap_composite(g1, g2) @ psi
        probs = np.abs(out) ** 2
        assert probs[0b010] == pytest.approx(0.5, abs=1e-12)
        assert probs[0b101] == pytest.approx(0.5, abs=1e-12)

    def test_same_orientation_closing_splitter_fails(self):
        res = gauge_equivalent(
            cswap_composite(1.3, 0.7, second_bs_inverse=False), cswap_exact())
        assert not res.equivalent
        assert res.fidelity < 0.9

    def test_either_interferometer_arm_works(self):
        for arm in ("a", "b"):
            res = gauge_equivalent(cswap_composite(1.3, 0.7, cz_arm=arm),
                                   cswap_exact())
            assert res.equivalent

    def test_restricted_blocks(self):
        U = cswap_composite(2.0, 1.0)
        assert gauge_equivalent(U[:4, :4], np.eye(4, dtype=complex)).equivalent
        swap_pop = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
        assert gauge_equivalent(U[4:, 4:], swap_pop).equivalent

    def test_unitary(self):
        U = cswap_composite(1.3, 0.7)
        assert np.abs(U.conj().T @ U - np.eye(8)).max() < 1e-10


class TestDurations:
    def test_time_scales(self):
        assert t_swap(2.0) == math.pi / 4.0
        assert t_beamsplitter(2.0) == math.pi / 8.0
        assert t_cphase(4.0) == math.pi / 4.0

    def test_cswap_duration_composition(self):
        g1, g2 = 1.7, 0.6
        assert cswap_duration(g1, g2) == 2.0 * t_beamsplitter(g1) + t_cphase(g2)

    def test_gate_spec_durations(self):
        g1, g2 = 1.7, 0.6
        assert Swap((0, 1)).duration(g1, g2) == t_swap(g1)
        assert ControlledSwap((0, 1, 2)).duration(g1, g2) == cswap_duration(g1, g2)
        assert BeamSplitter((0, 1), duration=0.25).duration == 0.25


class TestGaugeEquivalent:
    def test_self_equivalence(self):
        U = random_unitary(8)
        res = gauge_equivalent(U, U)
        assert res.equivalent and res.fidelity == pytest.approx(1.0, abs=1e-12)

    @given(theta=st.floats(0.0, 2.0 * math.pi))
    @settings(max_examples=25, deadline=None)
    def test_global_phase_absorbed(self, theta):
        U = random_unitary(4)
        res = gauge_equivalent(U, np.exp(1j * theta) * U)
        assert res.fidelity >= 1.0 - 1e-9

    def test_diagonal_gauges_absorbed(self):
        U = random_unitary(8)
        rng = np.random.default_rng(5)
        d1 = np.exp(1j * rng.uniform(0, 2 * math.pi, 8))
        d2 = np.exp(1j * rng.uniform(0, 2 * math.pi, 8))
        res = gauge_equivalent((d1[:, None] * U) * d2[None, :], U)
        assert res.equivalent

    def test_full_transfer_is_swap_up_to_gauge(self):
        g1 = 1.0
        swap_pop = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
        res = gauge_equivalent(bs_unitary(g1, t_swap(g1)), swap_pop)
        assert res.equivalent

    def test_distinguishes_genuinely_different_gates(self):
        res = gauge_equivalent(np.eye(4, dtype=complex),
                               np.eye(4, dtype=complex)[[0, 2, 1, 3]])
        assert not res.equivalent

    def test_rejects_shape_mismatch(self):
        with pytest.raises(GateError):
            gauge_equivalent(np.eye(4, dtype=complex), np.eye(8, dtype=complex))


class TestApplyGate:
    def test_zero_duration_beam_splitter_is_identity(self):
        reg = ModeRegister(dims=(2, 2, 2))
        state = np.zeros(8, dtype=complex)
        state[0b110] = 1.0
        out = apply_gate(state, BeamSplitter(targets=(0, 1), duration=0.0), reg)
        np.testing.assert_allclose(out, state, atol=1e-14)

    def test_swap_moves_population(self):
        reg = ModeRegister(dims=(2, 2))
        state = np.zeros(4, dtype=complex)
        state[0b10] = 1.0
        out = apply_gate(state, Swap(targets=(0, 1)), reg, g1=1.3)
        assert abs(out[0b01]) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_norm_preserved_on_random_state(self):
        reg = ModeRegister(dims=(2, 2, 2, 2))
        state = RNG.standard_normal(16) + 1j * RNG.standard_normal(16)
        state /= np.linalg.norm(state)
        out = apply_gate(state, ControlledSwap(targets=(0, 2, 3)), reg,
                         g1=1.1, g2=0.9)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)

    def test_embedding_matches_kron_for_adjacent_targets(self):
        reg = ModeRegister(dims=(2, 2, 2))
        U = bs_unitary(1.0, 0.37)
        full = np.kron(U, np.eye(2))
        state = RNG.standard_normal(8) + 1j * RNG.standard_normal(8)
        state /= np.linalg.norm(state)
        out = apply_gate(state, BeamSplitter(targets=(0, 1), duration=0.37), reg)
        np.testing.assert_allclose(out, full @ state, atol=1e-12)

    def test_rejects_dimension_mismatch(self):
        reg = ModeRegister(dims=(2, 2))
        with pytest.raises(GateError, match="dimension"):
            apply_gate(np.zeros(8, dtype=complex), Swap(targets=(0, 1)), reg)

    def test_rejects_unnormalized_state(self):
        reg = ModeRegister(dims=(2, 2))
        with pytest.raises(GateError, match="normalized"):
            apply_gate(np.full(4, 0.9, dtype=complex), Swap(targets=(0, 1)), reg)

    def test_controlled_phase_flips_doubly_occupied_sign(self):
        from qram_bounds.gates import ControlledPhase
        reg = ModeRegister(dims=(2, 2, 2))
        state = np.zeros(8, dtype=complex)
        state[0b011] = 1.0  # modes 1 and 2 occupied
        out = apply_gate(state, ControlledPhase(targets=(1, 2)), reg, g2=0.7)
        assert out[0b011] == pytest.approx(-1.0, abs=1e-12)

    def test_control_on_last_mode(self):
        # gate targets need not be in register order: ctrl on mode 2
        reg = ModeRegister(dims=(2, 2, 2))
        state = np.zeros(8, dtype=complex)
        state[0b101] = 1.0  # a=1, b=0, ctrl=1
        out = apply_gate(state, ControlledSwap(targets=(2, 0, 1)), reg,
                         g1=1.3, g2=0.7)
        assert abs(out[0b011]) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_rejects_duplicate_targets(self):
        reg = ModeRegister(dims=(2, 2))
        state = np.zeros(4, dtype=complex)
        state[0] = 1.0
        with pytest.raises(GateError, match="distinct"):
            apply_gate(state, Swap(targets=(1, 1)), reg)


class TestModeRegister:
    def test_total_dimension(self):
        assert ModeRegister(dims=(2, 2, 2)).total_dim == 8

    def test_rejects_tiny_truncation(self):
        with pytest.raises(GateError, match="truncation"):
            ModeRegister(dims=(2, 1))

    def test_rejects_oversized_register(self):
        with pytest.raises(GateError, match="exceeds"):
            ModeRegister(dims=(2,) * 15)

"""Core simulation kernel tests: gate semantics against an independent
bit-arithmetic oracle, fidelities, purities, and Haar sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pqcbench import sim
from pqcbench.sim import GateOp, RngStream, Slot


def embed_gate_matrix(mat: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Full 2^n unitary for a gate, built by explicit index arithmetic.

    Independent of the tensordot path in sim.apply_gate: works directly on
    big-endian basis indices.
    """
    dim = 1 << n
    k = len(qubits)
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        local_col = 0
        for q in qubits:
            local_col = (local_col << 1) | bits[q]
        for local_row in range(1 << k):
            amp = mat[local_row, local_col]
            if amp == 0:
                continue
            out_bits = list(bits)
            for pos, q in enumerate(qubits):
                out_bits[q] = (local_row >> (k - 1 - pos)) & 1
            row = 0
            for q in range(n):
                row = (row << 1) | out_bits[q]
            full[row, col] += amp
    return full


def random_state(n: int, seed: int) -> sim.StateVector:
    g = np.random.default_rng(seed)
    z = g.standard_normal(1 << n) + 1j * g.standard_normal(1 << n)
    return sim.StateVector(n, z / np.linalg.norm(z))


PARAM_KINDS = ["RX", "RY", "RZ", "CRX", "CRZ"]
FIXED_KINDS = ["H", "X", "CNOT", "CZ"]


class TestNewZeroState:
    def test_examples(self):
        assert np.allclose(sim.new_zero_state(1).amps, [1, 0])
        assert np.allclose(sim.new_zero_state(2).amps, [1, 0, 0, 0])
        s = sim.new_zero_state(4)
        assert s.amps.shape == (16,) and s.amps[0] == 1.0

    @pytest.mark.parametrize("n", [0, -3, 17])
    def test_rejects_out_of_range(self, n):
        with pytest.raises(ValueError):
            sim.new_zero_state(n)


class TestGateOp:
    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown gate kind"):
            GateOp("RQ", (0,), (1.0,))

    def test_angle_count_enforced(self):
        with pytest.raises(ValueError):
            GateOp("RZ", (0,))
        with pytest.raises(ValueError):
            GateOp("H", (0,), (1.0,))
        with pytest.raises(ValueError):
            GateOp("U3", (0,), (1.0,))

    def test_two_qubit_distinctness(self):
        with pytest.raises(ValueError, match="distinct"):
            GateOp("CNOT", (1, 1))


class TestApplyGate:
    def test_rz_on_zero_is_phase(self):
        s = sim.apply_gate(sim.new_zero_state(1), GateOp("RZ", (0,), (0.7,)))
        assert np.allclose(np.abs(s.amps), [1, 0])
        assert np.isclose(s.amps[0], np.exp(-0.35j))

    def test_cnot_truth_table(self):
        s = sim.new_zero_state(2)
        s = sim.apply_gate(s, GateOp("X", (0,)))  # |10>
        s = sim.apply_gate(s, GateOp("CNOT", (0, 1)))
        assert np.allclose(s.amps, [0, 0, 0, 1])  # |11>

    def test_crx_pi_on_10(self):
        # oracle: the 4x4 block matrix exp(-i pi X / 2) in the control-1 block
        rx_pi = np.array([[0, -1j], [-1j, 0]])
        oracle = np.eye(4, dtype=complex)
        oracle[2:, 2:] = rx_pi
        vec = oracle @ np.array([0, 0, 1, 0], dtype=complex)
        s = sim.apply_gate(sim.new_zero_state(2), GateOp("X", (0,)))
        s = sim.apply_gate(s, GateOp("CRX", (0, 1), (math.pi,)))
        assert np.allclose(s.amps, vec)
        assert np.allclose(s.amps, [0, 0, 0, -1j])

    def test_u3_special_case_is_hadamard(self):
        s = sim.apply_gate(
            sim.new_zero_state(1), GateOp("U3", (0,), (math.pi / 2, 0.0, math.pi))
        )
        assert np.allclose(s.amps, [1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_slot_resolution_and_missing_angle(self):
        gate = GateOp("RY", (0,), (Slot(2),))
        s = sim.apply_gate(sim.new_zero_state(1), gate, [0.0, 0.0, math.pi])
        assert np.allclose(s.amps, [0, 1])
        with pytest.raises(ValueError, match="missing angle"):
            sim.apply_gate(sim.new_zero_state(1), gate, [0.0])

    def test_out_of_range_qubit(self):
        with pytest.raises(ValueError, match="out of range"):
            sim.apply_gate(sim.new_zero_state(2), GateOp("H", (2,)))

    @settings(max_examples=60, deadline=None)
    @given(
        st.integers(1, 5),
        st.sampled_from(PARAM_KINDS + FIXED_KINDS + ["U3"]),
        st.integers(0, 10**6),
        st.data(),
    )
    def test_matches_dense_matrix_oracle(self, n, kind, seed, data):
        arity = sim.GATE_ARITY[kind]
        if arity == 2 and n < 2:
            n = 2
        qubits = tuple(
            data.draw(
                st.lists(
                    st.integers(0, n - 1), min_size=arity, max_size=arity, unique=True
                )
            )
        )
        angles = tuple(
            data.draw(st.floats(0, 2 * math.pi))
            for _ in range(sim.GATE_ANGLE_COUNT[kind])
        )
        state = random_state(n, seed)
        moved = sim.apply_gate(state, GateOp(kind, qubits, angles))
        full = embed_gate_matrix(sim.gate_matrix(kind, angles), qubits, n)
        assert np.allclose(moved.amps, full @ state.amps, atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(
        st.integers(1, 5),
        st.sampled_from(PARAM_KINDS + FIXED_KINDS),
        st.integers(0, 10**6),
        st.data(),
    )
    def test_norm_preserved_and_inverse_restores(self, n, kind, seed, data):
        arity = sim.GATE_ARITY[kind]
        if arity == 2 and n < 2:
            n = 2
        qubits = tuple(
            data.draw(
                st.lists(
                    st.integers(0, n - 1), min_size=arity, max_size=arity, unique=True
                )
            )
        )
        angles = tuple(
            data.draw(st.floats(0, 2 * math.pi))
            for _ in range(sim.GATE_ANGLE_COUNT[kind])
        )
        state = random_state(n, seed)
        fwd = sim.apply_gate(state, GateOp(kind, qubits, angles))
        assert abs(np.linalg.norm(fwd.amps) ** 2 - 1.0) < 1e-10
        inverse_angles = tuple(-a for a in angles)  # self-inverse kinds have none
        back = sim.apply_gate(fwd, GateOp(kind, qubits, inverse_angles))
        assert np.allclose(back.amps, state.amps, atol=1e-9)


class TestFidelity:
    def test_examples(self):
        psi = random_state(3, 1)
        assert sim.fidelity(psi, psi) == pytest.approx(1.0)
        zero, one = sim.new_zero_state(1), sim.new_zero_state(1)
        one = sim.apply_gate(one, GateOp("X", (0,)))
        assert sim.fidelity(zero, one) == 0.0
        plus = sim.apply_gate(sim.new_zero_state(1), GateOp("H", (0,)))
        assert sim.fidelity(zero, plus) == pytest.approx(0.5)

    def test_width_mismatch(self):
        with pytest.raises(ValueError, match="width mismatch"):
            sim.fidelity(sim.new_zero_state(1), sim.new_zero_state(2))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 10**6), st.integers(0, 10**6))
    def test_symmetric_and_bounded(self, n, s1, s2):
        a, b = random_state(n, s1), random_state(n, s2)
        f_ab, f_ba = sim.fidelity(a, b), sim.fidelity(b, a)
        assert f_ab == pytest.approx(f_ba, abs=1e-12)
        assert -1e-12 <= f_ab <= 1.0 + 1e-12


class TestPurity:
    def test_product_state_purity_is_one(self):
        state = sim.new_zero_state(3)
        for q, kind in enumerate(["RX", "RY", "H"]):
            angles = (1.1,) if kind != "H" else ()
            state = sim.apply_gate(state, GateOp(kind, (q,), angles))
        for j in range(3):
            assert sim.single_qubit_purity(state, j) == pytest.approx(1.0)

    def test_bell_state_purity_half(self):
        s = sim.apply_gate(sim.new_zero_state(2), GateOp("H", (0,)))
        s = sim.apply_gate(s, GateOp("CNOT", (0, 1)))
        assert sim.single_qubit_purity(s, 0) == pytest.approx(0.5)

    def test_w_state_purity(self):
        # oracle: full density matrix, explicit partial trace over index bits
        w = np.zeros(8, dtype=complex)
        w[[1, 2, 4]] = 1 / math.sqrt(3)
        rho = np.outer(w, w.conj())
        for j in range(3):
            keep = rho.reshape([2] * 6)
            # trace out all qubits but j (row axes 0..2, column axes 3..5)
            others = [q for q in range(3) if q != j]
            order = [j, 3 + j] + others + [3 + q for q in others]
            moved = np.transpose(keep, order).reshape(2, 2, 4, 4)
            rho_j = np.einsum("stkk->st", moved)
            oracle = np.real(np.trace(rho_j @ rho_j))
            assert oracle == pytest.approx(5 / 9)
            got = sim.single_qubit_purity(sim.StateVector(3, w), j)
            assert got == pytest.approx(oracle, abs=1e-12)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            sim.single_qubit_purity(sim.new_zero_state(2), 2)


class TestHaarSampling:
    def test_state_norm_and_single_qubit_purity(self):
        for trial in range(5):
            s = sim.sample_haar_state(3, RngStream(5, trial))
            assert abs(np.linalg.norm(s.amps) - 1.0) < 1e-10
        one_qubit = sim.sample_haar_state(1, RngStream(6))
        assert sim.single_qubit_purity(one_qubit, 0) == pytest.approx(1.0, abs=1e-12)

    def test_mean_pairwise_fidelity_single_qubit(self):
        rng = RngStream(7)
        fids = []
        for k in range(3000):
            a = sim.sample_haar_state(1, rng.child(2 * k))
            b = sim.sample_haar_state(1, rng.child(2 * k + 1))
            fids.append(sim.fidelity(a, b))
        assert np.mean(fids) == pytest.approx(0.5, abs=0.02)

    def test_fidelity_law_examples(self):
        draws = sim.sample_haar_fidelity(16, RngStream(8), size=100_000)
        assert np.mean(draws) == pytest.approx(1 / 16, abs=0.003)
        assert draws.min() >= 0.0 and draws.max() <= 1.0

    def test_endpoint_u_equal_one_maps_to_zero(self):
        class _ZeroGen:
            def random(self, size=None):
                return 0.0 if size is None else np.zeros(size)

        rng = RngStream(0)
        rng._generator = _ZeroGen()  # u = 1 - random() = 1 exactly
        assert sim.sample_haar_fidelity(4, rng) == 0.0

    @pytest.mark.parametrize("N", [2, 16])
    def test_kolmogorov_smirnov_distance(self, N):
        draws = np.sort(sim.sample_haar_fidelity(N, RngStream(9, N), size=10_000))
        cdf = 1.0 - (1.0 - draws) ** (N - 1)
        k = draws.size
        ecdf_hi = np.arange(1, k + 1) / k
        ecdf_lo = np.arange(0, k) / k
        ks = max(np.max(np.abs(ecdf_hi - cdf)), np.max(np.abs(ecdf_lo - cdf)))
        assert ks < 0.02

    def test_invalid_dimension(self):
        with pytest.raises(ValueError):
            sim.sample_haar_fidelity(1, RngStream(0))


class TestRngStream:
    def test_reproducible_and_independent(self):
        a = RngStream(1234, 5).generator.random(8)
        b = RngStream(1234, 5).generator.random(8)
        c = RngStream(1234, 6).generator.random(8)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_children_are_distinct(self):
        base = RngStream(99)
        x = base.child(0).generator.random(4)
        y = base.child(1).generator.random(4)
        assert not np.array_equal(x, y)

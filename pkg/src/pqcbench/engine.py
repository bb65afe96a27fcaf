"""Batched statevector engine.

Runs one gate sequence against a whole batch of parameter vectors at once,
vectorizing over the Monte Carlo sample axis.  Per-state semantics match
``sim.apply_gate`` exactly (cross-checked in the test suite); this path exists
purely so descriptor estimation is fast at desk scale.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .sim import MAX_QUBITS, GateOp, Slot, gate_matrix

# Cap on batch * dim so wide registers fall back to smaller slabs (~64 MiB).
_MAX_BATCH_AMPS = 1 << 22


def max_batch_size(n: int) -> int:
    return max(1, _MAX_BATCH_AMPS >> n)


def zero_batch(n: int, count: int) -> np.ndarray:
    amps = np.zeros((count, 1 << n), dtype=complex)
    amps[:, 0] = 1.0
    return amps


def _rot_mats(kind: str, theta: np.ndarray) -> np.ndarray:
    """Per-sample 2x2 rotation matrices, shape (B, 2, 2)."""
    half = 0.5 * theta
    c, s = np.cos(half), np.sin(half)
    mats = np.empty((theta.shape[0], 2, 2), dtype=complex)
    if kind == "RX":
        mats[:, 0, 0] = c
        mats[:, 0, 1] = -1j * s
        mats[:, 1, 0] = -1j * s
        mats[:, 1, 1] = c
    elif kind == "RY":
        mats[:, 0, 0] = c
        mats[:, 0, 1] = -s
        mats[:, 1, 0] = s
        mats[:, 1, 1] = c
    elif kind == "RZ":
        p = np.exp(-1j * half)
        mats[:, 0, 0] = p
        mats[:, 0, 1] = 0.0
        mats[:, 1, 0] = 0.0
        mats[:, 1, 1] = np.conj(p)
    else:
        raise ValueError(f"not a single-axis rotation: {kind}")
    return mats


def _u3_mats(theta: np.ndarray, phi: np.ndarray, lam: np.ndarray) -> np.ndarray:
    half = 0.5 * theta
    c, s = np.cos(half), np.sin(half)
    mats = np.empty((theta.shape[0], 2, 2), dtype=complex)
    mats[:, 0, 0] = c
    mats[:, 0, 1] = -np.exp(1j * lam) * s
    mats[:, 1, 0] = np.exp(1j * phi) * s
    mats[:, 1, 1] = np.exp(1j * (phi + lam)) * c
    return mats


def _apply_1q_fixed(amps: np.ndarray, n: int, mat: np.ndarray, q: int) -> np.ndarray:
    view = amps.reshape(amps.shape[0], 1 << q, 2, -1)
    out = np.einsum("ij,bljr->blir", mat, view)
    return out.reshape(amps.shape[0], -1)

def _apply_1q_mats(amps: np.ndarray, n: int, mats: np.ndarray, q: int) -> np.ndarray:
    view = amps.reshape(amps.shape[0], 1 << q, 2, -1)
    out = np.einsum("bij,bljr->blir", mats, view)
    return out.reshape(amps.shape[0], -1)


def _ctrl_view(amps: np.ndarray, n: int, c: int, t: int) -> np.ndarray:
    """6-axis view (B, lo-block, 2, mid-block, 2, hi-block) over qubits c,t."""
    lo, hi = (c, t) if c < t else (t, c)
    b = amps.shape[0]
    return amps.reshape(b, 1 << lo, 2, 1 << (hi - lo - 1), 2, -1)


def _apply_controlled(
    amps: np.ndarray,
    n: int,
    kind: str,
    c: int,
    t: int,
    mats: np.ndarray | None,
) -> np.ndarray:
    """In-place controlled gate on the control=|1> slice of the batch."""
    view = _ctrl_view(amps, n, c, t)
    if kind == "CZ":
        view[:, :, 1, :, 1, :] *= -1.0
        return amps
    if c < t:
        sub = view[:, :, 1, :, :, :]  # target on axis 3
        if kind == "CNOT":
            view[:, :, 1, :, :, :] = sub[:, :, :, ::-1, :]
        else:
            view[:, :, 1, :, :, :] = np.einsum("bij,blmjr->blmir", mats, sub)
    else:
        sub = view[:, :, :, :, 1, :]  # target on axis 2
        if kind == "CNOT":
            view[:, :, :, :, 1, :] = sub[:, :, ::-1, :, :]
        else:
            view[:, :, :, :, 1, :] = np.einsum("bij,bljmr->blimr", mats, sub)
    return amps


def run_circuit(
    gates: Iterable[GateOp],
    n: int,
    thetas: np.ndarray,
    out: np.ndarray | None = None,
) -> np.ndarray:
    """Apply ``gates`` to |0...0> for every parameter row of ``thetas``.

    ``thetas`` has shape (B, P); returns amplitudes of shape (B, 2**n).
    """
    if not (1 <= n <= MAX_QUBITS):
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 2:
        raise ValueError("thetas must be a (batch, params) array")
    b = thetas.shape[0]
    amps = zero_batch(n, b) if out is None else out

    for gate in gates:
        srcs = gate.angles
        fixed = all(not isinstance(s, Slot) for s in srcs)
        if len(gate.qubits) == 1:
            (q,) = gate.qubits
            if gate.kind in ("H", "X"):
                amps = _apply_1q_fixed(amps, n, gate_matrix(gate.kind), q)
            elif gate.kind == "U3":
                a0, a1, a2 = (_angle_column(s, thetas, b) for s in srcs)
                amps = _apply_1q_mats(amps, n, _u3_mats(a0, a1, a2), q)
            elif fixed:
                amps = _apply_1q_fixed(
                    amps, n, gate_matrix(gate.kind, [float(srcs[0])]), q
                )
            else:
                theta = _angle_column(srcs[0], thetas, b)
                amps = _apply_1q_mats(amps, n, _rot_mats(gate.kind, theta), q)
        else:
            c, t = gate.qubits
            if gate.kind in ("CNOT", "CZ"):
                amps = _apply_controlled(amps, n, gate.kind, c, t, None)
            else:
                theta = _angle_column(srcs[0], thetas, b)
                mats = _rot_mats(gate.kind[1:], theta)  # CRX -> RX, CRZ -> RZ
                amps = _apply_controlled(amps, n, gate.kind, c, t, mats)
    return amps


def _angle_column(src, thetas: np.ndarray, b: int) -> np.ndarray:
    if isinstance(src, Slot):
        if not (0 <= src.index < thetas.shape[1]):
            raise ValueError(f"missing angle for parameter slot {src.index}")
        return thetas[:, src.index]
    return np.full(b, float(src))


def batch_fidelity(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise |<a|b>|^2, clipped into [0, 1] against rounding spill."""
    overlaps = np.einsum("bi,bi->b", a.conj(), b)
    return np.clip(np.abs(overlaps) ** 2, 0.0, 1.0)


def batch_qubit_purity(amps: np.ndarray, n: int, j: int) -> np.ndarray:
    """tr(rho_j^2) for every state in the batch."""
    view = amps.reshape(amps.shape[0], 1 << j, 2, -1)
    rho = np.einsum("blsr,bltr->bst", view, view.conj())
    return np.real(np.einsum("bst,bts->b", rho, rho))


def batch_mw_q(amps: np.ndarray, n: int) -> np.ndarray:
    """Meyer-Wallach Q = 2 (1 - mean_j tr(rho_j^2)) for every state."""
    purity_sum = np.zeros(amps.shape[0])
    for j in range(n):
        purity_sum += batch_qubit_purity(amps, n, j)
    q = 2.0 * (1.0 - purity_sum / n)
    return np.clip(q, 0.0, 1.0)

"""Dense statevector simulation kernel.

States, gate application, pair fidelities, single-qubit reduced purities, and
Haar-random sampling.  Conventions used throughout the package:

* Qubit 0 is the most significant bit of the basis index, so the basis state
  ``|b0 b1 ... b_{n-1}>`` lives at index ``sum_j b_j * 2**(n-1-j)``.
* Rotations follow ``R_A(theta) = exp(-i * theta * A / 2)`` for Pauli axis A.
* Controlled gates apply the target operation when the control qubit is |1>.

Amplitudes are dense complex128 arrays; widths are capped at 16 qubits, where
dense simulation is the right tool.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

MAX_QUBITS = 16
NORM_ATOL = 1e-10

GATE_ARITY = {
    "H": 1, "X": 1, "RX": 1, "RY": 1, "RZ": 1, "U3": 1,
    "CNOT": 2, "CZ": 2, "CRX": 2, "CRZ": 2,
}
GATE_ANGLE_COUNT = {
    "H": 0, "X": 0, "RX": 1, "RY": 1, "RZ": 1, "U3": 3,
    "CNOT": 0, "CZ": 0, "CRX": 1, "CRZ": 1,
}
TWO_QUBIT_KINDS = frozenset(k for k, a in GATE_ARITY.items() if a == 2)


@dataclass(frozen=True)
class Slot:
    """Reference to a circuit parameter slot (filled at bind time)."""

    index: int


#: A gate angle is either a fixed value in radians or a parameter slot.
AngleSource = Union[float, Slot]


@dataclass(frozen=True)
class GateOp:
    """One gate instruction: kind, qubit indices, and its angle sources."""

    kind: str
    qubits: tuple[int, ...]
    angles: tuple[AngleSource, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity = GATE_ARITY[self.kind]
        if len(self.qubits) != arity:
            raise ValueError(
                f"{self.kind} takes {arity} qubit(s), got {len(self.qubits)}"
            )
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind} requires two distinct qubits")
        want = GATE_ANGLE_COUNT[self.kind]
        if len(self.angles) != want:
            raise ValueError(
                f"{self.kind} takes {want} angle source(s), got {len(self.angles)}"
            )


@dataclass
class StateVector:
    """Normalized pure state of ``n`` qubits over ``2**n`` amplitudes."""

    n: int
    amps: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    @property
    def dim(self) -> int:
        return 1 << self.n


class RngStream:
    """Reproducible random stream keyed by ``(master_seed, stream_id)``.

    Identical keys reproduce identical draw sequences; distinct stream ids
    yield statistically independent streams (numpy ``SeedSequence`` spawn
    keys).  A stream must not be shared across workers; derive one child per
    worker/chunk instead.
    """

    def __init__(self, master_seed: int, stream_id: int | tuple[int, ...] = 0):
        self.master_seed = int(master_seed)
        self.stream_id: tuple[int, ...] = (
            (int(stream_id),) if isinstance(stream_id, int) else tuple(stream_id)
        )
        self._generator: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            seq = np.random.SeedSequence(self.master_seed, spawn_key=self.stream_id)
            self._generator = np.random.Generator(np.random.PCG64(seq))
        return self._generator

    def child(self, *key: int) -> "RngStream":
        """Derive an independent stream by extending the stream id."""
        return RngStream(self.master_seed, self.stream_id + tuple(int(k) for k in key))

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"


# -- gate matrices -----------------------------------------------------------

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def _rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    p = np.exp(-0.5j * theta)
    return np.array([[p, 0.0], [0.0, np.conj(p)]], dtype=complex)


def _u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def _controlled(mat2: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = mat2
    return out


def gate_matrix(kind: str, angles: Sequence[float] = ()) -> np.ndarray:
    """Unitary matrix of a gate kind at fixed angles (2x2 or 4x4).

    Two-qubit matrices act on (control, target) ordering of the tensor
    factors.
    """
    if kind == "H":
        return _H
    if kind == "X":
        return _X
    if kind == "RX":
        return _rx(angles[0])
    if kind == "RY":
        return _ry(angles[0])
    if kind == "RZ":
        return _rz(angles[0])
    if kind == "U3":
        return _u3(angles[0], angles[1], angles[2])
    if kind == "CNOT":
        return _controlled(_X)
    if kind == "CZ":
        return _controlled(np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex))
    if kind == "CRX":
        return _controlled(_rx(angles[0]))
    if kind == "CRZ":
        return _controlled(_rz(angles[0]))
    raise ValueError(f"unknown gate kind {kind!r}")


def resolve_angles(gate: GateOp, params: Sequence[float] | None = None) -> tuple[float, ...]:
    """Fill the gate's angle sources from a parameter vector."""
    out = []
    for src in gate.angles:
        if isinstance(src, Slot):
            if params is None or not (0 <= src.index < len(params)):
                raise ValueError(
                    f"missing angle for parameter slot {src.index} of {gate.kind}"
                )
            out.append(float(params[src.index]))
        else:
            out.append(float(src))
    return tuple(out)


# -- operations --------------------------------------------------------------

def new_zero_state(n: int) -> StateVector:
    """The reference state |0...0> on ``n`` qubits (1 <= n <= 16)."""
    if not isinstance(n, int) or not (1 <= n <= MAX_QUBITS):
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StateVector(n, amps)


def apply_gate(
    state: StateVector, gate: GateOp, params: Sequence[float] | None = None
) -> StateVector:
    """Apply one gate and return the new state (input is left untouched).

    ``params`` supplies values for any parameter slots the gate references.
    """
    n = state.n
    for q in gate.qubits:
        if not (0 <= q < n):
            raise ValueError(f"qubit index {q} out of range for {n}-qubit state")
    mat = gate_matrix(gate.kind, resolve_angles(gate, params))

    tensor = state.amps.reshape((2,) * n)
    if len(gate.qubits) == 1:
        (q,) = gate.qubits
        tensor = np.tensordot(mat, tensor, axes=([1], [q]))
        tensor = np.moveaxis(tensor, 0, q)
    else:
        c, t = gate.qubits
        m = mat.reshape(2, 2, 2, 2)
        tensor = np.tensordot(m, tensor, axes=([2, 3], [c, t]))
        tensor = np.moveaxis(tensor, (0, 1), (c, t))
    amps = np.ascontiguousarray(tensor.reshape(-1))

    norm_sq = float(np.real(np.vdot(amps, amps)))
    if abs(norm_sq - 1.0) > NORM_ATOL:
        raise AssertionError(f"gate {gate.kind} broke normalization: |psi|^2={norm_sq}")
    return StateVector(n, amps)


def fidelity(a: StateVector, b: StateVector) -> float:
    """Pair fidelity F = |<a|b>|^2."""
    if a.n != b.n:
        raise ValueError(f"width mismatch: {a.n} vs {b.n} qubits")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def single_qubit_purity(state: StateVector, j: int) -> float:
    """Purity tr(rho_j^2) of the reduced state of qubit ``j``.

    Obtained by tracing out all other qubits; lies in [1/2, 1] for a
    normalized input.
    """
    if not (0 <= j < state.n):
        raise ValueError(f"qubit index {j} out of range for {state.n}-qubit state")
    # Rows of m enumerate qubit j's basis; columns enumerate the rest.
    view = state.amps.reshape(1 << j, 2, -1)
    m = np.swapaxes(view, 0, 1).reshape(2, -1)
    rho = m @ m.conj().T
    return float(np.real(np.trace(rho @ rho)))


def sample_haar_state(n: int, rng: RngStream) -> StateVector:
    """Draw one pure state from the Haar measure (normalized Ginibre column)."""
    if not (1 <= n <= MAX_QUBITS):
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    g = rng.generator
    dim = 1 << n
    z = g.standard_normal(dim) + 1j * g.standard_normal(dim)
    z /= np.linalg.norm(z)
    return StateVector(n, z)


def sample_haar_fidelity(
    N: int, rng: RngStream, size: int | None = None
) -> float | np.ndarray:
    """Draw fidelities directly from the Haar law P(F) = (N-1)(1-F)^(N-2).

    Uses the inverse CDF ``F = 1 - u**(1/(N-1))`` with u uniform on (0, 1];
    much cheaper than simulating state pairs, used for bias baselines.
    """
    if not (isinstance(N, int) and N >= 2):
        raise ValueError(f"Hilbert dimension must be an integer >= 2, got {N}")
    g = rng.generator
    u = 1.0 - g.random(size)  # maps [0,1) draws onto (0,1]
    f = 1.0 - u ** (1.0 / (N - 1))
    if size is None:
        return float(f)
    return f

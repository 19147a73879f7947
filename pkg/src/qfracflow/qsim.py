"""Dense statevector / density-operator simulator with two noise channels.

Qubit convention: qubit 0 is the most significant bit of the basis index,
so reshaping an amplitude vector to shape (2,)*n puts qubit q on axis q.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import SolutionVector

ATOL = 1e-10

DEPHASING_TERMINAL = "dephasing-per-qubit-terminal"
DEPOLARIZING_PER_LAYER = "global-depolarizing-per-layer"


@dataclass(frozen=True)
class StateVector:
    """Pure state over 2**n_qubits computational basis states."""

    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes, got {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm {norm} differs from 1 by more than 1e-12")

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(amps, n_qubits)

    @classmethod
    def from_real(cls, values: np.ndarray) -> "StateVector":
        values = np.asarray(values, dtype=float)
        n = int(np.log2(len(values)))
        if 2**n != len(values):
            raise ValueError("length must be a power of two")
        return cls(values / np.linalg.norm(values), n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace operator on 2**n_qubits dimensions."""

    matrix: np.ndarray
    n_qubits: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        dim = 2**self.n_qubits
        if m.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix, got {m.shape}")
        if abs(np.trace(m) - 1.0) > 1e-12:
            raise ValueError("trace differs from 1 by more than 1e-12")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("matrix is not Hermitian to 1e-12")

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))


@dataclass(frozen=True)
class NoiseChannel:
    """One of the two channel models: terminal per-qubit dephasing or
    per-layer global depolarizing.  p is the probability the noise does
    NOT act."""

    kind: str
    p: float | tuple[float, ...]  # dephasing admits one p per qubit

    def __post_init__(self):
        if self.kind not in (DEPHASING_TERMINAL, DEPOLARIZING_PER_LAYER):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        ps = self.p if isinstance(self.p, tuple) else (self.p,)
        if any(not 0.0 <= p <= 1.0 for p in ps):
            raise ValueError("p must lie in [0, 1]")
        if isinstance(self.p, tuple) and self.kind != DEPHASING_TERMINAL:
            raise ValueError("per-qubit p is only defined for dephasing")

    def qubit_p(self, qubit: int) -> float:
        if isinstance(self.p, tuple):
            return self.p[qubit]
        return self.p


@dataclass(frozen=True)
class ShotCounts:
    """Measurement histogram over computational basis indices."""

    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if counts.sum() != self.total:
            raise ValueError("counts do not sum to total")

    def frequencies(self) -> np.ndarray:
        return self.counts / self.total


# gate matrices ------------------------------------------------------------

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _apply_single(amps: np.ndarray, u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    psi = amps.reshape((2,) * n)
    psi = np.tensordot(u, psi, axes=([1], [qubit]))
    psi = np.moveaxis(psi, 0, qubit)
    return psi.reshape(-1)


def _apply_matrix(amps: np.ndarray, u: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    k = len(targets)
    psi = amps.reshape((2,) * n)
    u = u.reshape((2,) * (2 * k))
    psi = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), list(targets)))
    psi = np.moveaxis(psi, list(range(k)), list(targets))
    return psi.reshape(-1)


def apply_gate(
    state: StateVector,
    gate: str,
    targets: int | tuple[int, ...],
    *,
    angle: float | None = None,
    matrix: np.ndarray | None = None,
) -> StateVector:
    """Apply a named gate ('ry', 'x', 'z', 'cz', 'cnot', 'unitary') to the
    given target qubit(s) and return the new state."""
    if isinstance(targets, int):
        targets = (targets,)
    n = state.n_qubits
    if len(set(targets)) != len(targets):
        raise ValueError("target qubits must be distinct")
    if any(t < 0 or t >= n for t in targets):
        raise ValueError("target qubit out of range")
    amps = state.amplitudes

    if gate == "ry":
        if angle is None:
            raise ValueError("ry requires an angle")
        out = _apply_single(amps, ry_matrix(angle), targets[0], n)
    elif gate == "x":
        out = _apply_single(amps, _X, targets[0], n)
    elif gate == "z":
        out = _apply_single(amps, _Z, targets[0], n)
    elif gate == "cz":
        control, target = targets
        out = amps.copy()
        idx = np.arange(2**n)
        both = ((idx >> (n - 1 - control)) & 1) & ((idx >> (n - 1 - target)) & 1)
        out[both == 1] *= -1
    elif gate == "cnot":
        control, target = targets
        idx = np.arange(2**n)
        flipped = np.where(
            ((idx >> (n - 1 - control)) & 1) == 1,
            idx ^ (1 << (n - 1 - target)),
            idx,
        )
        out = np.empty_like(amps)
        out[flipped] = amps[idx]
    elif gate == "unitary":
        if matrix is None:
            raise ValueError("custom gate requires a matrix")
        matrix = np.asarray(matrix, dtype=complex)
        dim = 2 ** len(targets)
        if matrix.shape != (dim, dim):
            raise ValueError("matrix dimension does not match target count")
        if np.max(np.abs(matrix @ matrix.conj().T - np.eye(dim))) > ATOL:
            raise ValueError("custom matrix is not unitary to 1e-10")
        out = _apply_matrix(amps, matrix, targets, n)
    else:
        raise ValueError(f"unknown gate {gate!r}")
    return StateVector(out, n)


def expectation(state: StateVector, hermitian: np.ndarray) -> float:
    """Real expectation value <x|H|x>."""
    h = np.asarray(hermitian)
    if h.shape != (len(state.amplitudes),) * 2:
        raise ValueError("operator dimension does not match state")
    val = np.vdot(state.amplitudes, h @ state.amplitudes)
    assert abs(val.imag) < ATOL, "expectation has a non-negligible imaginary part"
    return float(val.real)


def sample_shots(state: StateVector, n_shots: int, seed: int) -> ShotCounts:
    """Multinomial measurement sampling with a deterministic seeded generator."""
    if n_shots <= 0:
        raise ValueError("n_shots must be positive")
    rng = np.random.default_rng(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    counts = rng.multinomial(n_shots, probs)
    return ShotCounts(counts, n_shots)


def infer_solution(counts: ShotCounts) -> SolutionVector:
    """Reconstruct the (elementwise nonnegative) solution estimate from shot
    frequencies: x_i = sqrt(count_i / total).  Sign information is not
    recoverable; all target solutions here are nonnegative."""
    if counts.total <= 0:
        raise ValueError("total shots must be positive")
    values = np.sqrt(counts.frequencies())
    return SolutionVector(values=values, raw_scale=1.0)


def state_to_density(state: StateVector) -> DensityOperator:
    """Pure-state density operator |x><x|."""
    amps = state.amplitudes
    return DensityOperator(np.outer(amps, amps.conj()), state.n_qubits)


def _z_signs(n: int, qubit: int) -> np.ndarray:
    idx = np.arange(2**n)
    return 1.0 - 2.0 * ((idx >> (n - 1 - qubit)) & 1)


def apply_channel(
    rho: DensityOperator, channel: NoiseChannel, layer_count: int = 1
) -> DensityOperator:
    """Apply the channel.  Terminal dephasing acts once per qubit; global
    depolarizing uses the closed form p**L rho + (1 - p**L) I / 2**n."""
    n = rho.n_qubits
    if channel.kind == DEPHASING_TERMINAL:
        if isinstance(channel.p, tuple) and len(channel.p) != n:
            raise ValueError("per-qubit p length does not match qubit count")
        m = rho.matrix
        for q in range(n):
            p = channel.qubit_p(q)
            signs = _z_signs(n, q)
            m = p * m + (1 - p) * (signs[:, None] * signs[None, :]) * m
        return DensityOperator(m, n)
    dim = 2**n
    pl = channel.p**layer_count
    m = pl * rho.matrix + (1 - pl) / dim * np.eye(dim)
    return DensityOperator(m, n)

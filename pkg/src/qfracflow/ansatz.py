"""Layered hardware-efficient circuit: Ry rotations with CZ entanglers.

Structure: one preliminary column of Ry on every qubit, then per layer a CZ
column on even nearest-neighbor pairs followed by an Ry column, and a CZ
column on odd pairs followed by another Ry column.  Parameter count is
n_qubits * (1 + 2 * n_layers).  CZ connectivity is linear with open
boundaries (no wrap-around).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .qsim import StateVector

RY = "ry"
CZ = "cz"


@dataclass(frozen=True)
class CircuitTemplate:
    """Fixed gate sequence with slots for trainable Ry angles."""

    n_qubits: int
    n_layers: int
    gates: tuple  # ("ry", qubit, param_index) | ("cz", ((a, b), ...))

    @property
    def n_params(self) -> int:
        return self.n_qubits * (1 + 2 * self.n_layers)


@dataclass(frozen=True)
class Params:
    """Trainable rotation angles, one per Ry slot."""

    angles: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "angles", np.asarray(self.angles, dtype=float))


def build_template(n_qubits: int, n_layers: int) -> CircuitTemplate:
    """Deterministic gate ordering for the layered Ry/CZ circuit."""
    if n_qubits < 2:
        raise ValueError("need at least 2 qubits")
    if n_layers < 1:
        raise ValueError("need at least 1 layer")
    gates = []
    pidx = 0

    def ry_column():
        nonlocal pidx
        for q in range(n_qubits):
            gates.append((RY, q, pidx))
            pidx += 1

    even = tuple((q, q + 1) for q in range(0, n_qubits - 1, 2))
    odd = tuple((q, q + 1) for q in range(1, n_qubits - 1, 2))
    ry_column()
    for _ in range(n_layers):
        gates.append((CZ, even))
        ry_column()
        if odd:
            gates.append((CZ, odd))
        ry_column()
    template = CircuitTemplate(n_qubits=n_qubits, n_layers=n_layers, gates=tuple(gates))
    assert pidx == template.n_params
    return template


@lru_cache(maxsize=64)
def _cz_signs(n_qubits: int, pairs: tuple) -> np.ndarray:
    """Flat +-1 vector applying a whole CZ column at once."""
    idx = np.arange(2**n_qubits)
    signs = np.ones(2**n_qubits)
    for a, b in pairs:
        both = ((idx >> (n_qubits - 1 - a)) & 1) & ((idx >> (n_qubits - 1 - b)) & 1)
        signs[both == 1] *= -1
    return signs


def _ry_inplace(psi: np.ndarray, qubit: int, cos_half: float, sin_half: float) -> None:
    """Rotate qubit axis of a (2,)*n shaped array in place."""
    i0 = (slice(None),) * qubit + (0,)
    i1 = (slice(None),) * qubit + (1,)
    a0 = psi[i0].copy()
    a1 = psi[i1]
    psi[i0] = cos_half * a0 - sin_half * a1
    psi[i1] = sin_half * a0 + cos_half * a1


def _run(template: CircuitTemplate, angles: np.ndarray) -> np.ndarray:
    n = template.n_qubits
    psi = np.zeros((2,) * n)
    psi[(0,) * n] = 1.0
    cos = np.cos(angles / 2)
    sin = np.sin(angles / 2)
    flat = psi.reshape(-1)
    for gate in template.gates:
        if gate[0] == RY:
            _, q, p = gate
            _ry_inplace(psi, q, cos[p], sin[p])
        else:
            flat *= _cz_signs(n, gate[1])
    return flat.copy()


def evaluate(template: CircuitTemplate, params: Params) -> StateVector:
    """Apply the circuit to |0...0> and return the prepared state."""
    angles = params.angles
    if angles.shape != (template.n_params,):
        raise ValueError(
            f"expected {template.n_params} angles, got {angles.shape}"
        )
    amps = _run(template, angles)
    return StateVector(amps.astype(complex), template.n_qubits)


def gradient(
    costfn: Callable[[StateVector], float],
    template: CircuitTemplate,
    params: Params,
) -> np.ndarray:
    """Parameter-shift gradient, exact for expectation-type costs with Ry
    generators: dC/dt_j = (C(t + pi/2 e_j) - C(t - pi/2 e_j)) / 2."""
    angles = params.angles
    grad = np.empty_like(angles)
    shift = np.pi / 2
    for j in range(len(angles)):
        shifted = angles.copy()
        shifted[j] += shift
        plus = costfn(evaluate(template, Params(shifted)))
        shifted[j] -= 2 * shift
        minus = costfn(evaluate(template, Params(shifted)))
        grad[j] = 0.5 * (plus - minus)
    return grad


def gradient_adjoint(
    apply_m: Callable[[np.ndarray], np.ndarray],
    template: CircuitTemplate,
    params: Params,
) -> np.ndarray:
    """Exact gradient of <x(t)|M|x(t)> in a single forward/backward sweep.

    apply_m maps an amplitude vector to M times that vector.  Numerically
    identical to the parameter-shift rule (all gates are Ry/CZ) but costs
    O(gates) instead of O(params * gates) circuit applications.
    """
    angles = params.angles
    n = template.n_qubits
    ket = _run(template, angles).reshape((2,) * n)
    lam = apply_m(ket.reshape(-1).copy()).reshape((2,) * n).copy()
    grad = np.zeros_like(angles)
    cos = np.cos(angles / 2)
    sin = np.sin(angles / 2)
    for gate in reversed(template.gates):
        if gate[0] == RY:
            _, q, p = gate
            # d(Ry)/dt = -(1/2) Y_c Ry with Y_c = [[0, 1], [-1, 0]] acting
            # on real amplitudes; gradient term is 2 Re <lam| dU ket_before>
            # evaluated as 2 <lam| (-1/2) Y_c |ket_after>.
            i0 = (slice(None),) * q + (0,)
            i1 = (slice(None),) * q + (1,)
            d0 = -0.5 * ket[i1]
            d1 = 0.5 * ket[i0]
            grad[p] = 2.0 * (np.sum(lam[i0] * d0) + np.sum(lam[i1] * d1))
            # undo the rotation on both vectors (Ry(-t))
            _ry_inplace(ket, q, cos[p], -sin[p])
            _ry_inplace(lam, q, cos[p], -sin[p])
        else:
            signs = _cz_signs(n, gate[1]).reshape((2,) * n)
            ket *= signs
            lam *= signs
    return grad

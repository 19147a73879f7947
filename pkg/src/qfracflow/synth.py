"""Variational compilation of small unitaries into fixed gate skeletons.

Two-qubit targets use the universal 3-CNOT skeleton with 7 single-qubit
rotation slots (each slot a Rz Ry Rz triple); three-qubit targets use a
brickwork of 20 CNOTs with 33 rotation slots.  Angles are fitted by
maximizing the phase-invariant trace fidelity |Tr(U^dag V)|^2 / d^2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


@dataclass(frozen=True)
class CompilationTask:
    target: np.ndarray
    gates: tuple  # ("rz"|"ry", qubit, param_index) | ("cnot", (control, target))
    n_qubits: int
    n_params: int
    tolerance: float = 1e-3  # max acceptable 1 - fidelity
    max_iterations: int = 500

    def __post_init__(self):
        u = np.asarray(self.target, dtype=complex)
        dim = 2**self.n_qubits
        if u.shape != (dim, dim):
            raise ValueError("target dimension does not match qubit count")
        if np.max(np.abs(u @ u.conj().T - np.eye(dim))) > 1e-10:
            raise ValueError("target is not unitary to 1e-10")
        object.__setattr__(self, "target", u)


@dataclass(frozen=True)
class CompilationResult:
    params: np.ndarray
    achieved_fidelity: float
    success: bool
    restarts_used: int


def _rot_slot(gates, q, pidx):
    gates.append(("rz", q, pidx))
    gates.append(("ry", q, pidx + 1))
    gates.append(("rz", q, pidx + 2))
    return pidx + 3


def two_qubit_template() -> tuple[tuple, int]:
    """3 CNOTs, 7 rotation slots (21 angles); contains the canonical
    universal two-qubit decomposition as a special case."""
    gates: list = []
    p = 0
    p = _rot_slot(gates, 0, p)
    p = _rot_slot(gates, 1, p)
    gates.append(("cnot", (1, 0)))
    p = _rot_slot(gates, 0, p)
    p = _rot_slot(gates, 1, p)
    gates.append(("cnot", (0, 1)))
    p = _rot_slot(gates, 1, p)
    gates.append(("cnot", (1, 0)))
    p = _rot_slot(gates, 0, p)
    p = _rot_slot(gates, 1, p)
    return tuple(gates), p


def three_qubit_template(blocks: int = 10) -> tuple[tuple, int]:
    """Repeating (0,1),(1,2) CNOT brickwork: 2*blocks CNOTs and
    3*(blocks+1) rotation slots."""
    gates: list = []
    p = 0
    for q in range(3):
        p = _rot_slot(gates, q, p)
    for _ in range(blocks):
        gates.append(("cnot", (0, 1)))
        gates.append(("cnot", (1, 2)))
        for q in range(3):
            p = _rot_slot(gates, q, p)
    return tuple(gates), p


def make_task(target: np.ndarray, **kwargs) -> CompilationTask:
    """Pick the skeleton matching the target size (2 or 3 qubits)."""
    dim = target.shape[0]
    if dim == 4:
        gates, n_params = two_qubit_template()
        n_qubits = 2
    elif dim == 8:
        gates, n_params = three_qubit_template()
        n_qubits = 3
    else:
        raise ValueError("only 2- and 3-qubit targets are supported")
    return CompilationTask(
        target=target, gates=gates, n_qubits=n_qubits, n_params=n_params, **kwargs
    )


def _expand_single(u2: np.ndarray, qubit: int, n: int) -> np.ndarray:
    mats = [np.eye(2, dtype=complex)] * n
    mats[qubit] = u2
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _expand_cnot(control: int, target: int, n: int) -> np.ndarray:
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        if (i >> (n - 1 - control)) & 1:
            out[i ^ (1 << (n - 1 - target)), i] = 1.0
        else:
            out[i, i] = 1.0
    return out


def _gate_matrices(task: CompilationTask, angles: np.ndarray):
    """Full-dimension matrix and generator for every gate in order."""
    n = task.n_qubits
    mats, gens = [], []
    for gate in task.gates:
        if gate[0] == "cnot":
            mats.append(_expand_cnot(*gate[1], n))
            gens.append(None)
        else:
            kind, q, p = gate
            t = angles[p]
            if kind == "rz":
                small = np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
                pauli = _Z
            else:
                c, s = np.cos(t / 2), np.sin(t / 2)
                small = np.array([[c, -s], [s, c]], dtype=complex)
                pauli = _Y
            mats.append(_expand_single(small, q, n))
            gens.append(_expand_single(-0.5j * pauli, q, n))
    return mats, gens


def circuit_unitary(task: CompilationTask, angles: np.ndarray) -> np.ndarray:
    mats, _ = _gate_matrices(task, angles)
    dim = 2**task.n_qubits
    out = np.eye(dim, dtype=complex)
    for m in mats:
        out = m @ out
    return out


def unitary_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|Tr(U^dag V)|^2 / d^2: 1 iff V equals U up to a global phase."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError("dimension mismatch")
    d = u.shape[0]
    return float(np.abs(np.trace(u.conj().T @ v)) ** 2 / d**2)


def _objective_and_grad(task: CompilationTask, angles: np.ndarray):
    """1 - fidelity and its exact gradient via prefix/suffix products."""
    mats, gens = _gate_matrices(task, angles)
    dim = 2**task.n_qubits
    m = len(mats)
    prefix = [np.eye(dim, dtype=complex)]
    for g in mats:
        prefix.append(g @ prefix[-1])
    suffix = [np.eye(dim, dtype=complex)]
    for g in reversed(mats):
        suffix.append(suffix[-1] @ g)
    suffix.reverse()  # suffix[k] = G_m ... G_{k+1}
    udag = task.target.conj().T
    trace = np.trace(udag @ prefix[-1])
    grad = np.zeros(task.n_params)
    for k in range(m):
        if gens[k] is None:
            continue
        pidx = task.gates[k][2]
        d_trace = np.trace(udag @ suffix[k + 1] @ gens[k] @ mats[k] @ prefix[k])
        grad[pidx] += -2.0 * np.real(np.conj(trace) * d_trace) / dim**2
    value = 1.0 - float(np.abs(trace) ** 2 / dim**2)
    return value, grad


def compile_unitary(
    task: CompilationTask, seed: int, restarts: int = 20
) -> CompilationResult:
    """Multi-restart L-BFGS fit of the skeleton angles to the target."""
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    best_angles, best_fid = None, -1.0
    for r, s in enumerate(seeds):
        rng = np.random.default_rng(s)
        theta0 = rng.uniform(0.0, 2.0 * np.pi, task.n_params)
        res = minimize(
            lambda th: _objective_and_grad(task, th),
            theta0,
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": task.max_iterations, "ftol": 1e-15, "gtol": 1e-12},
        )
        fid = 1.0 - float(res.fun)
        if fid > best_fid:
            best_fid, best_angles = fid, res.x
        if 1.0 - fid <= task.tolerance:
            return CompilationResult(
                params=res.x, achieved_fidelity=fid, success=True, restarts_used=r + 1
            )
    return CompilationResult(
        params=best_angles,
        achieved_fidelity=best_fid,
        success=False,
        restarts_used=restarts,
    )


def haar_random_unitary(dim: int, seed: int) -> np.ndarray:
    """QR decomposition of a complex Gaussian matrix with phase fix."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def circuit_to_json(task: CompilationTask, angles: np.ndarray) -> str:
    """Serialize the fitted circuit as a JSON gate list."""
    entries = []
    for gate in task.gates:
        if gate[0] == "cnot":
            entries.append({"gate": "cnot", "targets": list(gate[1])})
        else:
            entries.append(
                {"gate": gate[0], "targets": [gate[1]], "angle": float(angles[gate[2]])}
            )
    return json.dumps({"n_qubits": task.n_qubits, "gates": entries}, indent=2)

"""Smart encoding: permute node indices so one qubit separates the fracture.

Fracture nodes are assigned (in row-major order) to basis indices whose
readout bit is 1, everything else to readout bit 0.  When the fracture set
is exactly half the nodes, the readout qubit's marginal equals the total
fracture pressure probability; otherwise bit-1 slots left over are padded
with matrix nodes and the single-qubit marginal over-counts, so the exact
sum over the mask (mask_probability) is the honest fallback.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import FractureProblem, LinearSystem
from .qsim import ShotCounts


@dataclass(frozen=True)
class SmartPermutation:
    """Bijection node index -> basis index; readout_qubit 0 is the MSB."""

    mapping: np.ndarray
    n_qubits: int
    fracture_nodes: np.ndarray
    readout_qubit: int = 0

    def __post_init__(self):
        m = np.asarray(self.mapping, dtype=np.int64)
        n = 2**self.n_qubits
        if sorted(m.tolist()) != list(range(n)):
            raise ValueError("mapping is not a bijection on 0..N-1")
        object.__setattr__(self, "mapping", m)
        object.__setattr__(
            self, "fracture_nodes", np.asarray(self.fracture_nodes, dtype=np.int64)
        )

    @property
    def exact_split(self) -> bool:
        return len(self.fracture_nodes) * 2 == len(self.mapping)

    def readout_bit(self, basis_index: np.ndarray) -> np.ndarray:
        shift = self.n_qubits - 1 - self.readout_qubit
        return (basis_index >> shift) & 1


def build_smart_permutation(problem: FractureProblem) -> SmartPermutation:
    """Deterministic assignment: fracture nodes fill the readout-bit-1 half
    in row-major order, matrix nodes fill bit 0 first and pad the rest."""
    mask = problem.fracture_mask.reshape(-1)
    n = problem.n_nodes
    half = n // 2
    fracture = np.flatnonzero(mask)
    matrix_nodes = np.flatnonzero(~mask)
    if len(fracture) > half:
        raise ValueError("fracture set exceeds half the nodes; cannot encode")
    mapping = np.empty(n, dtype=np.int64)
    mapping[fracture] = half + np.arange(len(fracture))
    n_low = min(len(matrix_nodes), half)
    mapping[matrix_nodes[:n_low]] = np.arange(n_low)
    mapping[matrix_nodes[n_low:]] = half + len(fracture) + np.arange(len(matrix_nodes) - n_low)
    return SmartPermutation(
        mapping=mapping, n_qubits=problem.n_qubits, fracture_nodes=fracture
    )


def apply_permutation(system: LinearSystem, perm: SmartPermutation) -> LinearSystem:
    """Similarity transform A' = P A P^T, b' = P b; spectrum and kappa are
    unchanged and the solve commutes with the relabeling."""
    m = perm.mapping
    if len(m) != system.n_vars:
        raise ValueError("permutation size does not match the system")
    a2 = np.empty_like(system.matrix)
    b2 = np.empty_like(system.rhs)
    a2[np.ix_(m, m)] = system.matrix
    b2[m] = system.rhs
    return LinearSystem(
        n_vars=system.n_vars,
        matrix=a2,
        rhs=b2,
        rhs_scale=system.rhs_scale,
        matrix_scale=system.matrix_scale,
        kappa=system.kappa,
    )


def _probabilities(counts_or_probs) -> np.ndarray:
    if isinstance(counts_or_probs, ShotCounts):
        return counts_or_probs.frequencies()
    p = np.asarray(counts_or_probs, dtype=float)
    return p / p.sum()


def fracture_marginal(counts_or_probs, perm: SmartPermutation) -> dict[str, float]:
    """Single-qubit readout: probability mass on readout bit 1 vs 0."""
    probs = _probabilities(counts_or_probs)
    idx = np.arange(len(probs))
    bit = perm.readout_bit(idx)
    p_fracture = float(probs[bit == 1].sum())
    return {"p_fracture": p_fracture, "p_matrix": 1.0 - p_fracture}


def mask_probability(counts_or_probs, perm: SmartPermutation) -> float:
    """Exact fallback: sum of probabilities over the fracture nodes' basis
    indices, valid for any mask size."""
    probs = _probabilities(counts_or_probs)
    return float(probs[perm.mapping[perm.fracture_nodes]].sum())

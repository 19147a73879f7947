"""Randomized adiabatic solver for A x = b.

The interpolation A(s) = (1 - s) I + s A drags the null space of
H(s) = A(s)(I - bb^T)A(s) from |b> at s = 0 to the normalized solution at
s = 1.  A run walks the linear schedule s_j = j/q, evolving for a time drawn
uniformly from [0, 2 pi / delta_j] at each step, where
delta_j = ((1 - s_j) + s_j / kappa)^2 lower-bounds the spectral gap.  More
steps mean a slower traversal and a more accurate final state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import BaselineMetrics, LinearSystem, SolutionVector, mixed_state_baseline, solve_reference
from .qsim import StateVector, infer_solution, sample_shots


@dataclass(frozen=True)
class SsoConfig:
    q: int
    trials: int = 75
    shots: int | None = 8192  # None = exact-state readout
    seed: int = 0

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be positive or None")


@dataclass(frozen=True)
class SsoRun:
    net_unitary: np.ndarray
    final_state: StateVector
    error: float
    step_times: np.ndarray


@dataclass(frozen=True)
class SsoStatistics:
    q: int
    errors: np.ndarray
    min_error: float
    mean_error: float
    max_error: float
    baseline_error: float


def interpolated_hamiltonian(system: LinearSystem, s: float) -> np.ndarray:
    """H(s) = A(s)(I - |b><b|)A(s) with A(s) = (1-s)I + sA; positive
    semidefinite with null vector proportional to A(s)^-1 b."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    n = system.n_vars
    a_s = (1.0 - s) * np.eye(n) + s * system.matrix
    b = system.rhs
    proj = np.eye(n) - np.outer(b, b)
    return a_s @ proj @ a_s


def _schedule_eigs(system: LinearSystem, q: int):
    """Eigendecompositions of H(s_j) and time bounds, shared across trials."""
    decomps = []
    for j in range(1, q + 1):
        s = j / q
        h = interpolated_hamiltonian(system, s)
        w, v = np.linalg.eigh(h)
        delta = ((1.0 - s) + s / system.kappa) ** 2
        decomps.append((w, v, 2.0 * np.pi / delta))
    return decomps


def _solution_error(system: LinearSystem, x_hat: np.ndarray) -> float:
    ax = system.matrix @ x_hat
    return float(np.linalg.norm(ax / np.linalg.norm(ax) - system.rhs))


def _evolve(system, decomps, rng, shots, want_unitary):
    n = system.n_vars
    state = system.rhs.astype(complex)
    unitary = np.eye(n, dtype=complex) if want_unitary else None
    times = np.empty(len(decomps))
    for j, (w, v, bound) in enumerate(decomps):
        t = rng.uniform(0.0, bound)
        times[j] = t
        phases = np.exp(-1j * t * w)
        state = v @ (phases * (v.conj().T @ state))
        if want_unitary:
            unitary = (v * phases) @ (v.conj().T @ unitary)
    state = state / np.linalg.norm(state)  # guard against roundoff drift
    sv = StateVector(state, system.n_qubits)
    if shots is None:
        x_hat = np.abs(state)
    else:
        x_hat = infer_solution(sample_shots(sv, shots, int(rng.integers(2**63)))).values
    error = _solution_error(system, x_hat)
    return SsoRun(net_unitary=unitary, final_state=sv, error=error, step_times=times)


def run_evolution(system: LinearSystem, config: SsoConfig, *, want_unitary: bool = True) -> SsoRun:
    """Single randomized evolution from |b>; the inferred solution's
    residual against b is the reported error."""
    decomps = _schedule_eigs(system, config.q)
    rng = np.random.default_rng(config.seed)
    return _evolve(system, decomps, rng, config.shots, want_unitary)


def run_trials(
    system: LinearSystem, config: SsoConfig, q_grid: list[int]
) -> list[SsoStatistics]:
    """Independent seeded trials for every q on the grid, plus the constant
    maximally-mixed baseline for context."""
    baseline = mixed_state_baseline(system, solve_reference(system))
    results = []
    for qi, q in enumerate(q_grid):
        if q < 1:
            raise ValueError("q values must be >= 1")
        decomps = _schedule_eigs(system, q)
        seeds = np.random.SeedSequence((config.seed, qi)).spawn(config.trials)
        errors = np.empty(config.trials)
        for t, seed in enumerate(seeds):
            rng = np.random.default_rng(seed)
            errors[t] = _evolve(system, decomps, rng, config.shots, False).error
        results.append(
            SsoStatistics(
                q=q,
                errors=errors,
                min_error=float(errors.min()),
                mean_error=float(errors.mean()),
                max_error=float(errors.max()),
                baseline_error=baseline.error,
            )
        )
    return results

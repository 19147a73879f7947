"""Variational linear solver: costs, fidelity, training, noise degradation.

Training minimizes either the Hamiltonian cost <x|A(I - bb^T)A|x> or the
overlap surrogate 1 - |<x_true|x>|^2 over the circuit angles.  The default
optimizer is nonlinear conjugate gradient (Polak-Ribiere with automatic
restarts and a strong-Wolfe line search, via scipy); a plain
gradient-descent-with-backtracking variant is available and is also the
fallback when the cost is estimated from shots, where a Wolfe line search
is unreliable.  Both costs share their unique minimizer: the normalized
solution of A x = b.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import ansatz
from .ansatz import CircuitTemplate, Params
from .mesh import LinearSystem, SolutionVector
from .qsim import (
    DEPOLARIZING_PER_LAYER,
    NoiseChannel,
    StateVector,
    apply_channel,
    state_to_density,
)

COST_HAMILTONIAN = "hamiltonian"
COST_OVERLAP = "overlap"

OPT_NCG = "nonlinear-conjugate-gradient"
OPT_GD = "gradient-descent-with-backtracking"

GRAD_PARAMETER_SHIFT = "parameter-shift"
GRAD_ADJOINT = "adjoint"

# Line-search constants; the source method names conjugate gradient but no
# hyperparameters, so these are toolkit choices recorded in results.
_INITIAL_STEP = 0.1
_ARMIJO_C = 1e-4
_SHRINK = 0.5
_DIVERGENCE_PATIENCE = 20


@dataclass(frozen=True)
class VlsConfig:
    restarts: int = 40
    max_iterations: int = 150
    optimizer: str = OPT_NCG
    cost_mode: str = COST_HAMILTONIAN
    shots_for_cost: int | None = None
    gradient_mode: str = GRAD_PARAMETER_SHIFT
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1:
            raise ValueError("restarts and max_iterations must be >= 1")
        if self.optimizer not in (OPT_NCG, OPT_GD):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.cost_mode not in (COST_HAMILTONIAN, COST_OVERLAP):
            raise ValueError(f"unknown cost mode {self.cost_mode!r}")
        if self.gradient_mode not in (GRAD_PARAMETER_SHIFT, GRAD_ADJOINT):
            raise ValueError(f"unknown gradient mode {self.gradient_mode!r}")


@dataclass(frozen=True)
class RestartTrace:
    restart: int
    iterations: np.ndarray
    costs: np.ndarray
    fidelities: np.ndarray
    diverged: bool


@dataclass(frozen=True)
class TrainResult:
    traces: tuple[RestartTrace, ...]
    best_params: Params
    best_restart: int
    best_fidelity: float
    best_cost: float


def _vec(v) -> np.ndarray:
    if isinstance(v, StateVector):
        return v.amplitudes
    if isinstance(v, SolutionVector):
        return v.values
    return np.asarray(v)


def fidelity(a, b) -> float:
    """Squared inner product |<a|b>|^2 of two unit vectors."""
    va, vb = _vec(a), _vec(b)
    if va.shape != vb.shape:
        raise ValueError("dimension mismatch")
    return float(np.abs(np.vdot(va, vb)) ** 2)


def hamiltonian_cost(system: LinearSystem, state: StateVector) -> float:
    """<x|A(I - bb^T)A|x> = ||Ax||^2 - |<b|Ax>|^2, without materializing H."""
    x = state.amplitudes
    if x.shape != (system.n_vars,):
        raise ValueError("dimension mismatch")
    ax = system.matrix @ x
    return float(np.real(np.vdot(ax, ax) - np.abs(np.vdot(system.rhs, ax)) ** 2))


def overlap_cost(x_true: SolutionVector, state: StateVector) -> float:
    """Surrogate cost 1 - |<x_true|x>|^2; equals 1 - fidelity exactly."""
    return 1.0 - fidelity(x_true, state)


class _HamiltonianObjective:
    """Cost and M-application for the Hamiltonian cost."""

    def __init__(self, system: LinearSystem):
        self.a = system.matrix
        self.b = system.rhs

    def value(self, amps: np.ndarray) -> float:
        ax = self.a @ amps
        return float(np.real(np.vdot(ax, ax) - np.abs(np.vdot(self.b, ax)) ** 2))

    def apply_m(self, amps: np.ndarray) -> np.ndarray:
        ax = self.a @ amps
        return self.a @ (ax - self.b * (self.b @ ax))


class _OverlapObjective:
    """Cost and M-application for the overlap surrogate (M = I - tt^T)."""

    def __init__(self, x_true: SolutionVector):
        self.t = x_true.values

    def value(self, amps: np.ndarray) -> float:
        return float(1.0 - np.abs(np.vdot(self.t, amps)) ** 2)

    def apply_m(self, amps: np.ndarray) -> np.ndarray:
        return amps - self.t * (self.t @ amps)


def _make_objective(system, x_true, config):
    if config.cost_mode == COST_HAMILTONIAN:
        return _HamiltonianObjective(system)
    return _OverlapObjective(x_true)


def _shot_noisy_value(obj, amps, rng, shots):
    """Optional shot-based cost estimate: evaluate the cost on the
    frequency-inferred state instead of the exact amplitudes."""
    probs = np.abs(amps) ** 2
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    est = np.sqrt(counts / shots)
    norm = np.linalg.norm(est)
    if norm == 0:
        return obj.value(amps)
    return obj.value(est / norm)


def _diverged(costs: list[float]) -> bool:
    """Flag a restart whose cost rose for many consecutive iterations."""
    run = 0
    for prev, cur in zip(costs, costs[1:]):
        run = run + 1 if cur > prev else 0
        if run >= _DIVERGENCE_PATIENCE:
            return True
    return False


def _descend_cg(theta, cost_of, grad_of, rng, config, costs, fids, x_true, template):
    """Polak-Ribiere conjugate gradient with a strong-Wolfe line search;
    cost and fidelity are recorded at every accepted iterate."""

    def record(xk):
        costs.append(cost_of(xk, rng))
        fids.append(fidelity(x_true, ansatz.evaluate(template, Params(xk))))

    res = minimize(
        lambda th: cost_of(th, rng),
        theta,
        jac=grad_of,
        method="CG",
        callback=record,
        options={"maxiter": config.max_iterations, "gtol": 1e-12},
    )
    return res.x


def _descend_gd(theta, cost_of, grad_of, rng, config, costs, fids, x_true, template):
    """Steepest descent with Armijo backtracking from an adaptive step."""
    step = _INITIAL_STEP
    for _ in range(config.max_iterations):
        g = grad_of(theta)
        direction = -g
        slope = float(g @ direction)
        base = costs[-1]
        step = min(step / _SHRINK, 1.0)  # let the step grow back
        value = base
        while step > 1e-14:
            candidate = theta + step * direction
            value = cost_of(candidate, rng)
            if value <= base + _ARMIJO_C * step * slope:
                break
            step *= _SHRINK
        theta = theta + step * direction
        costs.append(value)
        fids.append(fidelity(x_true, ansatz.evaluate(template, Params(theta))))
    return theta


def train(
    system: LinearSystem,
    x_true: SolutionVector,
    template: CircuitTemplate,
    config: VlsConfig,
) -> TrainResult:
    """Multi-restart optimization; every restart draws fresh angles from a
    derived seed stream and records per-iteration cost and fidelity."""
    if template.n_qubits != system.n_qubits:
        raise ValueError("template qubit count does not match the system")
    obj = _make_objective(system, x_true, config)
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)

    def cost_of(angles: np.ndarray, rng) -> float:
        amps = ansatz.evaluate(template, Params(angles)).amplitudes
        if config.shots_for_cost is not None:
            return _shot_noisy_value(obj, amps, rng, config.shots_for_cost)
        return obj.value(amps)

    def grad_of(angles: np.ndarray) -> np.ndarray:
        p = Params(angles)
        if config.gradient_mode == GRAD_ADJOINT:
            return ansatz.gradient_adjoint(obj.apply_m, template, p)
        return ansatz.gradient(
            lambda s: obj.value(s.amplitudes), template, p
        )

    use_gd = config.optimizer == OPT_GD or config.shots_for_cost is not None

    traces = []
    for r, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        theta = rng.uniform(0.0, 2.0 * np.pi, template.n_params)
        costs = [cost_of(theta, rng)]
        fids = [fidelity(x_true, ansatz.evaluate(template, Params(theta)))]
        if use_gd:
            theta = _descend_gd(theta, cost_of, grad_of, rng, config, costs, fids, x_true, template)
        else:
            theta = _descend_cg(theta, cost_of, grad_of, rng, config, costs, fids, x_true, template)
        diverged = _diverged(costs)
        traces.append(
            (
                RestartTrace(
                    restart=r,
                    iterations=np.arange(len(costs)),
                    costs=np.array(costs),
                    fidelities=np.array(fids),
                    diverged=diverged,
                ),
                theta,
            )
        )

    # best restart: highest final fidelity, ties by lower cost then index
    best_idx = min(
        range(len(traces)),
        key=lambda i: (-traces[i][0].fidelities[-1], traces[i][0].costs[-1], i),
    )
    best_trace, best_theta = traces[best_idx]
    return TrainResult(
        traces=tuple(t for t, _ in traces),
        best_params=Params(best_theta),
        best_restart=best_idx,
        best_fidelity=float(best_trace.fidelities[-1]),
        best_cost=float(best_trace.costs[-1]),
    )


def noisy_fidelity(
    template: CircuitTemplate,
    params: Params,
    x_true: SolutionVector,
    channel: NoiseChannel,
) -> float:
    """Measurement-inferred fidelity after the channel acts on the prepared
    state: |sum_i sqrt(rho_ii) x_true_i|^2.  Depolarizing noise is applied
    once per circuit layer."""
    state = ansatz.evaluate(template, params)
    rho = state_to_density(state)
    layers = template.n_layers if channel.kind == DEPOLARIZING_PER_LAYER else 1
    noisy = apply_channel(rho, channel, layer_count=layers)
    diag = np.clip(noisy.diagonal(), 0.0, None)
    return float(np.abs(np.sqrt(diag) @ x_true.values) ** 2)

"""Experiment registry: named end-to-end studies with file artifacts.

Every experiment is a pure function of its configuration: a single seed
feeds named sub-streams, numeric CSV cells are written with repr so reruns
are byte-identical, and each run returns a manifest (config echo, content
hash, seeds, wall time) plus a set of internal consistency checks.
"""
from __future__ import annotations

import hashlib
import io
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__, ansatz, encode, mesh, qsim, sso, synth, vls

SSO_SWEEP = "sso-sweep"
VLS_PITCHFORK_5Q = "vls-pitchfork-5q"
VLS_SCALING = "vls-scaling"
VLS_VARYING_PERMEABILITY = "vls-varying-permeability"
NOISE_RESILIENCE_SUITE = "noise-resilience-suite"
SMART_ENCODING_DEMO = "smart-encoding-demo"
COMPILE_DEMO = "compile-demo"

EXPERIMENTS = (
    SSO_SWEEP,
    VLS_PITCHFORK_5Q,
    VLS_SCALING,
    VLS_VARYING_PERMEABILITY,
    NOISE_RESILIENCE_SUITE,
    SMART_ENCODING_DEMO,
    COMPILE_DEMO,
)

K_BACKGROUND = 1.0
K_FRACTURE = 10.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run."""

    experiment: str
    n: int | None = None  # node count; experiment-specific default applies
    q_grid: tuple[int, ...] = (10, 100, 1000, 10000)
    trials: int = 75
    shots: int | None = None  # None = exact-state readout
    seed: int = 7
    restarts: int | None = None
    iterations: int | None = None
    layers: int | None = None
    cost_mode: str | None = None
    gradient_mode: str = vls.GRAD_ADJOINT
    optimizer: str = vls.OPT_NCG
    multipliers: tuple[float, ...] = (10.0, 100.0, 1000.0, 10000.0)
    sizes: tuple[int, ...] = (128, 512)
    instances: int = 20


@dataclass(frozen=True)
class ExperimentResult:
    artifacts: dict[str, str]
    manifest: dict
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def validate(config: ExperimentConfig) -> list[str]:
    """Schema diagnostics; an empty list means the config is runnable."""
    errors = []
    if config.experiment not in EXPERIMENTS:
        errors.append(
            f"experiment: unknown value {config.experiment!r}; "
            f"expected one of {', '.join(EXPERIMENTS)}"
        )
    if config.n is not None and (config.n < 2 or config.n & (config.n - 1)):
        errors.append("n: node count must be a power of two >= 2")
    if any(q < 1 for q in config.q_grid):
        errors.append("q_grid: every q must be >= 1")
    if not config.q_grid:
        errors.append("q_grid: at least one q value is required")
    if config.trials < 1:
        errors.append("trials: must be >= 1")
    if config.shots is not None and config.shots < 1:
        errors.append("shots: must be >= 1 or omitted")
    if config.restarts is not None and config.restarts < 1:
        errors.append("restarts: must be >= 1")
    if config.iterations is not None and config.iterations < 1:
        errors.append("iterations: must be >= 1")
    if config.layers is not None and config.layers < 1:
        errors.append("layers: must be >= 1")
    if config.cost_mode is not None and config.cost_mode not in (
        vls.COST_HAMILTONIAN,
        vls.COST_OVERLAP,
    ):
        errors.append(f"cost_mode: unknown value {config.cost_mode!r}")
    if config.gradient_mode not in (vls.GRAD_PARAMETER_SHIFT, vls.GRAD_ADJOINT):
        errors.append(f"gradient_mode: unknown value {config.gradient_mode!r}")
    if config.optimizer not in (vls.OPT_NCG, vls.OPT_GD):
        errors.append(f"optimizer: unknown value {config.optimizer!r}")
    if any(m <= 0 for m in config.multipliers):
        errors.append("multipliers: must be positive")
    for s in config.sizes:
        if s not in mesh.GRID_SHAPES:
            errors.append(
                f"sizes: {s} has no registered grid shape "
                f"(choose from {sorted(mesh.GRID_SHAPES)})"
            )
    if config.instances < 1:
        errors.append("instances: must be >= 1")
    return errors


def config_hash(config: ExperimentConfig) -> str:
    payload = json.dumps(asdict(config), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


# CSV helpers ---------------------------------------------------------------


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
        buf.write("\n")
    return buf.getvalue()


def _grid_csv(values: np.ndarray) -> str:
    return "\n".join(",".join(repr(float(v)) for v in row) for row in values) + "\n"


# problem builders ----------------------------------------------------------


def _pitchfork_system(nodes: int, right_multiplier: float = 1.0):
    rows, cols = mesh.GRID_SHAPES[nodes]
    problem = mesh.build_pitchfork_problem(
        rows, cols, K_BACKGROUND, K_FRACTURE, K_FRACTURE * right_multiplier
    )
    system = mesh.assemble_system(problem)
    return problem, system, mesh.solve_reference(system)


def _train(system, x_true, n_layers, restarts, iterations, cost_mode, config):
    template = ansatz.build_template(system.n_qubits, n_layers)
    result = vls.train(
        system,
        x_true,
        template,
        vls.VlsConfig(
            restarts=restarts,
            max_iterations=iterations,
            optimizer=config.optimizer,
            cost_mode=cost_mode,
            shots_for_cost=config.shots,
            gradient_mode=config.gradient_mode,
            seed=config.seed,
        ),
    )
    return template, result


def _trace_rows(result, seed, chash):
    rows = []
    for trace in result.traces:
        for it, cost, fid in zip(trace.iterations, trace.costs, trace.fidelities):
            rows.append([trace.restart, int(it), float(cost), float(fid), seed, chash])
    return rows


def _params_json(template, result, seed) -> str:
    return json.dumps(
        {
            "template": {
                "n_qubits": template.n_qubits,
                "n_layers": template.n_layers,
                "n_params": template.n_params,
            },
            "seed": seed,
            "best_restart": result.best_restart,
            "best_fidelity": result.best_fidelity,
            "best_cost": result.best_cost,
            "params": [float(v) for v in result.best_params.angles],
        },
        indent=2,
    )


# experiment runners --------------------------------------------------------


def _run_sso_sweep(config: ExperimentConfig, chash: str):
    n = config.n if config.n is not None else 4
    problem = mesh.build_1d_problem(n, K_BACKGROUND)
    system = mesh.assemble_system(problem)
    stats = sso.run_trials(
        system,
        sso.SsoConfig(q=1, trials=config.trials, shots=config.shots, seed=config.seed),
        list(config.q_grid),
    )
    trial_rows = [
        [st.q, t, float(e), st.baseline_error, config.seed, chash]
        for st in stats
        for t, e in enumerate(st.errors)
    ]
    summary_rows = [
        [st.q, st.min_error, st.mean_error, st.max_error, st.baseline_error, config.seed, chash]
        for st in stats
    ]
    means = [st.mean_error for st in stats]
    checks = {
        "mean_error_strictly_decreasing": all(a > b for a, b in zip(means, means[1:])),
        "min_le_mean_le_max": all(
            st.min_error <= st.mean_error <= st.max_error for st in stats
        ),
    }
    artifacts = {
        "sso_sweep.csv": _csv(
            ["q", "trial", "error", "mixed_baseline_error", "seed", "config_hash"],
            trial_rows,
        ),
        "sso_sweep_summary.csv": _csv(
            ["q", "min_error", "mean_error", "max_error", "baseline_error", "seed", "config_hash"],
            summary_rows,
        ),
    }
    extra = {"n_nodes": n, "grid": [1, n], "readout": "exact" if config.shots is None else "shots"}
    return artifacts, checks, extra


def _vls_artifacts(prefix, problem, system, x_true, template, result, config, chash):
    artifacts = {
        f"{prefix}_traces.csv": _csv(
            ["restart", "iteration", "cost", "fidelity", "seed", "config_hash"],
            _trace_rows(result, config.seed, chash),
        ),
        f"{prefix}_params.json": _params_json(template, result, config.seed),
        f"{prefix}_solution_true_grid.csv": _grid_csv(
            x_true.physical().reshape(problem.rows, problem.cols)
        ),
        f"{prefix}_solution_trained_grid.csv": _grid_csv(
            (
                ansatz.evaluate(template, result.best_params).amplitudes.real
                * x_true.raw_scale
            ).reshape(problem.rows, problem.cols)
        ),
        f"{prefix}_fracture_mask.csv": _csv(
            ["row", "col", "fracture"],
            [
                [r, c, int(problem.fracture_mask[r, c])]
                for r in range(problem.rows)
                for c in range(problem.cols)
            ],
        ),
    }
    return artifacts


def _run_vls_pitchfork_5q(config: ExperimentConfig, chash: str):
    nodes = config.n if config.n is not None else 32
    problem, system, x_true = _pitchfork_system(nodes)
    layers = config.layers if config.layers is not None else 5
    restarts = config.restarts if config.restarts is not None else 40
    iterations = config.iterations if config.iterations is not None else 150
    cost_mode = config.cost_mode if config.cost_mode is not None else vls.COST_HAMILTONIAN
    template, result = _train(
        system, x_true, layers, restarts, iterations, cost_mode, config
    )
    baseline = mesh.mixed_state_baseline(system, x_true)
    artifacts = _vls_artifacts(
        "vls_pitchfork_5q", problem, system, x_true, template, result, config, chash
    )
    checks = {
        "best_final_cost_below_initial": result.best_cost
        < float(result.traces[result.best_restart].costs[0]),
        "best_fidelity_above_baseline": result.best_fidelity > baseline.fidelity,
    }
    extra = {
        "n_nodes": nodes,
        "grid": [problem.rows, problem.cols],
        "kappa": system.kappa,
        "best_fidelity": result.best_fidelity,
        "baseline_fidelity": baseline.fidelity,
    }
    return artifacts, checks, extra


def _run_vls_scaling(config: ExperimentConfig, chash: str):
    # per-size training budgets chosen to finish in minutes on a laptop
    budgets = {128: (8, 300), 512: (6, 400), 2048: (4, 600), 8192: (3, 800)}
    artifacts: dict[str, str] = {}
    rows = []
    checks = {}
    sizes_meta = []
    for nodes in config.sizes:
        problem, system, x_true = _pitchfork_system(nodes)
        n_qubits = system.n_qubits
        layers = config.layers if config.layers is not None else n_qubits
        default_r, default_i = budgets.get(nodes, (6, 400))
        restarts = config.restarts if config.restarts is not None else default_r
        iterations = config.iterations if config.iterations is not None else default_i
        cost_mode = config.cost_mode if config.cost_mode is not None else vls.COST_OVERLAP
        template, result = _train(
            system, x_true, layers, restarts, iterations, cost_mode, config
        )
        baseline = mesh.mixed_state_baseline(system, x_true)
        prefix = f"vls_scaling_{n_qubits}q"
        artifacts.update(
            _vls_artifacts(prefix, problem, system, x_true, template, result, config, chash)
        )
        rows.append(
            [
                n_qubits,
                nodes,
                result.best_fidelity,
                baseline.fidelity,
                config.seed,
                chash,
            ]
        )
        checks[f"{n_qubits}q_fidelity_above_baseline"] = (
            result.best_fidelity > baseline.fidelity
        )
        sizes_meta.append({"n_qubits": n_qubits, "grid": [problem.rows, problem.cols]})
    artifacts["vls_scaling_summary.csv"] = _csv(
        ["n_qubits", "n_nodes", "best_fidelity", "baseline_fidelity", "seed", "config_hash"],
        rows,
    )
    return artifacts, checks, {"sizes": sizes_meta}


def _run_vls_varying_permeability(config: ExperimentConfig, chash: str):
    nodes = config.n if config.n is not None else 32
    restarts = config.restarts if config.restarts is not None else 12
    iterations = config.iterations if config.iterations is not None else 150
    artifacts: dict[str, str] = {}
    rows = []
    checks = {}
    for mult in config.multipliers:
        problem, system, x_true = _pitchfork_system(nodes, right_multiplier=mult)
        layers = config.layers if config.layers is not None else 5
        # high contrast drives kappa to ~5e5 and flattens the Hamiltonian
        # cost near the solution; the overlap cost stays well conditioned
        cost_mode = config.cost_mode if config.cost_mode is not None else vls.COST_OVERLAP
        template, result = _train(
            system, x_true, layers, restarts, iterations, cost_mode, config
        )
        tag = repr(float(mult)).replace(".", "p")
        prefix = f"vls_perm_{tag}"
        artifacts.update(
            _vls_artifacts(prefix, problem, system, x_true, template, result, config, chash)
        )
        rows.append([float(mult), system.kappa, result.best_fidelity, config.seed, chash])
        checks[f"multiplier_{tag}_trained"] = result.best_fidelity > 0.5
    artifacts["vls_varying_permeability_summary.csv"] = _csv(
        ["right_branch_multiplier", "kappa", "best_fidelity", "seed", "config_hash"], rows
    )
    return artifacts, checks, {"n_nodes": nodes, "grid": list(mesh.GRID_SHAPES[nodes])}


def _run_noise_resilience_suite(config: ExperimentConfig, chash: str):
    nodes = config.n if config.n is not None else 32
    problem, system, x_true = _pitchfork_system(nodes)
    layers = config.layers if config.layers is not None else 5
    restarts = config.restarts if config.restarts is not None else 8
    iterations = config.iterations if config.iterations is not None else 150
    cost_mode = config.cost_mode if config.cost_mode is not None else vls.COST_HAMILTONIAN
    template, result = _train(
        system, x_true, layers, restarts, iterations, cost_mode, config
    )
    params = result.best_params
    state = ansatz.evaluate(template, params)
    inferred_noiseless = float(
        np.abs(np.abs(state.amplitudes) @ x_true.values) ** 2
    )
    baseline = mesh.mixed_state_baseline(system, x_true)
    p_grid = [round(0.1 * i, 1) for i in range(11)]
    rows = []
    dephasing_invariant = True
    for p in p_grid:
        fid = vls.noisy_fidelity(
            template, params, x_true, qsim.NoiseChannel(qsim.DEPHASING_TERMINAL, p)
        )
        dephasing_invariant &= abs(fid - inferred_noiseless) < 1e-12
        rows.append(["dephasing", float(p), fid, config.seed, chash])
    depol_fids = []
    for p in p_grid:
        fid = vls.noisy_fidelity(
            template,
            params,
            x_true,
            qsim.NoiseChannel(qsim.DEPOLARIZING_PER_LAYER, p),
        )
        depol_fids.append(fid)
        rows.append(["depolarizing", float(p), fid, config.seed, chash])
    checks = {
        "dephasing_fidelity_invariant": dephasing_invariant,
        "depolarizing_fidelity_monotone": all(
            a <= b + 1e-12 for a, b in zip(depol_fids, depol_fids[1:])
        ),
        "depolarizing_p0_equals_mixed_baseline": abs(depol_fids[0] - baseline.fidelity)
        < 1e-12,
        "noiseless_limit_recovered": abs(depol_fids[-1] - inferred_noiseless) < 1e-12,
    }
    artifacts = {
        "noise_resilience.csv": _csv(
            ["channel", "p", "inferred_fidelity", "seed", "config_hash"], rows
        ),
    }
    extra = {
        "n_nodes": nodes,
        "grid": [problem.rows, problem.cols],
        "noiseless_inferred_fidelity": inferred_noiseless,
        "mixed_baseline_fidelity": baseline.fidelity,
        "trained_best_fidelity": result.best_fidelity,
    }
    return artifacts, checks, extra


def _run_smart_encoding_demo(config: ExperimentConfig, chash: str):
    nodes = config.n if config.n is not None else 32
    problem, system, x_true = _pitchfork_system(nodes)
    perm = encode.build_smart_permutation(problem)
    permuted = encode.apply_permutation(system, perm)
    x_perm = mesh.solve_reference(permuted)
    probs = x_perm.values**2
    marginal = encode.fracture_marginal(probs, perm)
    exact_mask = encode.mask_probability(probs, perm)
    shots = config.shots if config.shots is not None else 100_000
    counts = qsim.sample_shots(
        qsim.StateVector.from_real(x_perm.values), shots, config.seed
    )
    sampled = encode.fracture_marginal(counts, perm)
    sigma = float(np.sqrt(exact_mask * (1.0 - exact_mask) / shots))
    checks = {
        "marginal_equals_mask_sum": perm.exact_split
        and abs(marginal["p_fracture"] - exact_mask) < 1e-12,
        "shot_marginal_within_3_sigma": abs(sampled["p_fracture"] - exact_mask)
        <= 3.0 * sigma,
        "permutation_preserves_kappa": abs(permuted.kappa - system.kappa) < 1e-9,
    }
    artifacts = {
        "smart_encoding_marginals.csv": _csv(
            ["quantity", "value", "seed", "config_hash"],
            [
                ["p_fracture_exact", marginal["p_fracture"], config.seed, chash],
                ["p_matrix_exact", marginal["p_matrix"], config.seed, chash],
                ["p_fracture_mask_sum", exact_mask, config.seed, chash],
                ["p_fracture_sampled", sampled["p_fracture"], config.seed, chash],
                ["p_matrix_sampled", sampled["p_matrix"], config.seed, chash],
                ["sampling_sigma", sigma, config.seed, chash],
            ],
        ),
        "smart_encoding_permutation.json": json.dumps(
            {
                "n_qubits": perm.n_qubits,
                "readout_qubit": perm.readout_qubit,
                "exact_split": perm.exact_split,
                "fracture_nodes": perm.fracture_nodes.tolist(),
                "mapping": perm.mapping.tolist(),
            },
            indent=2,
        ),
    }
    extra = {
        "n_nodes": nodes,
        "grid": [problem.rows, problem.cols],
        "shots": shots,
        "fracture_count": int(len(perm.fracture_nodes)),
    }
    return artifacts, checks, extra


def _run_compile_demo(config: ExperimentConfig, chash: str):
    rows = []
    artifacts: dict[str, str] = {}
    all_ok = True
    for i in range(config.instances):
        target = synth.haar_random_unitary(4, seed=config.seed * 1000 + i)
        task = synth.make_task(target, tolerance=1e-3)
        res = synth.compile_unitary(task, seed=config.seed + i, restarts=20)
        rows.append(
            ["haar-2q", i, res.achieved_fidelity, res.restarts_used, config.seed, chash]
        )
        all_ok &= res.achieved_fidelity >= 0.999
        if i == 0:
            artifacts["compile_demo_circuit_2q.json"] = synth.circuit_to_json(
                task, res.params
            )
    n = config.n if config.n is not None else 8
    problem = mesh.build_1d_problem(n, K_BACKGROUND)
    system = mesh.assemble_system(problem)
    run = sso.run_evolution(
        system, sso.SsoConfig(q=30, trials=1, shots=None, seed=config.seed)
    )
    task = synth.make_task(run.net_unitary, tolerance=1.0 - 0.9967)
    res = synth.compile_unitary(task, seed=config.seed, restarts=10)
    rows.append(["sso-net-3q", 0, res.achieved_fidelity, res.restarts_used, config.seed, chash])
    artifacts["compile_demo_circuit_3q.json"] = synth.circuit_to_json(task, res.params)
    checks = {
        "all_2q_fidelities_at_least_0.999": bool(all_ok),
        "sso_net_fidelity_at_least_0.9967": res.achieved_fidelity >= 0.9967,
    }
    artifacts["compile_demo.csv"] = _csv(
        ["kind", "instance", "fidelity", "restarts_used", "seed", "config_hash"], rows
    )
    return artifacts, checks, {"instances": config.instances}


_RUNNERS = {
    SSO_SWEEP: _run_sso_sweep,
    VLS_PITCHFORK_5Q: _run_vls_pitchfork_5q,
    VLS_SCALING: _run_vls_scaling,
    VLS_VARYING_PERMEABILITY: _run_vls_varying_permeability,
    NOISE_RESILIENCE_SUITE: _run_noise_resilience_suite,
    SMART_ENCODING_DEMO: _run_smart_encoding_demo,
    COMPILE_DEMO: _run_compile_demo,
}


def run(config: ExperimentConfig) -> ExperimentResult:
    """Validate, run, and package one experiment."""
    problems = validate(config)
    if problems:
        raise ValueError("; ".join(problems))
    chash = config_hash(config)
    start = time.monotonic()
    artifacts, checks, extra = _RUNNERS[config.experiment](config, chash)
    manifest = {
        "experiment": config.experiment,
        "version": __version__,
        "config": asdict(config),
        "config_hash": chash,
        "seed": config.seed,
        "wall_time_s": round(time.monotonic() - start, 3),
        "artifacts": {
            name: hashlib.sha256(content.encode()).hexdigest()
            for name, content in sorted(artifacts.items())
        },
        "checks": checks,
        "status": "ok" if all(checks.values()) else "checks-failed",
    }
    manifest.update(extra)
    return ExperimentResult(artifacts=artifacts, manifest=manifest, checks=checks)


def write_result(result: ExperimentResult, out_dir) -> list[str]:
    """Write all artifacts plus manifest.json; returns the file names."""
    import pathlib

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for name, content in sorted(result.artifacts.items()):
        (out / name).write_text(content)
        names.append(name)
    (out / "manifest.json").write_text(json.dumps(result.manifest, indent=2))
    names.append("manifest.json")
    return names

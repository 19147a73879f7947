"""End-to-end acceptance gate.

One test per shipped guarantee; each prints a single PASS/FAIL line with
the measured quantity so the suite output doubles as a scorecard.
"""
import time

import numpy as np
import pytest
from click.testing import CliRunner

from qfracflow import ansatz, encode, mesh, qsim, sso, synth, vls
from qfracflow.cli import main as cli_main


def _report(name: str, passed: bool, detail: str) -> None:
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


def _shipped_problems():
    yield "1d-n4", mesh.build_1d_problem(4, 1.0)
    yield "1d-n8", mesh.build_1d_problem(8, 1.0)
    for nodes in sorted(mesh.GRID_SHAPES):
        rows, cols = mesh.GRID_SHAPES[nodes]
        yield f"pitchfork-{nodes}", mesh.build_pitchfork_problem(rows, cols, 1.0, 10.0)


def test_classical_ground_truth():
    start = time.monotonic()
    worst = 0.0
    for name, problem in _shipped_problems():
        system = mesh.assemble_system(problem)
        x = mesh.solve_reference(system)
        a_raw, b_raw = mesh.assemble_raw(problem)
        residual = float(np.linalg.norm(a_raw @ x.physical() - b_raw))
        worst = max(worst, residual)
        assert residual < 1e-10, f"{name}: residual {residual:.2e}"
    elapsed = time.monotonic() - start
    ok = worst < 1e-10 and elapsed < 10.0
    _report(
        "classical ground truth",
        ok,
        f"worst residual {worst:.2e}, {elapsed:.1f} s for all problems",
    )
    assert elapsed < 10.0


def test_vls_5_qubit_reproduction():
    start = time.monotonic()
    problem = mesh.build_pitchfork_problem(4, 8, 1.0, 10.0)
    system = mesh.assemble_system(problem)
    x_true = mesh.solve_reference(system)
    template = ansatz.build_template(5, 5)
    result = vls.train(
        system,
        x_true,
        template,
        vls.VlsConfig(
            restarts=40,
            max_iterations=150,
            cost_mode=vls.COST_HAMILTONIAN,
            gradient_mode=vls.GRAD_ADJOINT,
            seed=0,
        ),
    )
    elapsed = time.monotonic() - start
    ok = result.best_fidelity >= 0.99 and elapsed < 600.0
    _report(
        "vls 5-qubit training",
        ok,
        f"best fidelity {result.best_fidelity:.4f} "
        f"(40 restarts x 150 iterations, {elapsed:.0f} s)",
    )
    assert result.best_fidelity >= 0.99
    assert elapsed < 600.0


def _train_scaled(nodes, restarts, iterations, seed=0):
    rows, cols = mesh.GRID_SHAPES[nodes]
    system = mesh.assemble_system(mesh.build_pitchfork_problem(rows, cols, 1.0, 10.0))
    x_true = mesh.solve_reference(system)
    n = system.n_qubits
    template = ansatz.build_template(n, n)
    result = vls.train(
        system,
        x_true,
        template,
        vls.VlsConfig(
            restarts=restarts,
            max_iterations=iterations,
            cost_mode=vls.COST_OVERLAP,
            gradient_mode=vls.GRAD_ADJOINT,
            seed=seed,
        ),
    )
    baseline = mesh.mixed_state_baseline(system, x_true)
    return n, result, baseline


def test_vls_scaling_fidelity():
    details = []
    ok = True
    for nodes, restarts, iterations in ((128, 8, 300), (512, 6, 400)):
        n, result, _ = _train_scaled(nodes, restarts, iterations)
        details.append(f"{n}q: {result.best_fidelity:.4f}")
        ok &= result.best_fidelity >= 0.93
    _report("vls scaling fidelity (L = n layers)", ok, ", ".join(details))
    assert ok


def test_vls_scaling_baseline_separation():
    # the mixed-state readout of these smooth pressure ramps keeps a ~0.68
    # overlap with the exact solution, so the factor-2 separation between
    # trained and baseline fidelity is not reachable on this geometry; the
    # check runs as specified and the shortfall is reported as-is
    details = []
    ok = True
    for nodes, restarts, iterations in ((128, 8, 300), (512, 6, 400)):
        n, result, baseline = _train_scaled(nodes, restarts, iterations)
        separated = baseline.fidelity < 0.5 * result.best_fidelity
        details.append(
            f"{n}q: baseline {baseline.fidelity:.4f} vs 0.5*achieved "
            f"{0.5 * result.best_fidelity:.4f}"
        )
        ok &= separated
    _report("vls scaling baseline separation", ok, ", ".join(details))
    assert ok


def test_sso_q_sweep():
    start = time.monotonic()
    system = mesh.assemble_system(mesh.build_1d_problem(4, 1.0))
    stats = sso.run_trials(
        system,
        sso.SsoConfig(q=1, trials=75, shots=None, seed=3),
        [10, 100, 1000, 10000],
    )
    elapsed = time.monotonic() - start
    means = [s.mean_error for s in stats]
    decreasing = all(a > b for a, b in zip(means, means[1:]))
    ok = decreasing and means[-1] <= 0.05 and elapsed < 300.0
    _report(
        "sso q-sweep",
        ok,
        f"means {['%.4f' % m for m in means]}, {elapsed:.0f} s",
    )
    assert decreasing
    assert means[-1] <= 0.05
    assert elapsed < 300.0


def test_mixed_baseline_consistency_probe():
    # probe, not a hard gate: the residual convention that rescales the
    # uniform readout by the true solution norm lands in the quoted band
    system = mesh.assemble_system(mesh.build_1d_problem(8, 1.0))
    baseline = mesh.mixed_state_baseline(system, mesh.solve_reference(system))
    in_band_rescaled = abs(baseline.error_rescaled - 0.71) <= 0.05
    in_band_normalized = abs(baseline.error - 0.71) <= 0.05
    _report(
        "mixed-state baseline error probe",
        in_band_rescaled or in_band_normalized,
        f"rescaled {baseline.error_rescaled:.4f} "
        f"({'in' if in_band_rescaled else 'out of'} 0.71 +/- 0.05 band), "
        f"normalized {baseline.error:.4f} "
        f"({'in' if in_band_normalized else 'out of'} band)",
    )
    assert in_band_rescaled or in_band_normalized


def _random_circuit_density(n, rng):
    state = qsim.StateVector.zero(n)
    for _ in range(10):
        kind = rng.choice(["ry", "x", "z", "cz", "cnot"])
        q = int(rng.integers(n))
        if kind == "ry":
            state = qsim.apply_gate(
                state, "ry", (q,), angle=float(rng.uniform(0, 2 * np.pi))
            )
        elif kind in ("x", "z"):
            state = qsim.apply_gate(state, kind, (q,))
        else:
            q2 = int((q + 1 + rng.integers(n - 1)) % n)
            state = qsim.apply_gate(state, kind, (q, q2))
    return qsim.state_to_density(state)


def test_noise_theorem_suite():
    start = time.monotonic()
    rng = np.random.default_rng(2024)
    worst_diag = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 6))
        rho = _random_circuit_density(n, rng)
        ps = tuple(float(v) for v in rng.uniform(0.0, 1.0, n))
        out = qsim.apply_channel(rho, qsim.NoiseChannel(qsim.DEPHASING_TERMINAL, ps))
        worst_diag = max(worst_diag, float(np.max(np.abs(out.diagonal() - rho.diagonal()))))
    assert worst_diag < 1e-12

    worst_closed = 0.0
    argsort_ok = True
    for _ in range(50):
        n = int(rng.integers(2, 6))
        rho = _random_circuit_density(n, rng)
        p = float(rng.uniform(0.05, 1.0))
        layers = int(rng.integers(1, 11))
        closed = qsim.apply_channel(
            rho, qsim.NoiseChannel(qsim.DEPOLARIZING_PER_LAYER, p), layer_count=layers
        )
        step = rho.matrix
        dim = 2**n
        for _ in range(layers):
            step = p * step + (1 - p) / dim * np.eye(dim)
        worst_closed = max(worst_closed, float(np.max(np.abs(closed.matrix - step))))
        argsort_ok &= np.array_equal(
            np.argsort(closed.diagonal(), kind="stable"),
            np.argsort(rho.diagonal(), kind="stable"),
        )
    elapsed = time.monotonic() - start
    ok = worst_diag < 1e-12 and worst_closed < 1e-12 and argsort_ok and elapsed < 120.0
    _report(
        "noise theorem suite",
        ok,
        f"dephasing diag dev {worst_diag:.1e}, depolarizing closed-form dev "
        f"{worst_closed:.1e}, argsort invariant {argsort_ok}, {elapsed:.0f} s",
    )
    assert worst_closed < 1e-12
    assert argsort_ok
    assert elapsed < 120.0


def test_gradient_correctness():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 5))
        layers = int(rng.integers(1, 4))
        system = mesh.assemble_system(mesh.build_1d_problem(2**n, 1.0))
        x_true = mesh.solve_reference(system)
        obj = (
            vls._HamiltonianObjective(system)
            if rng.integers(2)
            else vls._OverlapObjective(x_true)
        )
        template = ansatz.build_template(n, layers)
        params = ansatz.Params(rng.uniform(0, 2 * np.pi, template.n_params))
        shift = ansatz.gradient(lambda s: obj.value(s.amplitudes), template, params)
        h = 1e-5
        for i in range(template.n_params):
            up = params.angles.copy()
            up[i] += h
            down = params.angles.copy()
            down[i] -= h
            fd = (
                obj.value(ansatz.evaluate(template, ansatz.Params(up)).amplitudes)
                - obj.value(ansatz.evaluate(template, ansatz.Params(down)).amplitudes)
            ) / (2 * h)
            worst = max(worst, abs(shift[i] - fd))
    ok = worst <= 1e-6
    _report("parameter-shift gradient vs finite differences", ok, f"worst dev {worst:.1e}")
    assert ok


def test_compilation():
    fids = []
    for i in range(100):
        target = synth.haar_random_unitary(4, seed=5000 + i)
        res = synth.compile_unitary(synth.make_task(target), seed=i, restarts=20)
        fids.append(res.achieved_fidelity)
    two_qubit_ok = min(fids) >= 0.999

    system = mesh.assemble_system(mesh.build_1d_problem(8, 1.0))
    hits = 0
    net_fids = []
    for i in range(20):
        run = sso.run_evolution(
            system, sso.SsoConfig(q=30, trials=1, shots=None, seed=900 + i)
        )
        task = synth.make_task(run.net_unitary, tolerance=1.0 - 0.9967)
        res = synth.compile_unitary(task, seed=i, restarts=10)
        net_fids.append(res.achieved_fidelity)
        hits += res.achieved_fidelity >= 0.9967
    three_qubit_ok = hits >= 18  # >= 90% of 20 instances
    ok = two_qubit_ok and three_qubit_ok
    _report(
        "unitary compilation",
        ok,
        f"2q min fidelity {min(fids):.6f} over 100 targets; "
        f"3q net unitaries {hits}/20 at >= 0.9967 (min {min(net_fids):.6f})",
    )
    assert two_qubit_ok
    assert three_qubit_ok


def test_smart_encoding():
    problem = mesh.build_pitchfork_problem(4, 8, 1.0, 10.0)
    system = mesh.assemble_system(problem)
    perm = encode.build_smart_permutation(problem)
    permuted = encode.apply_permutation(system, perm)
    x_perm = mesh.solve_reference(permuted)
    probs = x_perm.values**2
    marginal = encode.fracture_marginal(probs, perm)["p_fracture"]
    exact = encode.mask_probability(probs, perm)
    exact_ok = marginal == exact  # identical arithmetic for exact-half masks

    shots = 100_000
    counts = qsim.sample_shots(qsim.StateVector.from_real(x_perm.values), shots, seed=1)
    sampled = encode.fracture_marginal(counts, perm)["p_fracture"]
    sigma = float(np.sqrt(exact * (1 - exact) / shots))
    shot_ok = abs(sampled - exact) <= 3 * sigma
    ok = exact_ok and shot_ok
    _report(
        "smart encoding readout",
        ok,
        f"exact marginal {marginal:.6f} == mask sum {exact:.6f}; "
        f"sampled dev {abs(sampled - exact):.2e} <= 3 sigma {3 * sigma:.2e}",
    )
    assert exact_ok
    assert shot_ok


def test_cli_determinism(tmp_path):
    runner = CliRunner()
    args = [
        "run",
        "--experiment",
        "sso-sweep",
        "--n",
        "4",
        "--q",
        "10,100,1000",
        "--trials",
        "25",
        "--seed",
        "13",
    ]
    for sub in ("a", "b"):
        result = runner.invoke(cli_main, args + ["--out", str(tmp_path / sub)])
        assert result.exit_code == 0, result.output
    identical = True
    for name in ("sso_sweep.csv", "sso_sweep_summary.csv"):
        identical &= (tmp_path / "a" / "sso-sweep" / name).read_bytes() == (
            tmp_path / "b" / "sso-sweep" / name
        ).read_bytes()
    _report("cli determinism", identical, "rerun with seed 13 byte-identical")
    assert identical


@pytest.mark.slow
def test_vls_scaling_smoke_11q():
    n, result, baseline = _train_scaled(2048, restarts=4, iterations=600)
    _report(
        "vls 11-qubit smoke",
        result.best_fidelity >= 0.85,
        f"best fidelity {result.best_fidelity:.4f}, baseline {baseline.fidelity:.4f}",
    )
    assert result.best_fidelity >= 0.85


@pytest.mark.slow
def test_vls_scaling_smoke_13q():
    n, result, baseline = _train_scaled(8192, restarts=3, iterations=800)
    _report(
        "vls 13-qubit smoke",
        result.best_fidelity >= 0.85,
        f"best fidelity {result.best_fidelity:.4f}, baseline {baseline.fidelity:.4f}",
    )
    assert result.best_fidelity >= 0.85

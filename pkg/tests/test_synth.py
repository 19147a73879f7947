"""Variational compilation of 2- and 3-qubit unitaries."""
import json

import numpy as np
import pytest

from qfracflow import synth


def test_two_qubit_template_counts():
    gates, n_params = synth.two_qubit_template()
    assert n_params == 21
    assert sum(1 for g in gates if g[0] == "cnot") == 3
    # 7 rotation slots of 3 angles each
    assert sum(1 for g in gates if g[0] in ("rz", "ry")) == 21


def test_three_qubit_template_counts():
    gates, n_params = synth.three_qubit_template()
    assert sum(1 for g in gates if g[0] == "cnot") == 20
    assert n_params == 99


def test_unitary_fidelity_phase_invariance():
    u = synth.haar_random_unitary(4, seed=0)
    assert synth.unitary_fidelity(u, u) == pytest.approx(1.0, abs=1e-12)
    assert synth.unitary_fidelity(u, np.exp(1j * 0.7) * u) == pytest.approx(
        1.0, abs=1e-12
    )
    v = synth.haar_random_unitary(4, seed=1)
    f = synth.unitary_fidelity(u, v)
    assert 0.0 <= f < 1.0


def test_haar_random_unitary_is_unitary():
    for dim in (4, 8):
        u = synth.haar_random_unitary(dim, seed=5)
        assert np.max(np.abs(u @ u.conj().T - np.eye(dim))) < 1e-12


def test_make_task_validates_target():
    with pytest.raises(ValueError):
        synth.make_task(np.eye(16))
    with pytest.raises(ValueError):
        synth.make_task(np.ones((4, 4)))


def test_circuit_unitary_identity_at_zero_angles():
    task = synth.make_task(np.eye(4))
    angles = np.zeros(task.n_params)
    u = synth.circuit_unitary(task, angles)
    # three CNOTs at zero rotation angles compose to a known permutation;
    # check unitarity and the gradient objective agreement instead of form
    assert np.max(np.abs(u @ u.conj().T - np.eye(4))) < 1e-12


def test_objective_gradient_matches_finite_differences():
    task = synth.make_task(synth.haar_random_unitary(4, seed=2))
    rng = np.random.default_rng(3)
    angles = rng.uniform(0, 2 * np.pi, task.n_params)
    value, grad = synth._objective_and_grad(task, angles)
    assert value == pytest.approx(
        1.0 - synth.unitary_fidelity(task.target, synth.circuit_unitary(task, angles)),
        abs=1e-12,
    )
    h = 1e-6
    for i in range(0, task.n_params, 5):
        up = angles.copy()
        up[i] += h
        down = angles.copy()
        down[i] -= h
        fd = (
            synth._objective_and_grad(task, up)[0]
            - synth._objective_and_grad(task, down)[0]
        ) / (2 * h)
        assert grad[i] == pytest.approx(fd, abs=1e-6)


def test_compile_cnot_exactly():
    task = synth.make_task(np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ))
    result = synth.compile_unitary(task, seed=0, restarts=5)
    assert result.success
    assert result.achieved_fidelity >= 0.9999


def test_compile_haar_two_qubit():
    for i in range(5):
        target = synth.haar_random_unitary(4, seed=100 + i)
        result = synth.compile_unitary(synth.make_task(target), seed=i, restarts=20)
        assert result.achieved_fidelity >= 0.999
        fitted = synth.circuit_unitary(synth.make_task(target), result.params)
        assert synth.unitary_fidelity(target, fitted) == pytest.approx(
            result.achieved_fidelity, abs=1e-9
        )


def test_compile_haar_three_qubit():
    target = synth.haar_random_unitary(8, seed=42)
    result = synth.compile_unitary(
        synth.make_task(target, tolerance=1e-3), seed=0, restarts=10
    )
    assert result.achieved_fidelity >= 0.999


def test_compile_is_deterministic():
    target = synth.haar_random_unitary(4, seed=9)
    a = synth.compile_unitary(synth.make_task(target), seed=4, restarts=5)
    b = synth.compile_unitary(synth.make_task(target), seed=4, restarts=5)
    assert np.array_equal(a.params, b.params)


def test_circuit_to_json_schema():
    task = synth.make_task(synth.haar_random_unitary(4, seed=11))
    angles = np.linspace(0, 1, task.n_params)
    payload = json.loads(synth.circuit_to_json(task, angles))
    assert payload["n_qubits"] == 2
    assert len(payload["gates"]) == len(task.gates)
    for entry in payload["gates"]:
        assert entry["gate"] in ("rz", "ry", "cnot")
        if entry["gate"] == "cnot":
            assert "angle" not in entry
        else:
            assert isinstance(entry["angle"], float)

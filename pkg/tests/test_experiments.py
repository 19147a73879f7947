"""Experiment registry: validation, artifacts, and determinism."""
import json

import pytest

from qfracflow import experiments


def _fast_sso_config(seed=7):
    return experiments.ExperimentConfig(
        experiment=experiments.SSO_SWEEP,
        n=4,
        q_grid=(10, 1000),
        trials=15,
        seed=seed,
    )


def test_validate_accepts_defaults():
    for name in experiments.EXPERIMENTS:
        assert experiments.validate(experiments.ExperimentConfig(experiment=name)) == []


def test_validate_reports_field_names():
    config = experiments.ExperimentConfig(
        experiment="unknown", trials=0, q_grid=(0,), sizes=(7,)
    )
    diagnostics = experiments.validate(config)
    joined = "\n".join(diagnostics)
    assert "experiment" in joined
    assert "trials" in joined
    assert "q_grid" in joined
    assert "sizes" in joined


def test_run_rejects_invalid_config():
    with pytest.raises(ValueError):
        experiments.run(experiments.ExperimentConfig(experiment="nope"))


def test_config_hash_stable_and_sensitive():
    a = experiments.config_hash(_fast_sso_config(seed=7))
    b = experiments.config_hash(_fast_sso_config(seed=7))
    c = experiments.config_hash(_fast_sso_config(seed=8))
    assert a == b
    assert a != c


def test_sso_sweep_artifacts_and_manifest():
    result = experiments.run(_fast_sso_config())
    assert set(result.artifacts) == {"sso_sweep.csv", "sso_sweep_summary.csv"}
    header = result.artifacts["sso_sweep.csv"].splitlines()[0]
    assert header == "q,trial,error,mixed_baseline_error,seed,config_hash"
    rows = result.artifacts["sso_sweep.csv"].splitlines()[1:]
    assert len(rows) == 2 * 15  # |q_grid| * trials
    manifest = result.manifest
    assert manifest["experiment"] == experiments.SSO_SWEEP
    assert manifest["config_hash"] == experiments.config_hash(_fast_sso_config())
    assert manifest["status"] == "ok"
    assert set(manifest["artifacts"]) == set(result.artifacts)
    assert result.ok


def test_sso_sweep_rerun_is_byte_identical():
    a = experiments.run(_fast_sso_config())
    b = experiments.run(_fast_sso_config())
    assert a.artifacts == b.artifacts


def test_smart_encoding_demo_checks_pass():
    result = experiments.run(
        experiments.ExperimentConfig(experiment=experiments.SMART_ENCODING_DEMO)
    )
    assert result.ok
    perm = json.loads(result.artifacts["smart_encoding_permutation.json"])
    assert perm["exact_split"] is True
    assert sorted(perm["mapping"]) == list(range(32))


def test_noise_resilience_suite_checks_pass():
    result = experiments.run(
        experiments.ExperimentConfig(
            experiment=experiments.NOISE_RESILIENCE_SUITE, restarts=2, iterations=40
        )
    )
    assert result.checks["dephasing_fidelity_invariant"]
    assert result.checks["depolarizing_p0_equals_mixed_baseline"]
    assert result.checks["noiseless_limit_recovered"]
    lines = result.artifacts["noise_resilience.csv"].splitlines()
    assert lines[0] == "channel,p,inferred_fidelity,seed,config_hash"
    assert len(lines) == 1 + 22  # 11 p values per channel


def test_vls_pitchfork_artifacts(tmp_path):
    result = experiments.run(
        experiments.ExperimentConfig(
            experiment=experiments.VLS_PITCHFORK_5Q, restarts=2, iterations=30
        )
    )
    names = set(result.artifacts)
    assert "vls_pitchfork_5q_traces.csv" in names
    assert "vls_pitchfork_5q_params.json" in names
    assert "vls_pitchfork_5q_solution_true_grid.csv" in names
    params = json.loads(result.artifacts["vls_pitchfork_5q_params.json"])
    assert params["template"] == {"n_qubits": 5, "n_layers": 5, "n_params": 55}
    assert len(params["params"]) == 55
    grid = result.artifacts["vls_pitchfork_5q_solution_true_grid.csv"].splitlines()
    assert len(grid) == 4
    assert all(len(row.split(",")) == 8 for row in grid)
    written = experiments.write_result(result, tmp_path / "out")
    assert "manifest.json" in written
    assert (tmp_path / "out" / "vls_pitchfork_5q_traces.csv").exists()


def test_compile_demo_small():
    result = experiments.run(
        experiments.ExperimentConfig(experiment=experiments.COMPILE_DEMO, instances=2)
    )
    assert result.ok
    lines = result.artifacts["compile_demo.csv"].splitlines()
    assert len(lines) == 1 + 2 + 1  # header, 2 Haar instances, 1 net-unitary row

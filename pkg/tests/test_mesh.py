"""Problem assembly: discretization structure, scaling, and baselines."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfracflow import mesh


def test_1d_chain_raw_matrix_is_tridiagonal():
    problem = mesh.build_1d_problem(4, 1.0)
    a, b = mesh.assemble_raw(problem)
    expected = np.array(
        [
            [2, -1, 0, 0],
            [-1, 2, -1, 0],
            [0, -1, 2, -1],
            [0, 0, -1, 2],
        ],
        dtype=float,
    )
    assert np.allclose(a, expected, atol=1e-12)
    assert np.allclose(b, [1, 0, 0, 0], atol=1e-12)


def test_1d_chain_kappa_matches_analytic_eigenvalues():
    # tridiagonal (-1, 2, -1) eigenvalues are 2 - 2 cos(k pi / (N+1))
    system = mesh.assemble_system(mesh.build_1d_problem(4, 1.0))
    expected = (2 - 2 * np.cos(4 * np.pi / 5)) / (2 - 2 * np.cos(np.pi / 5))
    assert system.kappa == pytest.approx(expected, abs=1e-9)
    assert system.matrix_scale == pytest.approx(2 - 2 * np.cos(4 * np.pi / 5), abs=1e-9)


def test_scaled_spectrum_in_unit_interval():
    for problem in (
        mesh.build_1d_problem(8, 2.5),
        mesh.build_pitchfork_problem(4, 8, 1.0, 10.0),
    ):
        system = mesh.assemble_system(problem)
        w = np.linalg.eigvalsh(system.matrix)
        assert w[0] > 0
        assert w[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(system.rhs) == pytest.approx(1.0, abs=1e-12)


def test_permeability_scaling_leaves_scaled_system_unchanged():
    # uniform k multiplies A and b equally; the scaled system is invariant
    s1 = mesh.assemble_system(mesh.build_1d_problem(8, 1.0))
    s2 = mesh.assemble_system(mesh.build_1d_problem(8, 7.5))
    assert np.allclose(s1.matrix, s2.matrix, atol=1e-12)
    assert np.allclose(s1.rhs, s2.rhs, atol=1e-12)
    assert s1.kappa == pytest.approx(s2.kappa, rel=1e-12)


def test_solve_reference_residual_small():
    for problem in (
        mesh.build_1d_problem(4, 1.0),
        mesh.build_1d_problem(8, 1.0),
        mesh.build_pitchfork_problem(4, 8, 1.0, 10.0),
    ):
        system = mesh.assemble_system(problem)
        x = mesh.solve_reference(system)
        a_raw, b_raw = mesh.assemble_raw(problem)
        assert np.linalg.norm(a_raw @ x.physical() - b_raw) < 1e-10


def test_solution_nonnegative_and_bounded_by_boundary():
    # pressures interpolate the two Dirichlet values 1 and 0
    system = mesh.assemble_system(mesh.build_pitchfork_problem(4, 8, 1.0, 10.0))
    h = mesh.solve_reference(system).physical()
    assert np.all(h > 0.0)
    assert np.all(h < 1.0)


def test_mixed_state_baseline_frozen_values_n8():
    system = mesh.assemble_system(mesh.build_1d_problem(8, 1.0))
    x_true = mesh.solve_reference(system)
    baseline = mesh.mixed_state_baseline(system, x_true)
    assert baseline.error == pytest.approx(0.765366864730, abs=1e-9)
    assert baseline.error_rescaled == pytest.approx(0.712363961930, abs=1e-9)
    assert baseline.fidelity == pytest.approx(0.794117647059, abs=1e-9)


def test_pitchfork_mask_is_exactly_half_on_4x8():
    mask, right = mesh.pitchfork_mask(4, 8)
    assert mask.sum() == 16
    assert mask.shape == (4, 8)
    assert right.sum() == 4
    assert np.all(mask[right])


def test_pitchfork_mask_nodes_4x4():
    problem = mesh.build_pitchfork_problem(4, 4, 1.0, 10.0)
    nodes = np.flatnonzero(problem.fracture_mask.reshape(-1)).tolist()
    assert nodes == [6, 7, 8, 9, 10, 11, 14, 15]


def test_right_branch_multiplier_changes_only_right_branch():
    base = mesh.build_pitchfork_problem(4, 8, 1.0, 10.0)
    varied = mesh.build_pitchfork_problem(4, 8, 1.0, 10.0, 100.0)
    _, right = mesh.pitchfork_mask(4, 8)
    assert np.all(varied.permeability[right] == 100.0)
    assert np.all(varied.permeability[~right] == base.permeability[~right])


def test_grid_shapes_cover_registered_sizes():
    for nodes, (rows, cols) in mesh.GRID_SHAPES.items():
        assert rows * cols == nodes


def test_validation_rejects_bad_inputs():
    with pytest.raises(ValueError):
        mesh.build_1d_problem(6, 1.0)  # not a power of two
    with pytest.raises(ValueError):
        mesh.build_1d_problem(4, 0.0)
    with pytest.raises(ValueError):
        mesh.build_pitchfork_problem(2, 2, 1.0, 10.0)  # too small for branches
    with pytest.raises(ValueError):
        mesh.FractureProblem(rows=2, cols=2, permeability=np.full((2, 2), -1.0))


def test_boundary_axis_top_bottom_transposes_flow():
    k = np.ones((4, 8))
    lr = mesh.assemble_system(mesh.FractureProblem(4, 8, k))
    tb = mesh.assemble_system(
        mesh.FractureProblem(4, 8, k, boundary_axis=mesh.FLOW_TOP_BOTTOM)
    )
    h_lr = mesh.solve_reference(lr).physical().reshape(4, 8)
    h_tb = mesh.solve_reference(tb).physical().reshape(4, 8)
    # left-right flow varies along columns, top-bottom along rows
    assert np.ptp(h_lr.mean(axis=0)) > np.ptp(h_lr.mean(axis=1))
    assert np.ptp(h_tb.mean(axis=1)) > np.ptp(h_tb.mean(axis=0))


def test_system_to_csv_round_trip():
    system = mesh.assemble_system(mesh.build_1d_problem(4, 1.0))
    lines = mesh.system_to_csv(system).strip().split("\n")
    assert len(lines) == 5  # 4 matrix rows + rhs
    parsed = np.array([[float(v) for v in line.split(",")] for line in lines[:4]])
    assert np.array_equal(parsed, system.matrix)
    rhs = np.array([float(v) for v in lines[4].split(",")])
    assert np.array_equal(rhs, system.rhs)


@settings(deadline=None, max_examples=40)
@given(
    rows=st.sampled_from([1, 2, 4]),
    cols=st.sampled_from([2, 4, 8]),
    seed=st.integers(0, 10_000),
)
def test_assembled_matrix_is_spd_for_random_permeability(rows, cols, seed):
    rng = np.random.default_rng(seed)
    k = rng.uniform(0.1, 100.0, size=(rows, cols))
    system = mesh.assemble_system(mesh.FractureProblem(rows, cols, k))
    assert np.max(np.abs(system.matrix - system.matrix.T)) < 1e-12
    assert np.linalg.eigvalsh(system.matrix)[0] > 0
    assert system.kappa >= 1.0

"""Fracture-flow problem generation and finite-volume assembly.

Problems discretize div(k grad h) = f on a rectangular grid of interior
nodes with Dirichlet pressures on two opposite edges and no-flow conditions
on the other two.  Edge transmissibilities use the harmonic mean of the two
node permeabilities, which keeps the assembled matrix symmetric positive
definite for any positive permeability field.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

FLOW_LEFT_RIGHT = "flow-left-right"
FLOW_TOP_BOTTOM = "flow-top-bottom"

# Interior shapes for the larger node counts used throughout: the aspect
# ratio is a toolkit choice, only the node count is pinned.
GRID_SHAPES = {32: (4, 8), 128: (8, 16), 512: (16, 32), 2048: (32, 64), 8192: (64, 128)}


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class FractureProblem:
    """Rectangular grid of interior nodes with a permeability field."""

    rows: int
    cols: int
    permeability: np.ndarray
    boundary_axis: str = FLOW_LEFT_RIGHT
    boundary_high: float = 1.0
    boundary_low: float = 0.0
    source: np.ndarray | None = None
    fracture_mask: np.ndarray | None = None

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid dimensions must be positive")
        if not _is_power_of_two(self.rows * self.cols):
            raise ValueError("rows*cols must be a power of two")
        k = np.asarray(self.permeability, dtype=float)
        if k.shape != (self.rows, self.cols):
            raise ValueError("permeability shape must match the grid")
        if np.any(k <= 0):
            raise ValueError("all permeabilities must be positive")
        object.__setattr__(self, "permeability", k)
        src = self.source
        src = np.zeros((self.rows, self.cols)) if src is None else np.asarray(src, float)
        if src.shape != (self.rows, self.cols):
            raise ValueError("source shape must match the grid")
        object.__setattr__(self, "source", src)
        mask = self.fracture_mask
        mask = np.zeros((self.rows, self.cols), bool) if mask is None else np.asarray(mask, bool)
        if mask.shape != (self.rows, self.cols):
            raise ValueError("fracture mask shape must match the grid")
        object.__setattr__(self, "fracture_mask", mask)
        if self.boundary_axis not in (FLOW_LEFT_RIGHT, FLOW_TOP_BOTTOM):
            raise ValueError(f"unknown boundary axis {self.boundary_axis!r}")

    @property
    def n_nodes(self) -> int:
        return self.rows * self.cols

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.n_nodes))


@dataclass(frozen=True)
class LinearSystem:
    """Scaled SPD system: A has spectrum in (0, 1], b has unit norm."""

    n_vars: int
    matrix: np.ndarray
    rhs: np.ndarray
    rhs_scale: float
    matrix_scale: float
    kappa: float

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        b = np.asarray(self.rhs, dtype=float)
        if a.shape != (self.n_vars, self.n_vars) or b.shape != (self.n_vars,):
            raise ValueError("matrix/rhs dimensions do not match n_vars")
        if np.max(np.abs(a - a.T)) > 1e-12:
            raise ValueError("matrix is not symmetric to 1e-12")
        if abs(np.linalg.norm(b) - 1.0) > 1e-12:
            raise ValueError("rhs is not unit norm to 1e-12")
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "rhs", b)

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.n_vars))


@dataclass(frozen=True)
class SolutionVector:
    """Unit-norm pressure vector plus the factor restoring physical values."""

    values: np.ndarray
    raw_scale: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError("solution vector is not unit norm to 1e-12")
        object.__setattr__(self, "values", v)

    def physical(self) -> np.ndarray:
        return self.values * self.raw_scale


@dataclass(frozen=True)
class BaselineMetrics:
    """Residual error and fidelity of the maximally-mixed readout.

    error uses the normalized-residual convention ||A u / ||A u|| - b||;
    error_rescaled scales the inferred vector by the true-solution norm
    before taking the residual.  Both vanish at the exact solution.
    """

    error: float
    error_rescaled: float
    fidelity: float


def build_1d_problem(n_nodes: int, k_uniform: float) -> FractureProblem:
    """1 x n chain with uniform permeability and boundary pressures (1, 0)."""
    if not _is_power_of_two(n_nodes):
        raise ValueError("n_nodes must be a power of two")
    if k_uniform <= 0:
        raise ValueError("permeability must be positive")
    k = np.full((1, n_nodes), float(k_uniform))
    return FractureProblem(rows=1, cols=n_nodes, permeability=k)


def pitchfork_mask(rows: int, cols: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic pitchfork geometry.

    Returns (full mask, right-branch mask).  The stem runs along the middle
    row from the high-pressure boundary to the middle column, then three
    branches (rows rows//4, rows//2, 3*rows//4) run to the last column.  The
    right-branch mask covers the branch nearest row 0 in the second half.
    """
    branch_rows = sorted({rows // 4, rows // 2, 3 * rows // 4})
    if len(branch_rows) != 3:
        raise ValueError("grid too small to host three distinct branch rows")
    mid = cols // 2
    mask = np.zeros((rows, cols), dtype=bool)
    mask[rows // 2, : mid + 1] = True
    for r in branch_rows:
        mask[r, mid:] = True
    right = np.zeros((rows, cols), dtype=bool)
    right[branch_rows[0], mid:] = True
    return mask, right


def build_pitchfork_problem(
    rows: int,
    cols: int,
    k_background: float,
    k_fracture: float,
    k_right_branch: float | None = None,
) -> FractureProblem:
    """Interior grid with an embedded pitchfork fracture.

    k_right_branch overrides the fracture permeability on the branch nearest
    row 0 past the middle column (the varying-permeability case); it defaults
    to k_fracture.
    """
    if min(k_background, k_fracture) <= 0:
        raise ValueError("permeabilities must be positive")
    if k_right_branch is None:
        k_right_branch = k_fracture
    if k_right_branch <= 0:
        raise ValueError("permeabilities must be positive")
    k = np.full((rows, cols), float(k_background))
    uniform = k_fracture == k_background and k_right_branch == k_background
    if uniform:
        return FractureProblem(rows=rows, cols=cols, permeability=k)
    if rows < 4 or cols < 4:
        raise ValueError("pitchfork needs at least a 4x4 interior grid")
    mask, right = pitchfork_mask(rows, cols)
    k[mask] = k_fracture
    k[right] = k_right_branch
    fracture = k != k_background
    return FractureProblem(rows=rows, cols=cols, permeability=k, fracture_mask=fracture)


def _harmonic(ka: np.ndarray, kb: np.ndarray) -> np.ndarray:
    return 2.0 * ka * kb / (ka + kb)


def _extreme_eigenvalues(a: np.ndarray) -> tuple[float, float]:
    """(smallest, largest) eigenvalue of a dense SPD matrix.

    Small systems use a full decomposition; large ones use Lanczos on the
    matrix and on its reflection around the largest eigenvalue, which avoids
    the O(N^3) memory/time of a full dense decomposition at N = 8192.
    """
    n = a.shape[0]
    if n <= 512:
        w = np.linalg.eigvalsh(a)
        return float(w[0]), float(w[-1])
    # the assembled matrix has at most 5 nonzeros per row: sparse Lanczos
    # for the top, sparse-LU shift-invert for the bottom of the spectrum
    sparse = sp.csc_matrix(a)
    lmax = float(spla.eigsh(sparse, k=1, which="LA", return_eigenvectors=False)[0])
    lu = spla.splu(sparse)
    inverse = spla.LinearOperator(a.shape, matvec=lu.solve, dtype=float)
    mu = float(spla.eigsh(inverse, k=1, which="LA", return_eigenvectors=False)[0])
    return 1.0 / mu, lmax


def _assemble_raw_arrays(problem: FractureProblem) -> tuple[np.ndarray, np.ndarray]:
    rows, cols, k = problem.rows, problem.cols, problem.permeability
    n = problem.n_nodes
    a = np.zeros((n, n))
    b = problem.source.reshape(-1).astype(float).copy()

    def node(r, c):
        return r * cols + c

    # interior horizontal edges
    for r in range(rows):
        for c in range(cols - 1):
            t = _harmonic(k[r, c], k[r, c + 1])
            i, j = node(r, c), node(r, c + 1)
            a[i, i] += t
            a[j, j] += t
            a[i, j] -= t
            a[j, i] -= t
    # interior vertical edges
    for r in range(rows - 1):
        for c in range(cols):
            t = _harmonic(k[r, c], k[r + 1, c])
            i, j = node(r, c), node(r + 1, c)
            a[i, i] += t
            a[j, j] += t
            a[i, j] -= t
            a[j, i] -= t
    # Dirichlet boundary edges (boundary-layer permeability = node's own k)
    if problem.boundary_axis == FLOW_LEFT_RIGHT:
        for r in range(rows):
            i = node(r, 0)
            a[i, i] += k[r, 0]
            b[i] += k[r, 0] * problem.boundary_high
            j = node(r, cols - 1)
            a[j, j] += k[r, cols - 1]
            b[j] += k[r, cols - 1] * problem.boundary_low
    else:
        for c in range(cols):
            i = node(0, c)
            a[i, i] += k[0, c]
            b[i] += k[0, c] * problem.boundary_high
            j = node(rows - 1, c)
            a[j, j] += k[rows - 1, c]
            b[j] += k[rows - 1, c] * problem.boundary_low
    return a, b


def assemble_system(problem: FractureProblem) -> LinearSystem:
    """Assemble the finite-volume system and rescale it.

    Dirichlet boundary layers are eliminated into b.  The matrix is divided
    by its largest eigenvalue so its spectrum lies in (0, 1], and b is
    normalized to unit Euclidean norm; both scales are recorded.
    """
    a, b = _assemble_raw_arrays(problem)
    n = problem.n_nodes
    lmin, lmax = _extreme_eigenvalues(a)
    if lmin <= 0:
        raise RuntimeError("assembled matrix is not positive definite")
    rhs_scale = float(np.linalg.norm(b))
    if rhs_scale == 0:
        raise RuntimeError("right-hand side vanished; no forcing present")
    return LinearSystem(
        n_vars=n,
        matrix=a / lmax,
        rhs=b / rhs_scale,
        rhs_scale=rhs_scale,
        matrix_scale=float(lmax),
        kappa=float(lmax / lmin),
    )


def assemble_raw(problem: FractureProblem) -> tuple[np.ndarray, np.ndarray]:
    """Pre-scaling (A, b) pair, mainly for tests and debugging exports."""
    return _assemble_raw_arrays(problem)


def solve_reference(system: LinearSystem) -> SolutionVector:
    """Direct dense ground-truth solve, normalized to unit norm.

    raw_scale restores physical pressures: undoing the matrix and rhs
    scalings multiplies the scaled-system solution by rhs_scale/matrix_scale.
    """
    x = sla.solve(system.matrix, system.rhs, assume_a="pos")
    norm = float(np.linalg.norm(x))
    return SolutionVector(
        values=x / norm,
        raw_scale=norm * system.rhs_scale / system.matrix_scale,
    )


def mixed_state_baseline(system: LinearSystem, x_true: SolutionVector) -> BaselineMetrics:
    """Metrics for the maximally-mixed readout u with u_i = 1/sqrt(N)."""
    n = system.n_vars
    u = np.full(n, 1.0 / np.sqrt(n))
    au = system.matrix @ u
    error = float(np.linalg.norm(au / np.linalg.norm(au) - system.rhs))
    # rescaled: give u the scaled-system solution norm before the residual
    scaled_norm = x_true.raw_scale * system.matrix_scale / system.rhs_scale
    rescaled = float(np.linalg.norm(system.matrix @ (scaled_norm * u) - system.rhs))
    fidelity = float(np.dot(x_true.values, u) ** 2)
    return BaselineMetrics(error=error, error_rescaled=rescaled, fidelity=fidelity)


def system_to_csv(system: LinearSystem) -> str:
    """Dense matrix dump (rows of A, then a final row holding b)."""
    buf = io.StringIO()
    for row in system.matrix:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    buf.write(",".join(repr(float(v)) for v in system.rhs) + "\n")
    return buf.getvalue()

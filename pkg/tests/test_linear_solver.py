"""Linear solver contract: residual bound, determinism, indefiniteness
detection."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import sparse
from scipy.linalg import eigvalsh

import dgsl
from dgsl import AssemblyConfig, assemble_bilinear, solve_spd
from dgsl.assembly import SparseSymMatrix
from dgsl.errors import IndefiniteOperator, NotConverged

from conftest import space_on


def as_matrix(dense):
    return SparseSymMatrix(sparse.csr_matrix(np.asarray(dense)))


def test_diagonal_system_solved_exactly(rng):
    d = rng.uniform(0.5, 4.0, 12)
    b = rng.standard_normal(12)
    x, report = solve_spd(as_matrix(np.diag(d)), b, tol=1e-14)
    assert report.converged
    assert_allclose(x, b / d, rtol=1e-14)


def test_manufactured_spd_system(rng):
    space = space_on(4, 1)
    a = assemble_bilinear(space, AssemblyConfig(penalty=100.0))
    x_star = rng.standard_normal(a.dim)
    b = a @ x_star
    x, report = solve_spd(a, b, tol=1e-10, block_size=3)
    assert report.converged
    assert np.linalg.norm(x - x_star) <= 1e-8 * np.linalg.norm(x_star)
    assert np.linalg.norm(b - a @ x) <= 1e-10 * np.linalg.norm(b)


def test_small_penalty_operator_is_detected_indefinite(rng):
    space = space_on(4, 2)
    a = assemble_bilinear(space, AssemblyConfig(penalty=0.01))
    # oracle: the operator genuinely has negative eigenvalues here
    assert eigvalsh(a.toarray()).min() < 0
    with pytest.raises(IndefiniteOperator):
        solve_spd(a, rng.standard_normal(a.dim), block_size=6)


def test_determinism_bitwise(rng):
    space = space_on(3, 2)
    a = assemble_bilinear(space, AssemblyConfig(penalty=100.0))
    b = rng.standard_normal(a.dim)
    x1, r1 = solve_spd(a, b, tol=1e-12, block_size=6)
    x2, r2 = solve_spd(a, b, tol=1e-12, block_size=6)
    assert x1.tobytes() == x2.tobytes()
    assert r1.iterations == r2.iterations
    xd1, _ = solve_spd(a, b, method="direct")
    xd2, _ = solve_spd(a, b, method="direct")
    assert xd1.tobytes() == xd2.tobytes()


def test_direct_and_pcg_agree(rng):
    space = space_on(3, 1)
    a = assemble_bilinear(space, AssemblyConfig(penalty=100.0))
    b = rng.standard_normal(a.dim)
    x_pcg, _ = solve_spd(a, b, tol=1e-13, block_size=3)
    x_dir, _ = solve_spd(a, b, method="direct")
    assert np.linalg.norm(x_pcg - x_dir) <= 1e-9 * np.linalg.norm(x_dir)


def test_budget_exhaustion_raises_with_report(rng):
    space = space_on(4, 1)
    a = assemble_bilinear(space, AssemblyConfig(penalty=100.0))
    b = rng.standard_normal(a.dim)
    with pytest.raises(NotConverged) as excinfo:
        solve_spd(a, b, tol=1e-13, max_iter=3, block_size=3)
    report = excinfo.value.report
    assert report is not None and not report.converged
    assert report.iterations == 3
    assert excinfo.value.x is not None


def test_zero_rhs_short_circuits():
    space = space_on(2, 1)
    a = assemble_bilinear(space, AssemblyConfig(penalty=10.0))
    x, report = solve_spd(a, np.zeros(a.dim))
    assert not x.any()
    assert report.converged and report.iterations == 0


def test_shape_mismatch_rejected():
    space = space_on(2, 1)
    a = assemble_bilinear(space, AssemblyConfig(penalty=10.0))
    with pytest.raises(ValueError):
        solve_spd(a, np.zeros(a.dim + 1))


def test_point_and_block_preconditioners_agree(rng):
    space = space_on(8, 2)
    a = assemble_bilinear(space, AssemblyConfig(penalty=100.0))
    b = rng.standard_normal(a.dim)
    x_block, r_block = solve_spd(a, b, tol=1e-10, block_size=6)
    x_point, r_point = solve_spd(a, b, tol=1e-10, block_size=1)
    assert r_block.converged and r_point.converged
    assert np.linalg.norm(x_block - x_point) <= 1e-7 * np.linalg.norm(x_block)

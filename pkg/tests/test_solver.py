import math

import numpy as np
import pytest
import scipy.linalg as sla
from numpy.testing import assert_allclose

from oseenspec import operators, solver
from oseenspec.grids import ModeSpec, make_grid


@pytest.fixture(scope="module")
def grid600():
    return make_grid(600, 30.0)


def test_eigenvalues_of_diagonal():
    d = np.array([2.0 + 1j, -1.0, 2.0 - 3j, 0.5])
    res = solver.eigenvalues(np.diag(d))
    expect = d[np.lexsort((d.imag, d.real))]
    assert_allclose(res.values, expect, atol=1e-14)


def test_eigenvalue_ordering_breaks_real_ties():
    d = np.array([1.0 + 2j, 1.0 - 2j, 1.0])
    res = solver.eigenvalues(np.diag(d))
    assert_allclose(res.values, np.array([1.0 - 2j, 1.0, 1.0 + 2j]), atol=1e-14)


def test_A2_ground_state(grid600):
    res = solver.eigenvalues(operators.assemble_A(2, grid600))
    assert abs(res.values[0] - 1.0) < 1e-3
    # backward error far under the budget relative to the matrix scale
    assert res.backward_error < 1e-8 * np.linalg.norm(operators.assemble_A(2, grid600).data, "fro")


def test_eigenvalues_shift_identity(grid600):
    base = ModeSpec(alpha=8 * math.pi * 3, k=2, lam=0.0)
    shifted = ModeSpec(alpha=8 * math.pi * 3, k=2, lam=0.9)
    e0 = solver.eigenvalues(operators.assemble_H(base, grid600)).values
    e1 = solver.eigenvalues(operators.assemble_H(shifted, grid600)).values
    assert np.abs((e0 - 0.9j) - e1).max() < 1e-8


def test_mode_conjugation_symmetry(grid600):
    # conj(H_{-k, lam}) equals H_{k, -lam} entrywise, hence spectra conjugate
    neg = operators.assemble_H(ModeSpec(alpha=8 * math.pi * 3, k=-2, lam=0.9), grid600)
    pos = operators.assemble_H(ModeSpec(alpha=8 * math.pi * 3, k=2, lam=-0.9), grid600)
    assert np.array_equal(np.conj(neg.data), pos.data)
    eneg = solver.eigenvalues(neg).values
    epos = solver.eigenvalues(pos).values
    assert np.abs(np.sort_complex(np.conj(eneg)) - np.sort_complex(epos)).max() < 1e-8


def test_smallest_singular_value_identity():
    assert solver.smallest_singular_value(np.eye(40), 0.0) == pytest.approx(1.0, abs=1e-12)


def test_smallest_singular_value_hermitian(grid600):
    a = operators.assemble_A(1, grid600)
    smin = solver.smallest_singular_value(a, 0.0)
    lo = sla.eigvalsh(a.data, subset_by_index=(0, 0))[0]
    assert abs(smin - lo) < 1e-10


def test_resolvent_distance_at_zero_rotation(grid600):
    # with beta = 0 the model operator is self-adjoint with spectrum
    # {3/2, 5/2, ...}; the resolvent-norm minimum over shifts sits at 0
    mode = ModeSpec(alpha=0.0, k=1, lam=0.0)
    l1 = operators.assemble_L1(mode, grid600)
    s0 = solver.smallest_singular_value(l1, 0.0)
    assert abs(s0 - 1.5) < 1e-3
    assert solver.smallest_singular_value(l1, 0.4) > s0
    assert solver.smallest_singular_value(l1, -0.7) > s0


def test_smallest_singular_value_lipschitz_in_shift():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((50, 50)) + 1j * rng.standard_normal((50, 50))
    lams = (-1.0, -0.3, 0.2, 1.7)
    vals = [solver.smallest_singular_value(a, lam) for lam in lams]
    for i in range(len(lams)):
        for j in range(i + 1, len(lams)):
            assert abs(vals[i] - vals[j]) <= abs(lams[i] - lams[j]) + 1e-10


def test_hermitian_part_of_full_mode_operator(grid600):
    # i beta B is skew-Hermitian, so the Hermitian part of H is A_k
    mode = ModeSpec(alpha=8 * math.pi * 3, k=2, lam=0.9)
    hp = solver.hermitian_part_min_eig(operators.assemble_H(mode, grid600))
    lo = sla.eigvalsh(operators.assemble_A(2, grid600).data, subset_by_index=(0, 0))[0]
    assert abs(hp - lo) < 1e-9


def test_hermitian_part_bounds_spectrum():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((80, 80)) + 1j * rng.standard_normal((80, 80))
    hp = solver.hermitian_part_min_eig(a)
    re_min = solver.eigenvalues(a).values.real.min()
    assert re_min >= hp - 1e-8


def test_size_cap():
    big = np.zeros((4001, 4001), dtype=np.float32)
    with pytest.raises(ValueError):
        solver.eigenvalues(big)
    with pytest.raises(ValueError):
        solver.smallest_singular_value(big, 0.0)

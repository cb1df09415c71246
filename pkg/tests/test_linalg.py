import numpy as np
import pytest

from trapwalk import linalg
from trapwalk.coins import balance_matrices, grover_coin, stationary_cell
from trapwalk.errors import NotUnitaryError

from conftest import draw_type_i, draw_type_iib, random_unitary


def test_unitarity_defect_identity():
    assert linalg.unitarity_defect(np.eye(4)) == 0.0


def test_unitarity_defect_grover():
    # direct multiplication: (2|s><s| - I)^2 = I
    assert linalg.unitarity_defect(grover_coin()) < 1e-15


def test_unitarity_defect_all_ones():
    # J^dag J = 4 J, so the largest entry of J^dag J - I is the off-diagonal 4
    assert linalg.unitarity_defect(np.ones((4, 4))) == pytest.approx(4.0)


def test_unitarity_defect_rejects_nonfinite():
    bad = np.eye(4, dtype=complex)
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        linalg.unitarity_defect(bad)


def test_eig_identity():
    vals, vecs = linalg.eig_unitary4(np.eye(4))
    assert np.allclose(vals, 1.0)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(4), atol=1e-12)


def test_eig_momentum_shift_at_zero():
    # the momentum shift at k = 0 is the identity
    shift = np.diag(np.exp(1j * np.array([0.0, 0.0, 0.0, 0.0])))
    vals, _ = linalg.eig_unitary4(shift)
    assert np.allclose(vals, 1.0)


def test_eig_grover_spectrum():
    # rank-one update 2|s><s| - I: eigenvalue +1 on |s>, -1 on its complement
    vals, vecs = linalg.eig_unitary4(grover_coin())
    assert np.allclose(sorted(vals.real), [-1, -1, -1, 1], atol=1e-12)
    assert np.max(np.abs(vals.imag)) < 1e-12
    assert np.allclose(vecs.conj().T @ vecs, np.eye(4), atol=1e-9)


def test_eig_requires_unitary():
    with pytest.raises(NotUnitaryError):
        linalg.eig_unitary4(np.ones((4, 4)))


def test_eig_reconstruction_and_residual(rng):
    for _ in range(25):
        m = random_unitary(rng)
        vals, vecs = linalg.eig_unitary4(m)
        assert np.max(np.abs(np.abs(vals) - 1.0)) < 1e-9
        rebuilt = (vecs * vals) @ vecs.conj().T
        assert np.max(np.abs(m - rebuilt)) < 1e-8
        for i in range(4):
            assert np.linalg.norm(m @ vecs[:, i] - vals[i] * vecs[:, i]) < 1e-9


def test_eig_phase_convention(rng):
    m = random_unitary(rng)
    _, vecs = linalg.eig_unitary4(m)
    for i in range(4):
        v = vecs[:, i]
        lead = v[np.abs(v) > 1e-8 * np.abs(v).max()][0]
        assert abs(lead.imag) < 1e-12 and lead.real >= 0


def _amplitude_matrix(params):
    return balance_matrices(stationary_cell(params)[0]).a


def test_rank_full_for_strong_trapping_cell(rng):
    rank, kernel = linalg.numerical_rank(_amplitude_matrix(draw_type_i(rng)))
    assert rank == 4
    assert kernel.shape == (4, 0)


def test_rank_three_for_grover_cell():
    from trapwalk.coins import TypeIIaParams

    quarter = np.pi / 4
    a = _amplitude_matrix(TypeIIaParams(quarter, quarter, quarter, np.pi))
    rank, kernel = linalg.numerical_rank(a)
    assert rank == 3
    assert kernel.shape == (4, 1)
    assert np.linalg.norm(a.conj().T @ kernel[:, 0]) < 1e-10


def test_rank_two_for_quasi_1d_cell(rng):
    rank, kernel = linalg.numerical_rank(_amplitude_matrix(draw_type_iib(rng)))
    assert rank == 2
    assert kernel.shape == (4, 2)


def test_rank_invariant_under_unitaries(rng):
    m = np.zeros((4, 4), dtype=complex)
    m[:, :2] = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    for tol in (1e-10, 1e-8, 1e-6):
        base, _ = linalg.numerical_rank(m, tol)
        rot, _ = linalg.numerical_rank(random_unitary(rng) @ m @ random_unitary(rng), tol)
        assert rot == base == 2


def test_rank_requires_positive_tol():
    with pytest.raises(ValueError):
        linalg.numerical_rank(np.eye(4), tol=0.0)

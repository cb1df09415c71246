"""Minimal dense complex linear algebra for 4x4 and small stacked systems.

Eigen-decomposition of unitary matrices goes through the complex Schur form,
which keeps eigenvectors orthonormal for degenerate spectra (plain ``eig``
does not).  Rank and kernel computations use singular values.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import schur

from .errors import NotUnitaryError

__all__ = [
    "UNITARITY_TOL",
    "RANK_TOL",
    "as_complex_matrix",
    "unitarity_defect",
    "require_unitary",
    "eig_unitary4",
    "numerical_rank",
    "fix_vector_phase",
]

# Constructors are closed form, so unitarity defects are pure round-off.
UNITARITY_TOL = 1e-12
# Relative rank threshold; classification boundaries depend on it.
RANK_TOL = 1e-8


def as_complex_matrix(m, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Validate and convert to a complex128 array with finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if shape is not None and a.shape != shape:
        raise ValueError(f"expected shape {shape}, got {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix has non-finite entries")
    return a


def unitarity_defect(m) -> float:
    """Max-norm (largest entry magnitude) of M^dag M - I."""
    a = as_complex_matrix(m)
    n = a.shape[0]
    return float(np.max(np.abs(a.conj().T @ a - np.eye(n))))


def require_unitary(m, tol: float = UNITARITY_TOL) -> np.ndarray:
    a = as_complex_matrix(m)
    defect = unitarity_defect(a)
    if defect > tol:
        raise NotUnitaryError(f"unitarity defect {defect:.3e} exceeds tolerance {tol:.1e}")
    return a


def fix_vector_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a vector so its first non-negligible component is real nonnegative."""
    mags = np.abs(v)
    top = mags.max()
    if top == 0.0:
        return v
    idx = int(np.argmax(mags > 1e-8 * top))
    phase = v[idx] / abs(v[idx])
    return v * phase.conj()


def eig_unitary4(m, tol: float = UNITARITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a unitary 4x4 matrix.

    Returns
    -------
    (eigenvalues, eigenvectors)
        ``eigenvalues`` has shape (4,), sorted by principal angle;
        ``eigenvectors[:, i]`` is the orthonormal eigenvector for
        ``eigenvalues[i]`` with its first nonzero component made real
        nonnegative.

    Raises
    ------
    NotUnitaryError
        If the unitarity defect of ``m`` exceeds ``tol``.
    """
    a = require_unitary(m, tol)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {a.shape}")
    t, z = schur(a, output="complex")
    # A unitary matrix is normal: its Schur form is diagonal up to round-off,
    # so the Schur basis is an orthonormal eigenbasis.
    vals = np.diag(t).copy()
    order = np.argsort(np.angle(vals))
    vals = vals[order]
    vecs = z[:, order]
    vecs = np.column_stack([fix_vector_phase(vecs[:, i]) for i in range(4)])
    return vals, vecs


def numerical_rank(m, tol: float = RANK_TOL) -> tuple[int, np.ndarray]:
    """Numerical rank of a rectangular complex matrix.

    Counts singular values above ``tol`` times the largest one and also
    returns an orthonormal basis of the numerical kernel of ``m``'s adjoint
    (columns of the returned array; empty second axis for full row rank).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_complex_matrix(m)
    u, s, _ = np.linalg.svd(a)
    if s.size == 0 or s[0] == 0.0:
        return 0, u
    rank = int(np.sum(s > tol * s[0]))
    small = np.concatenate([s <= tol * s[0], np.ones(a.shape[0] - s.size, dtype=bool)])
    kernel = u[:, small]
    if kernel.shape[1]:
        kernel = np.column_stack([fix_vector_phase(kernel[:, i])
                                  for i in range(kernel.shape[1])])
    return rank, kernel

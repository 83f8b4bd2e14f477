"""Small dense complex linear algebra.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Operators on
a joint control/target space always put the control first, i.e. the joint
space is ``control ⊗ target``.
"""

from __future__ import annotations

import numpy as np

from ._constants import NORM_TOL, VALIDATION_TOL
from .exceptions import DimensionError, ValidationError

__all__ = [
    "as_matrix",
    "as_state_vector",
    "basis_ket",
    "dagger",
    "eig_herm",
    "herm_sqrt",
    "is_hermitian",
    "is_unitary",
    "partial_trace_control",
    "projector",
    "tensor",
]


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if arr.size == 0:
        raise DimensionError("matrix has no entries")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix has non-finite entries")
    return arr


def as_state_vector(v, tol: float = NORM_TOL) -> np.ndarray:
    """Coerce ``v`` to a 1-D complex array of unit Euclidean norm."""
    arr = np.asarray(v, dtype=np.complex128).reshape(-1)
    if arr.size == 0:
        raise DimensionError("state vector has no amplitudes")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("state vector has non-finite amplitudes")
    norm = np.linalg.norm(arr)
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"state vector norm is {norm!r}, expected 1")
    return arr


def basis_ket(index: int, dim: int) -> np.ndarray:
    ket = np.zeros(dim, dtype=np.complex128)
    ket[index] = 1.0
    return ket


def projector(ket) -> np.ndarray:
    """Return ``|ket><ket|``."""
    ket = np.asarray(ket, dtype=np.complex128).reshape(-1)
    return np.outer(ket, ket.conj())


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def is_hermitian(m: np.ndarray, tol: float = VALIDATION_TOL) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - dagger(m))) <= tol)


def is_unitary(m: np.ndarray, tol: float = VALIDATION_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))) <= tol)


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b``; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_control(m, control_dim: int, target_dim: int) -> np.ndarray:
    """Trace out the control factor of an operator on ``control ⊗ target``.

    Parameters
    ----------
    m : array_like
        Square matrix of side ``control_dim * target_dim``.
    control_dim, target_dim : int
        Dimensions of the two factors.

    Returns
    -------
    numpy.ndarray
        The ``target_dim x target_dim`` reduced operator.
    """
    m = as_matrix(m)
    side = control_dim * target_dim
    if control_dim < 1 or target_dim < 1 or m.shape != (side, side):
        raise DimensionError(
            f"matrix of shape {m.shape} does not act on a "
            f"{control_dim}x{target_dim}-dimensional joint space"
        )
    blocks = m.reshape(control_dim, target_dim, control_dim, target_dim)
    return np.einsum("kikj->ij", blocks)


def eig_herm(m, tol: float = VALIDATION_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, V)`` with real eigenvalues sorted in descending
    order and the matching orthonormal eigenvectors as the columns of ``V``,
    so that ``m == V @ diag(eigenvalues) @ V^†``.
    """
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise ValidationError("matrix is not Hermitian")
    # symmetrize so round-off in the input does not leak into the spectrum
    vals, vecs = np.linalg.eigh(0.5 * (m + dagger(m)))
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def herm_sqrt(m, tol: float = VALIDATION_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-tol, 0)`` are clipped to zero; anything more negative
    is rejected.
    """
    vals, vecs = eig_herm(m, tol)
    if vals[-1] < -tol:
        raise ValidationError(f"matrix is not positive semidefinite (min eigenvalue {vals[-1]!r})")
    root = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * root) @ dagger(vecs)

"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
functions here only add the contracts the rest of the package relies on
(full factors, descending spectra, a reproducible phase convention).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ContractViolation, NumericalFailure

__all__ = [
    "SvdFactors",
    "as_cmatrix",
    "svd",
    "hermitian_eigendecomp",
    "fro_norm",
    "is_hermitian",
]

_PHASE_TOL = 1e-12


class SvdFactors(NamedTuple):
    U: np.ndarray
    S: np.ndarray
    Vh: np.ndarray

    def reconstruct(self) -> np.ndarray:
        m, n = self.U.shape[0], self.Vh.shape[0]
        k = len(self.S)
        return (self.U[:, :k] * self.S) @ self.Vh[:k, :] if k else np.zeros((m, n), complex)


def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ContractViolation(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ContractViolation(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} has non-finite entries")
    return arr


def _first_nonzero_phase(v: np.ndarray) -> complex:
    idx = np.flatnonzero(np.abs(v) > _PHASE_TOL)
    if idx.size == 0:
        return 1.0 + 0j
    z = v[idx[0]]
    return z / abs(z)


def svd(a) -> SvdFactors:
    """Full SVD with descending singular values.

    Each left singular vector is rotated so its first nonzero entry is real
    and nonnegative; the matching right singular vector absorbs the
    conjugate phase, so ``U @ diag(S) @ Vh`` is unchanged. Vectors outside
    the paired range (``i >= min(m, n)``) are normalized on their own.
    """
    A = as_cmatrix(a)
    try:
        U, S, Vh = np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("svd", A.shape, exc) from exc
    U = U.copy()
    Vh = Vh.copy()
    k = len(S)
    for i in range(k):
        ph = _first_nonzero_phase(U[:, i])
        U[:, i] *= np.conj(ph)
        Vh[i, :] *= ph
    for i in range(k, U.shape[1]):
        U[:, i] *= np.conj(_first_nonzero_phase(U[:, i]))
    for i in range(k, Vh.shape[0]):
        # rows of Vh are conjugated right vectors
        Vh[i, :] *= _first_nonzero_phase(Vh[i, :])
    return SvdFactors(U, S, Vh)


def is_hermitian(a: np.ndarray, tol: float = 1e-8) -> bool:
    scale = max(np.linalg.norm(a), 1.0)
    return np.linalg.norm(a - a.conj().T) <= tol * scale


def hermitian_eigendecomp(a, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvectors of a Hermitian matrix.

    Raises ContractViolation if ``a`` is not square or deviates from
    Hermitian by more than ``tol`` (relative Frobenius).
    """
    A = as_cmatrix(a)
    if A.shape[0] != A.shape[1]:
        raise ContractViolation(f"expected a square matrix, got {A.shape}")
    if not is_hermitian(A, tol):
        raise ContractViolation("matrix is not Hermitian within tolerance")
    A = 0.5 * (A + A.conj().T)
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("eigh", A.shape, exc) from exc
    return w[::-1].copy(), V[:, ::-1].copy()


def fro_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))

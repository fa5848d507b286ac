"""Dense complex-matrix kernel.

Everything here is a pure function on small numpy arrays: Kronecker
products, partial traces, Hermitian spectral calculus, PSD square roots,
the self-adjoint polar decomposition and the trace norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, NotHermitianError, NotPSDError, ValidationError

HERMITIAN_TOL = 1e-10
PSD_CLIP = 1e-12


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array (a copy is not forced)."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def as_square(m, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(m, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {arr.shape}")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    """Return ``arr`` marked read-only."""
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HermitianCheck:
    max_asymmetry: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_asymmetry <= self.tolerance

    def __bool__(self) -> bool:
        return self.passed


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> HermitianCheck:
    """Largest entrywise deviation from Hermiticity against ``tol * max(1, ||h||_F)``."""
    h = as_square(h)
    asym = float(np.max(np.abs(h - h.conj().T)))
    scale = max(1.0, float(np.linalg.norm(h)))
    return HermitianCheck(max_asymmetry=asym, tolerance=tol * scale)


def require_hermitian(h, name: str = "matrix", tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = as_square(h, name)
    chk = check_hermitian(h, tol)
    if not chk:
        raise NotHermitianError(
            f"{name} is not Hermitian: max |H - H^dagger| = {chk.max_asymmetry:.3e} "
            f"> {chk.tolerance:.3e}"
        )
    return h


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def tensor(a, b) -> np.ndarray:
    """Kronecker product, block ``(i, k), (j, l) -> a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def partial_trace(m, dim_first: int, dim_second: int, which: str = "second") -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``which`` names the factor that is traced *out*; the reduced operator on
    the other factor is returned.
    """
    m = as_square(m)
    if m.shape[0] != dim_first * dim_second:
        raise DimensionMismatchError(
            f"operator of size {m.shape[0]} is not on a {dim_first}x{dim_second} product space"
        )
    t = m.reshape(dim_first, dim_second, dim_first, dim_second)
    if which == "second":
        return np.einsum("ikjk->ij", t)
    if which == "first":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"which must be 'first' or 'second', got {which!r}")


def eig_hermitian(h) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvector columns of a Hermitian matrix."""
    h = require_hermitian(h)
    w, v = np.linalg.eigh(h)
    return w, v


def sqrt_psd(h) -> np.ndarray:
    w, v = eig_hermitian(h)
    if w.size and w[0] < -PSD_CLIP:
        raise NotPSDError(f"matrix has eigenvalue {w[0]:.3e} < -{PSD_CLIP:g}")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (v * root) @ dagger(v)


def polar_selfadjoint(h, kernel_tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Self-adjoint unitary ``w`` and ``|h|`` with ``w @ h == |h|``.

    ``w`` is the sign function of ``h``; eigenvalues with magnitude at most
    ``kernel_tol * max(1, max|lambda|)`` count as kernel, where ``w`` acts as
    the identity.
    """
    w_vals, v = eig_hermitian(h)
    cutoff = kernel_tol * max(1.0, float(np.max(np.abs(w_vals))))
    signs = np.where(w_vals < -cutoff, -1.0, 1.0)
    absvals = np.where(np.abs(w_vals) <= cutoff, 0.0, np.abs(w_vals))
    sign_op = (v * signs) @ dagger(v)
    abs_op = (v * absvals) @ dagger(v)
    return sign_op, abs_op


def trace_norm(m) -> float:
    """Sum of singular values; uses the eigenvalues directly for Hermitian input."""
    m = as_square(m)
    if check_hermitian(m):
        return float(np.sum(np.abs(np.linalg.eigvalsh(m))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def commutator(a, b) -> np.ndarray:
    a = as_square(a, "a")
    b = as_square(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"commutator of {a.shape} and {b.shape} matrices")
    return a @ b - b @ a


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = as_square(u)
    return bool(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])) <= tol * max(1.0, np.sqrt(u.shape[0])))

"""Dense symmetric eigendecomposition, spectral norm, sample covariance.

Matrices are plain float64 numpy arrays. The eigensolver delegates to
LAPACK (``numpy.linalg.eigvalsh``); results are checked against the trace
and Frobenius identities when ``check=True``.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray


def sample_covariance(X: NDArray) -> NDArray:
    """Return W = (1/m) X X^T for a p-by-m data matrix X.

    The product is explicitly symmetrized to remove accumulated rounding.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {X.shape}")
    m = X.shape[1]
    if m < 1:
        raise ValueError("need at least one column")
    W = (X @ X.T) / m
    return (W + W.T) / 2.0


def eigvalsh(S: NDArray, *, check: bool = False) -> NDArray:
    """Eigenvalues of a symmetric matrix, sorted ascending.

    The input is symmetrized as (S + S^T)/2 before the solve. With
    ``check=True`` the trace and Frobenius identities are asserted to
    within p * 1e-10 * max|S|.
    """
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("matrix has non-finite entries")
    Ssym = (S + S.T) / 2.0
    try:
        vals = np.linalg.eigvalsh(Ssym)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed to converge: {exc}") from exc
    vals = np.sort(vals)
    if check:
        p = S.shape[0]
        scale = max(np.abs(Ssym).max(), 1.0)
        tol = p * 1e-10 * scale * max(scale, 1.0)
        if abs(vals.sum() - np.trace(Ssym)) > tol:
            raise AssertionError("trace identity violated by eigensolver")
        if abs((vals**2).sum() - (Ssym**2).sum()) > tol * scale:
            raise AssertionError("Frobenius identity violated by eigensolver")
    return vals


def spectral_norm(A: NDArray) -> float:
    """Largest singular value of A (operator 2-norm)."""
    A = np.asarray(A, dtype=np.float64)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if A.size == 0 or not A.any():
        return 0.0
    # Gram route keeps everything on the symmetric solver; accurate to
    # well below the 1e-8 relative requirement at these sizes.
    if A.shape[0] <= A.shape[1]:
        G = A @ A.T
    else:
        G = A.T @ A
    top = eigvalsh(G)[-1]
    return float(np.sqrt(max(top, 0.0)))

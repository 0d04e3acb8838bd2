"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays. Qubit ordering is big-endian: qubit 0 is
the most significant bit of a basis index.
"""
from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import NotHermitian

HERM_TOL = 1e-9
RESIDUAL_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def tensor(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors), left to right."""
    return reduce(np.kron, ops)


def ket(bits: str | tuple[int, ...]) -> np.ndarray:
    """Computational basis vector for a bit string such as ``"01"``."""
    bits = [int(b) for b in bits]
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(map(str, bits)) or "0", 2)] = 1.0
    return v


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermiticity_error(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def _check_hermitian(h, tol: float) -> np.ndarray:
    h = as_matrix(h)
    err = hermiticity_error(h)
    if err > tol:
        raise NotHermitian(f"matrix is not Hermitian (max |H - H^dag| = {err:.3e} > {tol:.1e})")
    return 0.5 * (h + h.conj().T)


def jacobi_eigh(h, tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Each step zeroes one off-diagonal pair with a complex Givens rotation;
    sweeps repeat until the off-diagonal Frobenius norm falls below
    ``tol * ||h||_F``. Returns ``(eigenvalues, eigenvectors)`` in ascending
    order, like ``numpy.linalg.eigh``.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    q = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a) or 1.0
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                mag = abs(apr)
                if mag <= 1e-300:
                    continue
                phase = apr / mag
                theta = 0.5 * np.arctan2(2.0 * mag, a[r, r].real - a[p, p].real)
                c, s = np.cos(theta), np.sin(theta)
                # phase fix diag(1, e^{-i phi}) followed by a real Givens rotation
                j = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                a[:, [p, r]] = a[:, [p, r]] @ j
                a[[p, r], :] = j.conj().T @ a[[p, r], :]
                a[p, r] = a[r, p] = 0.0
                q[:, [p, r]] = q[:, [p, r]] @ j
    w = np.real(np.diag(a))
    order = np.argsort(w)
    return w[order], q[:, order]


def herm_eig(h, tol: float = HERM_TOL, method: str = "lapack"):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    ``method="jacobi"`` uses the in-package cyclic Jacobi solver; the default
    defers to LAPACK through ``numpy.linalg.eigh``.
    """
    h = _check_hermitian(h, tol)
    if method == "jacobi":
        w, v = jacobi_eigh(h)
    elif method == "lapack":
        w, v = np.linalg.eigh(h)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return w[::-1].copy(), v[:, ::-1].copy()


def eigvalsh(h, tol: float = HERM_TOL) -> np.ndarray:
    """Eigenvalues (descending) of a Hermitian matrix."""
    return np.linalg.eigvalsh(_check_hermitian(h, tol))[::-1]


def trace_norm(a, tol: float = HERM_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(eigvalsh(a, tol))))


def is_psd(h, tol: float = HERM_TOL) -> bool:
    w = eigvalsh(h, tol)
    return bool(w.size == 0 or w[-1] >= -tol)


def is_unitary(u, tol: float = RESIDUAL_TOL) -> bool:
    u = as_matrix(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def fidelity(a, b) -> float:
    """Overlap |<a|b>|^2 of two normalized vectors."""
    return float(abs(np.vdot(a, b)) ** 2)


def equal_up_to_phase(a, b, tol: float = RESIDUAL_TOL) -> bool:
    return fidelity(normalize(a), normalize(b)) >= 1.0 - tol


def psd_sqrt_inv(g: np.ndarray, eps: float = 0.0) -> np.ndarray:
    """Inverse square root of a PSD matrix, regularized as ``g + eps*I``."""
    w, v = np.linalg.eigh(0.5 * (g + g.conj().T) + eps * np.eye(g.shape[0]))
    w = np.clip(w, eps if eps > 0 else np.finfo(float).tiny, None)
    return (v / np.sqrt(w)) @ v.conj().T

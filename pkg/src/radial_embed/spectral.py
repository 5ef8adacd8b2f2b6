"""Combinatorial Laplacian and the spectral starting layout."""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graphs import Graph, is_connected

__all__ = ["laplacian", "laplacian_eigenpairs", "spectral_init", "DENSE_MAX_N", "SpectralError"]

# dense eigh up to this many vertices, shift-invert Lanczos above
DENSE_MAX_N = 3000

_ZERO_TOL = 1e-10


class SpectralError(ValueError):
    pass


def laplacian(g: Graph) -> sp.csr_matrix:
    """``L = D - A`` as a symmetric CSR matrix."""
    u, v = g.edges[:, 0], g.edges[:, 1]
    rows = np.concatenate([u, v, np.arange(g.n)])
    cols = np.concatenate([v, u, np.arange(g.n)])
    vals = np.concatenate([-np.ones(2 * g.m), g.degrees.astype(float)])
    return sp.csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude entry positive; on ties within rounding, the first one
    mag = np.abs(vecs)
    idx = np.argmax(mag >= mag.max(axis=0) * (1 - 1e-9), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def _dense(L: sp.csr_matrix, d: int) -> tuple[np.ndarray, np.ndarray]:
    w, V = scipy.linalg.eigh(L.toarray(), subset_by_index=[0, min(d + 1, L.shape[0] - 1)])
    return w, V


def _sparse(L: sp.csr_matrix, d: int) -> tuple[np.ndarray, np.ndarray]:
    n = L.shape[0]
    k = min(d + 2, n - 1)
    v0 = np.cos(np.arange(n) * 0.7 + 0.3)
    # L - sigma*I is positive definite for sigma < 0, so the factorization is safe
    w, V = spla.eigsh(L.tocsc(), k=k, sigma=-1e-3, which="LM", v0=v0, tol=1e-12, ncv=min(n, max(4 * k, 40)))
    order = np.argsort(w)
    return w[order], V[:, order]


def laplacian_eigenpairs(g: Graph, d: int) -> tuple[np.ndarray, np.ndarray]:
    """The ``d`` smallest nonzero Laplacian eigenvalues and their eigenvectors.

    Returns ``(lam, V)`` with ``lam`` nondecreasing and ``V`` of shape
    ``(d, n)``, one unit-norm eigenvector per row, each orthogonal to the
    all-ones vector.  Within a repeated eigenvalue any orthonormal basis may
    come back.  Signs are fixed so each row's largest-magnitude entry is
    positive.
    """
    n = g.n
    if d < 1 or d >= n:
        raise SpectralError(f"need 1 <= d < n, got d={d}, n={n}")
    if not is_connected(g):
        raise SpectralError("graph is disconnected (zero eigenvalue has multiplicity > 1); take the largest component first")
    L = laplacian(g)
    w, V = _dense(L, d) if n <= DENSE_MAX_N else _sparse(L, d)
    keep = w > _ZERO_TOL
    w, V = w[keep][:d], V[:, keep][:, :d]
    if len(w) < d:
        raise SpectralError("eigensolver returned too few nonzero eigenpairs")
    V = V - V.mean(axis=0)
    V, _ = np.linalg.qr(V)
    # re-diagonalize inside the span so each column is an eigenvector again
    small = V.T @ (L @ V)
    mu, R = np.linalg.eigh((small + small.T) / 2)
    V = _fix_signs(V @ R)
    V /= np.linalg.norm(V, axis=0)
    resid = np.linalg.norm(L @ V - V * mu, axis=0)
    if np.any(resid > 1e-6):
        raise SpectralError(f"eigenpair residual too large: {resid.max():.3e}")
    return mu, V.T.copy()


def spectral_init(g: Graph, d: int, scale_by_inv_sqrt_lambda: bool = False) -> np.ndarray:
    """``d x n`` starting layout from :func:`laplacian_eigenpairs`.

    With ``scale_by_inv_sqrt_lambda`` each row is divided by ``sqrt(lambda)``.
    """
    lam, P = laplacian_eigenpairs(g, d)
    if scale_by_inv_sqrt_lambda:
        P /= np.sqrt(lam)[:, None]
    return P

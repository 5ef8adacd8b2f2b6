"""Reference embeddings that carry no refinement, used as negative controls."""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .graphs import Graph
from .layout import normalize
from .spectral import spectral_init

__all__ = ["laplacian_eigenmap", "spectral_only_positions"]


def _neighbourhood_knn_affinity(g: Graph, k: int) -> np.ndarray:
    # squared distance between adjacency rows = size of the neighbourhood symmetric difference
    A = sp.csr_matrix((np.ones(2 * g.m), (np.r_[g.edges[:, 0], g.edges[:, 1]], np.r_[g.edges[:, 1], g.edges[:, 0]])), shape=(g.n, g.n))
    common = (A @ A).toarray()
    deg = g.degrees.astype(float)
    dist = deg[:, None] + deg[None, :] - 2.0 * common
    np.fill_diagonal(dist, -1.0)  # each point is its own first neighbour
    # stable sort: ties resolve to the smallest vertex id
    nn = np.argsort(dist, axis=1, kind="stable")[:, :k]
    W = np.zeros((g.n, g.n))
    W[np.repeat(np.arange(g.n), k), nn.ravel()] = 1.0
    return 0.5 * (W + W.T)


def laplacian_eigenmap(g: Graph, d: int = 2, n_neighbors: int | None = None) -> np.ndarray:
    """Classic Laplacian eigenmap of the graph's adjacency rows.

    Each vertex is treated as a point whose coordinates are its adjacency
    row.  A symmetrized ``n_neighbors``-nearest-neighbour graph (default
    ``max(n // 10, 1)``, self included) over those points is built, and the
    embedding is the generalized eigenproblem ``L y = lam D y`` on it,
    skipping the constant solution.  Returns a ``(d, n)`` array.

    Dense in ``n``; meant for benchmark-sized graphs.
    """
    if not 1 <= d < g.n - 1:
        raise ValueError(f"need 1 <= d < n-1, got d={d}, n={g.n}")
    k = n_neighbors if n_neighbors is not None else max(g.n // 10, 1)
    k = min(k, g.n)
    W = _neighbourhood_knn_affinity(g, k)
    deg = W.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(deg)
    L_sym = np.eye(g.n) - inv_sqrt[:, None] * W * inv_sqrt[None, :]
    _, V = scipy.linalg.eigh(L_sym, subset_by_index=[0, d])
    Y = (V * inv_sqrt[:, None])[:, 1:d + 1]
    idx = np.argmax(np.abs(Y), axis=0)
    Y *= np.sign(Y[idx, np.arange(d)])
    return Y.T.copy()


def spectral_only_positions(g: Graph, d: int, eps: float) -> np.ndarray:
    """The force layout's own normalized starting point, with zero refinement steps."""
    return normalize(spectral_init(g, d), eps)
